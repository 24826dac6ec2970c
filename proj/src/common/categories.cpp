#include "sarena/common/categories.hpp"

#include <algorithm>

namespace sarena {

const std::vector<std::string>& arena_categories() {
  static const std::vector<std::string> kCategories = {
      "Academic & Research",        "Corporate Finance & FP&A", "Creative & Generative",
      "Operations & Supply Chain", "Professional Finance",     "SMB & Personal"};
  return kCategories;
}

bool is_arena_category(const std::string& label) {
  const auto& all = arena_categories();
  return std::find(all.begin(), all.end(), label) != all.end();
}

std::vector<std::string> expand_category(const std::string& filter) {
  if (filter == "Finance") return {"Professional Finance", "Corporate Finance & FP&A"};
  return {filter};
}

}  // namespace sarena
