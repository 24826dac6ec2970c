#pragma once

#include <string>
#include <vector>

namespace sarena {

// The six prompt categories of the arena.
const std::vector<std::string>& arena_categories();
bool is_arena_category(const std::string& label);

// "Finance" stands for both finance categories; other labels map to themselves.
std::vector<std::string> expand_category(const std::string& filter);

}  // namespace sarena
