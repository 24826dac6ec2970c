#include "sarena/categorizer/categorizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>

#include "json.hpp"
#include "sarena/common/categories.hpp"
#include "sarena/common/feature_table.hpp"
#include "sarena/common/http.hpp"

namespace sarena::categorize {
namespace {

Eigen::VectorXf to_unit(const std::vector<float>& v, const std::string& what) {
  Eigen::VectorXf x = Eigen::Map<const Eigen::VectorXf>(v.data(), static_cast<Eigen::Index>(v.size()));
  float norm = x.norm();
  if (!(norm > 0) || !std::isfinite(norm))
    throw CategoryError(CategoryError::Kind::ZeroVector, what + " has no direction");
  return x / norm;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t salt) {
  std::uint64_t h = 1469598103934665603ULL ^ salt;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

CategoryIndex build_index(const std::vector<SeedPrompt>& seeds, int k) {
  if (seeds.empty()) throw CategoryError(CategoryError::Kind::EmptySeedSet, "no seed prompts");
  if (k < 1 || static_cast<std::size_t>(k) > seeds.size())
    throw CategoryError(CategoryError::Kind::InvalidK,
                        "k must be between 1 and the seed count (" + std::to_string(seeds.size()) + ")");
  const std::size_t dim = seeds.front().embedding.size();
  CategoryIndex index;
  index.k_ = k;
  index.rows_.resize(static_cast<Eigen::Index>(seeds.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& s = seeds[i];
    if (s.embedding.size() != dim)
      throw CategoryError(CategoryError::Kind::DimensionMismatch,
                          "seed " + std::to_string(i) + " has dimension " +
                              std::to_string(s.embedding.size()) + ", expected " + std::to_string(dim));
    if (!is_arena_category(s.category))
      throw CategoryError(CategoryError::Kind::UnknownCategory,
                          "seed " + std::to_string(i) + " has unknown category \"" + s.category + "\"");
    index.rows_.row(static_cast<Eigen::Index>(i)) = to_unit(s.embedding, "seed " + std::to_string(i));
    index.labels_.push_back(s.category);
  }
  return index;
}

Classification classify(const CategoryIndex& index, const std::vector<float>& embedding) {
  if (static_cast<int>(embedding.size()) != index.dimension())
    throw CategoryError(CategoryError::Kind::DimensionMismatch,
                        "query has dimension " + std::to_string(embedding.size()) + ", index has " +
                            std::to_string(index.dimension()));
  Eigen::VectorXf sims = index.rows() * to_unit(embedding, "query");
  std::vector<std::size_t> order(index.size());
  std::iota(order.begin(), order.end(), 0);
  const auto k = static_cast<std::size_t>(index.k());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      float sa = sims(static_cast<Eigen::Index>(a));
                      float sb = sims(static_cast<Eigen::Index>(b));
                      return sa != sb ? sa > sb : a < b;
                    });
  Classification out;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t s = order[i];
    out.neighbors.push_back({s, index.labels()[s], sims(static_cast<Eigen::Index>(s))});
    ++out.votes[index.labels()[s]];
  }
  int best = 0;
  for (const auto& [label, n] : out.votes) best = std::max(best, n);
  // Walking nearest-first picks the closest label among the tied leaders.
  for (const auto& nb : out.neighbors) {
    if (out.votes[nb.category] == best) {
      out.category = nb.category;
      break;
    }
  }
  return out;
}

std::vector<float> HashingEmbedder::embed(const std::string& text) {
  std::vector<float> v(static_cast<std::size_t>(dimension_), 0.0f);
  std::string norm;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80)  // bytes of multi-byte UTF-8 letters
      norm += static_cast<char>(std::tolower(c));
    else if (!norm.empty() && norm.back() != ' ')
      norm += ' ';
  }
  if (!norm.empty() && norm.back() == ' ') norm.pop_back();
  auto add = [&](std::string_view token, float weight) {
    std::uint64_t h = fnv1a(token, 0);
    std::size_t bucket = h % static_cast<std::uint64_t>(dimension_);
    v[bucket] += (fnv1a(token, 0x9e3779b97f4a7c15ULL) & 1) ? weight : -weight;
  };
  std::string padded = " " + norm + " ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::string_view gram(padded.data() + i, 3);
    if (gram.find_first_not_of(' ') != std::string_view::npos) add(gram, 1.0f);
  }
  std::size_t start = 0;
  while (start < norm.size()) {
    start = norm.find_first_not_of(' ', start);
    if (start == std::string::npos) break;
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    add("w:" + norm.substr(start, end - start), 2.0f);
    start = end;
  }
  return v;
}

std::vector<float> HttpEmbedder::embed(const std::string& text) {
  nlohmann::json body = {{"model", config_.model}, {"input", text}};
  std::map<std::string, std::string> headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key) throw std::runtime_error("environment variable " + config_.api_key_env + " is not set");
    headers["Authorization"] = std::string("Bearer ") + key;
  }
  auto res = http_post_json(config_.endpoint, body.dump(), headers, config_.timeout);
  if (!res.ok())
    throw std::runtime_error("embedding request failed: " +
                             (res.error.empty() ? "HTTP " + std::to_string(res.status) : res.error));
  try {
    auto j = nlohmann::json::parse(res.body);
    return j.at("data").at(0).at("embedding").get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("unexpected embedding response: ") + e.what());
  }
}

std::vector<SeedPrompt> read_seeds_jsonl(std::istream& in, EmbeddingProvider* provider) {
  std::vector<SeedPrompt> seeds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SeedPrompt s;
    try {
      auto j = nlohmann::json::parse(line);
      s.text = j.at("text").get<std::string>();
      s.category = j.at("category").get<std::string>();
      if (j.contains("embedding")) s.embedding = j.at("embedding").get<std::vector<float>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("seed line " + std::to_string(line_no) + ": " + e.what());
    }
    if (s.embedding.empty()) {
      if (!provider)
        throw InputError("seed line " + std::to_string(line_no) + " has no embedding and no provider is set");
      s.embedding = provider->embed(s.text);
    }
    seeds.push_back(std::move(s));
  }
  return seeds;
}

}  // namespace sarena::categorize
