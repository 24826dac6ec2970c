#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarena::match {

struct MatchRequest {
  std::vector<std::string> models;  // eligible models
  std::map<std::string, std::size_t> vote_counts;  // missing entries count as 0
  int n_pairs = 4;
  std::uint64_t seed = 0;
};

struct ModelPair {
  std::string model_a;
  std::string model_b;
  double weight = 0;

  bool same_models(const ModelPair& other) const;
  bool operator==(const ModelPair&) const = default;
};

struct MatchSet {
  std::vector<ModelPair> pairs;
  std::vector<ModelPair> discarded;
  bool insufficient = false;  // fewer than n_pairs valid pairs were found
};

class MatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// w = ((V_a + 1)(V_b + 1))^(-1/2)
double pair_weight(std::size_t votes_a, std::size_t votes_b);

// Every unordered pair, highest weight first. A seeded shuffle runs before
// the stable sort, so it decides both the order among equal weights and
// which model sits on side A.
std::vector<ModelPair> ranked_pairs(const MatchRequest& request);

using ValidityOracle = std::function<bool(const ModelPair&)>;

MatchSet select_matches(const MatchRequest& request, const ValidityOracle& valid);

}  // namespace sarena::match
