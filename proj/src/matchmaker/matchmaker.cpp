#include "sarena/matchmaker/matchmaker.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace sarena::match {
namespace {

std::size_t count_of(const MatchRequest& r, const std::string& m) {
  auto it = r.vote_counts.find(m);
  return it == r.vote_counts.end() ? 0 : it->second;
}

}  // namespace

bool ModelPair::same_models(const ModelPair& o) const {
  return (model_a == o.model_a && model_b == o.model_b) ||
         (model_a == o.model_b && model_b == o.model_a);
}

double pair_weight(std::size_t votes_a, std::size_t votes_b) {
  return 1.0 / std::sqrt((static_cast<double>(votes_a) + 1) * (static_cast<double>(votes_b) + 1));
}

std::vector<ModelPair> ranked_pairs(const MatchRequest& request) {
  if (request.n_pairs < 0) throw MatchError("n_pairs must be non-negative");
  std::set<std::string> unique(request.models.begin(), request.models.end());
  if (unique.size() != request.models.size()) throw MatchError("duplicate model in request");
  if (request.n_pairs >= 1 && request.models.size() < 2)
    throw MatchError("at least two eligible models are needed");

  struct Entry {
    ModelPair pair;
    double product;
  };
  std::vector<Entry> entries;
  const auto& m = request.models;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      std::size_t vi = count_of(request, m[i]), vj = count_of(request, m[j]);
      double product = (static_cast<double>(vi) + 1) * (static_cast<double>(vj) + 1);
      entries.push_back({{m[i], m[j], pair_weight(vi, vj)}, product});
    }
  }

  std::mt19937_64 rng(request.seed);
  std::shuffle(entries.begin(), entries.end(), rng);
  std::bernoulli_distribution flip(0.5);
  for (auto& e : entries)
    if (flip(rng)) std::swap(e.pair.model_a, e.pair.model_b);
  // Sorting on the exact product keeps equal weights equal.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.product < b.product; });

  std::vector<ModelPair> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.pair));
  return out;
}

MatchSet select_matches(const MatchRequest& request, const ValidityOracle& valid) {
  MatchSet set;
  const std::size_t want = static_cast<std::size_t>(request.n_pairs);
  for (auto& pair : ranked_pairs(request)) {
    if (set.pairs.size() >= want) break;
    if (valid(pair))
      set.pairs.push_back(std::move(pair));
    else
      set.discarded.push_back(std::move(pair));
  }
  set.insufficient = set.pairs.size() < want;
  return set;
}

}  // namespace sarena::match
