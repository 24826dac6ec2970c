#include "study_oracle.hpp"

#include <algorithm>
#include <map>

namespace oracle {

double alpha_by_pairs(const std::vector<std::vector<std::optional<int>>>& ratings) {
  std::size_t items = 0;
  for (const auto& r : ratings) items = std::max(items, r.size());
  std::vector<std::vector<int>> units;
  std::vector<int> pooled;
  for (std::size_t u = 0; u < items; ++u) {
    std::vector<int> values;
    for (const auto& r : ratings)
      if (u < r.size() && r[u]) values.push_back(*r[u]);
    if (values.size() < 2) continue;
    units.push_back(values);
    pooled.insert(pooled.end(), values.begin(), values.end());
  }
  std::map<int, double> freq;
  for (int v : pooled) freq[v] += 1;
  auto delta2 = [&](int c, int k) {
    if (c == k) return 0.0;
    double sum = 0;
    for (int g = std::min(c, k); g <= std::max(c, k); ++g) sum += freq.count(g) ? freq[g] : 0.0;
    double d = sum - (freq[c] + freq[k]) / 2;
    return d * d;
  };
  const double n = static_cast<double>(pooled.size());
  double d_o = 0;
  for (const auto& values : units) {
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = 0; j < values.size(); ++j)
        if (i != j) s += delta2(values[i], values[j]);
    d_o += s / static_cast<double>(values.size() - 1);
  }
  d_o /= n;
  double d_e = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < pooled.size(); ++j)
      if (i != j) d_e += delta2(pooled[i], pooled[j]);
  d_e /= n * (n - 1);
  return 1 - d_o / d_e;
}

}  // namespace oracle
