#include "sarena/study/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "sarena/common/feature_table.hpp"

namespace sarena::study {
namespace {

double share(std::size_t part, std::size_t whole) {
  return whole ? static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

ScoreStats score_stats(const std::vector<int>& values) {
  ScoreStats s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  std::size_t ge4 = 0, ge3 = 0, le2 = 0;
  for (int v : values) {
    ss += (v - s.mean) * (v - s.mean);
    ge4 += v >= 4;
    ge3 += v >= 3;
    le2 += v <= 2;
  }
  s.stddev = std::sqrt(ss / n);
  s.pct_ge4 = share(ge4, values.size());
  s.pct_ge3 = share(ge3, values.size());
  s.pct_le2 = share(le2, values.size());
  return s;
}

nlohmann::ordered_json stats_json(const ScoreStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"pct_ge4", s.pct_ge4}, {"pct_ge3", s.pct_ge3},
          {"pct_le2", s.pct_le2}};
}

}  // namespace

const std::array<std::string, kTagCount>& tag_columns() {
  static const std::array<std::string, kTagCount> kColumns = {
      "non_functional", "spec_noncompliance", "integrity",   "numerical_computation",
      "interpretability", "shallow",           "presentation"};
  return kColumns;
}

TaggedLoss make_tagged_loss(std::string battle_id, std::string loser, const std::vector<int>& tags,
                            std::string rationale) {
  if (tags.empty()) throw InputError("battle " + battle_id + ": empty tag list");
  TaggedLoss t{std::move(battle_id), std::move(loser), {}, std::move(rationale)};
  for (int tag : tags) {
    if (tag < 0 || tag > kTagCount)
      throw InputError("battle " + t.battle_id + ": tag " + std::to_string(tag) + " outside 0..7");
    t.tags.insert(tag == 0 ? 1 : tag);
  }
  return t;
}

std::vector<TaggedLoss> read_tags_jsonl(std::istream& in) {
  std::vector<TaggedLoss> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back(make_tagged_loss(j.at("battle_id").get<std::string>(), j.at("loser").get<std::string>(),
                                     j.at("tags").get<std::vector<int>>(), j.value("rationale", "")));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("tags line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("tags line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

FailureTable aggregate_failure_tags(const std::vector<TaggedLoss>& losses,
                                    const std::map<std::string, double>& win_rates) {
  std::map<std::string, std::pair<std::size_t, std::array<std::size_t, kTagCount>>> counts;
  std::size_t total_tags = 0;
  for (const auto& l : losses) {
    auto& [n, per_tag] = counts[l.loser];
    ++n;
    for (int t : l.tags) ++per_tag[static_cast<std::size_t>(t - 1)];
    total_tags += l.tags.size();
  }
  FailureTable table;
  for (const auto& [model, c] : counts) {
    FailureRow row;
    row.model = model;
    row.losses = c.first;
    for (std::size_t t = 0; t < kTagCount; ++t) row.rate[t] = share(c.second[t], c.first);
    if (auto it = win_rates.find(model); it != win_rates.end()) row.win_rate = it->second;
    table.rows.push_back(row);
  }
  if (!losses.empty()) table.mean_tags_per_loss = share(total_tags, losses.size());
  return table;
}

void write_failure_csv(std::ostream& out, const FailureTable& table) {
  out << "model,win_rate,losses";
  for (const auto& c : tag_columns()) out << ',' << c;
  out << '\n';
  for (const auto& r : table.rows) {
    out << csv_escape(r.model) << ',' << (r.win_rate ? format_double(*r.win_rate) : "") << ',' << r.losses;
    for (double v : r.rate) out << ',' << format_double(v);
    out << '\n';
  }
}

const std::array<std::string, kDimensionCount>& dimension_names() {
  static const std::array<std::string, kDimensionCount> kNames = {
      "errors_accuracy",        "formula_conventions",  "color_formatting",
      "structure_organization", "modeling_conventions", "purpose_utility"};
  return kNames;
}

int expert_overall(const std::array<int, kDimensionCount>& scores) {
  int sum = 0;
  for (int s : scores) {
    if (s < 1 || s > 5)
      throw StudyError(StudyError::Kind::OutOfRange, "score " + std::to_string(s) + " outside 1..5");
    sum += s;
  }
  // floor(sum / 6 + 1/2) in integers.
  return (2 * sum + kDimensionCount) / (2 * kDimensionCount);
}

ExpertEvaluation make_evaluation(std::string spreadsheet_id, std::string rater_id,
                                 const std::array<int, kDimensionCount>& scores) {
  return {std::move(spreadsheet_id), std::move(rater_id), scores, expert_overall(scores)};
}

std::vector<ExpertEvaluation> read_evaluations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int sid = column("spreadsheet_id"), rid = column("rater_id"), oid = column("overall");
  std::array<int, kDimensionCount> dims{};
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    dims[d] = column(dimension_names()[d]);
    if (dims[d] < 0) throw InputError("evaluations CSV lacks column " + dimension_names()[d]);
  }
  if (sid < 0 || rid < 0) throw InputError("evaluations CSV needs spreadsheet_id and rater_id columns");

  std::vector<ExpertEvaluation> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw InputError("evaluations line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    std::array<int, kDimensionCount> scores{};
    try {
      for (std::size_t d = 0; d < kDimensionCount; ++d) {
        std::size_t used = 0;
        const std::string& cell = f[static_cast<std::size_t>(dims[d])];
        scores[d] = std::stoi(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      }
      auto e = make_evaluation(f[static_cast<std::size_t>(sid)], f[static_cast<std::size_t>(rid)], scores);
      if (oid >= 0 && !f[static_cast<std::size_t>(oid)].empty() &&
          std::stoi(f[static_cast<std::size_t>(oid)]) != e.overall)
        throw InputError("overall " + f[static_cast<std::size_t>(oid)] + " disagrees with computed " +
                         std::to_string(e.overall));
      out.push_back(std::move(e));
    } catch (const std::logic_error& e) {
      throw InputError("evaluations line " + std::to_string(line_no) + ": not an integer score");
    } catch (const StudyError& e) {
      throw InputError("evaluations line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("evaluations line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

DimensionStats dimension_stats(const std::vector<ExpertEvaluation>& evals) {
  if (evals.empty()) throw StudyError(StudyError::Kind::EmptyInput, "no evaluations");
  DimensionStats s;
  s.n = evals.size();
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    std::vector<int> v;
    for (const auto& e : evals) v.push_back(e.scores[d]);
    s.dimensions[d] = score_stats(v);
  }
  std::vector<int> overall;
  for (const auto& e : evals) overall.push_back(e.overall);
  s.overall = score_stats(overall);
  return s;
}

std::string dimension_stats_json(const DimensionStats& stats) {
  nlohmann::ordered_json j;
  j["n"] = stats.n;
  j["overall"] = stats_json(stats.overall);
  for (std::size_t d = 0; d < kDimensionCount; ++d)
    j["dimensions"][dimension_names()[d]] = stats_json(stats.dimensions[d]);
  return j.dump(2);
}

double krippendorff_alpha(const RatingMatrix& ratings) {
  constexpr int kLevels = 5;
  std::size_t items = 0;
  for (const auto& row : ratings) items = std::max(items, row.size());

  // Coincidence matrix over the values 1..5.
  double o[kLevels][kLevels] = {};
  std::size_t pairable_items = 0;
  for (std::size_t u = 0; u < items; ++u) {
    std::vector<int> values;
    for (const auto& row : ratings) {
      if (u >= row.size() || !row[u]) continue;
      int v = *row[u];
      if (v < 1 || v > kLevels)
        throw StudyError(StudyError::Kind::OutOfRange, "rating " + std::to_string(v) + " outside 1..5");
      values.push_back(v);
    }
    if (values.size() < 2) continue;
    ++pairable_items;
    const double w = 1.0 / static_cast<double>(values.size() - 1);
    for (std::size_t i = 0; i < values.size(); ++i)
      for (std::size_t j = 0; j < values.size(); ++j)
        if (i != j) o[values[i] - 1][values[j] - 1] += w;
  }
  if (pairable_items < 2)
    throw StudyError(StudyError::Kind::InsufficientData, "need at least two items rated twice");

  double n_c[kLevels] = {};
  double n = 0;
  for (int c = 0; c < kLevels; ++c) {
    for (int k = 0; k < kLevels; ++k) n_c[c] += o[c][k];
    n += n_c[c];
  }
  auto delta2 = [&](int c, int k) {
    if (c == k) return 0.0;
    int lo = std::min(c, k), hi = std::max(c, k);
    double sum = 0;
    for (int g = lo; g <= hi; ++g) sum += n_c[g];
    double d = sum - (n_c[c] + n_c[k]) / 2;
    return d * d;
  };
  double observed = 0, expected = 0;
  for (int c = 0; c < kLevels; ++c) {
    for (int k = 0; k < kLevels; ++k) {
      double d = delta2(c, k);
      observed += o[c][k] * d;
      expected += n_c[c] * n_c[k] * d;
    }
  }
  if (expected == 0)
    throw StudyError(StudyError::Kind::InsufficientData, "all pairable ratings share one value");
  return 1.0 - (n - 1) * observed / expected;
}

std::map<std::string, double> alpha_by_dimension(const std::vector<ExpertEvaluation>& evals) {
  std::map<std::string, std::size_t> raters, items;
  for (const auto& e : evals) {
    raters.emplace(e.rater_id, raters.size());
    items.emplace(e.spreadsheet_id, items.size());
  }
  std::map<std::string, double> out;
  for (int d = 0; d <= kDimensionCount; ++d) {
    RatingMatrix m(raters.size(), std::vector<std::optional<int>>(items.size()));
    for (const auto& e : evals)
      m[raters[e.rater_id]][items[e.spreadsheet_id]] =
          d < kDimensionCount ? e.scores[static_cast<std::size_t>(d)] : e.overall;
    try {
      out[d < kDimensionCount ? dimension_names()[static_cast<std::size_t>(d)] : "overall"] =
          krippendorff_alpha(m);
    } catch (const StudyError&) {
      // Dimensions without pairable variation have no alpha.
    }
  }
  return out;
}

Agreement arena_agreement(const std::vector<ArenaBattle>& battles,
                          const std::vector<ExpertEvaluation>& evals) {
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& e : evals) {
    sums[e.spreadsheet_id].first += e.overall;
    ++sums[e.spreadsheet_id].second;
  }
  auto mean_of = [&](const std::string& id, const std::string& battle) {
    auto it = sums.find(id);
    if (it == sums.end())
      throw StudyError(StudyError::Kind::MissingEvaluation,
                       "battle " + battle + ": spreadsheet " + id + " has no expert evaluation");
    return it->second.first / it->second.second;
  };
  Agreement a;
  for (const auto& b : battles) {
    double ma = mean_of(b.spreadsheet_a, b.battle_id);
    double mb = mean_of(b.spreadsheet_b, b.battle_id);
    ++a.battles;
    if (ma == mb)
      ++a.tie;
    else if ((ma > mb) == (b.winner == Side::A))
      ++a.agree;
    else
      ++a.disagree;
  }
  a.agree_rate = share(a.agree, a.battles);
  a.disagree_rate = share(a.disagree, a.battles);
  a.tie_rate = share(a.tie, a.battles);
  if (a.agree + a.disagree) a.decisive_agree_rate = share(a.agree, a.agree + a.disagree);
  return a;
}

std::string agreement_json(const Agreement& a) {
  nlohmann::ordered_json j;
  j["battles"] = a.battles;
  j["agree"] = a.agree;
  j["disagree"] = a.disagree;
  j["tie"] = a.tie;
  j["agree_rate"] = a.agree_rate;
  j["disagree_rate"] = a.disagree_rate;
  j["tie_rate"] = a.tie_rate;
  j["decisive_agree_rate"] = a.decisive_agree_rate ? nlohmann::ordered_json(*a.decisive_agree_rate) : nullptr;
  return j.dump(2);
}

}  // namespace sarena::study
