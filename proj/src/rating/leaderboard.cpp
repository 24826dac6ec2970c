#include "sarena/rating/leaderboard.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "sarena/common/feature_table.hpp"

namespace sarena::rating {
namespace {

std::vector<LeaderboardRow> sorted_rows(const RatingFit& fit, const EloOptions& o) {
  std::vector<LeaderboardRow> rows;
  const double anchor_theta = fit.theta.at(fit.anchor);
  for (const auto& m : fit.models) {
    LeaderboardRow r;
    r.model = m;
    r.elo = m == fit.anchor ? o.anchor_rating
                            : o.anchor_rating + o.scale * (fit.theta.at(m) - anchor_theta);
    auto it = fit.vote_counts.find(m);
    r.n_votes = it == fit.vote_counts.end() ? 0 : it->second;
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.elo != b.elo) return a.elo > b.elo;
    return a.model < b.model;
  });
  return rows;
}

}  // namespace

Leaderboard to_elo(const RatingFit& fit, const EloOptions& options) {
  Leaderboard board;
  board.anchor = fit.anchor;
  int rank = 0;
  for (auto& r : sorted_rows(fit, options)) {
    if (r.n_votes >= options.min_votes) {
      r.rank = ++rank;
      board.ranked.push_back(r);
    } else {
      board.unranked.push_back(r);
    }
  }
  return board;
}

std::vector<FitComparison> compare_fits(const RatingFit& base, const RatingFit& adjusted,
                                        const EloOptions& options) {
  if (base.models != adjusted.models)
    throw RatingError(RatingError::Kind::ModelSetMismatch, "fits cover different model sets");
  if (base.anchor != adjusted.anchor)
    throw RatingError(RatingError::Kind::ModelSetMismatch, "fits use different anchors");
  EloOptions all = options;
  all.min_votes = 0;
  auto a = to_elo(base, all).ranked;
  auto b = to_elo(adjusted, all).ranked;
  std::map<std::string, const LeaderboardRow*> by_model;
  for (const auto& r : b) by_model[r.model] = &r;
  std::vector<FitComparison> out;
  for (const auto& r : a) {
    const LeaderboardRow& adj = *by_model.at(r.model);
    FitComparison c;
    c.model = r.model;
    c.base_elo = r.elo;
    c.adjusted_elo = adj.elo;
    c.base_rank = r.rank;
    c.adjusted_rank = adj.rank;
    c.delta_elo = adj.elo - r.elo;
    c.delta_rank = r.rank - adj.rank;
    out.push_back(c);
  }
  return out;
}

std::vector<SignificanceRow> significance_table(const RatingFit& fit, double alpha) {
  std::vector<SignificanceRow> rows;
  for (const auto& c : fit.beta) {
    SignificanceRow r;
    r.feature = c.feature;
    r.coefficient = c.estimate;
    r.std_error = c.std_error;
    r.p_value = c.p_value;
    r.significant = !c.zero_variance && c.p_value < alpha;
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SignificanceRow& a, const SignificanceRow& b) {
    return a.p_value < b.p_value;
  });
  return rows;
}

void write_leaderboard_csv(std::ostream& out, const Leaderboard& board) {
  out << "rank,model,elo,n_votes\n";
  for (const auto& r : board.ranked)
    out << r.rank << ',' << csv_escape(r.model) << ',' << format_double(r.elo) << ',' << r.n_votes << '\n';
  for (const auto& r : board.unranked)
    out << ',' << csv_escape(r.model) << ',' << format_double(r.elo) << ',' << r.n_votes << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<FitComparison>& rows) {
  out << "model,baseline_elo,adjusted_elo,delta_elo,baseline_rank,adjusted_rank,delta_rank\n";
  for (const auto& r : rows) {
    out << csv_escape(r.model) << ',' << format_double(r.base_elo) << ','
        << format_double(r.adjusted_elo) << ',' << format_double(r.delta_elo) << ','
        << r.base_rank << ',' << r.adjusted_rank << ',' << r.delta_rank << '\n';
  }
}

void write_significance_csv(std::ostream& out, const std::vector<SignificanceRow>& rows) {
  out << "feature,coefficient,std_error,p_value,significant\n";
  for (const auto& r : rows) {
    out << csv_escape(r.feature) << ',' << format_double(r.coefficient) << ','
        << format_double(r.std_error) << ',' << format_double(r.p_value) << ','
        << (r.significant ? 1 : 0) << '\n';
  }
}

std::string fit_metadata_json(const RatingFit& fit, const EloOptions& options) {
  nlohmann::ordered_json j;
  j["anchor"] = fit.anchor;
  j["log_likelihood"] = fit.log_likelihood;
  j["n_votes_used"] = fit.n_votes_used;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["ridge"] = fit.config.ridge;
  j["tolerance"] = fit.config.tolerance;
  j["scale"] = options.scale;
  j["anchor_rating"] = options.anchor_rating;
  j["min_votes"] = options.min_votes;
  j["ties"] = fit.config.ties == TieMode::Exclude ? "exclude" : "half_win";
  j["mode"] = fit.has_features() ? std::string(covariate_mode_name(fit.config.covariates)) : "vanilla";
  j["warnings"] = fit.warnings;
  return j.dump(2);
}

std::string leaderboard_json(const Leaderboard& board) {
  auto row_json = [](const LeaderboardRow& r) {
    nlohmann::ordered_json j;
    if (r.rank) j["rank"] = r.rank;
    j["model"] = r.model;
    j["elo"] = r.elo;
    j["n_votes"] = r.n_votes;
    if (r.delta_elo) j["delta_elo"] = *r.delta_elo;
    if (r.delta_rank) j["delta_rank"] = *r.delta_rank;
    return j;
  };
  nlohmann::ordered_json j;
  j["anchor"] = board.anchor;
  j["ranked"] = nlohmann::ordered_json::array();
  for (const auto& r : board.ranked) j["ranked"].push_back(row_json(r));
  j["unranked"] = nlohmann::ordered_json::array();
  for (const auto& r : board.unranked) j["unranked"].push_back(row_json(r));
  return j.dump(2);
}

}  // namespace sarena::rating
