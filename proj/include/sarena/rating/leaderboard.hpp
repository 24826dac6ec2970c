#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sarena/rating/bradley_terry.hpp"

namespace sarena::rating {

inline const double kEloScale = 400.0 / std::log(10.0);

struct LeaderboardRow {
  std::string model;
  double elo = 0;
  std::size_t n_votes = 0;
  int rank = 0;  // 0 for unranked rows
  std::optional<double> delta_elo;
  std::optional<int> delta_rank;
};

struct Leaderboard {
  std::vector<LeaderboardRow> ranked;    // rank 1..K by descending elo, ties by ID
  std::vector<LeaderboardRow> unranked;  // below min_votes, same ordering
  std::string anchor;
};

struct EloOptions {
  double anchor_rating = 1000;
  double scale = kEloScale;
  std::size_t min_votes = 50;
};

Leaderboard to_elo(const RatingFit& fit, const EloOptions& options = {});

struct FitComparison {
  std::string model;
  double base_elo = 0;
  double adjusted_elo = 0;
  int base_rank = 0;
  int adjusted_rank = 0;
  double delta_elo = 0;  // adjusted - base
  int delta_rank = 0;    // base rank - adjusted rank; positive moved up
};

// Ranks are taken over all models regardless of vote count.
std::vector<FitComparison> compare_fits(const RatingFit& base, const RatingFit& adjusted,
                                        const EloOptions& options = {});

struct SignificanceRow {
  std::string feature;
  double coefficient = 0;
  double std_error = 0;
  double p_value = 1;
  bool significant = false;
};

std::vector<SignificanceRow> significance_table(const RatingFit& fit, double alpha = 0.05);

void write_leaderboard_csv(std::ostream& out, const Leaderboard& board);
void write_comparison_csv(std::ostream& out, const std::vector<FitComparison>& rows);
void write_significance_csv(std::ostream& out, const std::vector<SignificanceRow>& rows);
std::string fit_metadata_json(const RatingFit& fit, const EloOptions& options = {});
std::string leaderboard_json(const Leaderboard& board);

}  // namespace sarena::rating
