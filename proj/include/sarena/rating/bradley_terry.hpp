#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sarena/common/categories.hpp"
#include "sarena/common/feature_table.hpp"
#include "sarena/rating/votes.hpp"

namespace sarena::rating {

enum class TieMode { Exclude, HalfWin };
enum class CovariateMode { PerBattle, ModelMean };

std::string_view covariate_mode_name(CovariateMode m);
std::optional<CovariateMode> parse_covariate_mode(std::string_view text);

struct FitConfig {
  std::string anchor;          // empty: most-voted model, ties by ID
  double ridge = 1e-6;         // lambda on ||theta||^2 + ||beta||^2
  double tolerance = 1e-8;     // gradient infinity norm
  int max_iterations = 500;
  TieMode ties = TieMode::Exclude;
  CovariateMode covariates = CovariateMode::PerBattle;
  bool drop_collinear = false;  // otherwise collinear features throw
};

class RatingError : public std::runtime_error {
 public:
  enum class Kind {
    NoDecisiveVotes,
    MissingAnchor,
    DegenerateData,
    SingularInformation,
    MissingFeatures,
    InsufficientVotes,
    ModelSetMismatch,
  };
  RatingError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Coefficient {
  std::string feature;
  double estimate = 0;      // per standard deviation of the feature
  double std_error = 0;
  double p_value = 1;       // two-sided Wald
  double raw_estimate = 0;  // per unit of the feature
  double raw_std_error = 0;
  bool zero_variance = false;
};

struct RatingFit {
  std::vector<std::string> models;  // sorted
  std::map<std::string, double> theta;
  std::map<std::string, double> theta_std_error;
  std::vector<Coefficient> beta;
  std::string anchor;
  double log_likelihood = 0;  // data term only, at the optimum
  std::size_t n_votes_used = 0;
  std::map<std::string, std::size_t> vote_counts;  // every outcome counts
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0;
  FitConfig config;
  std::vector<std::string> warnings;

  bool has_features() const { return !beta.empty(); }
  double win_probability(const std::string& a, const std::string& b) const;
};

inline double sigmoid(double x) {
  return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x));
}

// Penalized negative log-likelihood over weighted binary observations.
// Row i of `design` holds the covariates of observation i; `wins` is 1 when
// the first side won.
class BtObjective {
 public:
  BtObjective(Eigen::MatrixXd design, Eigen::VectorXd wins, Eigen::VectorXd weights,
              double ridge);

  double loss(const Eigen::VectorXd& params) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& params) const;
  double log_likelihood(const Eigen::VectorXd& params) const;
  int dimension() const { return static_cast<int>(design_.cols()); }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd wins_;
  Eigen::VectorXd weights_;
  double ridge_;
};

struct NewtonResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd hessian;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0;
  std::vector<double> loss_trace;  // loss after each accepted step, starting with the initial point
};

NewtonResult minimize_newton(const BtObjective& f, Eigen::VectorXd start, double tolerance,
                             int max_iterations);

RatingFit fit_bt(const std::vector<VoteRecord>& votes, const FitConfig& config = {});

RatingFit fit_bt_with_features(const std::vector<VoteRecord>& votes, const FeatureTable& features,
                               const FitConfig& config = {});

struct WinMatrix {
  std::vector<std::string> models;
  std::vector<std::vector<double>> p;  // p[r][c] = P(row beats col)
};

// Feature contributions are held at zero for feature fits.
WinMatrix win_matrix(const RatingFit& fit);

using sarena::arena_categories;
using sarena::expand_category;

struct SegmentOptions {
  std::size_t min_votes = 30;
};

RatingFit segment_fit(const std::vector<VoteRecord>& votes, const std::string& category_filter,
                      const FeatureTable* features, const FitConfig& config,
                      const SegmentOptions& options = {});

}  // namespace sarena::rating
