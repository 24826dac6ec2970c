#include "sarena/rating/bradley_terry.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

namespace sarena::rating {
namespace {

struct Observation {
  int a = 0;
  int b = 0;
  double win = 1;
  double weight = 1;
  const VoteRecord* vote = nullptr;
};

struct Prepared {
  std::vector<std::string> models;
  std::map<std::string, int> index;
  std::vector<Observation> obs;
  std::size_t n_votes_used = 0;
  std::map<std::string, std::size_t> vote_counts;
  int anchor = 0;
  std::vector<std::string> warnings;
};

Prepared prepare(const std::vector<VoteRecord>& votes, const FitConfig& config) {
  Prepared p;
  std::set<std::string> names;
  for (const auto& v : votes) {
    ++p.vote_counts[v.model_a];
    ++p.vote_counts[v.model_b];
    bool used = is_decisive(v.outcome) ||
                (config.ties == TieMode::HalfWin && v.outcome == Outcome::Tie);
    if (!used) continue;
    names.insert(v.model_a);
    names.insert(v.model_b);
  }
  if (names.empty()) throw RatingError(RatingError::Kind::NoDecisiveVotes, "no decisive votes to fit");
  p.models.assign(names.begin(), names.end());
  for (std::size_t i = 0; i < p.models.size(); ++i) p.index[p.models[i]] = static_cast<int>(i);

  for (const auto& v : votes) {
    auto ia = p.index.find(v.model_a);
    auto ib = p.index.find(v.model_b);
    if (ia == p.index.end() || ib == p.index.end()) continue;
    if (v.outcome == Outcome::AWins) {
      p.obs.push_back({ia->second, ib->second, 1, 1, &v});
    } else if (v.outcome == Outcome::BWins) {
      p.obs.push_back({ia->second, ib->second, 0, 1, &v});
    } else if (config.ties == TieMode::HalfWin && v.outcome == Outcome::Tie) {
      p.obs.push_back({ia->second, ib->second, 1, 0.5, &v});
      p.obs.push_back({ia->second, ib->second, 0, 0.5, &v});
    } else {
      continue;
    }
    ++p.n_votes_used;
  }

  for (const auto& [name, n] : p.vote_counts)
    if (!p.index.count(name))
      p.warnings.push_back("model '" + name + "' has no decisive votes and is not rated");

  std::string anchor = config.anchor;
  if (anchor.empty()) {
    std::size_t best = 0;
    for (const auto& m : p.models) {
      if (p.vote_counts[m] > best) {
        best = p.vote_counts[m];
        anchor = m;
      }
    }
  }
  auto it = p.index.find(anchor);
  if (it == p.index.end())
    throw RatingError(RatingError::Kind::MissingAnchor,
                      "anchor model '" + anchor + "' has no decisive votes");
  p.anchor = it->second;

  // Separation: a model that never loses (or never wins) has no finite MLE.
  std::vector<double> wins(p.models.size(), 0), losses(p.models.size(), 0);
  for (const auto& o : p.obs) {
    wins[o.a] += o.weight * o.win;
    losses[o.a] += o.weight * (1 - o.win);
    wins[o.b] += o.weight * (1 - o.win);
    losses[o.b] += o.weight * o.win;
  }
  for (std::size_t m = 0; m < p.models.size(); ++m) {
    if (wins[m] > 0 && losses[m] > 0) continue;
    std::string what = "model '" + p.models[m] + "' has only " + (wins[m] > 0 ? "wins" : "losses");
    if (config.ridge <= 0) throw RatingError(RatingError::Kind::DegenerateData, what);
    p.warnings.push_back(what + "; its rating is held finite by the ridge penalty");
  }

  // Disconnected comparison graphs leave relative strengths to the ridge.
  std::vector<int> parent(p.models.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  for (const auto& o : p.obs) parent[root(o.a)] = root(o.b);
  std::set<int> components;
  for (std::size_t m = 0; m < p.models.size(); ++m) components.insert(root(static_cast<int>(m)));
  if (components.size() > 1)
    p.warnings.push_back("comparison graph has " + std::to_string(components.size()) +
                         " disconnected components");
  return p;
}

// Columns: one per non-anchor model, in model order.
Eigen::MatrixXd model_design(const Prepared& p) {
  const int k = static_cast<int>(p.models.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.obs.size()), k - 1);
  auto col = [&](int m) { return m < p.anchor ? m : m - 1; };
  for (std::size_t i = 0; i < p.obs.size(); ++i) {
    const auto& o = p.obs[i];
    if (o.a != p.anchor) x(static_cast<Eigen::Index>(i), col(o.a)) += 1;
    if (o.b != p.anchor) x(static_cast<Eigen::Index>(i), col(o.b)) -= 1;
  }
  return x;
}

void responses(const Prepared& p, Eigen::VectorXd& wins, Eigen::VectorXd& weights) {
  wins.resize(static_cast<Eigen::Index>(p.obs.size()));
  weights.resize(static_cast<Eigen::Index>(p.obs.size()));
  for (std::size_t i = 0; i < p.obs.size(); ++i) {
    wins(static_cast<Eigen::Index>(i)) = p.obs[i].win;
    weights(static_cast<Eigen::Index>(i)) = p.obs[i].weight;
  }
}

RatingFit solve(const Prepared& p, const Eigen::MatrixXd& design, const FitConfig& config,
                const std::vector<std::string>& feature_names) {
  Eigen::VectorXd wins, weights;
  responses(p, wins, weights);
  BtObjective f(design, wins, weights, config.ridge);
  NewtonResult r = minimize_newton(f, Eigen::VectorXd::Zero(design.cols()), config.tolerance,
                                   config.max_iterations);

  RatingFit fit;
  fit.models = p.models;
  fit.anchor = p.models[p.anchor];
  fit.n_votes_used = p.n_votes_used;
  fit.vote_counts = p.vote_counts;
  fit.converged = r.converged;
  fit.iterations = r.iterations;
  fit.gradient_norm = r.gradient_norm;
  fit.config = config;
  fit.config.anchor = fit.anchor;
  fit.warnings = p.warnings;
  fit.log_likelihood = f.log_likelihood(r.params);

  Eigen::MatrixXd cov = r.hessian.ldlt().solve(
      Eigen::MatrixXd::Identity(r.hessian.rows(), r.hessian.cols()));
  int j = 0;
  for (int m = 0; m < static_cast<int>(p.models.size()); ++m) {
    if (m == p.anchor) {
      fit.theta[p.models[m]] = 0.0;
      fit.theta_std_error[p.models[m]] = 0.0;
      continue;
    }
    fit.theta[p.models[m]] = r.params(j);
    fit.theta_std_error[p.models[m]] = std::sqrt(std::max(0.0, cov(j, j)));
    ++j;
  }
  for (const auto& name : feature_names) {
    Coefficient c;
    c.feature = name;
    c.estimate = r.params(j);
    c.std_error = std::sqrt(std::max(0.0, cov(j, j)));
    double z = c.std_error > 0 ? c.estimate / c.std_error : 0.0;
    c.p_value = std::clamp(std::erfc(std::fabs(z) / std::sqrt(2.0)), 0.0, 1.0);
    fit.beta.push_back(c);
    ++j;
  }
  if (!r.converged)
    fit.warnings.push_back("Newton iterations stopped before the gradient tolerance was met");
  return fit;
}

// Columns that add nothing to the span of the columns before them.
std::vector<int> dependent_columns(const Eigen::MatrixXd& d) {
  std::vector<int> bad;
  Eigen::MatrixXd basis(d.rows(), 0);
  int rank = 0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    Eigen::MatrixXd trial(d.rows(), basis.cols() + 1);
    trial << basis, d.col(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-9);
    if (qr.rank() > rank) {
      basis = trial;
      rank = static_cast<int>(qr.rank());
    } else {
      bad.push_back(static_cast<int>(j));
    }
  }
  return bad;
}

}  // namespace

std::string_view covariate_mode_name(CovariateMode m) {
  return m == CovariateMode::PerBattle ? "per_battle" : "model_mean";
}

std::optional<CovariateMode> parse_covariate_mode(std::string_view text) {
  if (text == "per_battle") return CovariateMode::PerBattle;
  if (text == "model_mean") return CovariateMode::ModelMean;
  return std::nullopt;
}

double RatingFit::win_probability(const std::string& a, const std::string& b) const {
  return sigmoid(theta.at(a) - theta.at(b));
}

BtObjective::BtObjective(Eigen::MatrixXd design, Eigen::VectorXd wins, Eigen::VectorXd weights,
                         double ridge)
    : design_(std::move(design)), wins_(std::move(wins)), weights_(std::move(weights)), ridge_(ridge) {}

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double BtObjective::log_likelihood(const Eigen::VectorXd& params) const {
  Eigen::VectorXd eta = design_ * params;
  double ll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    ll += weights_(i) * (wins_(i) * eta(i) - softplus(eta(i)));
  return ll;
}

double BtObjective::loss(const Eigen::VectorXd& params) const {
  return -log_likelihood(params) + ridge_ * params.squaredNorm();
}

Eigen::VectorXd BtObjective::gradient(const Eigen::VectorXd& params) const {
  Eigen::VectorXd eta = design_ * params;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid(i) = weights_(i) * (sigmoid(eta(i)) - wins_(i));
  return design_.transpose() * resid + 2 * ridge_ * params;
}

Eigen::MatrixXd BtObjective::hessian(const Eigen::VectorXd& params) const {
  Eigen::VectorXd eta = design_ * params;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double s = sigmoid(eta(i));
    w(i) = weights_(i) * s * (1 - s);
  }
  Eigen::MatrixXd h = design_.transpose() * w.asDiagonal() * design_;
  h.diagonal().array() += 2 * ridge_;
  return h;
}

NewtonResult minimize_newton(const BtObjective& f, Eigen::VectorXd start, double tolerance,
                             int max_iterations) {
  NewtonResult r;
  r.params = std::move(start);
  double current = f.loss(r.params);
  r.loss_trace.push_back(current);
  for (;;) {
    Eigen::VectorXd g = f.gradient(r.params);
    r.gradient_norm = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
    if (r.gradient_norm < tolerance) {
      r.converged = true;
      break;
    }
    if (r.iterations >= max_iterations) break;
    Eigen::MatrixXd h = f.hessian(r.params);
    Eigen::VectorXd step = h.ldlt().solve(g);
    bool accepted = false;
    // Once the predicted decrease is below the rounding level of the loss,
    // comparing losses cannot tell good steps from bad ones; take the full step.
    const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(current));
    if (g.dot(step) < noise) {
      r.params -= step;
      current = f.loss(r.params);
      accepted = true;
    }
    for (int halving = 0; !accepted && halving < 60; ++halving) {
      Eigen::VectorXd next = r.params - std::ldexp(1.0, -halving) * step;
      double value = f.loss(next);
      if (value <= current) {
        r.params = std::move(next);
        current = value;
        accepted = true;
        break;
      }
    }
    ++r.iterations;
    if (!accepted) break;
    r.loss_trace.push_back(current);
  }
  r.hessian = f.hessian(r.params);
  return r;
}

RatingFit fit_bt(const std::vector<VoteRecord>& votes, const FitConfig& config) {
  Prepared p = prepare(votes, config);
  return solve(p, model_design(p), config, {});
}

RatingFit fit_bt_with_features(const std::vector<VoteRecord>& votes, const FeatureTable& features,
                               const FitConfig& config) {
  Prepared p = prepare(votes, config);
  const std::size_t k = features.names.size();

  std::vector<std::string> missing;
  std::map<std::string, const std::vector<double>*> rows;
  for (const auto& o : p.obs) {
    for (const std::string* id : {&o.vote->workbook_a, &o.vote->workbook_b}) {
      const auto* row = features.find(*id);
      if (!row) {
        if (std::find(missing.begin(), missing.end(), *id) == missing.end()) missing.push_back(*id);
        continue;
      }
      if (row->size() != k) throw InputError("feature row for '" + *id + "' has the wrong width");
      rows[*id] = row;
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 5) list += ", ...";
    throw RatingError(RatingError::Kind::MissingFeatures,
                      std::to_string(missing.size()) + " workbook(s) lack features: " + list);
  }

  // Per-output z-scores over the workbooks that enter the fit.
  std::vector<double> mean(k, 0), sd(k, 0);
  for (const auto& [id, row] : rows)
    for (std::size_t j = 0; j < k; ++j) mean[j] += (*row)[j];
  const double n_rows = static_cast<double>(rows.size());
  for (double& m : mean) m /= n_rows;
  for (const auto& [id, row] : rows)
    for (std::size_t j = 0; j < k; ++j) sd[j] += ((*row)[j] - mean[j]) * ((*row)[j] - mean[j]);
  for (double& s : sd) s = std::sqrt(s / n_rows);
  auto z = [&](const std::vector<double>& row, std::size_t j) {
    return sd[j] > 1e-12 * std::max(1.0, std::fabs(mean[j])) ? (row[j] - mean[j]) / sd[j] : 0.0;
  };

  std::vector<std::vector<double>> covariate(p.models.size(), std::vector<double>(k, 0));
  if (config.covariates == CovariateMode::ModelMean) {
    std::vector<std::set<std::string>> outputs(p.models.size());
    for (const auto& o : p.obs) {
      outputs[o.a].insert(o.vote->workbook_a);
      outputs[o.b].insert(o.vote->workbook_b);
    }
    for (std::size_t m = 0; m < p.models.size(); ++m) {
      for (const auto& id : outputs[m])
        for (std::size_t j = 0; j < k; ++j) covariate[m][j] += z(*rows[id], j);
      for (std::size_t j = 0; j < k; ++j) covariate[m][j] /= static_cast<double>(outputs[m].size());
    }
    p.warnings.push_back(
        "model_mean covariates are constant per model; strengths and coefficients are separated "
        "only by the ridge penalty");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(p.obs.size());
  Eigen::MatrixXd diff(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& o = p.obs[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < k; ++j) {
      double d = config.covariates == CovariateMode::PerBattle
                     ? z(*rows[o.vote->workbook_a], j) - z(*rows[o.vote->workbook_b], j)
                     : covariate[o.a][j] - covariate[o.b][j];
      diff(i, static_cast<Eigen::Index>(j)) = d;
    }
  }

  // Columns without variation carry no information; they are reported with a
  // zero coefficient and kept out of the optimization.
  std::vector<int> active;
  std::vector<bool> inert(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    if (diff.col(static_cast<Eigen::Index>(j)).lpNorm<Eigen::Infinity>() == 0) {
      inert[j] = true;
      p.warnings.push_back("feature '" + features.names[j] + "' never differs between sides");
    } else {
      active.push_back(static_cast<int>(j));
    }
  }
  Eigen::MatrixXd active_diff(n, static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) active_diff.col(static_cast<Eigen::Index>(c)) = diff.col(active[c]);
  std::vector<int> bad = dependent_columns(active_diff);
  if (!bad.empty()) {
    std::string names;
    for (int b : bad) names += (names.empty() ? "" : ", ") + features.names[active[b]];
    if (!config.drop_collinear)
      throw RatingError(RatingError::Kind::SingularInformation, "collinear features: " + names);
    p.warnings.push_back("dropped collinear features: " + names);
    std::vector<int> kept;
    for (std::size_t c = 0; c < active.size(); ++c)
      if (std::find(bad.begin(), bad.end(), static_cast<int>(c)) == bad.end()) kept.push_back(active[c]);
    for (int b : bad) inert[active[b]] = true;
    active = kept;
  }

  Eigen::MatrixXd theta_x = model_design(p);
  Eigen::MatrixXd design(n, theta_x.cols() + static_cast<Eigen::Index>(active.size()));
  design.leftCols(theta_x.cols()) = theta_x;
  std::vector<std::string> active_names;
  for (std::size_t c = 0; c < active.size(); ++c) {
    design.col(theta_x.cols() + static_cast<Eigen::Index>(c)) = diff.col(active[c]);
    active_names.push_back(features.names[active[c]]);
  }

  RatingFit fit = solve(p, design, config, active_names);
  std::vector<Coefficient> all;
  std::size_t next = 0;
  for (std::size_t j = 0; j < k; ++j) {
    Coefficient c;
    if (!inert[j]) {
      c = fit.beta[next++];
      if (sd[j] > 0) {
        c.raw_estimate = c.estimate / sd[j];
        c.raw_std_error = c.std_error / sd[j];
      }
    } else {
      c.feature = features.names[j];
      c.zero_variance = true;
    }
    all.push_back(c);
  }
  fit.beta = std::move(all);
  return fit;
}

WinMatrix win_matrix(const RatingFit& fit) {
  WinMatrix w;
  w.models = fit.models;
  const std::size_t k = fit.models.size();
  w.p.assign(k, std::vector<double>(k, 0.5));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = r + 1; c < k; ++c) {
      double p = sigmoid(fit.theta.at(fit.models[r]) - fit.theta.at(fit.models[c]));
      w.p[r][c] = p;
      w.p[c][r] = 1 - p;
    }
  }
  return w;
}

RatingFit segment_fit(const std::vector<VoteRecord>& votes, const std::string& category_filter,
                      const FeatureTable* features, const FitConfig& config,
                      const SegmentOptions& options) {
  std::vector<std::string> labels = expand_category(category_filter);
  std::vector<VoteRecord> subset;
  std::size_t usable = 0;
  for (const auto& v : votes) {
    if (std::find(labels.begin(), labels.end(), v.category) == labels.end()) continue;
    subset.push_back(v);
    if (is_decisive(v.outcome) || (config.ties == TieMode::HalfWin && v.outcome == Outcome::Tie))
      ++usable;
  }
  if (usable < options.min_votes || usable == 0)
    throw RatingError(RatingError::Kind::InsufficientVotes,
                      "segment '" + category_filter + "' has " + std::to_string(usable) +
                          " usable votes; at least " + std::to_string(options.min_votes) +
                          " required");
  return features ? fit_bt_with_features(subset, *features, config) : fit_bt(subset, config);
}

}  // namespace sarena::rating
