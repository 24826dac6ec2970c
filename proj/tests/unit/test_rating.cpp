#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rating_oracle.hpp"
#include "sarena/rating/bradley_terry.hpp"
#include "sarena/rating/leaderboard.hpp"
#include "sarena/rating/simulate.hpp"

using namespace sarena;
using namespace sarena::rating;

namespace {

VoteRecord vote(const std::string& a, const std::string& b, Outcome o, int n = 0,
                const std::string& category = "Academic & Research") {
  VoteRecord v;
  v.battle_id = "b" + std::to_string(n);
  v.prompt_id = "p" + std::to_string(n / 4);
  v.category = category;
  v.model_a = a;
  v.model_b = b;
  v.workbook_a = v.battle_id + "-a";
  v.workbook_b = v.battle_id + "-b";
  v.outcome = o;
  v.timestamp = "2025-01-01T00:00:00Z";
  return v;
}

std::vector<VoteRecord> repeat(const std::string& a, const std::string& b, Outcome o, int times,
                               std::vector<VoteRecord> into = {}) {
  for (int i = 0; i < times; ++i) into.push_back(vote(a, b, o, static_cast<int>(into.size())));
  return into;
}

SimulationResult simulated(std::size_t n, std::uint64_t seed, std::vector<PlantedFeature> f = {},
                           int k = 16) {
  SimulationSpec spec;
  spec.model_count = k;
  spec.n_votes = n;
  spec.seed = seed;
  spec.features = std::move(f);
  return simulate_arena(spec);
}

std::vector<double> thetas(const RatingFit& fit, const std::vector<std::string>& models) {
  std::vector<double> out;
  for (const auto& m : models) out.push_back(fit.theta.at(m));
  return out;
}

double elo_spread(const RatingFit& fit) {
  auto board = to_elo(fit, {1000, kEloScale, 0});
  return board.ranked.front().elo - board.ranked.back().elo;
}

}  // namespace

TEST_CASE("votes round-trip through JSONL") {
  std::vector<VoteRecord> votes = {vote("x", "y", Outcome::AWins, 1), vote("y", "z", Outcome::BothBad, 2)};
  std::stringstream ss;
  write_votes_jsonl(ss, votes);
  CHECK(read_votes_jsonl(ss) == votes);
  CHECK_THROWS_AS(vote_from_json(R"({"battle_id":"b","model_a":"x","model_b":"x","outcome":"TIE"})"),
                  InputError);
  CHECK_THROWS_AS(vote_from_json(R"({"battle_id":"b","model_a":"x","model_b":"y","outcome":"DRAW"})"),
                  InputError);
  CHECK_THROWS_AS(vote_from_json("not json"), InputError);
}

TEST_CASE("balanced two-model record gives equal strength") {
  auto votes = repeat("A", "B", Outcome::AWins, 2);
  votes = repeat("A", "B", Outcome::BWins, 2, votes);
  auto fit = fit_bt(votes);
  CHECK(fit.converged);
  CHECK(std::fabs(fit.theta.at("A") - fit.theta.at("B")) < 1e-9);
  CHECK(fit.win_probability("A", "B") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("log-likelihood matches the direct logistic form") {
  auto sim = simulated(800, 3, {}, 6);
  auto fit = fit_bt(sim.votes, {.anchor = "m01"});
  std::vector<oracle::PairVote> pv;
  for (const auto& v : sim.votes) {
    if (v.outcome == Outcome::AWins) pv.push_back({v.model_a, v.model_b});
    if (v.outcome == Outcome::BWins) pv.push_back({v.model_b, v.model_a});
  }
  double nll = oracle::bt_negative_log_likelihood(pv, fit.theta, 0.0);
  CHECK(-fit.log_likelihood == doctest::Approx(nll).epsilon(1e-12));
  CHECK(fit.n_votes_used == pv.size());
  // At the optimum no single coordinate move improves the penalized loss.
  for (const auto& m : fit.models) {
    if (m == fit.anchor) continue;
    for (double h : {-1e-4, 1e-4}) {
      auto moved = fit.theta;
      moved[m] += h;
      CHECK(oracle::bt_negative_log_likelihood(pv, moved, 1e-6) >=
            oracle::bt_negative_log_likelihood(pv, fit.theta, 1e-6) - 1e-12);
    }
  }
}

TEST_CASE("logistic identity for every fitted pair") {
  auto sim = simulated(2000, 5, {}, 8);
  auto fit = fit_bt(sim.votes);
  auto w = win_matrix(fit);
  for (std::size_t r = 0; r < w.models.size(); ++r) {
    CHECK(w.p[r][r] == 0.5);
    for (std::size_t c = 0; c < w.models.size(); ++c) {
      CHECK(w.p[r][c] + w.p[c][r] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(fit.win_probability(w.models[r], w.models[c]) +
                fit.win_probability(w.models[c], w.models[r]) ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dims(1, 8), rows(5, 60), bit(0, 1);
  for (int instance = 0; instance < 50; ++instance) {
    const int d = dims(rng), n = rows(rng);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
      y(i) = bit(rng);
      w(i) = bit(rng) ? 1.0 : 0.5;
    }
    BtObjective f(x, y, w, 1e-3);
    std::vector<double> p(static_cast<std::size_t>(d));
    for (double& v : p) v = normal(rng);
    auto loss = [&](const std::vector<double>& q) {
      return f.loss(Eigen::Map<const Eigen::VectorXd>(q.data(), d));
    };
    auto fd = oracle::central_difference(loss, p, 1e-5);
    Eigen::VectorXd g = f.gradient(Eigen::Map<const Eigen::VectorXd>(p.data(), d));
    double err = 0, scale = 1;
    for (int j = 0; j < d; ++j) {
      err = std::max(err, std::fabs(g(j) - fd[static_cast<std::size_t>(j)]));
      scale = std::max(scale, std::fabs(g(j)));
    }
    CHECK(err / scale < 1e-6);
  }
}

TEST_CASE("Newton iterations never increase the loss") {
  auto sim = simulated(3000, 8);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sim.votes.size()), 15);
  Eigen::VectorXd y(x.rows()), w = Eigen::VectorXd::Ones(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto& v = sim.votes[static_cast<std::size_t>(i)];
    int a = std::stoi(v.model_a.substr(1)) - 1, b = std::stoi(v.model_b.substr(1)) - 1;
    if (a > 0) x(i, a - 1) += 1;
    if (b > 0) x(i, b - 1) -= 1;
    y(i) = v.outcome == Outcome::AWins ? 1 : 0;
  }
  BtObjective f(x, y, w, 1e-6);
  // Start far from the optimum so the step control is exercised.
  auto r = minimize_newton(f, Eigen::VectorXd::Constant(15, 8.0), 1e-8, 500);
  CHECK(r.converged);
  REQUIRE(r.loss_trace.size() > 2);
  // Steps below the rounding level of the loss may move it by a few ulps.
  for (std::size_t i = 1; i < r.loss_trace.size(); ++i)
    CHECK(r.loss_trace[i] <= r.loss_trace[i - 1] + 1e-12 * std::fabs(r.loss_trace[i - 1]));
}

TEST_CASE("label swap leaves the fit unchanged") {
  auto sim = simulated(1500, 21, {}, 6);
  std::vector<VoteRecord> mirrored;
  for (const auto& v : sim.votes) mirrored.push_back(swapped(v));
  auto a = fit_bt(sim.votes, {.anchor = "m03"});
  auto b = fit_bt(mirrored, {.anchor = "m03"});
  for (const auto& m : a.models) CHECK(a.theta.at(m) == doctest::Approx(b.theta.at(m)).epsilon(1e-10));
  CHECK(a.log_likelihood == doctest::Approx(b.log_likelihood).epsilon(1e-12));
}

TEST_CASE("anchor choice does not change win probabilities") {
  auto sim = simulated(2000, 4, {}, 5);
  auto a = fit_bt(sim.votes, {.anchor = "m01"});
  auto b = fit_bt(sim.votes, {.anchor = "m05"});
  CHECK(a.theta.at("m01") == 0.0);
  CHECK(b.theta.at("m05") == 0.0);
  for (const auto& x : a.models)
    for (const auto& y : a.models)
      CHECK(a.win_probability(x, y) == doctest::Approx(b.win_probability(x, y)).epsilon(1e-5));
}

TEST_CASE("default anchor is the most-voted model") {
  auto votes = repeat("A", "B", Outcome::AWins, 3);
  votes = repeat("B", "C", Outcome::AWins, 2, votes);
  votes = repeat("C", "B", Outcome::AWins, 2, votes);
  votes = repeat("B", "A", Outcome::AWins, 1, votes);
  auto fit = fit_bt(votes);
  CHECK(fit.anchor == "B");
  CHECK(fit.vote_counts.at("B") == 8);
}

TEST_CASE("fit errors") {
  auto ties = repeat("A", "B", Outcome::Tie, 3);
  CHECK_THROWS_AS(fit_bt(ties), RatingError);
  try {
    fit_bt(repeat("A", "B", Outcome::BothBad, 2));
  } catch (const RatingError& e) {
    CHECK(e.kind() == RatingError::Kind::NoDecisiveVotes);
  }
  auto votes = repeat("A", "B", Outcome::AWins, 3);
  votes = repeat("A", "B", Outcome::BWins, 1, votes);
  try {
    fit_bt(votes, {.anchor = "Z"});
    FAIL("expected MissingAnchor");
  } catch (const RatingError& e) {
    CHECK(e.kind() == RatingError::Kind::MissingAnchor);
  }
  auto sweep = repeat("A", "B", Outcome::AWins, 3);
  try {
    fit_bt(sweep, {.ridge = 0});
    FAIL("expected DegenerateData");
  } catch (const RatingError& e) {
    CHECK(e.kind() == RatingError::Kind::DegenerateData);
  }
  auto fit = fit_bt(sweep);
  CHECK(fit.converged);
  CHECK(std::isfinite(fit.theta.at("A")));
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("ties as half wins") {
  auto votes = repeat("A", "B", Outcome::AWins, 1);
  votes = repeat("A", "B", Outcome::Tie, 2, votes);
  votes = repeat("A", "B", Outcome::BothBad, 5, votes);
  auto fit = fit_bt(votes, {.anchor = "B", .ties = TieMode::HalfWin});
  // A takes 2 of 3 units of weight, so the odds are 2:1.
  CHECK(fit.theta.at("A") == doctest::Approx(std::log(2.0)).epsilon(1e-5));
  CHECK(fit.n_votes_used == 3);
  CHECK(fit.vote_counts.at("A") == 8);
}

TEST_CASE("planted strengths are recovered") {
  auto sim = simulated(5000, 42);
  auto fit = fit_bt(sim.votes, {.anchor = "m01"});
  CHECK(fit.converged);
  CHECK(oracle::spearman(thetas(fit, sim.models), sim.theta) >= 0.95);
}

TEST_CASE("feature fit with zero differences reduces to the vanilla fit") {
  auto sim = simulated(3000, 9, {}, 8);
  FeatureTable flat;
  flat.names = {"f1", "f2"};
  for (const auto& v : sim.votes) {
    flat.rows[v.workbook_a] = {1.0, 7.0};
    flat.rows[v.workbook_b] = {1.0, 7.0};
  }
  auto base = fit_bt(sim.votes, {.anchor = "m01"});
  auto adj = fit_bt_with_features(sim.votes, flat, {.anchor = "m01"});
  for (const auto& m : base.models) CHECK(std::fabs(base.theta.at(m) - adj.theta.at(m)) <= 1e-6);
  REQUIRE(adj.beta.size() == 2);
  CHECK(adj.beta[0].zero_variance);
  CHECK(adj.beta[0].estimate == 0.0);
  CHECK(adj.beta[0].p_value == 1.0);
}

TEST_CASE("feature fit likelihood dominates the vanilla fit") {
  auto sim = simulated(3000, 12, {{"style", 0.5}, {"noise", 0.0}}, 8);
  auto base = fit_bt(sim.votes);
  auto adj = fit_bt_with_features(sim.votes, sim.features);
  CHECK(adj.log_likelihood >= base.log_likelihood);
}

TEST_CASE("negating a feature negates its coefficient") {
  auto sim = simulated(3000, 13, {{"style", 0.8}, {"other", -0.3}}, 6);
  FeatureTable neg = sim.features;
  for (auto& [id, row] : neg.rows) row[0] = -row[0];
  auto a = fit_bt_with_features(sim.votes, sim.features);
  auto b = fit_bt_with_features(sim.votes, neg);
  CHECK(a.beta[0].estimate == doctest::Approx(-b.beta[0].estimate).epsilon(1e-8));
  CHECK(a.beta[1].estimate == doctest::Approx(b.beta[1].estimate).epsilon(1e-8));
  for (const auto& m : a.models) CHECK(std::fabs(a.theta.at(m) - b.theta.at(m)) <= 1e-8);
}

TEST_CASE("planted coefficient recovered within three standard errors") {
  auto sim = simulated(10000, 77, {{"style", 1.0}});
  auto fit = fit_bt_with_features(sim.votes, sim.features);
  const auto& c = fit.beta[0];
  CHECK(std::fabs(c.raw_estimate - 1.0) <= 3 * c.raw_std_error);
  CHECK(c.p_value < 1e-6);
}

TEST_CASE("null coefficients are rarely significant") {
  int significant = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto sim = simulated(2000, 1000 + seed, {{"f1", 0}, {"f2", 0}, {"f3", 0}}, 8);
    auto fit = fit_bt_with_features(sim.votes, sim.features);
    for (const auto& c : fit.beta) {
      ++total;
      significant += c.p_value < 0.05;
    }
  }
  CHECK(significant <= total / 10);
}

TEST_CASE("collinear features") {
  auto sim = simulated(1000, 14, {{"f1", 0.5}}, 4);
  FeatureTable dup;
  dup.names = {"f1", "twice", "g"};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (const auto& [id, row] : sim.features.rows) dup.rows[id] = {row[0], 2 * row[0] + 3, normal(rng)};
  try {
    fit_bt_with_features(sim.votes, dup);
    FAIL("expected SingularInformation");
  } catch (const RatingError& e) {
    CHECK(e.kind() == RatingError::Kind::SingularInformation);
    CHECK(std::string(e.what()).find("twice") != std::string::npos);
  }
  auto fit = fit_bt_with_features(sim.votes, dup, {.drop_collinear = true});
  CHECK(fit.beta[1].zero_variance);
  CHECK_FALSE(fit.beta[2].zero_variance);
}

TEST_CASE("missing features are reported") {
  auto sim = simulated(200, 2, {{"f1", 0}}, 4);
  sim.features.rows.erase(sim.votes[0].workbook_a);
  try {
    fit_bt_with_features(sim.votes, sim.features);
    FAIL("expected MissingFeatures");
  } catch (const RatingError& e) {
    CHECK(e.kind() == RatingError::Kind::MissingFeatures);
    CHECK(std::string(e.what()).find(sim.votes[0].workbook_a) != std::string::npos);
  }
}

TEST_CASE("model-mean covariates fit with a warning") {
  auto sim = simulated(2000, 31, {{"style", 0.5, 0.5}}, 6);
  auto fit = fit_bt_with_features(sim.votes, sim.features, {.covariates = CovariateMode::ModelMean});
  CHECK(fit.converged);
  bool warned = false;
  for (const auto& w : fit.warnings) warned |= w.find("model_mean") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("adjustment swaps ranks two and three") {
  SimulationSpec spec;
  spec.models = {"A", "B", "C"};
  spec.theta = {1.5, 0.0, 0.3};
  PlantedFeature style{"style", 1.0};
  style.model_offset = {{"B", 1.0}};
  spec.features = {style};
  spec.n_votes = 6000;
  spec.seed = 5;
  auto sim = simulate_arena(spec);
  auto base = fit_bt(sim.votes, {.anchor = "A"});
  auto adj = fit_bt_with_features(sim.votes, sim.features, {.anchor = "A"});
  auto rows = compare_fits(base, adj);
  std::map<std::string, FitComparison> by;
  for (const auto& r : rows) by[r.model] = r;
  CHECK(by["A"].delta_rank == 0);
  CHECK(by["A"].delta_elo == 0.0);
  CHECK(by["B"].base_rank == 2);
  CHECK(by["C"].base_rank == 3);
  CHECK(by["B"].delta_rank == -1);
  CHECK(by["C"].delta_rank == 1);
}

TEST_CASE("style-driven arena compresses under adjustment") {
  PlantedFeature style{"style", 1.0, 1.0, 0.5};
  auto sim = simulated(8000, 17, {style}, 10);
  auto base = fit_bt(sim.votes);
  auto adj = fit_bt_with_features(sim.votes, sim.features);
  CHECK(std::fabs(elo_spread(adj)) < std::fabs(elo_spread(base)));
}

TEST_CASE("segments") {
  PlantedFeature f{"f", 0.0};
  f.category_beta = {{"Academic & Research", 1.5}};
  auto sim = simulated(12000, 23, {f}, 6);
  CHECK_THROWS_AS(segment_fit(sim.votes, "No Such Category", nullptr, {}), RatingError);
  auto academic = segment_fit(sim.votes, "Academic & Research", &sim.features, {});
  CHECK(academic.beta[0].p_value < 0.05);
  auto smb = segment_fit(sim.votes, "SMB & Personal", &sim.features, {});
  CHECK(smb.beta[0].p_value >= 0.05);

  auto finance = segment_fit(sim.votes, "Finance", nullptr, {});
  std::size_t expected = 0;
  for (const auto& v : sim.votes)
    expected += v.category == "Professional Finance" || v.category == "Corporate Finance & FP&A";
  CHECK(finance.n_votes_used == expected);

  auto votes = sim.votes;
  for (auto& v : votes) v.category = "Creative & Generative";
  auto whole = segment_fit(votes, "Creative & Generative", nullptr, {.anchor = "m01"});
  auto plain = fit_bt(votes, {.anchor = "m01"});
  for (const auto& m : plain.models) CHECK(whole.theta.at(m) == plain.theta.at(m));

  auto few = std::vector<VoteRecord>(sim.votes.begin(), sim.votes.begin() + 40);
  CHECK_THROWS_AS(segment_fit(few, "Academic & Research", nullptr, {}), RatingError);
  CHECK_NOTHROW(segment_fit(few, "Academic & Research", nullptr, {}, {.min_votes = 1}));
}

TEST_CASE("anchor is exactly 1000 and the scale maps 400 points to 10:1") {
  RatingFit fit;
  fit.models = {"a", "b", "c"};
  fit.anchor = "b";
  fit.theta = {{"a", std::log(10.0)}, {"b", 0.0}, {"c", -0.25}};
  fit.vote_counts = {{"a", 60}, {"b", 70}, {"c", 10}};
  auto board = to_elo(fit);
  REQUIRE(board.ranked.size() == 2);
  CHECK(board.ranked[0].model == "a");
  CHECK(board.ranked[0].elo == doctest::Approx(1400).epsilon(1e-12));
  CHECK(board.ranked[1].elo == 1000.0);
  CHECK(board.ranked[1].rank == 2);
  REQUIRE(board.unranked.size() == 1);
  CHECK(board.unranked[0].model == "c");
  CHECK(fit.win_probability("a", "b") == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("equal strengths tie-break by model id") {
  RatingFit fit;
  fit.models = {"x", "m", "a"};
  fit.anchor = "m";
  fit.theta = {{"x", 0.0}, {"m", 0.0}, {"a", 0.0}};
  fit.vote_counts = {{"x", 50}, {"m", 50}, {"a", 50}};
  auto board = to_elo(fit);
  REQUIRE(board.ranked.size() == 3);
  CHECK(board.ranked[0].model == "a");
  CHECK(board.ranked[1].model == "m");
  CHECK(board.ranked[2].model == "x");
  for (const auto& r : board.ranked) CHECK(r.elo == 1000.0);
  auto w = win_matrix(fit);
  for (const auto& row : w.p)
    for (double p : row) CHECK(p == 0.5);
}

TEST_CASE("real fits anchor at exactly 1000") {
  auto sim = simulated(3000, 99);
  for (const std::string anchor : {"m01", "m08", "m16"}) {
    auto fit = fit_bt(sim.votes, {.anchor = anchor});
    auto board = to_elo(fit, {.min_votes = 0});
    bool seen = false;
    for (const auto& r : board.ranked) {
      if (r.model != anchor) continue;
      seen = true;
      CHECK(r.elo == 1000.0);
    }
    CHECK(seen);
  }
}

TEST_CASE("comparing fits") {
  auto sim = simulated(2000, 61, {{"s", 0.7, 0.4}}, 6);
  auto base = fit_bt(sim.votes, {.anchor = "m02"});
  for (const auto& r : compare_fits(base, base)) {
    CHECK(r.delta_elo == 0.0);
    CHECK(r.delta_rank == 0);
  }
  auto other = fit_bt(sim.votes, {.anchor = "m03"});
  CHECK_THROWS_AS(compare_fits(base, other), RatingError);
  auto fewer = fit_bt(std::vector<VoteRecord>(sim.votes.begin(), sim.votes.begin() + 3),
                      {.anchor = sim.votes[0].model_a});
  CHECK_THROWS_AS(compare_fits(base, fewer), RatingError);
}

TEST_CASE("report writers") {
  auto sim = simulated(1500, 8, {{"s", 0.5}}, 4);
  auto fit = fit_bt_with_features(sim.votes, sim.features, {.anchor = "m01"});
  std::ostringstream lb, sig;
  write_leaderboard_csv(lb, to_elo(fit));
  CHECK(lb.str().rfind("rank,model,elo,n_votes\n", 0) == 0);
  write_significance_csv(sig, significance_table(fit));
  CHECK(sig.str().find("\ns,") != std::string::npos);
  auto meta = fit_metadata_json(fit);
  CHECK(meta.find("\"mode\": \"per_battle\"") != std::string::npos);
  CHECK(leaderboard_json(to_elo(fit)).find("\"anchor\": \"m01\"") != std::string::npos);
}

TEST_CASE("simulation") {
  auto a = simulated(500, 7, {{"s", 0.3}});
  auto b = simulated(500, 7, {{"s", 0.3}});
  std::ostringstream sa, sb;
  write_votes_jsonl(sa, a.votes);
  write_votes_jsonl(sb, b.votes);
  CHECK(sa.str() == sb.str());
  CHECK(a.truth_json == b.truth_json);
  CHECK(a.theta.front() == -2.0);
  CHECK(a.theta.back() == 2.0);

  SimulationSpec even;
  even.model_count = 2;
  even.theta = {0.0, 0.0};
  even.n_votes = 10000;
  even.seed = 3;
  auto sim = simulate_arena(even);
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> tally;
  for (const auto& v : sim.votes) {
    auto& t = tally[{v.model_a, v.model_b}];
    t.first += v.outcome == Outcome::AWins;
    ++t.second;
  }
  for (const auto& [pair, t] : tally) {
    double rate = static_cast<double>(t.first) / t.second;
    CHECK(rate >= 0.47);
    CHECK(rate <= 0.53);
  }

  auto spec = simulation_spec_from_json(
      R"({"model_count":3,"n_votes":10,"seed":4,"tie_rate":0.5,
          "features":[{"name":"f","beta":1,"category_beta":{"SMB & Personal":2}}]})");
  CHECK(spec.features.at(0).category_beta.at("SMB & Personal") == 2);
  CHECK(simulate_arena(spec).votes.size() == 10);
  CHECK_THROWS_AS(simulation_spec_from_json("{"), InputError);
}
