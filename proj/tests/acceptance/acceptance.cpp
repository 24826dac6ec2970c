// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "feature_oracle.hpp"
#include "formula_oracle.hpp"
#include "json.hpp"
#include "rating_oracle.hpp"
#include "sarena/arena/http_api.hpp"
#include "sarena/arena/service.hpp"
#include "sarena/common/categories.hpp"
#include "sarena/features/features.hpp"
#include "sarena/formula/evaluator.hpp"
#include "sarena/matchmaker/matchmaker.hpp"
#include "sarena/rating/bradley_terry.hpp"
#include "sarena/rating/leaderboard.hpp"
#include "sarena/rating/simulate.hpp"
#include "sarena/sheetspec/workbook.hpp"
#include "sarena/study/study.hpp"
#include "study_oracle.hpp"

using namespace sarena;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("sarena-accept-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double elo_of(const rating::Leaderboard& b, const std::string& model) {
  for (const auto* rows : {&b.ranked, &b.unranked})
    for (const auto& r : *rows)
      if (r.model == model) return r.elo;
  return NAN;
}

double elo_spread(const rating::Leaderboard& b) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : b.ranked) {
    lo = std::min(lo, r.elo);
    hi = std::max(hi, r.elo);
  }
  return hi - lo;
}

rating::SimulationSpec styled_spec(std::size_t votes, std::uint64_t seed, double beta, double loading,
                                   double noise) {
  rating::SimulationSpec s;
  s.n_votes = votes;
  s.seed = seed;
  s.features.push_back({.name = "style", .beta = beta, .loading = loading, .noise = noise});
  return s;
}

// ---- criteria ----

Outcome anchor_contract() {
  auto sim = rating::simulate_arena(styled_spec(4000, 3, 0.8, 0.5, 1));
  rating::FitConfig cfg;
  cfg.anchor = "m05";
  rating::EloOptions eo;
  eo.min_votes = 0;

  std::vector<std::pair<std::string, double>> seen;
  auto base = rating::fit_bt(sim.votes, cfg);
  seen.emplace_back("baseline", elo_of(rating::to_elo(base, eo), "m05"));
  auto adj = rating::fit_bt_with_features(sim.votes, sim.features, cfg);
  seen.emplace_back("adjusted", elo_of(rating::to_elo(adj, eo), "m05"));
  for (const auto& cat : rating::arena_categories()) {
    try {
      auto seg = rating::segment_fit(sim.votes, cat, &sim.features, cfg);
      seen.emplace_back(cat, elo_of(rating::to_elo(seg, eo), "m05"));
    } catch (const rating::RatingError&) {
      // thin segments are skipped; the anchor rule only binds fits that exist
    }
  }
  auto comparison = rating::compare_fits(base, adj, eo);
  for (const auto& row : comparison)
    if (row.model == "m05") {
      seen.emplace_back("comparison.base", row.base_elo);
      seen.emplace_back("comparison.adjusted", row.adjusted_elo);
    }

  for (const auto& [what, elo] : seen)
    if (elo != 1000.0) return {false, what + " anchor Elo " + fmt("%.17g", elo)};
  return {seen.size() >= 5, std::to_string(seen.size()) + " fits, anchor Elo exactly 1000"};
}

Outcome bt_recovery() {
  auto t0 = std::chrono::steady_clock::now();
  rating::SimulationSpec s;
  s.model_count = 16;
  s.n_votes = 5000;
  s.seed = 20260301;
  auto sim = rating::simulate_arena(s);
  auto fit = rating::fit_bt(sim.votes);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<double> est;
  for (const auto& m : sim.models) est.push_back(fit.theta.at(m));
  double rho = oracle::spearman(est, sim.theta);
  return {rho >= 0.95 && secs < 10 && fit.converged,
          "spearman " + fmt("%.4f", rho) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome covariate_recovery() {
  auto sim = rating::simulate_arena(styled_spec(10000, 17, 1.0, 0, 1));
  auto fit = rating::fit_bt_with_features(sim.votes, sim.features);
  const auto& b = fit.beta.at(0);
  double z = std::fabs(b.raw_estimate - 1.0) / b.raw_std_error;

  int tests = 0, spurious = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    rating::SimulationSpec s;
    s.n_votes = 5000;
    s.seed = 1000 + seed;
    for (int f = 0; f < 5; ++f) s.features.push_back({.name = "null" + std::to_string(f), .beta = 0, .noise = 1});
    auto null_sim = rating::simulate_arena(s);
    auto null_fit = rating::fit_bt_with_features(null_sim.votes, null_sim.features);
    for (const auto& c : null_fit.beta) {
      ++tests;
      spurious += c.p_value < 0.05;
    }
  }
  double rate = static_cast<double>(spurious) / tests;
  return {z <= 3 && rate <= 0.10,
          "beta " + fmt("%.4f", b.raw_estimate) + " (" + fmt("%.2f", z) + " SE), null rate " +
              std::to_string(spurious) + "/" + std::to_string(tests)};
}

Outcome nesting() {
  auto sim = rating::simulate_arena(styled_spec(3000, 5, 0.7, 0.3, 1));
  auto vanilla = rating::fit_bt(sim.votes);

  FeatureTable zero = sim.features;
  for (auto& [id, row] : zero.rows) std::fill(row.begin(), row.end(), 0.0);
  auto reduced = rating::fit_bt_with_features(sim.votes, zero);
  double worst = 0;
  for (const auto& m : vanilla.models) worst = std::max(worst, std::fabs(vanilla.theta.at(m) - reduced.theta.at(m)));

  auto full = rating::fit_bt_with_features(sim.votes, sim.features);
  double gain = full.log_likelihood - vanilla.log_likelihood;
  return {worst <= 1e-6 && gain >= 0,
          "max |dtheta| " + fmt("%.2e", worst) + ", LL gain " + fmt("%.4f", gain)};
}

Outcome gradient() {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dims(1, 12), rows(5, 80), bit(0, 1);
  double worst = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const int d = dims(rng), n = rows(rng);
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
      y(i) = bit(rng);
      w(i) = bit(rng) ? 1.0 : 0.5;
    }
    rating::BtObjective f(x, y, w, 1e-3);
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
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-6, "max relative error " + fmt("%.2e", worst) + " over 50 instances"};
}

Outcome compression() {
  // Feature mean tracks theta one to one, so style carries half the log-odds.
  auto spec = styled_spec(10000, 9, 1.0, 1.0, 0.25);
  spec.theta_low = -1;
  spec.theta_high = 1;
  auto sim = rating::simulate_arena(spec);
  rating::EloOptions eo;
  eo.min_votes = 0;
  double base = elo_spread(rating::to_elo(rating::fit_bt(sim.votes), eo));
  double adj = elo_spread(rating::to_elo(rating::fit_bt_with_features(sim.votes, sim.features), eo));
  return {std::fabs(adj) < std::fabs(base),
          "baseline spread " + fmt("%.1f", base) + ", adjusted spread " + fmt("%.1f", adj)};
}

formula::CellValue to_engine(const oracle::OValue& v) {
  switch (v.tag) {
    case oracle::OValue::Num: return v.num;
    case oracle::OValue::Text: return v.text;
    case oracle::OValue::Bool: return v.b;
    case oracle::OValue::Err: return *formula::parse_error_text(v.text);
    default: return {};
  }
}

Outcome formula_oracle() {
  std::mt19937_64 rng(777);
  int value_mismatch = 0, cycle_mismatch = 0;
  std::size_t cells = 0, cyclic = 0;
  for (int t = 0; t < 500; ++t) {
    oracle::RandomWorkbook rw = oracle::random_workbook(rng, 20);
    sheet::Workbook wb = sheet::parse_workbook(rw.to_json());
    auto grid = formula::evaluate_workbook(wb);
    auto dep = formula::build_dependency_graph(wb);
    auto ref = oracle::reference_evaluate(rw);

    std::set<formula::CellKey> expected;
    for (const auto& [s, r, c] : ref.cyclic) expected.insert({s, {r, c}});
    cyclic += expected.size();
    cycle_mismatch += dep.cyclic != expected;
    for (const auto& [key, v] : ref.values) {
      const auto& [s, r, c] = key;
      const formula::CellValue* got = grid.find(s, {r, c});
      ++cells;
      if (!got || !(*got == to_engine(v))) ++value_mismatch;
    }
  }
  return {value_mismatch == 0 && cycle_mismatch == 0,
          std::to_string(cells) + " cells, " + std::to_string(cyclic) + " cyclic, " +
              std::to_string(value_mismatch) + " value and " + std::to_string(cycle_mismatch) +
              " cycle-set mismatches"};
}

features::FeatureVector features_of(const std::string& doc) {
  auto wb = sheet::parse_workbook(doc);
  return features::extract_features(wb, formula::evaluate_workbook(wb));
}

Outcome feature_invariants() {
  std::mt19937_64 rng(200);
  int range = 0, partition = 0, translation = 0, permutation = 0, tables = 0;
  for (int t = 0; t < 200; ++t) {
    oracle::SheetSketch sk = oracle::random_sketch(rng);
    const std::string doc = sk.to_json();
    auto wb = sheet::parse_workbook(doc);
    auto fv = features::extract_features(wb, formula::evaluate_workbook(wb));
    for (std::size_t i = 0; i < features::kFeatureCount; ++i) {
      std::string_view name = features::feature_names()[i];
      double v = fv.values[i];
      if (name.substr(0, 4) == "pct_" && !(v >= 0 && v <= 1)) ++range;
    }
    auto counts = features::count_cells(wb);
    partition += counts.text + counts.number + counts.formula != counts.non_empty;

    translation += features_of(sk.to_json(4, 3)) != fv;

    oracle::SheetSketch shuffled = sk;
    std::shuffle(shuffled.cells.begin(), shuffled.cells.end(), rng);
    permutation += features_of(shuffled.to_json()) != fv;

    for (int s = 0; s < sk.sheet_count; ++s) {
      auto got = features::detect_tables(wb.sheets[static_cast<std::size_t>(s)]);
      auto want = oracle::flood_fill_tables(sk.occupancy(s));
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i)
        same = got[i].cell_count == want[i].count && got[i].box.min_row == want[i].min_row &&
               got[i].box.max_row == want[i].max_row && got[i].box.min_col == want[i].min_col &&
               got[i].box.max_col == want[i].max_col;
      tables += !same;
    }
  }
  int bad = range + partition + translation + permutation + tables;
  return {bad == 0, "200 workbooks; violations: range " + std::to_string(range) + ", partition " +
                        std::to_string(partition) + ", translation " + std::to_string(translation) +
                        ", permutation " + std::to_string(permutation) + ", tables " + std::to_string(tables)};
}

Outcome matchmaker() {
  using match::ModelPair;
  match::MatchRequest r;
  r.models = {"A", "B", "C"};
  r.vote_counts = {{"A", 1}, {"B", 4}, {"C", 16}};
  r.n_pairs = 3;
  bool order = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    r.seed = seed;
    auto p = match::ranked_pairs(r);
    order = order && p.size() == 3 && p[0].same_models({"A", "B"}) && p[1].same_models({"A", "C"}) &&
            p[2].same_models({"B", "C"}) && std::fabs(p[0].weight - 1 / std::sqrt(10.0)) < 1e-15 &&
            std::fabs(p[1].weight - 1 / std::sqrt(34.0)) < 1e-15 &&
            std::fabs(p[2].weight - 1 / std::sqrt(85.0)) < 1e-15;
  }

  match::MatchRequest k16;
  for (int i = 0; i < 16; ++i) k16.models.push_back("model-" + std::to_string(i));
  k16.seed = 99;
  auto always = [](const ModelPair&) { return true; };
  bool deterministic = match::ranked_pairs(k16) == match::ranked_pairs(k16) &&
                       match::select_matches(k16, always).pairs == match::select_matches(k16, always).pairs;

  for (int round = 0; round < 500; ++round) {
    k16.seed = static_cast<std::uint64_t>(round);
    for (const auto& p : match::select_matches(k16, always).pairs) {
      ++k16.vote_counts[p.model_a];
      ++k16.vote_counts[p.model_b];
    }
  }
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& m : k16.models) {
    lo = std::min(lo, k16.vote_counts[m]);
    hi = std::max(hi, k16.vote_counts[m]);
  }
  double ratio = lo ? static_cast<double>(hi) / static_cast<double>(lo) : INFINITY;
  return {order && deterministic && ratio < 1.5,
          std::string("ordering ") + (order ? "ok" : "wrong") + ", determinism " +
              (deterministic ? "ok" : "broken") + ", balance ratio " + fmt("%.3f", ratio)};
}

Outcome study_analytics() {
  using Opt = std::optional<int>;
  study::RatingMatrix perfect = {{1, 3, 5, 2}, {1, 3, 5, 2}, {1, 3, 5, Opt{}}};
  double a1 = study::krippendorff_alpha(perfect);
  study::RatingMatrix fixture = {{1, 2, 4, 3}, {2, 2, 5, Opt{}}, {1, 3, 4, 4}};
  double diff = std::fabs(study::krippendorff_alpha(fixture) - oracle::alpha_by_pairs(fixture));
  // Mean of six scores, rounded half up.
  bool boundaries = study::expert_overall({3, 3, 3, 4, 4, 4}) == 4 &&
                    study::expert_overall({1, 1, 1, 2, 2, 2}) == 2 &&
                    study::expert_overall({4, 4, 4, 5, 5, 5}) == 5 &&
                    study::expert_overall({3, 3, 3, 3, 4, 4}) == 3 &&
                    study::expert_overall({3, 3, 4, 4, 4, 4}) == 4;
  return {std::fabs(a1 - 1.0) <= 1e-12 && diff <= 1e-9 && boundaries,
          "alpha(perfect) " + fmt("%.15g", a1) + ", |alpha - oracle| " + fmt("%.1e", diff) +
              ", overall boundaries " + (boundaries ? "ok" : "wrong")};
}

// ---- service replay ----

const std::vector<std::string> kRoster = {"orca-7b", "lynx-pro", "heron-xl", "ibis-mini"};

std::string roster_doc(int rows, const std::string& label) {
  json cells = json::array();
  cells.push_back({{"ref", "A1"}, {"text", label}, {"style", {{"fontWeight", "bold"}}}});
  for (int r = 2; r <= rows + 1; ++r) {
    cells.push_back({{"ref", "A" + std::to_string(r)}, {"text", "row " + std::to_string(r)}});
    cells.push_back({{"ref", "B" + std::to_string(r)}, {"number", r * 3}});
  }
  cells.push_back({{"ref", "B" + std::to_string(rows + 2)}, {"formula", "=SUM(B2:B" + std::to_string(rows + 1) + ")"}});
  return json{{"version", "SheetSpec@2"}, {"sheets", json::array({{{"name", "Plan"}, {"cells", cells}}})}}.dump();
}

const char* const kPrompts[] = {
    "Build a monthly household budget with income, rent, groceries and savings totals",
    "Create a three statement financial model for a small coffee shop over five years",
    "Make a gradebook that averages quiz and exam scores for a class of students",
};

struct Step {
  int prompt = -1;  // submit kPrompts[prompt]
  std::string battle;
  rating::Outcome outcome = rating::Outcome::AWins;
  std::string voter;
};

std::vector<Step> script() {
  static const rating::Outcome cycle[] = {rating::Outcome::AWins, rating::Outcome::BWins, rating::Outcome::Tie,
                                          rating::Outcome::AWins, rating::Outcome::BothBad, rating::Outcome::BWins};
  std::vector<Step> steps;
  int v = 0;
  for (int p = 0; p < 3; ++p) {
    steps.push_back({.prompt = p});
    char pid[16];
    std::snprintf(pid, sizeof pid, "p%06d", p + 1);
    for (int b = 1; b <= 4; ++b, ++v)
      steps.push_back({.battle = std::string(pid) + "-b" + std::to_string(b), .outcome = cycle[v % 6],
                       .voter = "voter-" + std::to_string(v)});
  }
  return steps;
}

struct ScriptedArena {
  arena::ArenaConfig config;
  arena::ServiceDeps deps;

  explicit ScriptedArena(const fs::path& dir) {
    config.data_dir = dir.string();
    config.seed = 2026;
    config.min_votes = 0;
    config.snapshot_every = 4;
    config.anchor = "lynx-pro";
    for (const auto& n : kRoster) config.models.push_back({.name = n, .temperature = 0.5});
    auto gen = std::make_shared<arena::ReplayGenerator>();
    for (std::size_t i = 0; i < kRoster.size(); ++i)
      gen->set_default(kRoster[i], roster_doc(static_cast<int>(i) + 2, "Line items"));
    deps.generator = gen;
    deps.embedder = std::make_shared<categorize::HashingEmbedder>();
    std::ifstream seeds(SARENA_SOURCE_DIR "/data/seed_prompts.jsonl");
    deps.index = categorize::build_index(categorize::read_seeds_jsonl(seeds, deps.embedder.get()), 5);
    deps.clock = [] { return std::string("2026-03-01T12:00:00Z"); };
  }
};

bool names_model(const std::string& payload) {
  for (const auto& m : kRoster)
    if (payload.find(m) != std::string::npos) return true;
  return false;
}

// Runs steps [from, to) through the HTTP layer. Returns false on any
// unexpected status or leak.
bool run_steps(arena::ArenaService& svc, const std::vector<Step>& steps, std::size_t from, std::size_t to,
               std::string& why) {
  arena::HttpApi api(svc);
  for (std::size_t i = from; i < to; ++i) {
    const Step& s = steps[i];
    if (s.prompt >= 0) {
      auto r = api.handle("POST", "/prompts", {}, json{{"text", kPrompts[s.prompt]}}.dump(), {});
      if (r.status != 200) return why = "submit status " + std::to_string(r.status), false;
      if (names_model(r.body)) return why = "submit response names a model", false;
      continue;
    }
    auto open = api.handle("GET", "/battles/" + s.battle, {}, "", {});
    if (open.status != 200) return why = "battle " + s.battle + " status " + std::to_string(open.status), false;
    if (names_model(open.body)) return why = "open battle " + s.battle + " names a model", false;
    auto ack = api.handle("POST", "/battles/" + s.battle + "/vote", {},
                          json{{"outcome", std::string(rating::outcome_name(s.outcome))}, {"voter", s.voter}}.dump(), {});
    if (ack.status != 200) return why = "vote status " + std::to_string(ack.status), false;
    auto a = json::parse(ack.body);
    int named = 0;
    for (const auto& m : kRoster) named += ack.body.find(m) != std::string::npos;
    if (named != 2 || a["model_a"] == a["model_b"]) return why = "reveal does not name exactly two models", false;
  }
  return true;
}

std::string boards(arena::ArenaService& svc) {
  std::string out;
  for (bool adjusted : {false, true}) out += svc.leaderboard_json({.adjusted = adjusted, .min_votes = 0}) + "\n";
  return out;
}

Outcome service_replay() {
  const auto steps = script();
  const std::size_t cut = 8;  // after the second prompt and two of its votes
  std::string why;

  TempDir straight("straight"), broken("broken");
  std::string want_state, want_boards;
  {
    ScriptedArena a(straight.path());
    arena::ArenaService svc(a.config, a.deps);
    if (!run_steps(svc, steps, 0, steps.size(), why)) return {false, "uninterrupted run: " + why};
    want_state = svc.state().to_json();
    want_boards = boards(svc);
    auto st = svc.state();
    if (st.prompts.size() != 3 || st.battles.size() != 12 || st.votes.size() != 12)
      return {false, "uninterrupted run has " + std::to_string(st.battles.size()) + " battles and " +
                         std::to_string(st.votes.size()) + " votes"};
  }

  std::cout.flush();
  pid_t child = ::fork();
  if (child < 0) return {false, "fork failed"};
  if (child == 0) {
    ScriptedArena a(broken.path());
    arena::ArenaService svc(a.config, a.deps);
    std::string ignored;
    bool ok = run_steps(svc, steps, 0, cut, ignored);
    ::_exit(ok ? 0 : 1);  // no destructors, no orderly shutdown
  }
  int status = 0;
  ::waitpid(child, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "first half failed in the child"};
  {
    // A write cut short by the kill.
    std::ofstream tail(broken.path() / "events.jsonl", std::ios::app | std::ios::binary);
    tail << "{\"v\":1,\"seq\":99,\"type\":\"VoteCa";
  }

  ScriptedArena b(broken.path());
  arena::ArenaService svc(b.config, b.deps);
  if (!svc.recovered_torn_tail()) return {false, "torn tail not detected"};
  if (svc.state().votes.size() != 6) return {false, "restart recovered " + std::to_string(svc.state().votes.size()) + " votes"};
  if (!run_steps(svc, steps, cut, steps.size(), why)) return {false, "resumed run: " + why};

  bool same_state = svc.state().to_json() == want_state;
  bool same_boards = boards(svc) == want_boards;
  bool same_log = slurp(broken.path() / "events.jsonl") == slurp(straight.path() / "events.jsonl");
  arena::EventLog log((broken.path() / "events.jsonl").string());
  bool log_only = arena::replay(log, (broken.path() / "missing-snapshot.json").string()).to_json() == want_state;
  auto lb = json::parse(svc.leaderboard_json({.min_votes = 0}));
  bool anchored = false;
  for (const auto& row : lb["ranked"])
    if (row["model"] == "lynx-pro") anchored = row["elo"].get<double>() == 1000.0;

  bool pass = same_state && same_boards && same_log && log_only && anchored;
  return {pass, std::string("12 battles, 12 votes, kill after step ") + std::to_string(cut) + "; state " +
                    (same_state ? "equal" : "differs") + ", leaderboards " + (same_boards ? "equal" : "differ") +
                    ", log " + (same_log ? "byte-identical" : "differs") + ", log-only replay " +
                    (log_only ? "equal" : "differs") + ", open battles blind"};
}

// ---- offline pipeline ----

int sh(const std::string& cmd) {
  int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::vector<std::string> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(line);
  return rows;
}

Outcome end_to_end() {
  TempDir dir("e2e");
  const std::string bin = SARENA_CLI_PATH;
  const std::string d = dir.path().string();
  // Proxies pointed at a closed port: any network attempt would fail loudly.
  const std::string env = "http_proxy=http://127.0.0.1:9 https_proxy=http://127.0.0.1:9 ";
  if (int rc = sh(env + bin + " simulate --out " + d + "/sim --models 10 --votes 6000 --seed 11 --feature style:1:1:0.5"))
    return {false, "simulate exited " + std::to_string(rc)};
  if (int rc = sh(env + bin + " fit " + d + "/sim/votes.jsonl --features " + d +
                  "/sim/features.jsonl --adjusted --anchor m01 --out " + d + "/fit"))
    return {false, "fit exited " + std::to_string(rc)};
  if (int rc = sh(env + bin + " report " + d + "/sim/votes.jsonl --features " + d +
                  "/sim/features.jsonl --anchor m01 --out " + d + "/report"))
    return {false, "report exited " + std::to_string(rc)};

  for (const auto* sub : {"fit", "report"}) {
    auto rows = csv_rows(dir.path() / sub / "comparison.csv");
    if (rows.size() != 11 || rows[0] != "model,baseline_elo,adjusted_elo,delta_elo,baseline_rank,adjusted_rank,delta_rank")
      return {false, std::string(sub) + "/comparison.csv has the wrong shape"};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto f = split_csv_line(rows[i]);
      double base = std::stod(f[1]), adj = std::stod(f[2]), delta = std::stod(f[3]);
      int rb = std::stoi(f[4]), ra = std::stoi(f[5]), dr = std::stoi(f[6]);
      if (std::fabs(adj - base - delta) > 1e-9 || rb - ra != dr)
        return {false, std::string(sub) + "/comparison.csv row " + f[0] + " is inconsistent"};
      if (f[0] == "m01" && (base != 1000.0 || adj != 1000.0)) return {false, "anchor not at 1000 in " + std::string(sub)};
    }
  }
  const std::string md = slurp(dir.path() / "report" / "report.md");
  for (const char* col : {"Baseline Elo", "Adjusted Elo", "ΔElo", "ΔRank"})
    if (md.find(col) == std::string::npos) return {false, std::string("report.md lacks column ") + col};
  return {true, "simulate, fit and report ran offline; baseline, adjusted, ΔElo and ΔRank present"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"anchor-contract", anchor_contract},
      {"bt-recovery", bt_recovery},
      {"covariate-recovery", covariate_recovery},
      {"nesting-reduction", nesting},
      {"gradient-correctness", gradient},
      {"compression-direction", compression},
      {"formula-oracle", formula_oracle},
      {"feature-invariants", feature_invariants},
      {"matchmaker", matchmaker},
      {"study-analytics", study_analytics},
      {"service-replay", service_replay},
      {"end-to-end-offline", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
