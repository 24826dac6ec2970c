#include "sarena/cli/cli.hpp"

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sarena/arena/config.hpp"
#include "sarena/arena/http_api.hpp"
#include "sarena/arena/service.hpp"
#include "sarena/common/categories.hpp"
#include "sarena/common/feature_table.hpp"
#include "sarena/features/features.hpp"
#include "sarena/formula/evaluator.hpp"
#include "sarena/rating/bradley_terry.hpp"
#include "sarena/rating/leaderboard.hpp"
#include "sarena/rating/simulate.hpp"
#include "sarena/sheetspec/workbook.hpp"
#include "sarena/study/study.hpp"

// After Eigen: resolv.h defines a macro that collides with Eigen parameter names.
#include "httplib.h"

namespace sarena::cli {
namespace {

namespace fs = std::filesystem;
using rating::RatingError;

// Signals a numerical failure that should exit with kExitNumerical.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw InputError("cannot write " + path.string());
}

template <typename Writer>
std::string to_string_with(Writer&& w) {
  std::ostringstream ss;
  w(ss);
  return ss.str();
}

std::vector<rating::VoteRecord> load_votes(const std::string& path) {
  std::istringstream in(read_text(path));
  try {
    return rating::read_votes_jsonl(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

FeatureTable load_features(const std::string& path) {
  if (!fs::exists(path)) throw InputError("feature file " + path + " does not exist; run `sarena features` first");
  try {
    return load_feature_table(path);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string signed_fixed(double v, int digits) { return (v > 0 ? "+" : "") + fixed(v, digits); }
std::string signed_int(int v) { return (v > 0 ? "+" : "") + std::to_string(v); }

std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  out << '|';
  for (const auto& h : header) out << ' ' << h << " |";
  out << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << '\n';
  for (const auto& r : rows) {
    out << '|';
    for (const auto& c : r) out << ' ' << c << " |";
    out << '\n';
  }
  return out.str();
}

std::string md_leaderboard(const rating::Leaderboard& board) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : board.ranked) rows.push_back({std::to_string(r.rank), r.model, fixed(r.elo, 1), std::to_string(r.n_votes)});
  for (const auto& r : board.unranked) rows.push_back({"-", r.model, fixed(r.elo, 1), std::to_string(r.n_votes)});
  return md_table({"Rank", "Model", "Elo", "Votes"}, rows);
}

std::string md_comparison(const std::vector<rating::FitComparison>& cmp) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : cmp)
    rows.push_back({r.model, fixed(r.base_elo, 1), fixed(r.adjusted_elo, 1), signed_fixed(r.delta_elo, 1),
                    std::to_string(r.base_rank), std::to_string(r.adjusted_rank), signed_int(r.delta_rank)});
  return md_table({"Model", "Baseline Elo", "Adjusted Elo", "ΔElo", "Baseline Rank", "Adjusted Rank", "ΔRank"}, rows);
}

std::string md_significance(const std::vector<rating::SignificanceRow>& sig) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : sig)
    rows.push_back({r.feature, fixed(r.coefficient, 4), fixed(r.std_error, 4), fixed(r.p_value, 4), r.significant ? "yes" : "no"});
  return md_table({"Feature", "Coefficient", "Std. error", "p", "Significant"}, rows);
}

void require_converged(const rating::RatingFit& fit, const std::string& what) {
  if (!fit.converged)
    throw NumericalError(what + " did not converge after " + std::to_string(fit.iterations) +
                         " iterations (gradient norm " + format_double(fit.gradient_norm) + ")");
}

// Shared fit knobs. Config file and environment supply anchor and min_votes.
struct FitFlags {
  std::string config_path;
  std::string anchor;
  std::size_t min_votes = 50;
  std::size_t segment_min_votes = 30;
  std::string mode = "per_battle";
  std::string ties = "exclude";
  double ridge = 1e-6;
  double alpha = 0.05;

  void add(CLI::App& app) {
    app.add_option("--config", config_path, "TOML config file")->check(CLI::ExistingFile);
    app.add_option("--anchor", anchor, "model pinned at 1000 Elo (default: most-voted)");
    app.add_option("--min-votes", min_votes, "votes needed for a ranked row");
    app.add_option("--segment-min-votes", segment_min_votes, "usable votes needed to fit a segment");
    app.add_option("--mode", mode, "covariate mode")->check(CLI::IsMember({"per_battle", "model_mean"}));
    app.add_option("--ties", ties, "tie handling")->check(CLI::IsMember({"exclude", "half_win"}));
    app.add_option("--ridge", ridge, "ridge penalty")->check(CLI::NonNegativeNumber);
    app.add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  }

  // Flags win over the config file, which wins over the environment.
  void resolve(const CLI::App& app) {
    std::optional<std::string> path;
    if (!config_path.empty()) path = config_path;
    arena::ArenaConfig c = arena::load_config(path, arena::process_env());
    if (app.count("--anchor") == 0) anchor = c.anchor;
    if (app.count("--min-votes") == 0) min_votes = c.min_votes;
  }

  rating::FitConfig fit_config() const {
    rating::FitConfig f;
    f.anchor = anchor;
    f.ridge = ridge;
    f.ties = ties == "half_win" ? rating::TieMode::HalfWin : rating::TieMode::Exclude;
    f.covariates = *rating::parse_covariate_mode(mode);
    f.drop_collinear = true;
    return f;
  }

  rating::EloOptions elo() const {
    rating::EloOptions e;
    e.min_votes = min_votes;
    return e;
  }
};

// ---- features ----

struct FeaturesCmd {
  std::vector<std::string> paths;
  std::string output;
  std::string format = "csv";

  void add(CLI::App& app) {
    app.add_option("paths", paths, "workbook JSON files or directories of them")->required();
    app.add_option("-o,--output", output, "output file (default: stdout)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "jsonl"}));
  }

  int run(std::ostream& out, std::ostream& err) const {
    std::vector<fs::path> files;
    for (const auto& p : paths) {
      std::error_code ec;
      if (fs::is_directory(p, ec)) {
        std::vector<fs::path> found;
        for (const auto& e : fs::directory_iterator(p))
          if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
        std::sort(found.begin(), found.end());
        files.insert(files.end(), found.begin(), found.end());
      } else if (fs::is_regular_file(p, ec)) {
        files.emplace_back(p);
      } else {
        throw InputError("cannot read input path " + p);
      }
    }
    std::vector<std::pair<std::string, features::FeatureVector>> rows;
    std::set<std::string> ids;
    std::size_t failed = 0;
    for (const auto& f : files) {
      std::string id = f.stem().string();
      if (!ids.insert(id).second) throw InputError("two inputs share the workbook id '" + id + "'");
      try {
        auto wb = sheet::parse_workbook(read_text(f.string()));
        rows.emplace_back(id, features::extract_features(wb, formula::evaluate_workbook(wb)));
      } catch (const std::exception& e) {
        ++failed;
        err << "warning: skipping " << f.string() << ": " << e.what() << '\n';
      }
    }
    if (!files.empty() && failed == files.size()) throw InputError("no input workbook could be parsed");
    FeatureTable table = features::to_table(rows);
    if (table.names.empty())
      for (auto n : features::feature_names()) table.names.emplace_back(n);
    std::string text = to_string_with([&](std::ostream& s) {
      if (format == "csv")
        write_feature_csv(s, table);
      else
        write_feature_jsonl(s, table);
    });
    if (output.empty())
      out << text;
    else
      write_text(output, text);
    return kExitOk;
  }
};

// ---- fit ----

struct FitCmd {
  std::string votes_path;
  std::string features_path;
  bool adjusted = false;
  std::string category;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string format = "md";
  FitFlags flags;

  void add(CLI::App& app) {
    app.add_option("votes", votes_path, "vote JSONL")->required();
    app.add_option("--features", features_path, "feature CSV or JSONL keyed by workbook_id");
    app.add_flag("--adjusted", adjusted, "also fit with feature covariates");
    app.add_option("--category", category, "restrict to one category (\"Finance\" covers both finance labels)");
    app.add_option("--seed", seed, "recorded in the metadata; fits are deterministic");
    app.add_option("--out", out_dir, "directory for CSV and JSON outputs");
    app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"md", "csv", "json"}));
    flags.add(app);
  }

  int run(const CLI::App& app, std::ostream& out, std::ostream& err) {
    flags.resolve(app);
    if (adjusted && features_path.empty())
      throw InputError("--adjusted needs --features FILE (produce one with `sarena features`)");
    auto votes = load_votes(votes_path);
    std::optional<FeatureTable> table;
    if (adjusted) table = load_features(features_path);

    rating::FitConfig cfg = flags.fit_config();
    rating::SegmentOptions seg{flags.segment_min_votes};
    auto fit = [&](const FeatureTable* f) {
      return category.empty() ? (f ? rating::fit_bt_with_features(votes, *f, cfg) : rating::fit_bt(votes, cfg))
                              : rating::segment_fit(votes, category, f, cfg, seg);
    };
    rating::RatingFit base = fit(nullptr);
    require_converged(base, "baseline fit");
    auto elo = flags.elo();
    auto base_board = rating::to_elo(base, elo);

    std::optional<rating::RatingFit> adj;
    if (adjusted) {
      cfg.anchor = base.anchor;
      adj = fit(&*table);
      require_converged(*adj, "feature-adjusted fit");
    }

    nlohmann::ordered_json meta = nlohmann::ordered_json::parse(rating::fit_metadata_json(base, elo));
    meta["seed"] = seed;
    meta["category"] = category.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(category);

    if (!out_dir.empty()) {
      fs::path dir(out_dir);
      write_text(dir / "leaderboard.csv", to_string_with([&](std::ostream& s) { rating::write_leaderboard_csv(s, base_board); }));
      write_text(dir / "metadata.json", meta.dump(2) + "\n");
      if (adj) {
        auto adj_board = rating::to_elo(*adj, elo);
        write_text(dir / "adjusted_leaderboard.csv",
                   to_string_with([&](std::ostream& s) { rating::write_leaderboard_csv(s, adj_board); }));
        write_text(dir / "comparison.csv", to_string_with([&](std::ostream& s) {
                     rating::write_comparison_csv(s, rating::compare_fits(base, *adj, elo));
                   }));
        write_text(dir / "significance.csv", to_string_with([&](std::ostream& s) {
                     rating::write_significance_csv(s, rating::significance_table(*adj, flags.alpha));
                   }));
        write_text(dir / "adjusted_metadata.json", rating::fit_metadata_json(*adj, elo) + "\n");
      }
    }

    if (format == "json") {
      nlohmann::ordered_json j;
      j["baseline"] = nlohmann::ordered_json::parse(rating::leaderboard_json(base_board));
      j["metadata"] = meta;
      if (adj) {
        j["adjusted"] = nlohmann::ordered_json::parse(rating::leaderboard_json(rating::to_elo(*adj, elo)));
        j["adjusted_metadata"] = nlohmann::ordered_json::parse(rating::fit_metadata_json(*adj, elo));
      }
      out << j.dump(2) << '\n';
    } else if (format == "csv") {
      if (adj)
        rating::write_comparison_csv(out, rating::compare_fits(base, *adj, elo));
      else
        rating::write_leaderboard_csv(out, base_board);
    } else if (adj) {
      out << md_comparison(rating::compare_fits(base, *adj, elo)) << '\n'
          << md_significance(rating::significance_table(*adj, flags.alpha));
    } else {
      out << md_leaderboard(base_board);
    }
    for (const auto& w : base.warnings) err << "warning: " << w << '\n';
    if (adj)
      for (const auto& w : adj->warnings) err << "warning: " << w << '\n';
    return kExitOk;
  }
};

// ---- simulate ----

struct SimulateCmd {
  std::string spec_path;
  std::string out_dir;
  int models = 16;
  std::size_t votes = 5000;
  std::uint64_t seed = 1;
  double tie_rate = 0;
  double both_bad_rate = 0;
  std::vector<std::string> feature_specs;
  std::string features_format = "jsonl";

  void add(CLI::App& app) {
    app.add_option("--spec", spec_path, "JSON simulation spec")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--models", models, "number of models K");
    app.add_option("--votes", votes, "number of votes");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--tie-rate", tie_rate, "share of TIE outcomes")->check(CLI::Range(0.0, 1.0));
    app.add_option("--both-bad-rate", both_bad_rate, "share of BOTH_BAD outcomes")->check(CLI::Range(0.0, 1.0));
    app.add_option("--feature", feature_specs, "planted feature name:beta[:loading[:noise]]");
    app.add_option("--features-format", features_format, "feature file format")->check(CLI::IsMember({"csv", "jsonl"}));
  }

  static rating::PlantedFeature parse_feature(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 4 || parts[0].empty())
      throw InputError("--feature expects name:beta[:loading[:noise]], got '" + text + "'");
    rating::PlantedFeature f;
    f.name = parts[0];
    try {
      f.beta = std::stod(parts[1]);
      if (parts.size() > 2) f.loading = std::stod(parts[2]);
      if (parts.size() > 3) f.noise = std::stod(parts[3]);
    } catch (const std::exception&) {
      throw InputError("--feature has a non-numeric field: '" + text + "'");
    }
    return f;
  }

  int run(const CLI::App& app, std::ostream& out) const {
    rating::SimulationSpec spec;
    if (!spec_path.empty()) spec = rating::simulation_spec_from_json(read_text(spec_path));
    if (app.count("--models")) {
      spec.model_count = models;
      spec.models.clear();
      spec.theta.clear();
    }
    if (app.count("--votes")) spec.n_votes = votes;
    if (app.count("--seed")) spec.seed = seed;
    if (app.count("--tie-rate")) spec.tie_rate = tie_rate;
    if (app.count("--both-bad-rate")) spec.both_bad_rate = both_bad_rate;
    for (const auto& f : feature_specs) spec.features.push_back(parse_feature(f));
    const std::size_t k = spec.models.empty() ? static_cast<std::size_t>(std::max(spec.model_count, 0)) : spec.models.size();
    if (k < 2) throw InputError("a simulation needs at least two models");
    if (spec.n_votes < 1) throw InputError("a simulation needs at least one vote");

    auto result = rating::simulate_arena(spec);
    fs::path dir(out_dir);
    write_text(dir / "votes.jsonl", to_string_with([&](std::ostream& s) { rating::write_votes_jsonl(s, result.votes); }));
    const std::string features_name = features_format == "csv" ? "features.csv" : "features.jsonl";
    write_text(dir / features_name, to_string_with([&](std::ostream& s) {
                 if (features_format == "csv")
                   write_feature_csv(s, result.features);
                 else
                   write_feature_jsonl(s, result.features);
               }));
    write_text(dir / "truth.json", result.truth_json + "\n");
    out << "wrote " << result.votes.size() << " votes for " << result.models.size() << " models to " << dir.string()
        << '\n';
    return kExitOk;
  }
};

// ---- report ----

struct ReportCmd {
  std::string votes_path;
  std::string features_path;
  std::string tags_path;
  std::string out_dir;
  FitFlags flags;

  void add(CLI::App& app) {
    app.add_option("votes", votes_path, "vote JSONL")->required();
    app.add_option("--features", features_path, "feature CSV or JSONL keyed by workbook_id")->required();
    app.add_option("--tags", tags_path, "failure-tag JSONL for losing workbooks");
    app.add_option("--out", out_dir, "output directory")->required();
    flags.add(app);
  }

  int run(const CLI::App& app, std::ostream& out) {
    flags.resolve(app);
    auto votes = load_votes(votes_path);
    FeatureTable table = load_features(features_path);
    rating::FitConfig cfg = flags.fit_config();
    auto elo = flags.elo();
    fs::path dir(out_dir);

    rating::RatingFit base = rating::fit_bt(votes, cfg);
    require_converged(base, "baseline fit");
    cfg.anchor = base.anchor;
    rating::RatingFit adj = rating::fit_bt_with_features(votes, table, cfg);
    require_converged(adj, "feature-adjusted fit");
    auto cmp = rating::compare_fits(base, adj, elo);
    auto sig = rating::significance_table(adj, flags.alpha);
    auto base_board = rating::to_elo(base, elo);

    std::ostringstream md;
    md << "# Arena report\n\n"
       << votes.size() << " votes, " << base.n_votes_used << " decisive, " << base.models.size()
       << " rated models. Anchor " << base.anchor << " at 1000 Elo.\n\n";
    md << "## Baseline and feature-adjusted Elo\n\n" << md_comparison(cmp) << '\n';
    md << "## Feature significance (alpha " << format_double(flags.alpha) << ")\n\n" << md_significance(sig) << '\n';

    write_text(dir / "leaderboard.csv", to_string_with([&](std::ostream& s) { rating::write_leaderboard_csv(s, base_board); }));
    write_text(dir / "comparison.csv", to_string_with([&](std::ostream& s) { rating::write_comparison_csv(s, cmp); }));
    write_text(dir / "significance.csv", to_string_with([&](std::ostream& s) { rating::write_significance_csv(s, sig); }));

    // Per-domain fits. Segments below the floor are listed, not fitted.
    std::ostringstream seg_csv, seg_board_csv;
    seg_csv << "category,feature,coefficient,std_error,p_value,significant\n";
    seg_board_csv << "category,rank,model,elo,n_votes\n";
    md << "## Domain segments\n\n";
    std::vector<std::vector<std::string>> seg_rows;
    for (const auto& c : arena_categories()) {
      rating::FitConfig seg_cfg = cfg;
      seg_cfg.anchor.clear();
      try {
        rating::RatingFit sb = rating::segment_fit(votes, c, nullptr, seg_cfg, {flags.segment_min_votes});
        seg_cfg.anchor = sb.anchor;
        rating::RatingFit sf = rating::segment_fit(votes, c, &table, seg_cfg, {flags.segment_min_votes});
        if (!sf.converged) throw NumericalError("did not converge");
        std::vector<std::string> significant;
        for (const auto& r : rating::significance_table(sf, flags.alpha)) {
          seg_csv << csv_escape(c) << ',' << csv_escape(r.feature) << ',' << format_double(r.coefficient) << ','
                  << format_double(r.std_error) << ',' << format_double(r.p_value) << ',' << (r.significant ? 1 : 0)
                  << '\n';
          if (r.significant) significant.push_back(r.feature);
        }
        auto board = rating::to_elo(sb, elo);
        for (const auto& r : board.ranked)
          seg_board_csv << csv_escape(c) << ',' << r.rank << ',' << csv_escape(r.model) << ',' << format_double(r.elo)
                        << ',' << r.n_votes << '\n';
        std::string top = board.ranked.empty() ? "-" : board.ranked.front().model;
        std::string list;
        for (const auto& s : significant) list += (list.empty() ? "" : ", ") + s;
        seg_rows.push_back({c, std::to_string(sf.n_votes_used), top, list.empty() ? "none" : list});
      } catch (const RatingError& e) {
        seg_rows.push_back({c, "-", "-", std::string("not fitted: ") + e.what()});
      } catch (const NumericalError& e) {
        seg_rows.push_back({c, "-", "-", std::string("not fitted: ") + e.what()});
      }
    }
    md << md_table({"Category", "Decisive votes", "Top model", "Significant features"}, seg_rows) << '\n';
    write_text(dir / "segments.csv", seg_csv.str());
    write_text(dir / "segment_leaderboards.csv", seg_board_csv.str());

    if (!tags_path.empty()) {
      std::istringstream in(read_text(tags_path));
      auto losses = study::read_tags_jsonl(in);
      std::map<std::string, std::pair<double, double>> record;  // wins, decisive
      for (const auto& v : votes) {
        if (!rating::is_decisive(v.outcome)) continue;
        const std::string& winner = v.outcome == rating::Outcome::AWins ? v.model_a : v.model_b;
        record[v.model_a].second += 1;
        record[v.model_b].second += 1;
        record[winner].first += 1;
      }
      std::map<std::string, double> win_rates;
      for (const auto& [m, r] : record) win_rates[m] = r.first / r.second;
      auto failures = study::aggregate_failure_tags(losses, win_rates);
      write_text(dir / "failure_tags.csv", to_string_with([&](std::ostream& s) { study::write_failure_csv(s, failures); }));
      std::vector<std::string> header = {"Model", "Win rate", "Losses"};
      for (const auto& t : study::tag_columns()) header.push_back(t);
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : failures.rows) {
        std::vector<std::string> row = {r.model, r.win_rate ? fixed(*r.win_rate, 3) : "-", std::to_string(r.losses)};
        for (double x : r.rate) row.push_back(fixed(x, 3));
        rows.push_back(row);
      }
      md << "## Failure tags\n\n" << md_table(header, rows);
      if (failures.mean_tags_per_loss) md << "\nMean tags per loss: " << fixed(*failures.mean_tags_per_loss, 2) << '\n';
      md << '\n';
    }

    nlohmann::ordered_json meta;
    meta["baseline"] = nlohmann::ordered_json::parse(rating::fit_metadata_json(base, elo));
    meta["adjusted"] = nlohmann::ordered_json::parse(rating::fit_metadata_json(adj, elo));
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
    write_text(dir / "report.md", md.str());
    out << md.str();
    return kExitOk;
  }
};

// ---- serve ----

httplib::Server* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

struct ServeCmd {
  std::string config_path;
  std::string host;
  int port = 0;
  std::string data_dir;
  std::string replay_dir;
  std::string seeds;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    app.add_option("--config", config_path, "TOML config file")->check(CLI::ExistingFile);
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "bind port")->check(CLI::Range(0, 65535));
    app.add_option("--data-dir", data_dir, "event log and snapshot directory");
    app.add_option("--replay-dir", replay_dir, "fixture documents for replay models");
    app.add_option("--seeds", seeds, "seed prompt JSONL");
    app.add_option("--seed", seed, "matchmaker seed");
  }

  int run(const CLI::App& app, std::ostream& out, std::ostream& err) const {
    std::optional<std::string> path;
    if (!config_path.empty()) path = config_path;
    arena::ArenaConfig c = arena::load_config(path, arena::process_env());
    if (app.count("--host")) c.server.host = host;
    if (app.count("--port")) c.server.port = port;
    if (app.count("--data-dir")) c.data_dir = data_dir;
    if (app.count("--replay-dir")) c.replay_dir = replay_dir;
    if (app.count("--seeds")) c.seeds = seeds;
    if (app.count("--seed")) c.seed = seed;
    arena::validate_config(c);

    arena::ArenaService service(c, arena::make_deps(c));
    if (service.recovered_torn_tail()) err << "warning: dropped an incomplete final event from the log\n";
    arena::HttpApi api(service);
    httplib::Server server;
    api.mount(server);
    int bound = c.server.port == 0 ? server.bind_to_any_port(c.server.host) : (server.bind_to_port(c.server.host, c.server.port) ? c.server.port : -1);
    if (bound < 0) throw InputError("cannot bind " + c.server.host + ":" + std::to_string(c.server.port));
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    out << "listening on http://" << c.server.host << ':' << bound << " with " << c.models.size() << " models, "
        << service.state().last_seq << " events replayed" << std::endl;
    server.listen_after_bind();
    g_server = nullptr;
    return kExitOk;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spreadsheet preference arena: features, rating fits, simulation, serving and reports", "sarena"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sarena 1.0.0");

  FeaturesCmd features_cmd;
  FitCmd fit_cmd;
  SimulateCmd simulate_cmd;
  ServeCmd serve_cmd;
  ReportCmd report_cmd;
  auto* features = app.add_subcommand("features", "extract the 29 workbook features to CSV or JSONL");
  auto* fit = app.add_subcommand("fit", "fit baseline and feature-adjusted leaderboards from votes");
  auto* simulate = app.add_subcommand("simulate", "generate synthetic votes and features from planted parameters");
  auto* serve = app.add_subcommand("serve", "run the arena HTTP service");
  auto* report = app.add_subcommand("report", "write leaderboard, significance, segment and failure-tag tables");
  features_cmd.add(*features);
  fit_cmd.add(*fit);
  simulate_cmd.add(*simulate);
  serve_cmd.add(*serve);
  report_cmd.add(*report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (features->parsed()) return features_cmd.run(out, err);
    if (fit->parsed()) return fit_cmd.run(*fit, out, err);
    if (simulate->parsed()) return simulate_cmd.run(*simulate, out);
    if (serve->parsed()) return serve_cmd.run(*serve, out, err);
    if (report->parsed()) return report_cmd.run(*report, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const RatingError& e) {
    err << "error: " << e.what() << '\n';
    bool numerical = e.kind() == RatingError::Kind::SingularInformation || e.kind() == RatingError::Kind::DegenerateData;
    return numerical ? kExitNumerical : kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace sarena::cli
