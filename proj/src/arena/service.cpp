#include "sarena/arena/service.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>

#include "json.hpp"
#include "sarena/common/categories.hpp"
#include "sarena/formula/evaluator.hpp"
#include "sarena/rating/leaderboard.hpp"
#include "sarena/sheetspec/workbook.hpp"

#ifndef SARENA_DEFAULT_SEEDS
#define SARENA_DEFAULT_SEEDS "data/seed_prompts.jsonl"
#endif

namespace sarena::arena {
namespace {

using ojson = nlohmann::ordered_json;

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string numbered(const char* fmt, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, n);
  return buf;
}

std::size_t prompt_number(const std::string& id) {
  if (id.size() < 2 || id[0] != 'p') return 0;
  try {
    return static_cast<std::size_t>(std::stoull(id.substr(1)));
  } catch (const std::exception&) {
    return 0;
  }
}

std::string check_document(const std::string& document) {
  try {
    auto report = sheet::validate_workbook(sheet::parse_workbook(document));
    if (report.ok) return "";
    for (const auto& issue : report.issues)
      if (issue.severity == sheet::Severity::Error) return issue.path + ": " + issue.message;
    return "validation failed";
  } catch (const sheet::ParseError& e) {
    return (e.path().empty() ? "" : e.path() + ": ") + e.what();
  }
}

ojson parse_ordered(const std::string& text) { return ojson::parse(text); }

}  // namespace

struct ArenaService::Candidate {
  std::string model;
  std::string document;
  bool valid = false;
  std::string error;
};

std::string_view service_error_name(ServiceError::Kind kind) {
  switch (kind) {
    case ServiceError::Kind::EmptyPrompt: return "EmptyPrompt";
    case ServiceError::Kind::PromptTooLong: return "PromptTooLong";
    case ServiceError::Kind::UnknownBattle: return "UnknownBattle";
    case ServiceError::Kind::DuplicateVote: return "DuplicateVote";
    case ServiceError::Kind::InvalidVoter: return "InvalidVoter";
    case ServiceError::Kind::Upstream: return "Upstream";
  }
  return "Unknown";
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ServiceDeps make_deps(const ArenaConfig& config) {
  ServiceDeps deps;
  if (config.embedding.provider == "http") {
    categorize::HttpEmbedderConfig ec;
    ec.endpoint = config.embedding.endpoint;
    ec.model = config.embedding.model;
    ec.api_key_env = config.embedding.api_key_env;
    deps.embedder = std::make_shared<categorize::HttpEmbedder>(ec);
  } else {
    deps.embedder = std::make_shared<categorize::HashingEmbedder>(config.embedding.dimension);
  }
  const std::string seeds_path = config.seeds.empty() ? SARENA_DEFAULT_SEEDS : config.seeds;
  std::ifstream in(seeds_path);
  if (!in) throw InputError("cannot read seed prompts " + seeds_path);
  try {
    deps.index = categorize::build_index(categorize::read_seeds_jsonl(in, deps.embedder.get()), config.k);
  } catch (const categorize::CategoryError& e) {
    throw InputError(std::string("seed prompts: ") + e.what());
  }

  auto routing = std::make_shared<RoutingGenerator>();
  auto replay = std::make_shared<ReplayGenerator>();
  if (!config.replay_dir.empty()) replay->load_directory(config.replay_dir);
  routing->route("replay", replay);
  routing->route("http", std::make_shared<HttpGenerator>(std::chrono::milliseconds(config.generation_timeout_ms)));
  deps.generator = routing;
  return deps;
}

ArenaService::ArenaService(ArenaConfig config, ServiceDeps deps) : config_(std::move(config)), deps_(std::move(deps)) {
  validate_config(config_);
  if (!deps_.generator || !deps_.embedder) throw InputError("the service needs a generator and an embedder");
  if (!deps_.clock) deps_.clock = utc_now;
  for (const auto& m : config_.models) roster_[m.name] = &m;
  std::filesystem::create_directories(config_.data_dir);
  log_ = std::make_unique<EventLog>(log_path());
  state_ = replay(*log_, snapshot_path());
  for (const auto& [id, p] : state_.prompts) next_prompt_ = std::max(next_prompt_, prompt_number(id) + 1);
}

std::string ArenaService::log_path() const { return (std::filesystem::path(config_.data_dir) / "events.jsonl").string(); }

std::string ArenaService::snapshot_path() const {
  return (std::filesystem::path(config_.data_dir) / "snapshot.json").string();
}

ArenaState ArenaService::state() const {
  std::shared_lock lock(state_mutex_);
  return state_;
}

ArenaService::Candidate ArenaService::generate_candidate(const ModelConfig& model, const std::string& prompt) const {
  GenerationRequest req{&model, prompt, default_system_prompt(), sheet::sheetspec_json_schema()};
  Candidate c;
  c.model = model.name;
  for (int attempt = 0; attempt <= config_.generation_retries; ++attempt) {
    GenerationResult r;
    try {
      r = deps_.generator->generate(req);
    } catch (const std::exception& e) {
      r = {false, "", e.what()};
    }
    if (!r.ok) {
      c.error = r.error.empty() ? "generation failed" : r.error;
      continue;  // transport failures get another attempt
    }
    c.document = std::move(r.document);
    c.error = check_document(c.document);
    c.valid = c.error.empty();
    return c;
  }
  return c;
}

void ArenaService::commit(const std::vector<Event>& events) {
  // Caller holds the unique lock. Applying first keeps invalid events out of the log.
  for (const auto& ev : events) {
    LoggedEvent e{state_.last_seq + 1, ev};
    state_.apply(e);
    log_->append(e);
    if (config_.snapshot_every > 0 && state_.last_seq % config_.snapshot_every == 0)
      write_snapshot(snapshot_path(), state_);
  }
}

SubmitResult ArenaService::submit_prompt(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ServiceError(ServiceError::Kind::EmptyPrompt, "prompt text is empty");
  if (code_points(text) > kMaxPromptChars)
    throw ServiceError(ServiceError::Kind::PromptTooLong,
                       "prompt exceeds " + std::to_string(kMaxPromptChars) + " characters");

  std::string category;
  try {
    category = categorize::classify(deps_.index, deps_.embedder->embed(text)).category;
  } catch (const categorize::CategoryError& e) {
    if (e.kind() == categorize::CategoryError::Kind::ZeroVector)
      throw ServiceError(ServiceError::Kind::EmptyPrompt, "prompt has no letters or digits");
    throw ServiceError(ServiceError::Kind::Upstream, std::string("categorization failed: ") + e.what());
  } catch (const std::exception& e) {
    throw ServiceError(ServiceError::Kind::Upstream, std::string("categorization failed: ") + e.what());
  }

  match::MatchRequest request;
  std::size_t index = 0;
  std::string timestamp = deps_.clock();
  {
    std::unique_lock lock(state_mutex_);
    index = next_prompt_++;
    request.vote_counts = state_.vote_counts;
  }
  for (const auto& m : config_.models) request.models.push_back(m.name);
  request.n_pairs = config_.n_pairs;
  request.seed = mix_seed(config_.seed, index);
  const std::string prompt_id = numbered("p%06zu", index);

  // Candidates are generated in rank order, in parallel batches sized to the
  // number of pairs still missing.
  const std::vector<match::ModelPair> ranked = match::ranked_pairs(request);
  std::vector<std::pair<Candidate, Candidate>> generated;
  std::size_t calls = 0, accepted = 0;
  auto oracle = [&](const match::ModelPair& pair) {
    std::size_t i = calls++;
    if (i >= generated.size()) {
      std::size_t need = static_cast<std::size_t>(config_.n_pairs) - accepted;
      std::size_t end = std::min(ranked.size(), i + std::max<std::size_t>(need, 1));
      std::vector<std::future<Candidate>> futures;
      for (std::size_t j = i; j < end; ++j)
        for (const auto* side : {&ranked[j].model_a, &ranked[j].model_b})
          futures.push_back(std::async(std::launch::async, [this, side, &text] {
            return generate_candidate(*roster_.at(*side), text);
          }));
      for (std::size_t f = 0; f < futures.size(); f += 2) generated.emplace_back(futures[f].get(), futures[f + 1].get());
    }
    const auto& [a, b] = generated[i];
    (void)pair;
    bool ok = a.valid && b.valid;
    if (ok) ++accepted;
    return ok;
  };
  match::MatchSet set = match::select_matches(request, oracle);

  std::vector<Event> events;
  events.push_back(PromptSubmitted{prompt_id, text, category, timestamp});
  std::vector<std::pair<std::string, std::string>> workbook_ids;
  std::size_t w = 0;
  for (std::size_t i = 0; i < calls; ++i) {
    std::pair<std::string, std::string> ids;
    for (auto [c, id] : {std::pair{&generated[i].first, &ids.first}, std::pair{&generated[i].second, &ids.second}}) {
      *id = prompt_id + numbered("-w%02zu", ++w);
      events.push_back(GenerationStored{*id, prompt_id, c->model, c->document, c->valid, c->error});
    }
    workbook_ids.push_back(ids);
  }
  SubmitResult result;
  result.prompt_id = prompt_id;
  result.category = category;
  result.discarded = set.discarded;
  result.partial = set.insufficient;
  for (std::size_t i = 0; i < calls; ++i) {
    const auto& [a, b] = generated[i];
    if (!(a.valid && b.valid)) continue;
    BattleSummary s{prompt_id + "-b" + std::to_string(result.battles.size() + 1), workbook_ids[i].first,
                    workbook_ids[i].second};
    events.push_back(BattleCreated{s.battle_id, prompt_id, s.workbook_a, s.workbook_b});
    result.battles.push_back(std::move(s));
  }

  std::unique_lock lock(state_mutex_);
  commit(events);
  return result;
}

VoteAck ArenaService::cast_vote(const std::string& battle_id, rating::Outcome outcome, const std::string& voter_token) {
  if (voter_token.empty()) throw ServiceError(ServiceError::Kind::InvalidVoter, "a voter token is required");
  const std::string voter = token_digest(voter_token);
  std::string timestamp = deps_.clock();
  std::unique_lock lock(state_mutex_);
  auto it = state_.battles.find(battle_id);
  if (it == state_.battles.end()) throw ServiceError(ServiceError::Kind::UnknownBattle, "no battle " + battle_id);
  if (state_.voted.count({battle_id, voter}))
    throw ServiceError(ServiceError::Kind::DuplicateVote, "this voter already voted on " + battle_id);
  const Battle& b = it->second;
  rating::VoteRecord v;
  v.battle_id = battle_id;
  v.prompt_id = b.prompt_id;
  v.category = state_.prompts.at(b.prompt_id).category;
  v.model_a = state_.model_of(b.workbook_a);
  v.model_b = state_.model_of(b.workbook_b);
  v.workbook_a = b.workbook_a;
  v.workbook_b = b.workbook_b;
  v.outcome = outcome;
  v.timestamp = timestamp;
  commit({VoteCast{v, voter}});
  return {battle_id, outcome, v.model_a, v.model_b};
}

std::string ArenaService::battle_json(const std::string& battle_id) const {
  std::shared_lock lock(state_mutex_);
  auto it = state_.battles.find(battle_id);
  if (it == state_.battles.end()) throw ServiceError(ServiceError::Kind::UnknownBattle, "no battle " + battle_id);
  const Battle& b = it->second;
  const Prompt& p = state_.prompts.at(b.prompt_id);
  ojson j;
  j["battle_id"] = battle_id;
  j["prompt_id"] = b.prompt_id;
  j["prompt"] = p.text;
  j["category"] = p.category;
  for (auto [side, id] : {std::pair{"a", &b.workbook_a}, std::pair{"b", &b.workbook_b}}) {
    const std::string& doc = state_.generations.at(*id).document;
    auto grid = formula::evaluate_workbook(sheet::parse_workbook(doc));
    j[side] = {{"workbook_id", *id}, {"document", parse_ordered(doc)}, {"grid", parse_ordered(formula::grid_to_json(grid))}};
  }
  return j.dump();
}

std::string ArenaService::models_json() const {
  std::shared_lock lock(state_mutex_);
  ojson arr = ojson::array();
  for (const auto& m : config_.models) {
    ojson row;
    row["name"] = m.name;
    row["temperature"] = m.temperature ? ojson(*m.temperature) : ojson(nullptr);
    row["max_tokens"] = m.max_tokens;
    auto vc = state_.vote_counts.find(m.name);
    row["votes"] = vc == state_.vote_counts.end() ? 0 : vc->second;
    arr.push_back(row);
  }
  return ojson{{"models", arr}}.dump();
}

features::FeatureVector ArenaService::features_of(const std::string& workbook_id, const std::string& document) {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = feature_cache_.find(workbook_id); it != feature_cache_.end()) return it->second;
  }
  auto wb = sheet::parse_workbook(document);
  auto fv = features::extract_features(wb, formula::evaluate_workbook(wb));
  std::lock_guard lock(cache_mutex_);
  return feature_cache_.emplace(workbook_id, fv).first->second;
}

std::string ArenaService::leaderboard_json(const LeaderboardQuery& query) {
  const std::size_t min_votes = query.min_votes.value_or(config_.min_votes);
  const auto key = std::make_tuple(query.category.value_or(""), query.adjusted, min_votes);
  std::vector<rating::VoteRecord> votes;
  std::map<std::string, std::string> documents;
  {
    std::shared_lock lock(state_mutex_);
    {
      std::lock_guard cache(cache_mutex_);
      if (auto it = board_cache_.find(key); it != board_cache_.end() && it->second.first == state_.votes.size())
        return it->second.second;
    }
    votes = state_.votes;
    if (query.adjusted)
      for (const auto& v : votes)
        for (const auto* id : {&v.workbook_a, &v.workbook_b}) documents.emplace(*id, state_.generations.at(*id).document);
  }
  // The fit runs on a copy so voting never waits on it.
  std::string body = build_leaderboard(votes, query, min_votes, documents);
  std::lock_guard cache(cache_mutex_);
  board_cache_[key] = {votes.size(), body};
  return body;
}

std::string ArenaService::build_leaderboard(const std::vector<rating::VoteRecord>& all_votes,
                                            const LeaderboardQuery& query, std::size_t min_votes,
                                            const std::map<std::string, std::string>& documents) {
  ojson j;
  j["category"] = query.category ? ojson(*query.category) : ojson(nullptr);
  j["adjusted"] = query.adjusted;
  j["min_votes"] = min_votes;

  std::vector<rating::VoteRecord> votes;
  if (query.category) {
    auto labels = expand_category(*query.category);
    for (const auto& v : all_votes)
      if (std::find(labels.begin(), labels.end(), v.category) != labels.end()) votes.push_back(v);
  } else {
    votes = all_votes;
  }
  j["n_votes"] = votes.size();
  j["reason"] = nullptr;
  j["anchor"] = nullptr;
  j["ranked"] = ojson::array();
  j["unranked"] = ojson::array();
  j["warnings"] = ojson::array();

  auto explain = [&](const std::string& reason) {
    j["reason"] = reason;
    std::map<std::string, std::size_t> counts;
    for (const auto& v : votes) {
      ++counts[v.model_a];
      ++counts[v.model_b];
    }
    for (const auto& [m, n] : counts) j["unranked"].push_back({{"model", m}, {"elo", nullptr}, {"n_votes", n}});
    return j.dump();
  };
  if (all_votes.empty()) return explain("no votes");
  if (votes.empty()) return explain("no votes in segment");

  rating::FitConfig cfg;
  cfg.drop_collinear = true;
  if (!config_.anchor.empty()) {
    bool present = std::any_of(votes.begin(), votes.end(), [&](const rating::VoteRecord& v) {
      return rating::is_decisive(v.outcome) && (v.model_a == config_.anchor || v.model_b == config_.anchor);
    });
    if (present)
      cfg.anchor = config_.anchor;
    else
      j["warnings"].push_back("configured anchor " + config_.anchor + " has no decisive votes here; using the most-voted model");
  }
  rating::EloOptions elo;
  elo.min_votes = min_votes;

  try {
    rating::RatingFit base = rating::fit_bt(votes, cfg);
    if (!base.converged) return explain("fit did not converge");
    rating::RatingFit shown = base;
    if (query.adjusted) {
      std::vector<std::pair<std::string, features::FeatureVector>> rows;
      for (const auto& [id, doc] : documents) rows.emplace_back(id, features_of(id, doc));
      cfg.anchor = base.anchor;
      shown = rating::fit_bt_with_features(votes, features::to_table(rows), cfg);
      if (!shown.converged) return explain("feature-adjusted fit did not converge");
    }
    ojson board = parse_ordered(rating::leaderboard_json(rating::to_elo(shown, elo)));
    for (auto& [k, v] : board.items()) j[k] = v;
    j["metadata"] = parse_ordered(rating::fit_metadata_json(shown, elo));
    if (query.adjusted) {
      j["baseline"] = parse_ordered(rating::leaderboard_json(rating::to_elo(base, elo)));
      ojson cmp = ojson::array();
      for (const auto& r : rating::compare_fits(base, shown, elo))
        cmp.push_back({{"model", r.model},
                       {"baseline_elo", r.base_elo},
                       {"adjusted_elo", r.adjusted_elo},
                       {"delta_elo", r.delta_elo},
                       {"baseline_rank", r.base_rank},
                       {"adjusted_rank", r.adjusted_rank},
                       {"delta_rank", r.delta_rank}});
      j["comparison"] = cmp;
      ojson sig = ojson::array();
      for (const auto& r : rating::significance_table(shown))
        sig.push_back({{"feature", r.feature},
                       {"coefficient", r.coefficient},
                       {"std_error", r.std_error},
                       {"p_value", r.p_value},
                       {"significant", r.significant}});
      j["significance"] = sig;
    }
    for (const auto& w : shown.warnings) j["warnings"].push_back(w);
  } catch (const rating::RatingError& e) {
    return explain(e.what());
  }
  return j.dump();
}

}  // namespace sarena::arena
