#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sarena/arena/config.hpp"
#include "sarena/arena/events.hpp"
#include "sarena/arena/generator.hpp"
#include "sarena/categorizer/categorizer.hpp"
#include "sarena/features/features.hpp"
#include "sarena/matchmaker/matchmaker.hpp"

namespace sarena::arena {

inline constexpr std::size_t kMaxPromptChars = 20000;  // code points

class ServiceError : public std::runtime_error {
 public:
  enum class Kind { EmptyPrompt, PromptTooLong, UnknownBattle, DuplicateVote, InvalidVoter, Upstream };
  ServiceError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view service_error_name(ServiceError::Kind kind);

using Clock = std::function<std::string()>;
// ISO-8601 UTC with second resolution.
std::string utc_now();

struct BattleSummary {
  std::string battle_id;
  std::string workbook_a;
  std::string workbook_b;
  bool operator==(const BattleSummary&) const = default;
};

struct SubmitResult {
  std::string prompt_id;
  std::string category;
  std::vector<BattleSummary> battles;
  bool partial = false;  // fewer than n_pairs valid pairs could be assembled
  std::vector<match::ModelPair> discarded;
};

struct VoteAck {
  std::string battle_id;
  rating::Outcome outcome = rating::Outcome::AWins;
  std::string model_a;  // revealed once the vote is in
  std::string model_b;
};

struct LeaderboardQuery {
  std::optional<std::string> category;
  bool adjusted = false;
  std::optional<std::size_t> min_votes;  // unset: configured value
};

struct ServiceDeps {
  std::shared_ptr<GeneratorClient> generator;
  std::shared_ptr<categorize::EmbeddingProvider> embedder;
  categorize::CategoryIndex index;
  Clock clock = utc_now;
};

// Builds the embedder, seed index and generators described by `config`.
ServiceDeps make_deps(const ArenaConfig& config);

class ArenaService {
 public:
  // Opens or creates the log under config.data_dir and replays it.
  ArenaService(ArenaConfig config, ServiceDeps deps);

  SubmitResult submit_prompt(const std::string& text);
  VoteAck cast_vote(const std::string& battle_id, rating::Outcome outcome, const std::string& voter_token);

  // Documents and evaluated grids for both sides. Never names a model.
  std::string battle_json(const std::string& battle_id) const;
  // Always answers; degenerate states carry a "reason".
  std::string leaderboard_json(const LeaderboardQuery& query);
  // Public roster: name, temperature, max tokens.
  std::string models_json() const;

  ArenaState state() const;
  const ArenaConfig& config() const { return config_; }
  bool recovered_torn_tail() const { return log_->truncated_tail(); }
  std::string log_path() const;
  std::string snapshot_path() const;

 private:
  struct Candidate;

  Candidate generate_candidate(const ModelConfig& model, const std::string& prompt) const;
  void commit(const std::vector<Event>& events);
  features::FeatureVector features_of(const std::string& workbook_id, const std::string& document);
  std::string build_leaderboard(const std::vector<rating::VoteRecord>& votes, const LeaderboardQuery& query,
                                std::size_t min_votes,
                                const std::map<std::string, std::string>& documents);

  ArenaConfig config_;
  ServiceDeps deps_;
  std::map<std::string, const ModelConfig*> roster_;
  std::unique_ptr<EventLog> log_;

  mutable std::shared_mutex state_mutex_;
  ArenaState state_;
  std::size_t next_prompt_ = 1;

  std::mutex cache_mutex_;
  std::map<std::tuple<std::string, bool, std::size_t>, std::pair<std::size_t, std::string>> board_cache_;
  std::map<std::string, features::FeatureVector> feature_cache_;
};

}  // namespace sarena::arena
