#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sarena::arena {

struct ModelConfig {
  std::string name;                  // roster ID, used in votes and leaderboards
  std::string provider = "replay";   // "replay" | "http"
  std::string endpoint;              // chat-completions URL for "http"
  std::string api_model;             // provider-side model name; defaults to name
  std::string api_key_env;           // env var holding the bearer key
  std::optional<double> temperature; // unset: provider default
  int max_tokens = 16384;
  bool structured_output = true;     // false: schema goes into the system prompt
};

struct EmbeddingConfig {
  std::string provider = "hashing";  // "hashing" | "http"
  int dimension = 512;
  std::string endpoint;
  std::string model;
  std::string api_key_env;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
};

struct ArenaConfig {
  std::uint64_t seed = 0;
  std::size_t min_votes = 50;
  int n_pairs = 4;
  std::string data_dir = "arena-data";
  std::size_t snapshot_every = 100;  // events between snapshots, 0 disables
  int generation_timeout_ms = 180000;
  int generation_retries = 1;
  std::string anchor;                // empty: most-voted model
  std::string seeds;                 // seed prompt JSONL; empty: bundled file
  int k = 5;
  ServerConfig server;
  EmbeddingConfig embedding;
  std::vector<ModelConfig> models;
  std::string replay_dir;            // fixture documents for "replay" models
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
EnvLookup process_env();

// Applies SARENA_SEED, SARENA_MIN_VOTES, SARENA_N_PAIRS, SARENA_DATA_DIR,
// SARENA_ANCHOR, SARENA_SEEDS, SARENA_REPLAY_DIR, SARENA_HOST and SARENA_PORT.
// Throws sarena::InputError on malformed values.
void apply_env(ArenaConfig& config, const EnvLookup& env);

// Overlays a TOML document. Unknown keys are rejected.
void apply_toml(ArenaConfig& config, const std::string& text);

// Defaults, then environment, then the optional TOML file.
ArenaConfig load_config(const std::optional<std::string>& toml_path, const EnvLookup& env);

// Throws sarena::InputError on an unusable roster or parameter.
void validate_config(const ArenaConfig& config);

}  // namespace sarena::arena
