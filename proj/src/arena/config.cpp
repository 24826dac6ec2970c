#include "sarena/arena/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "sarena/common/feature_table.hpp"
#include "toml.hpp"

namespace sarena::arena {
namespace {

std::int64_t parse_int(const std::string& name, const std::string& text, std::int64_t lo, std::int64_t hi) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || v < lo || v > hi)
    throw InputError(name + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                     "], got \"" + text + "\"");
  return v;
}

void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where) {
  for (auto&& [key, node] : t) {
    (void)node;
    if (!allowed.count(std::string(key.str())))
      throw InputError("unknown config key '" + std::string(key.str()) + "' in " + where);
  }
}

std::int64_t get_int(const toml::table& t, const char* key, std::int64_t lo, std::int64_t hi, std::int64_t fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  auto v = n->value<std::int64_t>();
  if (!v || *v < lo || *v > hi)
    throw InputError(std::string("config key '") + key + "' must be an integer in [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
  return *v;
}

std::string get_str(const toml::table& t, const char* key, const std::string& fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  auto v = n->value<std::string>();
  if (!v) throw InputError(std::string("config key '") + key + "' must be a string");
  return *v;
}

bool get_bool(const toml::table& t, const char* key, bool fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  auto v = n->value<bool>();
  if (!v) throw InputError(std::string("config key '") + key + "' must be a boolean");
  return *v;
}

const toml::table* get_table(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) throw InputError(std::string("config key '") + key + "' must be a table");
  return n->as_table();
}

ModelConfig parse_model(const toml::table& t, std::size_t index) {
  const std::string where = "models[" + std::to_string(index) + "]";
  check_keys(t,
             {"name", "provider", "endpoint", "api_model", "api_key_env", "temperature", "max_tokens",
              "structured_output"},
             where);
  ModelConfig m;
  m.name = get_str(t, "name", "");
  m.provider = get_str(t, "provider", m.provider);
  m.endpoint = get_str(t, "endpoint", "");
  m.api_model = get_str(t, "api_model", "");
  m.api_key_env = get_str(t, "api_key_env", "");
  if (const toml::node* n = t.get("temperature")) {
    auto v = n->value<double>();
    if (!v) throw InputError(where + ".temperature must be a number");
    m.temperature = *v;
  }
  m.max_tokens = static_cast<int>(get_int(t, "max_tokens", 1, 100000000, m.max_tokens));
  m.structured_output = get_bool(t, "structured_output", m.structured_output);
  return m;
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

void apply_env(ArenaConfig& c, const EnvLookup& env) {
  if (auto v = env("SARENA_SEED")) c.seed = static_cast<std::uint64_t>(parse_int("SARENA_SEED", *v, 0, INT64_MAX));
  if (auto v = env("SARENA_MIN_VOTES"))
    c.min_votes = static_cast<std::size_t>(parse_int("SARENA_MIN_VOTES", *v, 0, INT32_MAX));
  if (auto v = env("SARENA_N_PAIRS")) c.n_pairs = static_cast<int>(parse_int("SARENA_N_PAIRS", *v, 1, 1000));
  if (auto v = env("SARENA_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("SARENA_ANCHOR")) c.anchor = *v;
  if (auto v = env("SARENA_SEEDS")) c.seeds = *v;
  if (auto v = env("SARENA_REPLAY_DIR")) c.replay_dir = *v;
  if (auto v = env("SARENA_HOST")) c.server.host = *v;
  if (auto v = env("SARENA_PORT")) c.server.port = static_cast<int>(parse_int("SARENA_PORT", *v, 0, 65535));
}

void apply_toml(ArenaConfig& c, const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config line " << e.source().begin.line << ": " << e.description();
    throw InputError(msg.str());
  }
  check_keys(root,
             {"seed", "min_votes", "n_pairs", "data_dir", "snapshot_every", "generation_timeout_ms",
              "generation_retries", "anchor", "seeds", "k", "server", "embedding", "models", "replay"},
             "the top level");
  c.seed = static_cast<std::uint64_t>(get_int(root, "seed", 0, INT64_MAX, static_cast<std::int64_t>(c.seed)));
  c.min_votes = static_cast<std::size_t>(get_int(root, "min_votes", 0, INT32_MAX, static_cast<std::int64_t>(c.min_votes)));
  c.n_pairs = static_cast<int>(get_int(root, "n_pairs", 1, 1000, c.n_pairs));
  c.data_dir = get_str(root, "data_dir", c.data_dir);
  c.snapshot_every =
      static_cast<std::size_t>(get_int(root, "snapshot_every", 0, INT32_MAX, static_cast<std::int64_t>(c.snapshot_every)));
  c.generation_timeout_ms = static_cast<int>(get_int(root, "generation_timeout_ms", 1, INT32_MAX, c.generation_timeout_ms));
  c.generation_retries = static_cast<int>(get_int(root, "generation_retries", 0, 10, c.generation_retries));
  c.anchor = get_str(root, "anchor", c.anchor);
  c.seeds = get_str(root, "seeds", c.seeds);
  c.k = static_cast<int>(get_int(root, "k", 1, 1000, c.k));

  if (const toml::table* s = get_table(root, "server")) {
    check_keys(*s, {"host", "port"}, "[server]");
    c.server.host = get_str(*s, "host", c.server.host);
    c.server.port = static_cast<int>(get_int(*s, "port", 0, 65535, c.server.port));
  }
  if (const toml::table* e = get_table(root, "embedding")) {
    check_keys(*e, {"provider", "dimension", "endpoint", "model", "api_key_env"}, "[embedding]");
    c.embedding.provider = get_str(*e, "provider", c.embedding.provider);
    c.embedding.dimension = static_cast<int>(get_int(*e, "dimension", 1, 1 << 20, c.embedding.dimension));
    c.embedding.endpoint = get_str(*e, "endpoint", c.embedding.endpoint);
    c.embedding.model = get_str(*e, "model", c.embedding.model);
    c.embedding.api_key_env = get_str(*e, "api_key_env", c.embedding.api_key_env);
  }
  if (const toml::table* r = get_table(root, "replay")) {
    check_keys(*r, {"dir"}, "[replay]");
    c.replay_dir = get_str(*r, "dir", c.replay_dir);
  }
  if (const toml::node* n = root.get("models")) {
    const toml::array* arr = n->as_array();
    if (!arr) throw InputError("config key 'models' must be an array of tables");
    c.models.clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = (*arr)[i].as_table();
      if (!t) throw InputError("models[" + std::to_string(i) + "] must be a table");
      c.models.push_back(parse_model(*t, i));
    }
  }
}

ArenaConfig load_config(const std::optional<std::string>& toml_path, const EnvLookup& env) {
  ArenaConfig c;
  apply_env(c, env);
  if (toml_path) {
    std::ifstream in(*toml_path);
    if (!in) throw InputError("cannot read config file " + *toml_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_toml(c, ss.str());
  }
  return c;
}

void validate_config(const ArenaConfig& c) {
  if (c.models.size() < 2) throw InputError("the model roster needs at least two models");
  std::set<std::string> names;
  for (const auto& m : c.models) {
    if (m.name.empty()) throw InputError("every model needs a name");
    if (!names.insert(m.name).second) throw InputError("duplicate model name '" + m.name + "'");
    if (m.provider != "replay" && m.provider != "http")
      throw InputError("model '" + m.name + "' has unknown provider '" + m.provider + "'");
    if (m.provider == "http" && m.endpoint.empty())
      throw InputError("model '" + m.name + "' uses the http provider but has no endpoint");
  }
  if (c.embedding.provider != "hashing" && c.embedding.provider != "http")
    throw InputError("unknown embedding provider '" + c.embedding.provider + "'");
  if (c.embedding.provider == "http" && c.embedding.endpoint.empty())
    throw InputError("the http embedding provider needs an endpoint");
}

}  // namespace sarena::arena
