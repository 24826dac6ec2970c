#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "sarena/arena/config.hpp"

namespace sarena::arena {

struct GenerationRequest {
  const ModelConfig* model = nullptr;
  std::string prompt;
  std::string system_prompt;
  std::string schema;  // JSON Schema text
};

struct GenerationResult {
  bool ok = false;
  std::string document;  // raw output when ok
  std::string error;
};

class GeneratorClient {
 public:
  virtual ~GeneratorClient() = default;
  // Must be safe to call from several threads at once.
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
};

// Instruction text sent with every generation request.
const std::string& default_system_prompt();

// 16 hex digits identifying a prompt text.
std::string prompt_hash(const std::string& prompt);

// Serves stored documents keyed by (model, prompt hash), falling back to a
// per-model default.
class ReplayGenerator : public GeneratorClient {
 public:
  void add(const std::string& model, const std::string& prompt, std::string document);
  void set_default(const std::string& model, std::string document);
  // Layout: <dir>/<model>/<prompt hash>.json and <dir>/<model>/default.json.
  void load_directory(const std::string& dir);

  GenerationResult generate(const GenerationRequest& request) override;

 private:
  std::map<std::pair<std::string, std::string>, std::string> documents_;
  std::map<std::string, std::string> defaults_;
};

// Chat-completions style endpoint. Uses a json_schema response format when
// the model supports structured output, otherwise appends the schema to the
// system prompt.
class HttpGenerator : public GeneratorClient {
 public:
  explicit HttpGenerator(std::chrono::milliseconds timeout) : timeout_(timeout) {}
  GenerationResult generate(const GenerationRequest& request) override;

  // Request body for `request`, exposed for tests.
  static std::string request_body(const GenerationRequest& request);

 private:
  std::chrono::milliseconds timeout_;
};

// Dispatches on ModelConfig::provider.
class RoutingGenerator : public GeneratorClient {
 public:
  void route(const std::string& provider, std::shared_ptr<GeneratorClient> client);
  GenerationResult generate(const GenerationRequest& request) override;

 private:
  std::map<std::string, std::shared_ptr<GeneratorClient>> routes_;
};

}  // namespace sarena::arena
