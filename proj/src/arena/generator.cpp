#include "sarena/arena/generator.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sarena/arena/events.hpp"
#include "sarena/common/feature_table.hpp"
#include "sarena/common/http.hpp"

namespace sarena::arena {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const std::string& default_system_prompt() {
  static const std::string kPrompt =
      "You build spreadsheet workbooks.\n"
      "\n"
      "Return ONLY valid JSON that conforms to the SheetSpec@2 JSON Schema. "
      "Emit one JSON object with no prose, comments or code fences around it.\n"
      "\n"
      "Formulas use Excel A1 notation with commas between arguments. "
      "Every sheet and cell a formula refers to must exist in your output.\n"
      "\n"
      "Styling and conditional formats are optional. When present they must follow the schema.";
  return kPrompt;
}

std::string prompt_hash(const std::string& prompt) { return token_digest(prompt); }

void ReplayGenerator::add(const std::string& model, const std::string& prompt, std::string document) {
  documents_[{model, prompt_hash(prompt)}] = std::move(document);
}

void ReplayGenerator::set_default(const std::string& model, std::string document) {
  defaults_[model] = std::move(document);
}

void ReplayGenerator::load_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("replay directory " + dir + " does not exist");
  for (const auto& model_dir : fs::directory_iterator(dir)) {
    if (!model_dir.is_directory()) continue;
    const std::string model = model_dir.path().filename().string();
    for (const auto& f : fs::directory_iterator(model_dir.path())) {
      if (!f.is_regular_file() || f.path().extension() != ".json") continue;
      const std::string stem = f.path().stem().string();
      if (stem == "default")
        defaults_[model] = slurp(f.path());
      else
        documents_[{model, stem}] = slurp(f.path());
    }
  }
}

GenerationResult ReplayGenerator::generate(const GenerationRequest& request) {
  const std::string& model = request.model->name;
  if (auto it = documents_.find({model, prompt_hash(request.prompt)}); it != documents_.end())
    return {true, it->second, ""};
  if (auto it = defaults_.find(model); it != defaults_.end()) return {true, it->second, ""};
  return {false, "", "no replay document for model '" + model + "'"};
}

std::string HttpGenerator::request_body(const GenerationRequest& request) {
  const ModelConfig& m = *request.model;
  nlohmann::ordered_json body;
  body["model"] = m.api_model.empty() ? m.name : m.api_model;
  std::string system = request.system_prompt;
  if (!m.structured_output) system += "\n\nJSON Schema:\n" + request.schema;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", request.prompt}}});
  body["max_tokens"] = m.max_tokens;
  if (m.temperature) body["temperature"] = *m.temperature;
  if (m.structured_output) {
    body["response_format"] = {
        {"type", "json_schema"},
        {"json_schema", {{"name", "SheetSpec"}, {"schema", nlohmann::ordered_json::parse(request.schema)}}}};
  }
  return body.dump();
}

GenerationResult HttpGenerator::generate(const GenerationRequest& request) {
  const ModelConfig& m = *request.model;
  std::map<std::string, std::string> headers;
  if (!m.api_key_env.empty()) {
    const char* key = std::getenv(m.api_key_env.c_str());
    if (!key) return {false, "", "environment variable " + m.api_key_env + " is not set"};
    headers["Authorization"] = std::string("Bearer ") + key;
  }
  auto res = http_post_json(m.endpoint, request_body(request), headers, timeout_);
  if (!res.ok())
    return {false, "", res.error.empty() ? "HTTP " + std::to_string(res.status) : res.error};
  try {
    auto j = nlohmann::json::parse(res.body);
    return {true, j.at("choices").at(0).at("message").at("content").get<std::string>(), ""};
  } catch (const nlohmann::json::exception& e) {
    return {false, "", std::string("unexpected completion response: ") + e.what()};
  }
}

void RoutingGenerator::route(const std::string& provider, std::shared_ptr<GeneratorClient> client) {
  routes_[provider] = std::move(client);
}

GenerationResult RoutingGenerator::generate(const GenerationRequest& request) {
  auto it = routes_.find(request.model->provider);
  if (it == routes_.end()) return {false, "", "no generator for provider '" + request.model->provider + "'"};
  return it->second->generate(request);
}

}  // namespace sarena::arena
