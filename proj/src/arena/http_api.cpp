#include "sarena/arena/http_api.hpp"

#include <cctype>

#include "httplib.h"
#include "json.hpp"

namespace sarena::arena {
namespace {

using ojson = nlohmann::ordered_json;

ApiResponse error(int status, std::string_view kind, const std::string& message) {
  return {status, ojson{{"error", kind}, {"message", message}}.dump()};
}

ApiResponse from_service_error(const ServiceError& e) {
  int status = 400;
  switch (e.kind()) {
    case ServiceError::Kind::UnknownBattle: status = 404; break;
    case ServiceError::Kind::DuplicateVote: status = 409; break;
    case ServiceError::Kind::Upstream: status = 502; break;
    default: break;
  }
  return error(status, service_error_name(e.kind()), e.what());
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<nlohmann::json> parse_object(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

ApiResponse HttpApi::handle(const std::string& method, const std::string& path,
                            const std::map<std::string, std::string>& query, const std::string& body,
                            const std::map<std::string, std::string>& headers) {
  try {
    if (path == "/prompts") {
      if (method != "POST") return error(405, "MethodNotAllowed", "use POST");
      return submit(body);
    }
    if (path == "/leaderboard") {
      if (method != "GET") return error(405, "MethodNotAllowed", "use GET");
      return leaderboard(query);
    }
    if (path == "/models") {
      if (method != "GET") return error(405, "MethodNotAllowed", "use GET");
      return {200, service_.models_json()};
    }
    const std::string prefix = "/battles/";
    if (path.rfind(prefix, 0) == 0) {
      std::string rest = path.substr(prefix.size());
      const std::string suffix = "/vote";
      if (rest.size() > suffix.size() && rest.compare(rest.size() - suffix.size(), suffix.size(), suffix) == 0) {
        if (method != "POST") return error(405, "MethodNotAllowed", "use POST");
        return vote(rest.substr(0, rest.size() - suffix.size()), body, headers);
      }
      if (!rest.empty() && rest.find('/') == std::string::npos) {
        if (method != "GET") return error(405, "MethodNotAllowed", "use GET");
        return {200, service_.battle_json(rest)};
      }
    }
    return error(404, "NotFound", "no route for " + method + " " + path);
  } catch (const ServiceError& e) {
    return from_service_error(e);
  } catch (const std::exception& e) {
    return error(500, "Internal", e.what());
  }
}

ApiResponse HttpApi::submit(const std::string& body) {
  auto j = parse_object(body);
  if (!j || !j->contains("text") || !(*j)["text"].is_string())
    return error(400, "BadRequest", "body must be a JSON object with a string \"text\"");
  SubmitResult r = service_.submit_prompt((*j)["text"].get<std::string>());
  ojson out;
  out["prompt_id"] = r.prompt_id;
  out["category"] = r.category;
  out["partial"] = r.partial;
  if (r.partial) out["reason"] = "GenerationExhausted";
  // Discarded pairs would name models, so only their number is reported.
  out["discarded"] = r.discarded.size();
  out["battles"] = ojson::array();
  for (const auto& b : r.battles) out["battles"].push_back(ojson::parse(service_.battle_json(b.battle_id)));
  return {200, out.dump()};
}

ApiResponse HttpApi::vote(const std::string& battle_id, const std::string& body,
                          const std::map<std::string, std::string>& headers) {
  auto j = parse_object(body);
  if (!j || !j->contains("outcome") || !(*j)["outcome"].is_string())
    return error(400, "BadRequest", "body must be a JSON object with a string \"outcome\"");
  auto outcome = rating::parse_outcome((*j)["outcome"].get<std::string>());
  if (!outcome) return error(400, "InvalidOutcome", "outcome must be A_WINS, B_WINS, TIE or BOTH_BAD");
  std::string voter;
  if (j->contains("voter") && (*j)["voter"].is_string()) voter = (*j)["voter"].get<std::string>();
  for (const auto& [k, v] : headers)
    if (voter.empty() && lower(k) == "x-voter-token") voter = v;
  VoteAck ack = service_.cast_vote(battle_id, *outcome, voter);
  ojson out;
  out["battle_id"] = ack.battle_id;
  out["outcome"] = rating::outcome_name(ack.outcome);
  out["model_a"] = ack.model_a;
  out["model_b"] = ack.model_b;
  return {200, out.dump()};
}

ApiResponse HttpApi::leaderboard(const std::map<std::string, std::string>& query) {
  LeaderboardQuery q;
  if (auto it = query.find("category"); it != query.end() && !it->second.empty()) q.category = it->second;
  if (auto it = query.find("adjusted"); it != query.end()) {
    const std::string v = lower(it->second);
    if (v == "true" || v == "1")
      q.adjusted = true;
    else if (v == "false" || v == "0" || v.empty())
      q.adjusted = false;
    else
      return error(400, "BadRequest", "adjusted must be true or false");
  }
  if (auto it = query.find("min_votes"); it != query.end() && !it->second.empty()) {
    const std::string& v = it->second;
    if (v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos)
      return error(400, "BadRequest", "min_votes must be a non-negative integer");
    q.min_votes = static_cast<std::size_t>(std::stoul(v));
  }
  return {200, service_.leaderboard_json(q)};
}

void HttpApi::mount(httplib::Server& server) {
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    std::map<std::string, std::string> headers(req.headers.begin(), req.headers.end());
    ApiResponse r = handle(req.method, req.path, query, req.body, headers);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
}

}  // namespace sarena::arena
