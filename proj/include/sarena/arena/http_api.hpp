#pragma once

#include <map>
#include <string>

#include "sarena/arena/service.hpp"

namespace httplib {
class Server;
}

namespace sarena::arena {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

// Routes:
//   POST /prompts                {"text"}
//   GET  /battles/{id}
//   POST /battles/{id}/vote      {"outcome", "voter"?}; token may come from X-Voter-Token
//   GET  /leaderboard            ?category=&adjusted=&min_votes=
//   GET  /models
// Errors are {"error": kind, "message": text} with 400, 404, 409 or 502.
class HttpApi {
 public:
  explicit HttpApi(ArenaService& service) : service_(service) {}

  // Header names are matched case-insensitively.
  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::map<std::string, std::string>& query, const std::string& body,
                     const std::map<std::string, std::string>& headers);

  void mount(httplib::Server& server);

 private:
  ApiResponse submit(const std::string& body);
  ApiResponse vote(const std::string& battle_id, const std::string& body,
                   const std::map<std::string, std::string>& headers);
  ApiResponse leaderboard(const std::map<std::string, std::string>& query);

  ArenaService& service_;
};

}  // namespace sarena::arena
