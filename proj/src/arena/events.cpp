#include "sarena/arena/events.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sarena/common/feature_table.hpp"

namespace sarena::arena {
namespace {

using ojson = nlohmann::ordered_json;

ojson header(std::uint64_t seq, const char* type) {
  ojson j;
  j["v"] = kEventLogVersion;
  j["seq"] = seq;
  j["type"] = type;
  return j;
}

std::string str(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw InputError(std::string("event lacks string field '") + key + "'");
  return it->get<std::string>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void fail(const std::string& what) { throw StateError(what); }

}  // namespace

std::string token_digest(const std::string& token) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string encode_event(const LoggedEvent& e) {
  return std::visit(
      [&](const auto& ev) -> std::string {
        using T = std::decay_t<decltype(ev)>;
        ojson j;
        if constexpr (std::is_same_v<T, PromptSubmitted>) {
          j = header(e.seq, "PromptSubmitted");
          j["prompt_id"] = ev.prompt_id;
          j["text"] = ev.text;
          j["category"] = ev.category;
          j["timestamp"] = ev.timestamp;
        } else if constexpr (std::is_same_v<T, GenerationStored>) {
          j = header(e.seq, "GenerationStored");
          j["workbook_id"] = ev.workbook_id;
          j["prompt_id"] = ev.prompt_id;
          j["model_id"] = ev.model_id;
          j["valid"] = ev.valid;
          j["error"] = ev.error;
          j["document"] = ev.document;
        } else if constexpr (std::is_same_v<T, BattleCreated>) {
          j = header(e.seq, "BattleCreated");
          j["battle_id"] = ev.battle_id;
          j["prompt_id"] = ev.prompt_id;
          j["workbook_a"] = ev.workbook_a;
          j["workbook_b"] = ev.workbook_b;
        } else {
          j = header(e.seq, "VoteCast");
          ojson vote = ojson::parse(rating::vote_to_json(ev.vote));
          for (auto& [k, v] : vote.items()) j[k] = v;
          j["voter"] = ev.voter;
        }
        return j.dump();
      },
      e.event);
}

LoggedEvent decode_event(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed event: ") + ex.what());
  }
  if (!j.is_object()) throw InputError("event must be a JSON object");
  if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kEventLogVersion)
    throw InputError("unsupported event log version");
  if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw InputError("event lacks a sequence number");
  LoggedEvent out;
  out.seq = j["seq"].get<std::uint64_t>();
  const std::string type = str(j, "type");
  if (type == "PromptSubmitted") {
    out.event = PromptSubmitted{str(j, "prompt_id"), str(j, "text"), str(j, "category"), str(j, "timestamp")};
  } else if (type == "GenerationStored") {
    if (!j.contains("valid") || !j["valid"].is_boolean()) throw InputError("event lacks boolean 'valid'");
    out.event = GenerationStored{str(j, "workbook_id"), str(j, "prompt_id"), str(j, "model_id"),
                                 str(j, "document"), j["valid"].get<bool>(), str(j, "error")};
  } else if (type == "BattleCreated") {
    out.event = BattleCreated{str(j, "battle_id"), str(j, "prompt_id"), str(j, "workbook_a"), str(j, "workbook_b")};
  } else if (type == "VoteCast") {
    out.event = VoteCast{rating::vote_from_json(line), str(j, "voter")};
  } else {
    throw InputError("unknown event type '" + type + "'");
  }
  return out;
}

void ArenaState::apply(const LoggedEvent& e) {
  if (e.seq != last_seq + 1)
    fail("event " + std::to_string(e.seq) + " follows " + std::to_string(last_seq));
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, PromptSubmitted>) {
          if (prompts.count(ev.prompt_id)) fail("duplicate prompt " + ev.prompt_id);
          prompts[ev.prompt_id] = {ev.text, ev.category, ev.timestamp};
        } else if constexpr (std::is_same_v<T, GenerationStored>) {
          if (generations.count(ev.workbook_id)) fail("duplicate workbook " + ev.workbook_id);
          if (!prompts.count(ev.prompt_id)) fail("workbook " + ev.workbook_id + " names unknown prompt");
          generations[ev.workbook_id] = {ev.prompt_id, ev.model_id, ev.document, ev.valid, ev.error};
        } else if constexpr (std::is_same_v<T, BattleCreated>) {
          if (battles.count(ev.battle_id)) fail("duplicate battle " + ev.battle_id);
          if (!prompts.count(ev.prompt_id)) fail("battle " + ev.battle_id + " names unknown prompt");
          for (const auto* w : {&ev.workbook_a, &ev.workbook_b}) {
            auto it = generations.find(*w);
            if (it == generations.end() || !it->second.valid || it->second.prompt_id != ev.prompt_id)
              fail("battle " + ev.battle_id + " uses unusable workbook " + *w);
          }
          if (model_of(ev.workbook_a) == model_of(ev.workbook_b))
            fail("battle " + ev.battle_id + " pits a model against itself");
          battles[ev.battle_id] = {ev.prompt_id, ev.workbook_a, ev.workbook_b};
        } else {
          const auto& v = ev.vote;
          auto it = battles.find(v.battle_id);
          if (it == battles.end()) fail("vote on unknown battle " + v.battle_id);
          const Battle& b = it->second;
          if (v.workbook_a != b.workbook_a || v.workbook_b != b.workbook_b ||
              v.model_a != model_of(b.workbook_a) || v.model_b != model_of(b.workbook_b))
            fail("vote on " + v.battle_id + " disagrees with the battle record");
          if (!voted.insert({v.battle_id, ev.voter}).second)
            fail("duplicate vote on " + v.battle_id);
          votes.push_back(v);
          ++vote_counts[v.model_a];
          ++vote_counts[v.model_b];
        }
      },
      e.event);
  last_seq = e.seq;
}

std::string ArenaState::model_of(const std::string& workbook_id) const {
  auto it = generations.find(workbook_id);
  return it == generations.end() ? std::string() : it->second.model_id;
}

std::string ArenaState::to_json() const {
  ojson j;
  j["last_seq"] = last_seq;
  j["prompts"] = ojson::object();
  for (const auto& [id, p] : prompts)
    j["prompts"][id] = {{"text", p.text}, {"category", p.category}, {"timestamp", p.timestamp}};
  j["generations"] = ojson::object();
  for (const auto& [id, g] : generations)
    j["generations"][id] = {{"prompt_id", g.prompt_id}, {"model_id", g.model_id}, {"valid", g.valid},
                            {"error", g.error},         {"document", g.document}};
  j["battles"] = ojson::object();
  for (const auto& [id, b] : battles)
    j["battles"][id] = {{"prompt_id", b.prompt_id}, {"workbook_a", b.workbook_a}, {"workbook_b", b.workbook_b}};
  j["votes"] = ojson::array();
  for (const auto& v : votes) j["votes"].push_back(ojson::parse(rating::vote_to_json(v)));
  j["voted"] = ojson::array();
  for (const auto& [b, v] : voted) j["voted"].push_back(ojson::array({b, v}));
  j["vote_counts"] = vote_counts;
  return j.dump();
}

ArenaState ArenaState::from_json(const std::string& text) {
  ArenaState s;
  try {
    auto j = nlohmann::json::parse(text);
    s.last_seq = j.at("last_seq").get<std::uint64_t>();
    for (const auto& [id, p] : j.at("prompts").items())
      s.prompts[id] = {p.at("text"), p.at("category"), p.at("timestamp")};
    for (const auto& [id, g] : j.at("generations").items())
      s.generations[id] = {g.at("prompt_id"), g.at("model_id"), g.at("document"), g.at("valid"), g.at("error")};
    for (const auto& [id, b] : j.at("battles").items())
      s.battles[id] = {b.at("prompt_id"), b.at("workbook_a"), b.at("workbook_b")};
    for (const auto& v : j.at("votes")) s.votes.push_back(rating::vote_from_json(v.dump()));
    for (const auto& p : j.at("voted"))
      s.voted.emplace(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    s.vote_counts = j.at("vote_counts").get<std::map<std::string, std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed snapshot: ") + e.what());
  }
  return s;
}

EventLog::EventLog(std::string path) : path_(std::move(path)) {
  auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw InputError("cannot open event log " + path_ + ": " + std::strerror(errno));
  std::string content = read_file(path_);
  if (!content.empty() && content.back() != '\n') {
    auto keep = content.rfind('\n');
    keep = keep == std::string::npos ? 0 : keep + 1;
    if (::ftruncate(fd_, static_cast<off_t>(keep)) != 0)
      throw InputError("cannot truncate torn event log tail: " + std::string(std::strerror(errno)));
    truncated_tail_ = true;
  }
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<LoggedEvent> EventLog::read_all() const {
  std::vector<LoggedEvent> out;
  std::istringstream in(read_file(path_));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(decode_event(line));
    } catch (const InputError& e) {
      throw InputError(path_ + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void EventLog::append(const LoggedEvent& e) {
  std::string line = encode_event(e) + "\n";
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw InputError("event log write failed: " + std::string(std::strerror(errno)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) throw InputError("event log sync failed: " + std::string(std::strerror(errno)));
}

void write_snapshot(const std::string& path, const ArenaState& state) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << "{\"v\":" << kEventLogVersion << ",\"seq\":" << state.last_seq << ",\"state\":" << state.to_json()
        << "}\n";
    out.flush();
    if (!out) throw InputError("cannot write snapshot " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<ArenaState> read_snapshot(const std::string& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(read_file(path));
    if (j.at("v").get<int>() != kEventLogVersion) return std::nullopt;
    auto state = ArenaState::from_json(j.at("state").dump());
    if (state.last_seq != j.at("seq").get<std::uint64_t>()) return std::nullopt;
    return state;
  } catch (const std::exception&) {
    return std::nullopt;  // a damaged snapshot only costs a full replay
  }
}

ArenaState replay(const EventLog& log, const std::string& snapshot_path) {
  auto events = log.read_all();
  ArenaState state;
  if (auto snap = read_snapshot(snapshot_path)) {
    bool consistent = snap->last_seq <= events.size() &&
                      (snap->last_seq == 0 || events[snap->last_seq - 1].seq == snap->last_seq);
    if (consistent) state = std::move(*snap);
  }
  for (const auto& e : events)
    if (e.seq > state.last_seq) state.apply(e);
  return state;
}

}  // namespace sarena::arena
