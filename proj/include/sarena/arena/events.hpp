#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sarena/rating/votes.hpp"

namespace sarena::arena {

constexpr int kEventLogVersion = 1;

struct PromptSubmitted {
  std::string prompt_id;
  std::string text;
  std::string category;
  std::string timestamp;
  bool operator==(const PromptSubmitted&) const = default;
};

struct GenerationStored {
  std::string workbook_id;
  std::string prompt_id;
  std::string model_id;
  std::string document;  // raw model output, kept even when invalid
  bool valid = false;
  std::string error;     // why the output was rejected, empty when valid
  bool operator==(const GenerationStored&) const = default;
};

struct BattleCreated {
  std::string battle_id;
  std::string prompt_id;
  std::string workbook_a;
  std::string workbook_b;
  bool operator==(const BattleCreated&) const = default;
};

struct VoteCast {
  rating::VoteRecord vote;
  std::string voter;  // digest of the voter token
  bool operator==(const VoteCast&) const = default;
};

using Event = std::variant<PromptSubmitted, GenerationStored, BattleCreated, VoteCast>;

struct LoggedEvent {
  std::uint64_t seq = 0;
  Event event;
};

// One compact JSON object, no trailing newline.
std::string encode_event(const LoggedEvent& e);
// Throws sarena::InputError.
LoggedEvent decode_event(const std::string& line);

// Stable 64-bit digest rendered as 16 hex digits.
std::string token_digest(const std::string& token);

struct Generation {
  std::string prompt_id;
  std::string model_id;
  std::string document;
  bool valid = false;
  std::string error;
  bool operator==(const Generation&) const = default;
};

struct Battle {
  std::string prompt_id;
  std::string workbook_a;
  std::string workbook_b;
  bool operator==(const Battle&) const = default;
};

struct Prompt {
  std::string text;
  std::string category;
  std::string timestamp;
  bool operator==(const Prompt&) const = default;
};

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything the service knows, rebuilt purely from events.
struct ArenaState {
  std::uint64_t last_seq = 0;
  std::map<std::string, Prompt> prompts;
  std::map<std::string, Generation> generations;
  std::map<std::string, Battle> battles;
  std::vector<rating::VoteRecord> votes;
  std::set<std::pair<std::string, std::string>> voted;  // (battle, voter digest)
  std::map<std::string, std::size_t> vote_counts;       // every vote, both sides

  // Throws StateError when an event breaks an invariant (duplicate ID,
  // dangling reference, out-of-order sequence number).
  void apply(const LoggedEvent& e);

  std::string model_of(const std::string& workbook_id) const;
  std::string to_json() const;
  static ArenaState from_json(const std::string& text);
  bool operator==(const ArenaState&) const = default;
};

// Append-only JSONL log. A final line without its newline was never
// acknowledged, so it is truncated on open.
class EventLog {
 public:
  explicit EventLog(std::string path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  const std::string& path() const { return path_; }
  std::vector<LoggedEvent> read_all() const;
  // Writes and flushes the line to stable storage before returning.
  void append(const LoggedEvent& e);
  bool truncated_tail() const { return truncated_tail_; }

 private:
  std::string path_;
  int fd_ = -1;
  bool truncated_tail_ = false;
};

// Snapshot file: {"v":1,"seq":N,"state":{...}}, replaced atomically.
void write_snapshot(const std::string& path, const ArenaState& state);
std::optional<ArenaState> read_snapshot(const std::string& path);

// Latest usable snapshot plus every later event from the log.
ArenaState replay(const EventLog& log, const std::string& snapshot_path);

}  // namespace sarena::arena
