#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sarena::rating {

enum class Outcome { AWins, BWins, Tie, BothBad };

std::string_view outcome_name(Outcome o);  // "A_WINS", ...
std::optional<Outcome> parse_outcome(std::string_view text);
inline bool is_decisive(Outcome o) { return o == Outcome::AWins || o == Outcome::BWins; }

struct VoteRecord {
  std::string battle_id;
  std::string prompt_id;
  std::string category;
  std::string model_a;
  std::string model_b;
  std::string workbook_a;
  std::string workbook_b;
  Outcome outcome = Outcome::AWins;
  std::string timestamp;  // ISO-8601

  bool operator==(const VoteRecord&) const = default;
};

// Mirror image: sides swapped, outcome flipped.
VoteRecord swapped(const VoteRecord& v);

std::string vote_to_json(const VoteRecord& v);
// Throws sarena::InputError naming the line on malformed input.
VoteRecord vote_from_json(const std::string& line);
std::vector<VoteRecord> read_votes_jsonl(std::istream& in);
void write_votes_jsonl(std::ostream& out, const std::vector<VoteRecord>& votes);

}  // namespace sarena::rating
