#include "sarena/rating/votes.hpp"

#include "json.hpp"
#include "sarena/common/feature_table.hpp"

namespace sarena::rating {

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::AWins: return "A_WINS";
    case Outcome::BWins: return "B_WINS";
    case Outcome::Tie: return "TIE";
    case Outcome::BothBad: return "BOTH_BAD";
  }
  return "";
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::AWins, Outcome::BWins, Outcome::Tie, Outcome::BothBad})
    if (outcome_name(o) == text) return o;
  return std::nullopt;
}

VoteRecord swapped(const VoteRecord& v) {
  VoteRecord s = v;
  std::swap(s.model_a, s.model_b);
  std::swap(s.workbook_a, s.workbook_b);
  if (v.outcome == Outcome::AWins) s.outcome = Outcome::BWins;
  if (v.outcome == Outcome::BWins) s.outcome = Outcome::AWins;
  return s;
}

std::string vote_to_json(const VoteRecord& v) {
  nlohmann::ordered_json j;
  j["battle_id"] = v.battle_id;
  j["prompt_id"] = v.prompt_id;
  j["category"] = v.category;
  j["model_a"] = v.model_a;
  j["model_b"] = v.model_b;
  j["workbook_a"] = v.workbook_a;
  j["workbook_b"] = v.workbook_b;
  j["outcome"] = outcome_name(v.outcome);
  j["timestamp"] = v.timestamp;
  return j.dump();
}

VoteRecord vote_from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed vote JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("vote must be a JSON object");
  auto field = [&j](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) throw InputError(std::string("vote is missing '") + key + "'");
      return {};
    }
    if (!it->is_string()) throw InputError(std::string("vote field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  VoteRecord v;
  v.battle_id = field("battle_id", true);
  v.prompt_id = field("prompt_id", false);
  v.category = field("category", false);
  v.model_a = field("model_a", true);
  v.model_b = field("model_b", true);
  v.workbook_a = field("workbook_a", false);
  v.workbook_b = field("workbook_b", false);
  v.timestamp = field("timestamp", false);
  std::string outcome = field("outcome", true);
  auto o = parse_outcome(outcome);
  if (!o) throw InputError("unknown outcome '" + outcome + "'");
  v.outcome = *o;
  if (v.model_a == v.model_b) throw InputError("vote pits model '" + v.model_a + "' against itself");
  return v;
}

std::vector<VoteRecord> read_votes_jsonl(std::istream& in) {
  std::vector<VoteRecord> votes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      votes.push_back(vote_from_json(line));
    } catch (const InputError& e) {
      throw InputError("votes line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return votes;
}

void write_votes_jsonl(std::ostream& out, const std::vector<VoteRecord>& votes) {
  for (const auto& v : votes) out << vote_to_json(v) << '\n';
}

}  // namespace sarena::rating
