#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarena::study {

class StudyError : public std::runtime_error {
 public:
  enum class Kind { OutOfRange, EmptyInput, InsufficientData, MissingEvaluation };
  StudyError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// ---- failure tags ----

constexpr int kTagCount = 7;  // tags 1..7; judge tag 0 folds into 1

// Column labels in tag order.
const std::array<std::string, kTagCount>& tag_columns();

struct TaggedLoss {
  std::string battle_id;
  std::string loser;
  std::set<int> tags;
  std::string rationale;
};

// Applies the 0 -> 1 merge; throws sarena::InputError on tags outside 0..7
// or an empty tag list.
TaggedLoss make_tagged_loss(std::string battle_id, std::string loser, const std::vector<int>& tags,
                            std::string rationale = {});
std::vector<TaggedLoss> read_tags_jsonl(std::istream& in);

struct FailureRow {
  std::string model;
  std::size_t losses = 0;
  std::array<double, kTagCount> rate{};  // share of the model's losses carrying each tag
  std::optional<double> win_rate;
};

struct FailureTable {
  std::vector<FailureRow> rows;  // by model ID
  std::optional<double> mean_tags_per_loss;
};

FailureTable aggregate_failure_tags(const std::vector<TaggedLoss>& losses,
                                    const std::map<std::string, double>& win_rates = {});
void write_failure_csv(std::ostream& out, const FailureTable& table);

// ---- expert rubric ----

constexpr int kDimensionCount = 6;
const std::array<std::string, kDimensionCount>& dimension_names();  // CSV column names

struct ExpertEvaluation {
  std::string spreadsheet_id;
  std::string rater_id;
  std::array<int, kDimensionCount> scores{};
  int overall = 0;
};

// Mean of the six scores rounded half up. Throws OutOfRange.
int expert_overall(const std::array<int, kDimensionCount>& scores);
ExpertEvaluation make_evaluation(std::string spreadsheet_id, std::string rater_id,
                                 const std::array<int, kDimensionCount>& scores);

// Header: spreadsheet_id,rater_id,<six dimensions>[,overall]. A supplied
// overall must agree with the computed one.
std::vector<ExpertEvaluation> read_evaluations_csv(std::istream& in);

struct ScoreStats {
  double mean = 0;
  double stddev = 0;  // population
  double pct_ge4 = 0;
  double pct_ge3 = 0;
  double pct_le2 = 0;
};

struct DimensionStats {
  std::size_t n = 0;
  std::array<ScoreStats, kDimensionCount> dimensions{};
  ScoreStats overall;
};

DimensionStats dimension_stats(const std::vector<ExpertEvaluation>& evals);
std::string dimension_stats_json(const DimensionStats& stats);

// ratings[rater][item]; missing entries are nullopt. Ordinal metric over 1..5.
using RatingMatrix = std::vector<std::vector<std::optional<int>>>;
double krippendorff_alpha(const RatingMatrix& ratings);

// Per-dimension and overall alpha, with raters and spreadsheets taken from evals.
std::map<std::string, double> alpha_by_dimension(const std::vector<ExpertEvaluation>& evals);

enum class Side { A, B };

struct ArenaBattle {
  std::string battle_id;
  std::string spreadsheet_a;
  std::string spreadsheet_b;
  Side winner = Side::A;
};

struct Agreement {
  std::size_t battles = 0;
  std::size_t agree = 0;
  std::size_t disagree = 0;
  std::size_t tie = 0;
  double agree_rate = 0;
  double disagree_rate = 0;
  double tie_rate = 0;
  std::optional<double> decisive_agree_rate;  // agree / (agree + disagree)
};

Agreement arena_agreement(const std::vector<ArenaBattle>& battles,
                          const std::vector<ExpertEvaluation>& evals);
std::string agreement_json(const Agreement& a);

}  // namespace sarena::study
