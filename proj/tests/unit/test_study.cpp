#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sarena/common/feature_table.hpp"
#include "sarena/study/study.hpp"
#include "study_oracle.hpp"

using namespace sarena;
using namespace sarena::study;

namespace {

using Opt = std::optional<int>;
constexpr std::nullopt_t _ = std::nullopt;

ExpertEvaluation ev(const std::string& sheet, const std::string& rater, std::array<int, 6> s) {
  return make_evaluation(sheet, rater, s);
}

std::array<int, 6> all(int v) { return {v, v, v, v, v, v}; }

StudyError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const StudyError& e) {
    return e.kind();
  }
  FAIL("expected StudyError");
  return StudyError::Kind::EmptyInput;
}

}  // namespace

TEST_CASE("failure tag rates") {
  auto table = aggregate_failure_tags({make_tagged_loss("b1", "m", {1, 7}), make_tagged_loss("b2", "m", {7})});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].losses == 2);
  CHECK(table.rows[0].rate[6] == 1.0);
  CHECK(table.rows[0].rate[0] == 0.5);
  CHECK(table.rows[0].rate[3] == 0.0);
  REQUIRE(table.mean_tags_per_loss);
  CHECK(*table.mean_tags_per_loss == 1.5);

  auto empty = aggregate_failure_tags({});
  CHECK(empty.rows.empty());
  CHECK_FALSE(empty.mean_tags_per_loss);

  std::vector<TaggedLoss> hundred;
  for (int i = 0; i < 100; ++i)
    hundred.push_back(make_tagged_loss("b" + std::to_string(i), "llama", i < 86 ? std::vector<int>{2, 7} : std::vector<int>{7}));
  auto t = aggregate_failure_tags(hundred, {{"llama", 0.067}});
  CHECK(t.rows[0].rate[1] == doctest::Approx(0.86));
  CHECK(*t.rows[0].win_rate == 0.067);
}

TEST_CASE("tag ingest merges 0 into 1 and rejects bad tags") {
  auto t = make_tagged_loss("b", "m", {0, 1, 3});
  CHECK(t.tags == std::set<int>{1, 3});
  CHECK_THROWS_AS(make_tagged_loss("b", "m", {}), InputError);
  CHECK_THROWS_AS(make_tagged_loss("b", "m", {8}), InputError);
  std::istringstream in(R"({"battle_id":"b1","loser":"x","tags":[0,4],"rationale":"r"})"
                        "\n"
                        R"({"battle_id":"b2","loser":"y","tags":[2]})");
  auto losses = read_tags_jsonl(in);
  REQUIRE(losses.size() == 2);
  CHECK(losses[0].tags == std::set<int>{1, 4});
  CHECK(losses[0].rationale == "r");
  std::istringstream bad(R"({"battle_id":"b1","tags":[1]})");
  CHECK_THROWS_AS(read_tags_jsonl(bad), InputError);
}

TEST_CASE("rates stay in range with multi-label rows") {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> tag(0, 7), count(1, 7), model(0, 4);
  std::vector<TaggedLoss> losses;
  for (int i = 0; i < 400; ++i) {
    std::vector<int> tags;
    for (int j = count(rng); j > 0; --j) tags.push_back(tag(rng));
    losses.push_back(make_tagged_loss("b" + std::to_string(i), "m" + std::to_string(model(rng)), tags));
  }
  for (const auto& row : aggregate_failure_tags(losses).rows)
    for (double r : row.rate) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
}

TEST_CASE("failure CSV shape") {
  std::ostringstream out;
  write_failure_csv(out, aggregate_failure_tags({make_tagged_loss("b", "m", {2})}, {{"m", 0.25}}));
  CHECK(out.str() ==
        "model,win_rate,losses,non_functional,spec_noncompliance,integrity,numerical_computation,"
        "interpretability,shallow,presentation\nm,0.25,1,0,1,0,0,0,0,0\n");
}

TEST_CASE("overall rating rounds half up") {
  CHECK(expert_overall({3, 3, 3, 3, 3, 4}) == 3);
  CHECK(expert_overall(all(5)) == 5);
  CHECK(expert_overall({3, 3, 3, 4, 4, 4}) == 4);
  CHECK(expert_overall({1, 1, 1, 2, 2, 2}) == 2);
  CHECK(expert_overall({1, 1, 1, 1, 1, 2}) == 1);
  CHECK(kind_of([] { expert_overall({0, 3, 3, 3, 3, 3}); }) == StudyError::Kind::OutOfRange);
  CHECK(kind_of([] { expert_overall({6, 3, 3, 3, 3, 3}); }) == StudyError::Kind::OutOfRange);
}

TEST_CASE("overall is monotone in every score") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> score(1, 5), dim(0, 5);
  for (int i = 0; i < 2000; ++i) {
    std::array<int, 6> s;
    for (int& v : s) v = score(rng);
    int before = expert_overall(s);
    int d = dim(rng);
    if (s[static_cast<std::size_t>(d)] == 5) continue;
    ++s[static_cast<std::size_t>(d)];
    CHECK(expert_overall(s) >= before);
  }
}

TEST_CASE("dimension statistics") {
  auto one = dimension_stats({ev("s", "r", all(3))});
  CHECK(one.dimensions[0].mean == 3.0);
  CHECK(one.dimensions[0].stddev == 0.0);
  CHECK(one.dimensions[0].pct_ge4 == 0.0);
  CHECK(one.dimensions[0].pct_le2 == 0.0);

  auto two = dimension_stats({ev("s1", "r", {1, 3, 3, 3, 3, 3}), ev("s2", "r", {5, 3, 3, 3, 3, 3})});
  CHECK(two.dimensions[0].mean == 3.0);
  CHECK(two.dimensions[0].pct_ge4 == 0.5);
  CHECK(two.dimensions[0].pct_le2 == 0.5);
  CHECK(two.dimensions[0].stddev == 2.0);

  // Ten evaluations; column sums and squares worked out by hand.
  std::vector<ExpertEvaluation> ten = {
      ev("a", "r1", {4, 4, 2, 3, 3, 3}), ev("b", "r1", {3, 4, 1, 3, 2, 2}), ev("c", "r1", {5, 5, 2, 4, 4, 4}),
      ev("d", "r1", {2, 3, 1, 2, 2, 2}), ev("e", "r1", {3, 3, 2, 3, 3, 3}), ev("f", "r2", {4, 4, 3, 4, 3, 3}),
      ev("g", "r2", {1, 2, 1, 2, 1, 1}), ev("h", "r2", {3, 3, 2, 3, 2, 3}), ev("i", "r2", {4, 3, 2, 3, 3, 4}),
      ev("j", "r2", {3, 4, 2, 3, 2, 2})};
  auto s = dimension_stats(ten);
  CHECK(s.n == 10);
  // errors_accuracy: 4 3 5 2 3 4 1 3 4 3 -> sum 32, sum of squares 114.
  CHECK(s.dimensions[0].mean == doctest::Approx(3.2));
  CHECK(s.dimensions[0].stddev == doctest::Approx(std::sqrt(114.0 / 10 - 3.2 * 3.2)));
  CHECK(s.dimensions[0].pct_ge4 == doctest::Approx(0.4));
  CHECK(s.dimensions[0].pct_le2 == doctest::Approx(0.2));
  // color_formatting: 2 1 2 1 2 3 1 2 2 2 -> sum 18, sum of squares 36.
  CHECK(s.dimensions[2].mean == doctest::Approx(1.8));
  CHECK(s.dimensions[2].stddev == doctest::Approx(std::sqrt(3.6 - 1.8 * 1.8)));
  CHECK(s.dimensions[2].pct_ge4 == 0.0);
  CHECK(s.dimensions[2].pct_le2 == doctest::Approx(0.9));
  // overalls: 3 3 4 2 3 4 1 3 3 3 -> mean 2.9.
  CHECK(s.overall.mean == doctest::Approx(2.9));
  CHECK(s.overall.pct_ge4 == doctest::Approx(0.2));
  CHECK(kind_of([] { dimension_stats({}); }) == StudyError::Kind::EmptyInput);
  CHECK(dimension_stats_json(s).find("\"color_formatting\"") != std::string::npos);
}

TEST_CASE("alpha on perfect agreement is exactly one") {
  RatingMatrix m = {{1, 3, 5, 2}, {1, 3, 5, 2}, {1, 3, 5, _}};
  CHECK(krippendorff_alpha(m) == 1.0);
}

TEST_CASE("alpha on systematic disagreement is negative") {
  RatingMatrix m = {{1, 5}, {5, 1}};
  CHECK(krippendorff_alpha(m) < 0.0);
}

TEST_CASE("alpha matches the pairwise oracle") {
  RatingMatrix fixture = {{1, 2, 4, 3}, {2, 2, 5, _}, {1, 3, 4, 4}};
  CHECK(std::fabs(krippendorff_alpha(fixture) - oracle::alpha_by_pairs(fixture)) <= 1e-9);

  std::mt19937 rng(12);
  std::uniform_int_distribution<int> score(1, 5), raters(2, 5), items(2, 9), missing(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    RatingMatrix m(static_cast<std::size_t>(raters(rng)));
    const int n_items = items(rng);
    for (auto& row : m)
      for (int i = 0; i < n_items; ++i) row.push_back(missing(rng) == 0 ? Opt{} : Opt{score(rng)});
    double a;
    try {
      a = krippendorff_alpha(m);
    } catch (const StudyError&) {
      continue;
    }
    CHECK(std::fabs(a - oracle::alpha_by_pairs(m)) <= 1e-9);
  }
}

TEST_CASE("alpha on the published reliability example") {
  // Four observers, twelve units, ordinal alpha 0.815 in the literature.
  RatingMatrix m = {{1, 2, 3, 3, 2, 1, 4, 1, 2, _, _, _},
                    {1, 2, 3, 3, 2, 2, 4, 1, 2, 5, _, 3},
                    {_, 3, 3, 3, 2, 3, 4, 2, 2, 5, 1, _},
                    {1, 2, 3, 3, 2, 4, 4, 1, 2, 5, 1, _}};
  CHECK(krippendorff_alpha(m) == doctest::Approx(0.815).epsilon(1e-3));
}

TEST_CASE("alpha is invariant to rater and item order") {
  RatingMatrix m = {{1, 2, 4, 3, 5}, {2, 2, 5, _, 4}, {1, 3, 4, 4, _}};
  double base = krippendorff_alpha(m);
  RatingMatrix raters = {m[2], m[0], m[1]};
  CHECK(krippendorff_alpha(raters) == doctest::Approx(base).epsilon(1e-12));
  RatingMatrix items = m;
  for (auto& row : items) std::reverse(row.begin(), row.end());
  CHECK(krippendorff_alpha(items) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("alpha preconditions") {
  CHECK(kind_of([] { krippendorff_alpha({{1, 2}, {1, _}}); }) == StudyError::Kind::InsufficientData);
  CHECK(kind_of([] { krippendorff_alpha({{3, 3}, {3, 3}}); }) == StudyError::Kind::InsufficientData);
  CHECK(kind_of([] { krippendorff_alpha({{3, 7}, {3, 3}}); }) == StudyError::Kind::OutOfRange);
}

TEST_CASE("alpha by dimension from evaluations") {
  std::vector<ExpertEvaluation> evals = {ev("s1", "r1", {1, 2, 3, 4, 5, 1}), ev("s1", "r2", {1, 2, 3, 4, 5, 1}),
                                         ev("s2", "r1", {5, 4, 3, 2, 1, 5}), ev("s2", "r2", {5, 4, 3, 2, 1, 5})};
  auto alphas = alpha_by_dimension(evals);
  CHECK(alphas.at("errors_accuracy") == 1.0);
  CHECK(alphas.count("color_formatting") == 0);  // every rating is 3
}

TEST_CASE("arena agreement") {
  std::vector<ExpertEvaluation> evals = {ev("hi", "r", all(4)), ev("lo", "r", all(2)), ev("mid1", "r", all(3)),
                                         ev("mid2", "r", all(3))};
  auto a = arena_agreement({{"b1", "hi", "lo", Side::A}}, evals);
  CHECK(a.agree == 1);
  auto tie = arena_agreement({{"b1", "mid1", "mid2", Side::B}}, evals);
  CHECK(tie.tie == 1);
  CHECK_FALSE(tie.decisive_agree_rate);

  std::vector<ArenaBattle> ten;
  for (int i = 0; i < 4; ++i) ten.push_back({"a" + std::to_string(i), "hi", "lo", Side::A});
  for (int i = 0; i < 3; ++i) ten.push_back({"d" + std::to_string(i), "hi", "lo", Side::B});
  for (int i = 0; i < 3; ++i) ten.push_back({"t" + std::to_string(i), "mid1", "mid2", Side::A});
  auto r = arena_agreement(ten, evals);
  CHECK(r.agree_rate == doctest::Approx(0.4));
  CHECK(r.disagree_rate == doctest::Approx(0.3));
  CHECK(r.tie_rate == doctest::Approx(0.3));
  CHECK(std::fabs(r.agree_rate + r.disagree_rate + r.tie_rate - 1.0) <= 1e-12);
  CHECK(*r.decisive_agree_rate == doctest::Approx(4.0 / 7.0));

  // Means across raters decide the expert preference.
  evals.push_back(ev("x", "r1", all(5)));
  evals.push_back(ev("x", "r2", all(1)));
  evals.push_back(ev("y", "r1", all(3)));
  CHECK(arena_agreement({{"b", "x", "y", Side::A}}, evals).tie == 1);
  CHECK(kind_of([&] { arena_agreement({{"b", "x", "nobody", Side::A}}, evals); }) ==
        StudyError::Kind::MissingEvaluation);
  CHECK(agreement_json(r).find("\"decisive_agree_rate\"") != std::string::npos);
}

TEST_CASE("evaluation CSV") {
  std::istringstream in(
      "spreadsheet_id,rater_id,errors_accuracy,formula_conventions,color_formatting,structure_organization,"
      "modeling_conventions,purpose_utility,overall\n"
      "s1,r1,3,3,3,4,4,4,4\n"
      "s2,r1,3,3,3,3,3,4,\n");
  auto evals = read_evaluations_csv(in);
  REQUIRE(evals.size() == 2);
  CHECK(evals[0].overall == 4);
  CHECK(evals[1].overall == 3);
  std::istringstream wrong(
      "spreadsheet_id,rater_id,errors_accuracy,formula_conventions,color_formatting,structure_organization,"
      "modeling_conventions,purpose_utility,overall\ns1,r1,3,3,3,4,4,4,3\n");
  CHECK_THROWS_AS(read_evaluations_csv(wrong), InputError);
  std::istringstream range(
      "spreadsheet_id,rater_id,errors_accuracy,formula_conventions,color_formatting,structure_organization,"
      "modeling_conventions,purpose_utility\ns1,r1,3,3,3,4,4,9\n");
  CHECK_THROWS_AS(read_evaluations_csv(range), InputError);
  std::istringstream missing("spreadsheet_id,rater_id,errors_accuracy\n");
  CHECK_THROWS_AS(read_evaluations_csv(missing), InputError);
}
