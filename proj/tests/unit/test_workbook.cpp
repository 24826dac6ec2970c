#include <string>

#include "doctest.h"
#include "sarena/sheetspec/workbook.hpp"

using namespace sarena::sheet;

namespace {

std::string wrap(const std::string& cells, const std::string& extra = "") {
  return R"({"version":"SheetSpec@2","sheets":[{"name":"S","cells":[)" + cells +
         "]" + extra + "}]}";
}

ParseError::Kind parse_kind(const std::string& doc, std::string* path = nullptr) {
  try {
    parse_workbook(doc);
  } catch (const ParseError& e) {
    if (path) *path = e.path();
    return e.kind();
  }
  FAIL("expected a parse error");
  return ParseError::Kind::MalformedJson;
}

}  // namespace

TEST_CASE("minimal document") {
  Workbook wb = parse_workbook(R"({"version":"SheetSpec@2","sheets":[{"name":"S","cells":[]}]})");
  REQUIRE(wb.sheets.size() == 1);
  CHECK(wb.sheets[0].cells.empty());
  CHECK_FALSE(used_range(wb.sheets[0]).has_value());
}

TEST_CASE("schema violations carry paths") {
  std::string path;
  CHECK(parse_kind(R"({"version":"SheetSpec@1","sheets":[]})", &path) ==
        ParseError::Kind::SchemaViolation);
  CHECK(path == "/version");

  CHECK(parse_kind(wrap(R"({"ref":"A1","number":1},{"ref":"a1","text":"x"})"), &path) ==
        ParseError::Kind::SchemaViolation);
  CHECK(path == "/sheets/0/cells/1");

  CHECK(parse_kind("{not json") == ParseError::Kind::MalformedJson);
  CHECK(parse_kind(wrap(R"({"ref":"A1","number":1,"text":"x"})")) ==
        ParseError::Kind::SchemaViolation);
  CHECK(parse_kind(wrap(R"({"ref":"A1","formula":"="})")) == ParseError::Kind::SchemaViolation);
  CHECK(parse_kind(wrap(R"({"ref":"A10001","number":1})")) == ParseError::Kind::SchemaViolation);
  CHECK(parse_kind(wrap(R"({"ref":"ALM1","number":1})")) == ParseError::Kind::SchemaViolation);
}

TEST_CASE("colors normalize and unknown names warn") {
  std::vector<Issue> warnings;
  Workbook wb = parse_workbook(
      wrap(R"({"ref":"A1","number":1,"style":{"fontColor":"blue","fill":"#abc","fontWeight":"bold"}},
              {"ref":"B1","number":2,"style":{"fill":"octarine"}})"),
      &warnings);
  const auto& a = *wb.sheets[0].cells[0].style;
  CHECK(a.font_color->hex() == "#0000FF");
  CHECK(a.fill->hex() == "#AABBCC");
  CHECK(*a.font_weight == FontWeight::Bold);
  CHECK_FALSE(wb.sheets[0].cells[1].style.has_value());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].path == "/sheets/0/cells/1/style/fill");
}

TEST_CASE("used range hull") {
  Workbook wb = parse_workbook(wrap(R"({"ref":"B2","number":1},{"ref":"D5","text":"x"})"));
  auto box = used_range(wb.sheets[0]);
  REQUIRE(box);
  CHECK(box->min_row == 2);
  CHECK(box->max_row == 5);
  CHECK(box->min_col == 2);
  CHECK(box->max_col == 4);

  Workbook one = parse_workbook(wrap(R"({"ref":"A1","number":1})"));
  CHECK(used_range(one.sheets[0])->area() == 1);
}

TEST_CASE("validation") {
  Workbook dangling = parse_workbook(wrap(R"({"ref":"A1","formula":"=Sheet2!A1"})"));
  auto report = validate_workbook(dangling);
  CHECK_FALSE(report.ok);
  REQUIRE(report.error_count() == 1);
  CHECK(report.issues[0].message.find("unknown sheet") != std::string::npos);

  Workbook fine = parse_workbook(wrap(R"({"ref":"A1","number":2},{"ref":"A2","formula":"=A1*2"})"));
  CHECK(validate_workbook(fine).ok);
  CHECK(validate_workbook(fine).issues.empty());

  Workbook bad_name = parse_workbook(
      wrap(R"({"ref":"A1","number":2})", R"(,"namedRanges":[{"name":"x","ref":"ZZZ"}])"));
  auto r2 = validate_workbook(bad_name);
  CHECK_FALSE(r2.ok);
  CHECK(r2.issues[0].path == "/sheets/0/namedRanges/0/ref");

  Workbook tiny_font = parse_workbook(wrap(R"({"ref":"A1","number":2,"style":{"fontSize":0}})"));
  auto r3 = validate_workbook(tiny_font);
  CHECK(r3.ok);
  CHECK(r3.warning_count() == 1);

  // Same input, same report.
  CHECK(validate_workbook(dangling).issues == report.issues);
}

TEST_CASE("canonical serialization round trips") {
  std::string doc = R"({"version":"SheetSpec@2","sheets":[{"name":"Inputs","cells":[
      {"ref":"A1","text":"Rate","style":{"fontWeight":"bold","border":true}},
      {"ref":"B1","number":0.05,"style":{"fontColor":"#0000ff","numberFormat":"0.0%"}},
      {"ref":"B2","formula":"=B1*12","type":"formula"}],
      "namedRanges":[{"name":"rate","ref":"B1"}],
      "conditionalFormats":[
        {"type":"cellIs","range":"B1:B2","operator":"greaterThan","value":0,"style":{"fill":"green"}},
        {"type":"colorScale","range":"B1:B2","min":{"type":"min","color":"red"},"max":{"type":"percentile","value":90}},
        {"type":"dataBar","range":"B1:B2","color":"blue"}]}],
      "outputs":[{"name":"annual","sheet":"Inputs","ref":"B2","metric":"value"}],
      "rules":{"disallowVolatile":true,"allowedFunctions":["SUM"]}})";
  Workbook wb = parse_workbook(doc);
  std::string canon = serialize_workbook(wb);
  Workbook again = parse_workbook(canon);
  CHECK(again == wb);
  CHECK(serialize_workbook(again) == canon);
  CHECK(canon.find('\n') == std::string::npos);
  CHECK(canon.back() == '}');
}
