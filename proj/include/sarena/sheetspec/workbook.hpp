#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sarena/sheetspec/a1.hpp"

namespace sarena::sheet {

inline constexpr std::string_view kSpecVersion = "SheetSpec@2";

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;  // "#RRGGBB"
  auto operator<=>(const Rgb&) const = default;
};

// Accepts "#RRGGBB", "RRGGBB", "#RGB" and the 16 CSS basic color names.
std::optional<Rgb> parse_color(std::string_view text);

enum class FontWeight { Normal, Bold };

struct Border {
  std::string style = "thin";
  std::optional<Rgb> color;

  bool operator==(const Border&) const = default;
};

struct CellStyle {
  std::optional<Rgb> fill;
  std::optional<Rgb> font_color;
  std::optional<FontWeight> font_weight;
  std::optional<double> font_size;
  std::optional<std::string> number_format;
  std::optional<Border> border;

  bool empty() const {
    return !fill && !font_color && !font_weight && !font_size &&
           !number_format && !border;
  }
  bool operator==(const CellStyle&) const = default;
};

struct TextContent {
  std::string value;
  bool operator==(const TextContent&) const = default;
};

struct FormulaContent {
  std::string source;  // includes the leading '='
  bool operator==(const FormulaContent&) const = default;
};

enum class CellKind { Text, Number, Formula };

struct Cell {
  CellAddress address;
  std::variant<TextContent, double, FormulaContent> content;
  std::optional<CellStyle> style;

  CellKind kind() const { return static_cast<CellKind>(content.index()); }
  const std::string* text() const;
  const double* number() const;
  const std::string* formula() const;
  // Text cells holding an empty string carry no content.
  bool is_blank() const;

  bool operator==(const Cell&) const = default;
};

struct NamedRange {
  std::string name;
  std::string ref;  // kept verbatim; checked by validate_workbook

  bool operator==(const NamedRange&) const = default;
};

using CfOperand = std::variant<double, std::string>;

struct CellIsRule {
  std::string range;
  std::string op;  // equal, notEqual, greaterThan, ...
  CfOperand value;
  CellStyle style;
  bool operator==(const CellIsRule&) const = default;
};

struct CellIsBetweenRule {
  std::string range;
  CfOperand low;
  CfOperand high;
  bool negate = false;  // notBetween
  CellStyle style;
  bool operator==(const CellIsBetweenRule&) const = default;
};

struct ExpressionRule {
  std::string range;
  std::string formula;
  CellStyle style;
  bool operator==(const ExpressionRule&) const = default;
};

struct ContainsTextRule {
  std::string range;
  std::string text;
  CellStyle style;
  bool operator==(const ContainsTextRule&) const = default;
};

struct ScaleAnchor {
  enum class Kind { Min, Max, Number, Percent, Percentile };
  Kind kind = Kind::Min;
  std::optional<double> value;
  std::optional<Rgb> color;
  bool operator==(const ScaleAnchor&) const = default;
};

struct ColorScaleRule {
  std::string range;
  ScaleAnchor min;
  std::optional<ScaleAnchor> mid;
  ScaleAnchor max;
  bool operator==(const ColorScaleRule&) const = default;
};

struct DataBarRule {
  std::string range;
  Rgb color;
  std::optional<ScaleAnchor> min;
  std::optional<ScaleAnchor> max;
  bool operator==(const DataBarRule&) const = default;
};

using ConditionalFormatRule =
    std::variant<CellIsRule, CellIsBetweenRule, ExpressionRule,
                 ContainsTextRule, ColorScaleRule, DataBarRule>;

const std::string& rule_range(const ConditionalFormatRule& rule);

struct Sheet {
  std::string name;
  std::vector<Cell> cells;
  std::vector<NamedRange> named_ranges;
  std::vector<ConditionalFormatRule> conditional_formats;

  const Cell* find(CellAddress a) const;
  bool operator==(const Sheet&) const = default;
};

struct OutputRef {
  std::string name;
  std::string sheet;
  std::string ref;
  std::string metric;  // "value" | "values"
  bool operator==(const OutputRef&) const = default;
};

struct Rules {
  std::optional<bool> disallow_volatile;
  std::optional<std::vector<std::string>> allowed_functions;
  bool operator==(const Rules&) const = default;
};

struct Workbook {
  std::vector<Sheet> sheets;
  std::optional<std::vector<OutputRef>> outputs;
  std::optional<Rules> rules;

  const Sheet* find_sheet(std::string_view name) const;
  bool operator==(const Workbook&) const = default;
};

enum class Severity { Error, Warning };

struct Issue {
  Severity severity = Severity::Error;
  std::string path;  // JSON pointer into the document
  std::string message;
  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { MalformedJson, SchemaViolation };

  ParseError(Kind kind, std::string path, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

// Non-fatal findings during parse (unknown color names, unrecognized style
// keys) are appended to `warnings` when provided.
Workbook parse_workbook(std::string_view document,
                        std::vector<Issue>* warnings = nullptr);

ValidationReport validate_workbook(const Workbook& wb);

// Canonical form: keys in schema order, compact, UTF-8.
std::string serialize_workbook(const Workbook& wb);

// Tightest rectangle around non-blank cells.
std::optional<Box> used_range(const Sheet& sheet);

// JSON Schema for SheetSpec@2, used for structured-output requests.
const std::string& sheetspec_json_schema();

}  // namespace sarena::sheet
