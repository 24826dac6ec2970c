#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sarena::formula {

enum class ErrorCode { Ref, Div0, Name, Value, NA, Circ };

std::string_view error_text(ErrorCode code);
std::optional<ErrorCode> parse_error_text(std::string_view text);

struct Blank {
  bool operator==(const Blank&) const = default;
};

struct CellValue {
  std::variant<Blank, double, std::string, bool, ErrorCode> data;

  CellValue() = default;
  CellValue(double d) : data(d) {}  // NOLINT(google-explicit-constructor)
  CellValue(std::string s) : data(std::move(s)) {}  // NOLINT
  CellValue(const char* s) : data(std::string(s)) {}  // NOLINT
  CellValue(bool b) : data(b) {}  // NOLINT
  CellValue(ErrorCode e) : data(e) {}  // NOLINT

  bool is_blank() const { return std::holds_alternative<Blank>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_text() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_error() const { return std::holds_alternative<ErrorCode>(data); }

  double number() const { return std::get<double>(data); }
  const std::string& text() const { return std::get<std::string>(data); }
  bool boolean() const { return std::get<bool>(data); }
  ErrorCode error() const { return std::get<ErrorCode>(data); }

  bool operator==(const CellValue&) const = default;
};

// Spreadsheet "General" rendering used for text conversion.
std::string format_general(double v);
std::string describe(const CellValue& v);

}  // namespace sarena::formula
