#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace sarena::sheet {

inline constexpr int kMaxRows = 10000;
inline constexpr int kMaxCols = 1000;

// 1-based coordinate. Ordering is row-major.
struct CellAddress {
  int row = 1;
  int col = 1;

  auto operator<=>(const CellAddress&) const = default;
};

// Inclusive rectangle.
struct Box {
  int min_row = 1;
  int max_row = 1;
  int min_col = 1;
  int max_col = 1;

  int rows() const { return max_row - min_row + 1; }
  int cols() const { return max_col - min_col + 1; }
  long long area() const { return static_cast<long long>(rows()) * cols(); }
  bool contains(CellAddress a) const {
    return a.row >= min_row && a.row <= max_row && a.col >= min_col &&
           a.col <= max_col;
  }
  void extend(CellAddress a);

  bool operator==(const Box&) const = default;
};

Box box_of(CellAddress a);

std::string column_label(int col);
std::optional<int> parse_column(std::string_view letters);

// Accepts "A1", "a1", "$A$1". Does not check grid bounds.
std::optional<CellAddress> parse_address(std::string_view text);
std::string to_a1(CellAddress a);
bool in_bounds(CellAddress a);

struct RangeRef {
  enum class Kind { Cell, Area, Columns, Rows };

  std::optional<std::string> sheet;
  Kind kind = Kind::Cell;
  // Normalized so that first <= last component-wise. For Columns the rows
  // are 1..kMaxRows; for Rows the columns are 1..kMaxCols.
  CellAddress first;
  CellAddress last;

  Box box() const { return {first.row, last.row, first.col, last.col}; }
  bool operator==(const RangeRef&) const = default;
};

// Parses an optionally sheet-qualified reference: "A1", "A1:B3", "A:C",
// "2:4", "Sheet2!A1", "'My Sheet'!$A$1:$B$2".
std::optional<RangeRef> parse_range(std::string_view text);
std::string to_string(const RangeRef& r);

// Quotes a sheet name when it is not a plain identifier.
std::string quote_sheet_name(std::string_view name);

}  // namespace sarena::sheet
