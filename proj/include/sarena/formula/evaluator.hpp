#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarena/formula/value.hpp"
#include "sarena/sheetspec/workbook.hpp"

namespace sarena::formula {

struct CellKey {
  std::string sheet;
  sheet::CellAddress address;

  auto operator<=>(const CellKey&) const = default;
};

// Edges run from a referenced cell to the formula cell that depends on it.
// Range references contribute one edge per non-blank member cell (after
// clipping full-column/row ranges to the target sheet's used range); direct
// cell references always contribute an edge, even to empty cells.
struct DepGraph {
  std::set<CellKey> nodes;
  std::set<std::pair<CellKey, CellKey>> edges;
  std::set<CellKey> cyclic;
};

DepGraph build_dependency_graph(const sheet::Workbook& wb);

struct EvaluatedGrid {
  std::vector<std::string> sheet_names;
  // One map per sheet, covering every non-blank cell.
  std::vector<std::map<sheet::CellAddress, CellValue>> values;
  std::size_t formula_cell_count = 0;
  std::size_t error_cell_count = 0;
  // Occurrences of each function name across all formula cells.
  std::map<std::string, std::size_t> function_usage;

  const CellValue* find(std::string_view sheet, sheet::CellAddress a) const;
  bool operator==(const EvaluatedGrid&) const = default;
};

EvaluatedGrid evaluate_workbook(const sheet::Workbook& wb);

struct FunctionCounts {
  std::size_t distinct = 0;
  std::size_t lookups = 0;
  std::size_t conditionals = 0;
  bool operator==(const FunctionCounts&) const = default;
};

FunctionCounts classify_functions(const EvaluatedGrid& grid);

bool is_lookup_function(std::string_view name);
bool is_conditional_function(std::string_view name);
bool is_supported_function(std::string_view name);

// {"sheets":[{"name":..,"cells":{"A1":{"value":..}|{"error":".."}}}],
//  "formulaCells":n,"errorCells":m}
std::string grid_to_json(const EvaluatedGrid& grid);

}  // namespace sarena::formula
