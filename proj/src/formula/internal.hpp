#pragma once

// Shared between the dependency-graph builder, the evaluator, and the
// function library. Not installed.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sarena/formula/ast.hpp"
#include "sarena/formula/value.hpp"
#include "sarena/sheetspec/workbook.hpp"

namespace sarena::formula::detail {

using sheet::Box;
using sheet::CellAddress;

struct SheetIndex {
  std::string name;
  const sheet::Sheet* sheet = nullptr;
  // Non-blank cells, address -> position in sheet->cells.
  std::map<CellAddress, std::size_t> cells;
  std::optional<Box> used;
};

struct ResolvedRange {
  int sheet = 0;
  std::optional<Box> box;  // empty when a clipped range has no cells
};

// Outcome of resolving a reference: a range, or the error it evaluates to.
using Resolution = std::variant<ResolvedRange, ErrorCode>;

class WorkbookIndex {
 public:
  explicit WorkbookIndex(const sheet::Workbook& wb);

  const std::vector<SheetIndex>& sheets() const { return sheets_; }
  std::optional<int> find_sheet(std::string_view name) const;

  Resolution resolve(const sheet::RangeRef& ref, int current_sheet) const;
  Resolution resolve_name(std::string_view name, int current_sheet) const;

  // Calls fn(sheet, address) for every non-blank cell inside the range, in
  // row-major order.
  void for_each_cell(const ResolvedRange& r,
                     const std::function<void(int, CellAddress)>& fn) const;

 private:
  struct NameEntry {
    int sheet;
    std::string ref;
  };
  std::vector<SheetIndex> sheets_;
  // Upper-cased name -> definitions in document order.
  std::map<std::string, std::vector<NameEntry>> names_;
};

struct Node {
  int sheet = 0;
  CellAddress address;
  auto operator<=>(const Node&) const = default;
};

// Cells a formula reads, per the DepGraph contract.
std::vector<Node> references_of(const Expr& e, int current_sheet,
                                const WorkbookIndex& index);

class Evaluator;

// A rectangular view onto evaluated cells. Boxes may extend past the
// sheet's populated area; missing cells read as Blank.
struct RangeView {
  const Evaluator* ev = nullptr;
  int sheet = 0;
  std::optional<Box> box;

  int rows() const { return box ? box->rows() : 0; }
  int cols() const { return box ? box->cols() : 0; }
  CellValue at(int r, int c) const;  // 0-based within the box
  // Row-major over non-blank cells.
  void for_each_nonblank(const std::function<void(const CellValue&)>& fn) const;
  std::optional<ErrorCode> first_error() const;
};

using Operand = std::variant<CellValue, RangeView>;

class Evaluator {
 public:
  Evaluator(const WorkbookIndex& index,
            std::vector<std::vector<CellValue>>& values)
      : index_(index), values_(values) {}

  const WorkbookIndex& index() const { return index_; }
  CellValue cell(int sheet, CellAddress a) const;

  Operand eval(const Expr& e, int current_sheet) const;

 private:
  const WorkbookIndex& index_;
  std::vector<std::vector<CellValue>>& values_;
};

// Dereferences an operand to a scalar; multi-cell ranges give #VALUE!.
CellValue scalar(const Operand& op);

std::optional<double> to_number(const CellValue& v);
std::string to_text(const CellValue& v);
// -1, 0, +1 with spreadsheet ordering: numbers < text < booleans.
int compare_values(const CellValue& a, const CellValue& b);
bool wildcard_match(std::string_view pattern, std::string_view text);

Operand call_function(const std::string& name, std::vector<Operand>& args);

}  // namespace sarena::formula::detail
