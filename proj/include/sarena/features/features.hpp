#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sarena/common/feature_table.hpp"
#include "sarena/formula/evaluator.hpp"
#include "sarena/sheetspec/workbook.hpp"

namespace sarena::features {

inline constexpr std::size_t kFeatureCount = 29;

// Canonical column order for CSV output and the rating design matrix.
const std::array<std::string_view, kFeatureCount>& feature_names();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double get(std::string_view name) const;
  double& at(std::string_view name);
  bool operator==(const FeatureVector&) const = default;
};

struct TableRegion {
  std::string sheet;
  sheet::Box box;
  int cell_count = 0;
  int row_span() const { return box.rows(); }
  int col_span() const { return box.cols(); }
};

// 4-connected components of non-blank cells with >= 4 cells spanning at
// least 2 rows and 2 columns, ordered by top-left corner.
std::vector<TableRegion> detect_tables(const sheet::Sheet& sheet);

enum class ColorFamily { Other, Blue, Green, Black };
ColorFamily color_family(sheet::Rgb c);

// Share of colored number/formula cells that follow the blue input, black
// calculation, green cross-sheet link convention. 0 with no such cells.
double finance_color_score(const sheet::Workbook& wb, const formula::EvaluatedGrid& grid);

// Raw tallies behind the ratio features.
struct CellCounts {
  std::size_t non_empty = 0;
  std::size_t text = 0;
  std::size_t number = 0;
  std::size_t formula = 0;
};
CellCounts count_cells(const sheet::Workbook& wb);

FeatureVector extract_features(const sheet::Workbook& wb, const formula::EvaluatedGrid& grid);

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Standardized {
  std::vector<std::vector<double>> rows;
  std::vector<double> mean;
  std::vector<double> stddev;        // population
  std::vector<bool> zero_variance;   // columns mapped to all zeros
};

// Column-wise z-scores. Needs at least two rows.
Standardized standardize_features(const std::vector<std::vector<double>>& matrix);

// Builds a table keyed by workbook ID with the canonical column names.
FeatureTable to_table(const std::vector<std::pair<std::string, FeatureVector>>& rows);

}  // namespace sarena::features
