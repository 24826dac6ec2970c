#include "sarena/features/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "sarena/formula/ast.hpp"

namespace sarena::features {
namespace {

using sheet::Box;
using sheet::CellAddress;

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "compute_error_rate",
    "compute_pct_numeric",
    "log_distinct_functions",
    "log_num_lookups",
    "log_num_conditionals",
    "pct_formulas_with_literals",
    "pct_text",
    "pct_formula",
    "log_total_text_tokens",
    "pct_fill",
    "pct_bold",
    "has_border",
    "pct_number_format",
    "distinct_font_sizes",
    "pct_font_color",
    "log_distinct_font_colors",
    "distinct_fills",
    "finance_color_convention",
    "log_row_count",
    "log_col_count",
    "log_aspect_ratio",
    "cell_density",
    "log_num_blank_rows",
    "num_single_cell_rows",
    "num_tables",
    "has_parallel_tables",
    "avg_tables_per_sheet",
    "largest_table_pct",
    "log_table_size_variance",
};

std::size_t index_of(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return i;
  throw std::out_of_range("unknown feature '" + std::string(name) + "'");
}

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

// Argument positions that hold structural indices rather than data.
bool is_index_argument(const std::string& fn, std::size_t arg) {
  if (fn == "VLOOKUP" || fn == "HLOOKUP") return arg == 2;
  if (fn == "MATCH") return arg == 2;
  if (fn == "ROUND") return arg == 1;
  return false;
}

bool has_magic_number(const formula::Expr& e) {
  using Kind = formula::Expr::Kind;
  if (e.kind == Kind::Number) return true;
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    if (e.kind == Kind::Call && is_index_argument(e.text, i)) continue;
    if (has_magic_number(e.args[i])) return true;
  }
  return false;
}

bool references_other_sheet(const formula::Expr& e, const std::string& own) {
  bool found = false;
  formula::walk(e, [&](const formula::Expr& n) {
    using Kind = formula::Expr::Kind;
    if ((n.kind == Kind::Cell || n.kind == Kind::Range) && n.ref.sheet) {
      std::string a = *n.ref.sheet;
      std::string b = own;
      auto low = [](std::string& s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      };
      low(a);
      low(b);
      if (a != b) found = true;
    }
  });
  return found;
}

std::size_t count_tokens(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string tok; in >> tok;) ++n;
  return n;
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() { return kNames; }

double FeatureVector::get(std::string_view name) const { return values[index_of(name)]; }
double& FeatureVector::at(std::string_view name) { return values[index_of(name)]; }

std::vector<TableRegion> detect_tables(const sheet::Sheet& sheet) {
  std::set<CellAddress> filled;
  for (const auto& c : sheet.cells)
    if (!c.is_blank()) filled.insert(c.address);

  std::vector<TableRegion> regions;
  std::set<CellAddress> seen;
  for (const CellAddress& start : filled) {  // row-major
    if (seen.count(start)) continue;
    Box box = sheet::box_of(start);
    int count = 0;
    std::queue<CellAddress> todo;
    todo.push(start);
    seen.insert(start);
    while (!todo.empty()) {
      CellAddress a = todo.front();
      todo.pop();
      ++count;
      box.extend(a);
      const CellAddress next[4] = {
          {a.row - 1, a.col}, {a.row + 1, a.col}, {a.row, a.col - 1}, {a.row, a.col + 1}};
      for (const auto& n : next) {
        if (filled.count(n) && seen.insert(n).second) todo.push(n);
      }
    }
    if (count >= 4 && box.rows() >= 2 && box.cols() >= 2)
      regions.push_back({sheet.name, box, count});
  }
  std::stable_sort(regions.begin(), regions.end(), [](const TableRegion& x, const TableRegion& y) {
    return std::pair(x.box.min_row, x.box.min_col) < std::pair(y.box.min_row, y.box.min_col);
  });
  return regions;
}

ColorFamily color_family(sheet::Rgb c) {
  double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  double hi = std::max({r, g, b});
  double lo = std::min({r, g, b});
  double v = hi;
  if (v < 0.2) return ColorFamily::Black;
  double s = hi > 0 ? (hi - lo) / hi : 0;
  if (s < 0.25) return ColorFamily::Other;  // grays
  double d = hi - lo;
  double h;
  if (hi == r) {
    h = 60 * std::fmod((g - b) / d, 6.0);
  } else if (hi == g) {
    h = 60 * ((b - r) / d + 2);
  } else {
    h = 60 * ((r - g) / d + 4);
  }
  if (h < 0) h += 360;
  if (h >= 200 && h <= 260) return ColorFamily::Blue;
  if (h >= 90 && h <= 160) return ColorFamily::Green;
  return ColorFamily::Other;
}

double finance_color_score(const sheet::Workbook& wb, const formula::EvaluatedGrid&) {
  std::size_t applicable = 0;
  std::size_t conforming = 0;
  for (const auto& s : wb.sheets) {
    for (const auto& c : s.cells) {
      if (!c.style || !c.style->font_color) continue;
      if (c.kind() == sheet::CellKind::Text) continue;
      ColorFamily fam = color_family(*c.style->font_color);
      if (fam == ColorFamily::Other) continue;
      ColorFamily expected = ColorFamily::Blue;
      if (const auto* f = c.formula()) {
        expected = ColorFamily::Black;
        try {
          if (references_other_sheet(formula::parse_formula(*f), s.name))
            expected = ColorFamily::Green;
        } catch (const formula::SyntaxError&) {
        }
      }
      ++applicable;
      if (fam == expected) ++conforming;
    }
  }
  return ratio(static_cast<double>(conforming), static_cast<double>(applicable));
}

CellCounts count_cells(const sheet::Workbook& wb) {
  CellCounts n;
  for (const auto& s : wb.sheets) {
    for (const auto& c : s.cells) {
      if (c.is_blank()) continue;
      ++n.non_empty;
      switch (c.kind()) {
        case sheet::CellKind::Text: ++n.text; break;
        case sheet::CellKind::Number: ++n.number; break;
        case sheet::CellKind::Formula: ++n.formula; break;
      }
    }
  }
  return n;
}

FeatureVector extract_features(const sheet::Workbook& wb, const formula::EvaluatedGrid& grid) {
  FeatureVector fv;
  const CellCounts counts = count_cells(wb);
  const double n = static_cast<double>(counts.non_empty);

  std::size_t numeric = 0, with_literals = 0, text_tokens = 0;
  std::size_t filled = 0, bold = 0, formatted = 0, font_colored = 0;
  bool border = false;
  std::set<double> font_sizes;
  std::set<sheet::Rgb> font_colors, fills;

  for (const auto& s : wb.sheets) {
    for (const auto& c : s.cells) {
      if (c.style) {
        const auto& st = *c.style;
        if (st.border) border = true;
        if (st.font_size) font_sizes.insert(*st.font_size);
        if (st.font_color) font_colors.insert(*st.font_color);
        if (st.fill) fills.insert(*st.fill);
      }
      if (c.is_blank()) continue;
      if (const auto* v = grid.find(s.name, c.address); v && v->is_number()) ++numeric;
      if (const auto* t = c.text()) text_tokens += count_tokens(*t);
      if (const auto* f = c.formula()) {
        try {
          if (has_magic_number(formula::parse_formula(*f))) ++with_literals;
        } catch (const formula::SyntaxError&) {
        }
      }
      if (c.style) {
        const auto& st = *c.style;
        if (st.fill) ++filled;
        if (st.font_weight == sheet::FontWeight::Bold) ++bold;
        if (st.number_format) ++formatted;
        if (st.font_color) ++font_colored;
      }
    }
  }

  const auto fc = formula::classify_functions(grid);
  fv.at("compute_error_rate") = ratio(grid.error_cell_count, grid.formula_cell_count);
  fv.at("compute_pct_numeric") = ratio(numeric, n);
  fv.at("log_distinct_functions") = std::log1p(fc.distinct);
  fv.at("log_num_lookups") = std::log1p(fc.lookups);
  fv.at("log_num_conditionals") = std::log1p(fc.conditionals);
  fv.at("pct_formulas_with_literals") = ratio(with_literals, counts.formula);
  fv.at("pct_text") = ratio(counts.text, n);
  fv.at("pct_formula") = ratio(counts.formula, n);
  fv.at("log_total_text_tokens") = std::log1p(text_tokens);

  fv.at("pct_fill") = ratio(filled, n);
  fv.at("pct_bold") = ratio(bold, n);
  fv.at("has_border") = border ? 1 : 0;
  fv.at("pct_number_format") = ratio(formatted, n);
  fv.at("distinct_font_sizes") = static_cast<double>(font_sizes.size());
  fv.at("pct_font_color") = ratio(font_colored, n);
  fv.at("log_distinct_font_colors") = std::log1p(font_colors.size());
  fv.at("distinct_fills") = static_cast<double>(fills.size());
  fv.at("finance_color_convention") = finance_color_score(wb, grid);

  double row_count = 0, col_count = 0, area = 0, blank_rows = 0, single_rows = 0;
  std::vector<TableRegion> tables;
  bool parallel = false;
  for (const auto& s : wb.sheets) {
    auto used = sheet::used_range(s);
    if (used) {
      row_count += used->rows();
      col_count = std::max<double>(col_count, used->cols());
      area += static_cast<double>(used->area());
      std::map<int, int> per_row;
      for (const auto& c : s.cells)
        if (!c.is_blank()) ++per_row[c.address.row];
      blank_rows += used->rows() - static_cast<double>(per_row.size());
      for (const auto& [row, k] : per_row)
        if (k == 1) ++single_rows;
    }
    auto regions = detect_tables(s);
    for (std::size_t i = 0; i < regions.size(); ++i) {
      for (std::size_t j = i + 1; j < regions.size(); ++j) {
        const Box& a = regions[i].box;
        const Box& b = regions[j].box;
        bool rows_overlap = a.min_row <= b.max_row && b.min_row <= a.max_row;
        bool cols_disjoint = a.max_col < b.min_col || b.max_col < a.min_col;
        if (rows_overlap && cols_disjoint) parallel = true;
      }
    }
    tables.insert(tables.end(), regions.begin(), regions.end());
  }
  fv.at("log_row_count") = std::log1p(row_count);
  fv.at("log_col_count") = std::log1p(col_count);
  fv.at("log_aspect_ratio") = std::log1p(ratio(row_count, col_count));
  fv.at("cell_density") = ratio(n, area);
  fv.at("log_num_blank_rows") = std::log1p(blank_rows);
  fv.at("num_single_cell_rows") = single_rows;

  double largest = 0, mean = 0, var = 0;
  for (const auto& t : tables) {
    largest = std::max<double>(largest, t.cell_count);
    mean += t.cell_count;
  }
  if (!tables.empty()) {
    mean /= static_cast<double>(tables.size());
    for (const auto& t : tables) var += (t.cell_count - mean) * (t.cell_count - mean);
    var /= static_cast<double>(tables.size());
  }
  fv.at("num_tables") = static_cast<double>(tables.size());
  fv.at("has_parallel_tables") = parallel ? 1 : 0;
  fv.at("avg_tables_per_sheet") = ratio(tables.size(), wb.sheets.size());
  fv.at("largest_table_pct") = ratio(largest, n);
  fv.at("log_table_size_variance") = std::log1p(var);
  return fv;
}

Standardized standardize_features(const std::vector<std::vector<double>>& matrix) {
  if (matrix.size() < 2) throw InsufficientData("standardization needs at least two rows");
  const std::size_t k = matrix[0].size();
  for (const auto& row : matrix)
    if (row.size() != k) throw std::invalid_argument("ragged feature matrix");
  const double m = static_cast<double>(matrix.size());
  Standardized out;
  out.mean.assign(k, 0.0);
  out.stddev.assign(k, 0.0);
  out.zero_variance.assign(k, false);
  for (const auto& row : matrix)
    for (std::size_t j = 0; j < k; ++j) out.mean[j] += row[j];
  for (double& mu : out.mean) mu /= m;
  for (const auto& row : matrix)
    for (std::size_t j = 0; j < k; ++j) out.stddev[j] += (row[j] - out.mean[j]) * (row[j] - out.mean[j]);
  for (std::size_t j = 0; j < k; ++j) {
    out.stddev[j] = std::sqrt(out.stddev[j] / m);
    out.zero_variance[j] = !(out.stddev[j] > 1e-12 * std::max(1.0, std::fabs(out.mean[j])));
  }
  out.rows.reserve(matrix.size());
  for (const auto& row : matrix) {
    std::vector<double> z(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (!out.zero_variance[j]) z[j] = (row[j] - out.mean[j]) / out.stddev[j];
    out.rows.push_back(std::move(z));
  }
  return out;
}

FeatureTable to_table(const std::vector<std::pair<std::string, FeatureVector>>& rows) {
  FeatureTable t;
  for (auto n : kNames) t.names.emplace_back(n);
  for (const auto& [id, fv] : rows) t.rows[id] = {fv.values.begin(), fv.values.end()};
  return t;
}

}  // namespace sarena::features
