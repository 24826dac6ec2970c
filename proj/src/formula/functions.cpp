#include <cmath>
#include <functional>
#include <unordered_map>

#include "internal.hpp"
#include "sarena/formula/evaluator.hpp"

namespace sarena::formula {
namespace detail {
namespace {

using Args = std::vector<Operand>;
using Fn = std::function<Operand(Args&)>;

Operand err(ErrorCode e) { return CellValue(e); }
Operand num(double d) {
  if (!std::isfinite(d)) return err(ErrorCode::Value);
  return CellValue(d);
}

const RangeView* as_range(const Operand& op) { return std::get_if<RangeView>(&op); }

std::optional<ErrorCode> first_error(const Args& args) {
  for (const auto& a : args) {
    if (const auto* v = std::get_if<CellValue>(&a)) {
      if (v->is_error()) return v->error();
    } else if (auto e = std::get<RangeView>(a).first_error()) {
      return e;
    }
  }
  return std::nullopt;
}

bool arity(const Args& args, std::size_t lo, std::size_t hi) {
  return args.size() >= lo && args.size() <= hi;
}

constexpr std::size_t kMany = 255;

// Numbers from ranges; coercible scalars from direct arguments.
std::optional<ErrorCode> collect_numbers(const Args& args, std::size_t from,
                                         std::vector<double>& out) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (const auto* r = as_range(args[i])) {
      r->for_each_nonblank([&out](const CellValue& v) {
        if (v.is_number()) out.push_back(v.number());
      });
      continue;
    }
    const auto& v = std::get<CellValue>(args[i]);
    auto d = to_number(v);
    if (!d) return ErrorCode::Value;
    out.push_back(*d);
  }
  return std::nullopt;
}

std::optional<double> number_arg(const Operand& op) {
  CellValue v = scalar(op);
  if (v.is_error()) return std::nullopt;
  return to_number(v);
}

std::optional<bool> to_bool(const CellValue& v) {
  if (v.is_bool()) return v.boolean();
  if (v.is_number()) return v.number() != 0;
  if (v.is_blank()) return false;
  if (v.is_text()) {
    std::string t = v.text();
    for (char& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (t == "TRUE") return true;
    if (t == "FALSE") return false;
  }
  return std::nullopt;
}

double round_half_away(double x, int digits) {
  double scale = std::pow(10.0, digits);
  double scaled = x * scale;
  // Absorb representation error such as 2.675 * 100 = 267.49999...
  double nudged = scaled + std::copysign(1e-9 * std::max(1.0, std::fabs(scaled)), scaled);
  return std::round(nudged) / scale;
}

// --- criteria ------------------------------------------------------------

struct Criterion {
  enum class Op { Eq, Ne, Lt, Le, Gt, Ge };
  Op op = Op::Eq;
  CellValue operand;  // Blank means "empty"
};

Criterion parse_criterion(const CellValue& c) {
  Criterion out;
  if (!c.is_text()) {
    out.operand = c;
    return out;
  }
  std::string_view s = c.text();
  static const std::pair<std::string_view, Criterion::Op> kPrefixes[] = {
      {">=", Criterion::Op::Ge}, {"<=", Criterion::Op::Le}, {"<>", Criterion::Op::Ne},
      {">", Criterion::Op::Gt},  {"<", Criterion::Op::Lt},  {"=", Criterion::Op::Eq}};
  for (const auto& [p, op] : kPrefixes) {
    if (s.substr(0, p.size()) == p) {
      out.op = op;
      s.remove_prefix(p.size());
      break;
    }
  }
  if (s.empty()) return out;
  CellValue text{std::string(s)};
  if (auto d = to_number(text)) {
    out.operand = *d;
  } else if (auto b = to_bool(text)) {
    out.operand = *b;
  } else {
    out.operand = std::move(text);
  }
  return out;
}

bool criterion_equal(const Criterion& c, const CellValue& v) {
  const CellValue& o = c.operand;
  if (o.is_blank()) return v.is_blank() || (v.is_text() && v.text().empty());
  if (o.is_number()) return v.is_number() && v.number() == o.number();
  if (o.is_bool()) return v.is_bool() && v.boolean() == o.boolean();
  return v.is_text() && wildcard_match(o.text(), v.text());
}

bool matches(const Criterion& c, const CellValue& v) {
  switch (c.op) {
    case Criterion::Op::Eq: return criterion_equal(c, v);
    case Criterion::Op::Ne: return !criterion_equal(c, v);
    default: break;
  }
  const CellValue& o = c.operand;
  bool comparable = (o.is_number() && v.is_number()) || (o.is_text() && v.is_text()) ||
                    (o.is_bool() && v.is_bool());
  if (!comparable) return false;
  int cmp = compare_values(v, o);
  switch (c.op) {
    case Criterion::Op::Lt: return cmp < 0;
    case Criterion::Op::Le: return cmp <= 0;
    case Criterion::Op::Gt: return cmp > 0;
    case Criterion::Op::Ge: return cmp >= 0;
    default: return false;
  }
}

// A scalar argument acts as a 1x1 "range" for criteria functions.
struct Grid {
  const RangeView* range = nullptr;
  CellValue single;
  int rows() const { return range ? range->rows() : 1; }
  int cols() const { return range ? range->cols() : 1; }
  CellValue at(int r, int c) const { return range ? range->at(r, c) : single; }
};

Grid grid_of(const Operand& op) {
  Grid g;
  if (const auto* r = as_range(op)) {
    g.range = r;
  } else {
    g.single = std::get<CellValue>(op);
  }
  return g;
}

// Same-shape view anchored at `op`'s top-left corner.
RangeView resized(const RangeView& r, int rows, int cols) {
  RangeView out = r;
  if (!r.box) return out;
  out.box->max_row = r.box->min_row + rows - 1;
  out.box->max_col = r.box->min_col + cols - 1;
  return out;
}

// Evaluates the (criteria_range, criterion) pairs in args[first..] and calls
// fn(r, c) for each matching position. Returns #VALUE! on shape mismatch.
std::optional<ErrorCode> for_each_match(const Args& args, std::size_t first,
                                        int rows, int cols,
                                        const std::function<void(int, int)>& fn) {
  std::vector<std::pair<Grid, Criterion>> tests;
  for (std::size_t i = first; i + 1 < args.size(); i += 2) {
    Grid g = grid_of(args[i]);
    if (g.rows() != rows || g.cols() != cols) return ErrorCode::Value;
    tests.emplace_back(g, parse_criterion(scalar(args[i + 1])));
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      bool ok = true;
      for (const auto& [g, crit] : tests) {
        if (!matches(crit, g.at(r, c))) {
          ok = false;
          break;
        }
      }
      if (ok) fn(r, c);
    }
  }
  return std::nullopt;
}

// --- lookup helpers --------------------------------------------------------

bool lookup_equal(const CellValue& key, const CellValue& cell, bool wildcards) {
  if (cell.is_blank()) return false;
  if (key.is_text() && cell.is_text())
    return wildcards ? wildcard_match(key.text(), cell.text())
                     : compare_values(key, cell) == 0;
  if (key.is_number() != cell.is_number() || key.is_bool() != cell.is_bool())
    return false;
  return compare_values(key, cell) == 0;
}

bool same_kind(const CellValue& a, const CellValue& b) {
  return a.data.index() == b.data.index();
}

// Position in `cells` for match_type 0 (exact), 1 (largest <= key, last in
// scan order), -1 (smallest >= key, last in scan order).
std::optional<int> find_position(const CellValue& key, const std::vector<CellValue>& cells,
                                 int match_type) {
  std::optional<int> found;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    const CellValue& c = cells[i];
    if (match_type == 0) {
      if (lookup_equal(key, c, true)) return i;
      continue;
    }
    if (c.is_blank() || !same_kind(c, key)) continue;
    int cmp = compare_values(c, key);
    if (match_type > 0 && cmp <= 0) found = i;
    if (match_type < 0 && cmp >= 0) found = i;
  }
  return found;
}

std::vector<CellValue> column_of(const RangeView& r, int col) {
  std::vector<CellValue> out;
  for (int i = 0; i < r.rows(); ++i) out.push_back(r.at(i, col));
  return out;
}

std::vector<CellValue> row_of(const RangeView& r, int row) {
  std::vector<CellValue> out;
  for (int j = 0; j < r.cols(); ++j) out.push_back(r.at(row, j));
  return out;
}

std::vector<CellValue> flatten(const RangeView& r) {
  std::vector<CellValue> out;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) out.push_back(r.at(i, j));
  return out;
}

// --- function bodies ---------------------------------------------------------

Operand fn_sum(Args& a) {
  std::vector<double> xs;
  if (auto e = collect_numbers(a, 0, xs)) return err(*e);
  double s = 0;
  for (double x : xs) s += x;
  return num(s);
}

Operand fn_average(Args& a) {
  std::vector<double> xs;
  if (auto e = collect_numbers(a, 0, xs)) return err(*e);
  if (xs.empty()) return err(ErrorCode::Div0);
  double s = 0;
  for (double x : xs) s += x;
  return num(s / static_cast<double>(xs.size()));
}

Operand fn_min(Args& a) {
  std::vector<double> xs;
  if (auto e = collect_numbers(a, 0, xs)) return err(*e);
  if (xs.empty()) return num(0);
  return num(*std::min_element(xs.begin(), xs.end()));
}

Operand fn_max(Args& a) {
  std::vector<double> xs;
  if (auto e = collect_numbers(a, 0, xs)) return err(*e);
  if (xs.empty()) return num(0);
  return num(*std::max_element(xs.begin(), xs.end()));
}

Operand fn_count(Args& a) {
  double n = 0;
  for (const auto& op : a) {
    if (const auto* r = as_range(op)) {
      r->for_each_nonblank([&n](const CellValue& v) { n += v.is_number() ? 1 : 0; });
    } else if (to_number(std::get<CellValue>(op))) {
      ++n;
    }
  }
  return num(n);
}

Operand fn_counta(Args& a) {
  double n = 0;
  for (const auto& op : a) {
    if (const auto* r = as_range(op)) {
      r->for_each_nonblank([&n](const CellValue&) { ++n; });
    } else if (!std::get<CellValue>(op).is_blank()) {
      ++n;
    }
  }
  return num(n);
}

Operand fn_round(Args& a) {
  if (!arity(a, 1, 2)) return err(ErrorCode::Value);
  auto x = number_arg(a[0]);
  auto d = a.size() > 1 ? number_arg(a[1]) : std::optional<double>(0.0);
  if (!x || !d) return err(ErrorCode::Value);
  return num(round_half_away(*x, static_cast<int>(std::trunc(*d))));
}

Operand fn_abs(Args& a) {
  if (a.size() != 1) return err(ErrorCode::Value);
  auto x = number_arg(a[0]);
  if (!x) return err(ErrorCode::Value);
  return num(std::fabs(*x));
}

Operand fn_sqrt(Args& a) {
  if (a.size() != 1) return err(ErrorCode::Value);
  auto x = number_arg(a[0]);
  if (!x || *x < 0) return err(ErrorCode::Value);
  return num(std::sqrt(*x));
}

Operand fn_power(Args& a) {
  if (a.size() != 2) return err(ErrorCode::Value);
  auto x = number_arg(a[0]);
  auto y = number_arg(a[1]);
  if (!x || !y) return err(ErrorCode::Value);
  if (*x == 0 && *y < 0) return err(ErrorCode::Div0);
  return num(std::pow(*x, *y));
}

std::optional<std::vector<bool>> collect_logicals(const Args& a) {
  std::vector<bool> out;
  for (const auto& op : a) {
    if (const auto* r = as_range(op)) {
      r->for_each_nonblank([&out](const CellValue& v) {
        if (v.is_bool()) out.push_back(v.boolean());
        if (v.is_number()) out.push_back(v.number() != 0);
      });
      continue;
    }
    const auto& v = std::get<CellValue>(op);
    if (v.is_blank()) continue;
    auto b = to_bool(v);
    if (!b) return std::nullopt;
    out.push_back(*b);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

Operand fn_and(Args& a) {
  auto bs = collect_logicals(a);
  if (!bs) return err(ErrorCode::Value);
  return CellValue(std::all_of(bs->begin(), bs->end(), [](bool b) { return b; }));
}

Operand fn_or(Args& a) {
  auto bs = collect_logicals(a);
  if (!bs) return err(ErrorCode::Value);
  return CellValue(std::any_of(bs->begin(), bs->end(), [](bool b) { return b; }));
}

Operand fn_not(Args& a) {
  if (a.size() != 1) return err(ErrorCode::Value);
  auto b = to_bool(scalar(a[0]));
  if (!b) return err(ErrorCode::Value);
  return CellValue(!*b);
}

Operand fn_if(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  auto cond = to_bool(scalar(a[0]));
  if (!cond) return err(ErrorCode::Value);
  if (*cond) return a[1];
  if (a.size() == 3) return a[2];
  return CellValue(false);
}

Operand fn_ifs(Args& a) {
  if (a.empty() || a.size() % 2 != 0) return err(ErrorCode::Value);
  for (std::size_t i = 0; i < a.size(); i += 2) {
    auto cond = to_bool(scalar(a[i]));
    if (!cond) return err(ErrorCode::Value);
    if (*cond) return a[i + 1];
  }
  return err(ErrorCode::NA);
}

Operand fn_switch(Args& a) {
  if (a.size() < 3) return err(ErrorCode::Value);
  CellValue subject = scalar(a[0]);
  std::size_t i = 1;
  for (; i + 1 < a.size(); i += 2) {
    CellValue candidate = scalar(a[i]);
    if (same_kind(subject, candidate) && compare_values(subject, candidate) == 0)
      return a[i + 1];
  }
  if (i < a.size()) return a[i];
  return err(ErrorCode::NA);
}

Operand fn_sumif(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  Grid crit = grid_of(a[0]);
  Grid sum = crit;
  RangeView sum_view;
  if (a.size() == 3) {
    const auto* r = as_range(a[2]);
    if (!r) return err(ErrorCode::Value);
    sum_view = resized(*r, crit.rows(), crit.cols());
    sum = Grid{&sum_view, {}};
  }
  double s = 0;
  Criterion c = parse_criterion(scalar(a[1]));
  for (int i = 0; i < crit.rows(); ++i) {
    for (int j = 0; j < crit.cols(); ++j) {
      if (!matches(c, crit.at(i, j))) continue;
      CellValue v = sum.at(i, j);
      if (v.is_error()) return err(v.error());
      if (v.is_number()) s += v.number();
    }
  }
  return num(s);
}

Operand fn_countif(Args& a) {
  if (a.size() != 2) return err(ErrorCode::Value);
  Grid g = grid_of(a[0]);
  double n = 0;
  if (auto e = for_each_match(a, 0, g.rows(), g.cols(), [&n](int, int) { ++n; }))
    return err(*e);
  return num(n);
}

Operand fn_countifs(Args& a) {
  if (a.empty() || a.size() % 2 != 0) return err(ErrorCode::Value);
  Grid g = grid_of(a[0]);
  double n = 0;
  if (auto e = for_each_match(a, 0, g.rows(), g.cols(), [&n](int, int) { ++n; }))
    return err(*e);
  return num(n);
}

Operand sum_or_average_ifs(Args& a, bool average) {
  if (a.size() < 3 || a.size() % 2 != 1) return err(ErrorCode::Value);
  Grid target = grid_of(a[0]);
  double s = 0;
  double n = 0;
  std::optional<ErrorCode> inner;
  auto e = for_each_match(a, 1, target.rows(), target.cols(), [&](int r, int c) {
    CellValue v = target.at(r, c);
    if (v.is_error() && !inner) inner = v.error();
    if (v.is_number()) {
      s += v.number();
      ++n;
    }
  });
  if (e) return err(*e);
  if (inner) return err(*inner);
  if (!average) return num(s);
  if (n == 0) return err(ErrorCode::Div0);
  return num(s / n);
}

Operand fn_sumifs(Args& a) { return sum_or_average_ifs(a, false); }
Operand fn_averageifs(Args& a) { return sum_or_average_ifs(a, true); }

Operand fn_averageif(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  // AVERAGEIF(range, crit, [avg_range]) -> AVERAGEIFS(avg_range, range, crit)
  Grid crit = grid_of(a[0]);
  Operand target = a[0];
  if (a.size() == 3) {
    const auto* r = as_range(a[2]);
    if (!r) return err(ErrorCode::Value);
    target = resized(*r, crit.rows(), crit.cols());
  }
  Args reordered{target, a[0], a[1]};
  return sum_or_average_ifs(reordered, true);
}

Operand fn_vlookup(Args& a, bool horizontal) {
  if (!arity(a, 3, 4)) return err(ErrorCode::Value);
  const auto* table = as_range(a[1]);
  if (!table) return err(ErrorCode::Value);
  CellValue key = scalar(a[0]);
  auto idx = number_arg(a[2]);
  if (!idx) return err(ErrorCode::Value);
  int index = static_cast<int>(std::trunc(*idx));
  bool approximate = true;
  if (a.size() == 4) {
    auto b = to_bool(scalar(a[3]));
    if (!b) return err(ErrorCode::Value);
    approximate = *b;
  }
  int extent = horizontal ? table->rows() : table->cols();
  if (index < 1) return err(ErrorCode::Value);
  if (index > extent) return err(ErrorCode::Ref);
  auto keys = horizontal ? row_of(*table, 0) : column_of(*table, 0);
  auto pos = find_position(key, keys, approximate ? 1 : 0);
  if (!pos) return err(ErrorCode::NA);
  return horizontal ? table->at(index - 1, *pos) : table->at(*pos, index - 1);
}

Operand fn_lookup(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  const auto* lookup = as_range(a[1]);
  if (!lookup) return err(ErrorCode::Value);
  CellValue key = scalar(a[0]);
  if (a.size() == 3) {
    const auto* result = as_range(a[2]);
    if (!result) return err(ErrorCode::Value);
    auto pos = find_position(key, flatten(*lookup), 1);
    if (!pos) return err(ErrorCode::NA);
    auto values = flatten(*result);
    if (*pos >= static_cast<int>(values.size())) return err(ErrorCode::NA);
    return values[*pos];
  }
  bool by_column = lookup->rows() >= lookup->cols();
  auto keys = by_column ? column_of(*lookup, 0) : row_of(*lookup, 0);
  auto pos = find_position(key, keys, 1);
  if (!pos) return err(ErrorCode::NA);
  return by_column ? lookup->at(*pos, lookup->cols() - 1)
                   : lookup->at(lookup->rows() - 1, *pos);
}

Operand fn_xlookup(Args& a) {
  if (!arity(a, 3, 6)) return err(ErrorCode::Value);
  const auto* lookup = as_range(a[1]);
  const auto* result = as_range(a[2]);
  if (!lookup || !result) return err(ErrorCode::Value);
  if (lookup->rows() != 1 && lookup->cols() != 1) return err(ErrorCode::Value);
  CellValue key = scalar(a[0]);
  int match_mode = 0;
  int search_mode = 1;
  if (a.size() > 4) {
    auto m = number_arg(a[4]);
    if (!m) return err(ErrorCode::Value);
    match_mode = static_cast<int>(*m);
  }
  if (a.size() > 5) {
    auto s = number_arg(a[5]);
    if (!s) return err(ErrorCode::Value);
    search_mode = static_cast<int>(*s);
  }
  if (match_mode < -1 || match_mode > 2 || (search_mode != 1 && search_mode != -1))
    return err(ErrorCode::Value);
  auto keys = flatten(*lookup);
  const int n = static_cast<int>(keys.size());
  std::optional<int> best;
  for (int step = 0; step < n; ++step) {
    int i = search_mode == 1 ? step : n - 1 - step;
    const CellValue& c = keys[i];
    if (lookup_equal(key, c, match_mode == 2)) {
      best = i;
      break;
    }
    if (match_mode == 0 || match_mode == 2 || c.is_blank() || !same_kind(c, key))
      continue;
    int cmp = compare_values(c, key);
    if (match_mode == -1 && cmp < 0 && (!best || compare_values(c, keys[*best]) > 0))
      best = i;
    if (match_mode == 1 && cmp > 0 && (!best || compare_values(c, keys[*best]) < 0))
      best = i;
  }
  if (!best) {
    if (a.size() > 3) return a[3];
    return err(ErrorCode::NA);
  }
  bool vertical = lookup->cols() == 1 && lookup->rows() > 1;
  if (vertical) {
    if (*best >= result->rows()) return err(ErrorCode::Value);
    return result->at(*best, 0);
  }
  if (*best >= result->cols()) return err(ErrorCode::Value);
  return result->at(0, *best);
}

Operand fn_index(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  const auto* r = as_range(a[0]);
  if (!r) {
    // INDEX over a scalar behaves like a 1x1 range.
    auto row = number_arg(a[1]);
    if (!row) return err(ErrorCode::Value);
    if (*row > 1) return err(ErrorCode::Ref);
    return a[0];
  }
  auto row_n = number_arg(a[1]);
  auto col_n = a.size() == 3 ? number_arg(a[2]) : std::optional<double>(0.0);
  if (!row_n || !col_n || *row_n < 0 || *col_n < 0) return err(ErrorCode::Value);
  int row = static_cast<int>(*row_n);
  int col = static_cast<int>(*col_n);
  if (a.size() == 2) {
    if (r->rows() == 1) {
      col = row;
      row = 1;
    } else if (r->cols() == 1) {
      col = 1;
    }
  }
  if (row > r->rows() || col > r->cols()) return err(ErrorCode::Ref);
  if (row == 0 && col == 0) return *r;
  RangeView out = *r;
  if (!out.box) return err(ErrorCode::Ref);
  if (row > 0) out.box->min_row = out.box->max_row = r->box->min_row + row - 1;
  if (col > 0) out.box->min_col = out.box->max_col = r->box->min_col + col - 1;
  return out;
}

Operand fn_match(Args& a) {
  if (!arity(a, 2, 3)) return err(ErrorCode::Value);
  const auto* r = as_range(a[1]);
  if (!r) return err(ErrorCode::NA);
  if (r->rows() != 1 && r->cols() != 1) return err(ErrorCode::NA);
  int type = 1;
  if (a.size() == 3) {
    auto t = number_arg(a[2]);
    if (!t) return err(ErrorCode::Value);
    type = *t > 0 ? 1 : (*t < 0 ? -1 : 0);
  }
  auto pos = find_position(scalar(a[0]), flatten(*r), type);
  if (!pos) return err(ErrorCode::NA);
  return num(*pos + 1);
}

Operand fn_concat(Args& a) {
  std::string out;
  for (const auto& op : a) {
    if (const auto* r = as_range(op)) {
      r->for_each_nonblank([&out](const CellValue& v) { out += to_text(v); });
    } else {
      out += to_text(std::get<CellValue>(op));
    }
  }
  return CellValue(std::move(out));
}

Operand fn_text(Args& a) {
  if (a.size() != 2) return err(ErrorCode::Value);
  return scalar(a[0]);
}

Operand fn_npv(Args& a) {
  if (a.size() < 2) return err(ErrorCode::Value);
  auto rate = number_arg(a[0]);
  if (!rate) return err(ErrorCode::Value);
  if (*rate == -1) return err(ErrorCode::Div0);
  std::vector<double> flows;
  if (auto e = collect_numbers(a, 1, flows)) return err(*e);
  double npv = 0;
  for (std::size_t i = 0; i < flows.size(); ++i)
    npv += flows[i] / std::pow(1 + *rate, static_cast<double>(i + 1));
  return num(npv);
}

Operand fn_irr(Args& a) {
  if (!arity(a, 1, 2)) return err(ErrorCode::Value);
  std::vector<double> flows;
  Args values{a[0]};
  if (auto e = collect_numbers(values, 0, flows)) return err(*e);
  auto npv = [&flows](double r) {
    double s = 0;
    for (std::size_t t = 0; t < flows.size(); ++t)
      s += flows[t] / std::pow(1 + r, static_cast<double>(t));
    return s;
  };
  double lo = -0.9999;
  double hi = 10.0;
  double f_lo = npv(lo);
  double f_hi = npv(hi);
  if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || f_lo * f_hi > 0)
    return err(ErrorCode::Value);
  if (f_lo == 0) return num(lo);
  if (f_hi == 0) return num(hi);
  while (hi - lo > 1e-9) {
    double mid = 0.5 * (lo + hi);
    double f_mid = npv(mid);
    if (f_mid == 0) return num(mid);
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return num(0.5 * (lo + hi));
}

Operand fn_pmt(Args& a) {
  if (!arity(a, 3, 5)) return err(ErrorCode::Value);
  auto rate = number_arg(a[0]);
  auto nper = number_arg(a[1]);
  auto pv = number_arg(a[2]);
  auto fv = a.size() > 3 ? number_arg(a[3]) : std::optional<double>(0.0);
  auto type = a.size() > 4 ? number_arg(a[4]) : std::optional<double>(0.0);
  if (!rate || !nper || !pv || !fv || !type) return err(ErrorCode::Value);
  if (*nper == 0) return err(ErrorCode::Div0);
  if (*rate == 0) return num(-(*pv + *fv) / *nper);
  double growth = std::pow(1 + *rate, *nper);
  double denom = (1 + *rate * (*type != 0 ? 1 : 0)) * (growth - 1);
  if (denom == 0) return err(ErrorCode::Div0);
  return num(-*rate * (*fv + *pv * growth) / denom);
}

const std::unordered_map<std::string, Fn>& registry() {
  static const std::unordered_map<std::string, Fn> kFns = {
      {"SUM", fn_sum},
      {"AVERAGE", fn_average},
      {"MIN", fn_min},
      {"MAX", fn_max},
      {"COUNT", fn_count},
      {"COUNTA", fn_counta},
      {"ROUND", fn_round},
      {"ABS", fn_abs},
      {"SQRT", fn_sqrt},
      {"POWER", fn_power},
      {"AND", fn_and},
      {"OR", fn_or},
      {"NOT", fn_not},
      {"IF", fn_if},
      {"IFS", fn_ifs},
      {"SWITCH", fn_switch},
      {"SUMIF", fn_sumif},
      {"SUMIFS", fn_sumifs},
      {"COUNTIF", fn_countif},
      {"COUNTIFS", fn_countifs},
      {"AVERAGEIF", fn_averageif},
      {"AVERAGEIFS", fn_averageifs},
      {"VLOOKUP", [](Args& a) { return fn_vlookup(a, false); }},
      {"HLOOKUP", [](Args& a) { return fn_vlookup(a, true); }},
      {"LOOKUP", fn_lookup},
      {"XLOOKUP", fn_xlookup},
      {"INDEX", fn_index},
      {"MATCH", fn_match},
      {"CONCAT", fn_concat},
      {"CONCATENATE", fn_concat},
      {"TEXT", fn_text},
      {"NPV", fn_npv},
      {"IRR", fn_irr},
      {"PMT", fn_pmt},
  };
  return kFns;
}

}  // namespace

Operand call_function(const std::string& name, std::vector<Operand>& args) {
  const auto& fns = registry();
  if (name == "IFERROR") {
    if (args.size() != 2) return err(ErrorCode::Value);
    CellValue v = scalar(args[0]);
    if (v.is_error()) return args[1];
    return args[0];
  }
  auto it = fns.find(name);
  if (it == fns.end()) return err(ErrorCode::Name);
  if (auto e = first_error(args)) return err(*e);
  return it->second(args);
}

}  // namespace detail

bool is_supported_function(std::string_view name) {
  return name == "IFERROR" || detail::registry().count(std::string(name)) > 0;
}

}  // namespace sarena::formula
