#include "sarena/formula/evaluator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stack>

#include "internal.hpp"
#include "json.hpp"

namespace sarena::formula {

std::string_view error_text(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ref: return "#REF!";
    case ErrorCode::Div0: return "#DIV/0!";
    case ErrorCode::Name: return "#NAME?";
    case ErrorCode::Value: return "#VALUE!";
    case ErrorCode::NA: return "#N/A";
    case ErrorCode::Circ: return "#CIRC!";
  }
  return "#VALUE!";
}

std::optional<ErrorCode> parse_error_text(std::string_view text) {
  for (auto code : {ErrorCode::Ref, ErrorCode::Div0, ErrorCode::Name,
                    ErrorCode::Value, ErrorCode::NA, ErrorCode::Circ}) {
    if (error_text(code) == text) return code;
  }
  return std::nullopt;
}

std::string format_general(double v) {
  if (v == 0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string describe(const CellValue& v) {
  if (v.is_blank()) return "<blank>";
  if (v.is_number()) return format_general(v.number());
  if (v.is_text()) return "\"" + v.text() + "\"";
  if (v.is_bool()) return v.boolean() ? "TRUE" : "FALSE";
  return std::string(error_text(v.error()));
}

namespace detail {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

}  // namespace

WorkbookIndex::WorkbookIndex(const sheet::Workbook& wb) {
  sheets_.reserve(wb.sheets.size());
  for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
    const auto& sh = wb.sheets[s];
    SheetIndex idx;
    idx.name = sh.name;
    idx.sheet = &sh;
    for (std::size_t i = 0; i < sh.cells.size(); ++i) {
      if (sh.cells[i].is_blank()) continue;
      idx.cells.emplace(sh.cells[i].address, i);
    }
    idx.used = sheet::used_range(sh);
    sheets_.push_back(std::move(idx));
    for (const auto& nr : sh.named_ranges)
      names_[upper(nr.name)].push_back({static_cast<int>(s), nr.ref});
  }
}

std::optional<int> WorkbookIndex::find_sheet(std::string_view name) const {
  for (std::size_t i = 0; i < sheets_.size(); ++i) {
    if (sheets_[i].name == name) return static_cast<int>(i);
  }
  for (std::size_t i = 0; i < sheets_.size(); ++i) {
    if (iequals(sheets_[i].name, name)) return static_cast<int>(i);
  }
  return std::nullopt;
}

Resolution WorkbookIndex::resolve(const sheet::RangeRef& ref,
                                  int current_sheet) const {
  int target = current_sheet;
  if (ref.sheet) {
    auto found = find_sheet(*ref.sheet);
    if (!found) return ErrorCode::Ref;
    target = *found;
  }
  ResolvedRange out;
  out.sheet = target;
  Box box = ref.box();
  using Kind = sheet::RangeRef::Kind;
  if (ref.kind == Kind::Columns || ref.kind == Kind::Rows) {
    const auto& used = sheets_[target].used;
    if (!used) return out;
    Box clipped{std::max(box.min_row, used->min_row),
                std::min(box.max_row, used->max_row),
                std::max(box.min_col, used->min_col),
                std::min(box.max_col, used->max_col)};
    if (clipped.min_row > clipped.max_row || clipped.min_col > clipped.max_col)
      return out;
    out.box = clipped;
    return out;
  }
  if (!sheet::in_bounds(ref.first) || !sheet::in_bounds(ref.last))
    return ErrorCode::Ref;
  out.box = box;
  return out;
}

Resolution WorkbookIndex::resolve_name(std::string_view name,
                                       int current_sheet) const {
  auto it = names_.find(upper(name));
  if (it == names_.end()) return ErrorCode::Name;
  const NameEntry* entry = &it->second.front();
  for (const auto& e : it->second) {
    if (e.sheet == current_sheet) {
      entry = &e;
      break;
    }
  }
  auto ref = sheet::parse_range(entry->ref);
  if (!ref) return ErrorCode::Name;
  return resolve(*ref, entry->sheet);
}

void WorkbookIndex::for_each_cell(
    const ResolvedRange& r, const std::function<void(int, CellAddress)>& fn) const {
  if (!r.box) return;
  const Box& box = *r.box;
  const auto& cells = sheets_[r.sheet].cells;
  if (box.area() < static_cast<long long>(cells.size())) {
    for (int row = box.min_row; row <= box.max_row; ++row) {
      auto it = cells.lower_bound({row, box.min_col});
      for (; it != cells.end() && it->first.row == row &&
             it->first.col <= box.max_col;
           ++it)
        fn(r.sheet, it->first);
    }
    return;
  }
  auto it = cells.lower_bound({box.min_row, 0});
  for (; it != cells.end() && it->first.row <= box.max_row; ++it) {
    if (it->first.col >= box.min_col && it->first.col <= box.max_col)
      fn(r.sheet, it->first);
  }
}

std::vector<Node> references_of(const Expr& e, int current_sheet,
                                const WorkbookIndex& index) {
  std::vector<Node> out;
  walk(e, [&](const Expr& n) {
    Resolution res;
    if (n.kind == Expr::Kind::Cell) {
      res = index.resolve(n.ref, current_sheet);
      if (auto* r = std::get_if<ResolvedRange>(&res); r && r->box)
        out.push_back({r->sheet, {r->box->min_row, r->box->min_col}});
      return;
    }
    if (n.kind == Expr::Kind::Range) {
      res = index.resolve(n.ref, current_sheet);
    } else if (n.kind == Expr::Kind::Name) {
      res = index.resolve_name(n.text, current_sheet);
    } else {
      return;
    }
    if (auto* r = std::get_if<ResolvedRange>(&res))
      index.for_each_cell(*r, [&out](int s, CellAddress a) { out.push_back({s, a}); });
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CellValue Evaluator::cell(int sheet, CellAddress a) const {
  const auto& idx = index_.sheets()[sheet];
  auto it = idx.cells.find(a);
  if (it == idx.cells.end()) return {};
  return values_[sheet][it->second];
}

CellValue RangeView::at(int r, int c) const {
  if (!box) return {};
  return ev->cell(sheet, {box->min_row + r, box->min_col + c});
}

void RangeView::for_each_nonblank(
    const std::function<void(const CellValue&)>& fn) const {
  if (!box) return;
  ev->index().for_each_cell(ResolvedRange{sheet, box}, [&](int s, CellAddress a) {
    CellValue v = ev->cell(s, a);
    if (!v.is_blank()) fn(v);
  });
}

std::optional<ErrorCode> RangeView::first_error() const {
  std::optional<ErrorCode> err;
  for_each_nonblank([&err](const CellValue& v) {
    if (!err && v.is_error()) err = v.error();
  });
  return err;
}

CellValue scalar(const Operand& op) {
  if (auto* v = std::get_if<CellValue>(&op)) return *v;
  const auto& r = std::get<RangeView>(op);
  if (r.rows() == 1 && r.cols() == 1) return r.at(0, 0);
  return ErrorCode::Value;
}

std::optional<double> to_number(const CellValue& v) {
  if (v.is_number()) return v.number();
  if (v.is_blank()) return 0.0;
  if (v.is_bool()) return v.boolean() ? 1.0 : 0.0;
  if (v.is_text()) {
    const std::string& s = v.text();
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return std::nullopt;
    std::size_t e = s.find_last_not_of(" \t");
    std::string trimmed = s.substr(b, e - b + 1);
    char* end = nullptr;
    double d = std::strtod(trimmed.c_str(), &end);
    if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(d))
      return std::nullopt;
    // strtod accepts hex and inf/nan spellings; spreadsheets do not.
    for (char c : trimmed) {
      if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E')
        return std::nullopt;
    }
    return d;
  }
  return std::nullopt;
}

std::string to_text(const CellValue& v) {
  if (v.is_text()) return v.text();
  if (v.is_number()) return format_general(v.number());
  if (v.is_bool()) return v.boolean() ? "TRUE" : "FALSE";
  return {};
}

namespace {

int type_rank(const CellValue& v) {
  if (v.is_number()) return 0;
  if (v.is_text()) return 1;
  return 2;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

int compare_values(const CellValue& a_in, const CellValue& b_in) {
  CellValue a = a_in;
  CellValue b = b_in;
  if (a.is_blank() && b.is_blank()) return 0;
  auto blank_like = [](const CellValue& other) -> CellValue {
    if (other.is_text()) return std::string();
    if (other.is_bool()) return false;
    return 0.0;
  };
  if (a.is_blank()) a = blank_like(b);
  if (b.is_blank()) b = blank_like(a);
  int ra = type_rank(a);
  int rb = type_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (a.is_number()) return a.number() < b.number() ? -1 : (a.number() > b.number() ? 1 : 0);
  if (a.is_text()) {
    int c = lower(a.text()).compare(lower(b.text()));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  return static_cast<int>(a.boolean()) - static_cast<int>(b.boolean());
}

bool wildcard_match(std::string_view pattern, std::string_view text) {
  // Tokens: literal char, '?' (any one), '*' (any run). '~' escapes.
  struct Token {
    char c;
    bool any_one;
    bool any_run;
  };
  std::vector<Token> toks;
  std::string p = lower(pattern);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == '~' && i + 1 < p.size() &&
        (p[i + 1] == '*' || p[i + 1] == '?' || p[i + 1] == '~')) {
      toks.push_back({p[++i], false, false});
    } else if (p[i] == '*') {
      toks.push_back({0, false, true});
    } else if (p[i] == '?') {
      toks.push_back({0, true, false});
    } else {
      toks.push_back({p[i], false, false});
    }
  }
  std::string t = lower(text);
  std::size_t pi = 0, ti = 0, star = std::string::npos, resume = 0;
  while (ti < t.size()) {
    if (pi < toks.size() && !toks[pi].any_run &&
        (toks[pi].any_one || toks[pi].c == t[ti])) {
      ++pi;
      ++ti;
    } else if (pi < toks.size() && toks[pi].any_run) {
      star = pi++;
      resume = ti;
    } else if (star != std::string::npos) {
      pi = star + 1;
      ti = ++resume;
    } else {
      return false;
    }
  }
  while (pi < toks.size() && toks[pi].any_run) ++pi;
  return pi == toks.size();
}

namespace {

CellValue finite_or_error(double d) {
  if (!std::isfinite(d)) return ErrorCode::Value;
  return d;
}

CellValue apply_binary(BinaryOp op, const CellValue& a, const CellValue& b) {
  if (a.is_error()) return a;
  if (b.is_error()) return b;
  switch (op) {
    case BinaryOp::Concat:
      return to_text(a) + to_text(b);
    case BinaryOp::Eq: return compare_values(a, b) == 0;
    case BinaryOp::Ne: return compare_values(a, b) != 0;
    case BinaryOp::Lt: return compare_values(a, b) < 0;
    case BinaryOp::Le: return compare_values(a, b) <= 0;
    case BinaryOp::Gt: return compare_values(a, b) > 0;
    case BinaryOp::Ge: return compare_values(a, b) >= 0;
    default:
      break;
  }
  auto x = to_number(a);
  auto y = to_number(b);
  if (!x || !y) return ErrorCode::Value;
  switch (op) {
    case BinaryOp::Add: return finite_or_error(*x + *y);
    case BinaryOp::Sub: return finite_or_error(*x - *y);
    case BinaryOp::Mul: return finite_or_error(*x * *y);
    case BinaryOp::Div:
      if (*y == 0) return ErrorCode::Div0;
      return finite_or_error(*x / *y);
    case BinaryOp::Pow:
      if (*x == 0 && *y < 0) return ErrorCode::Div0;
      return finite_or_error(std::pow(*x, *y));
    default:
      return ErrorCode::Value;
  }
}

}  // namespace

Operand Evaluator::eval(const Expr& e, int current_sheet) const {
  switch (e.kind) {
    case Expr::Kind::Number:
      return CellValue(e.number);
    case Expr::Kind::String:
      return CellValue(e.text);
    case Expr::Kind::Boolean:
      return CellValue(e.boolean);
    case Expr::Kind::Cell:
    case Expr::Kind::Range: {
      Resolution res = index_.resolve(e.ref, current_sheet);
      if (auto* err = std::get_if<ErrorCode>(&res)) return CellValue(*err);
      const auto& r = std::get<ResolvedRange>(res);
      return RangeView{this, r.sheet, r.box};
    }
    case Expr::Kind::Name: {
      Resolution res = index_.resolve_name(e.text, current_sheet);
      if (auto* err = std::get_if<ErrorCode>(&res)) return CellValue(*err);
      const auto& r = std::get<ResolvedRange>(res);
      return RangeView{this, r.sheet, r.box};
    }
    case Expr::Kind::Unary: {
      CellValue v = scalar(eval(e.args[0], current_sheet));
      if (v.is_error()) return v;
      auto x = to_number(v);
      if (!x) return CellValue(ErrorCode::Value);
      switch (e.unary_op) {
        case UnaryOp::Neg: return CellValue(-*x);
        case UnaryOp::Plus: return CellValue(*x);
        case UnaryOp::Percent: return CellValue(*x / 100.0);
      }
      return CellValue(ErrorCode::Value);
    }
    case Expr::Kind::Binary: {
      CellValue a = scalar(eval(e.args[0], current_sheet));
      CellValue b = scalar(eval(e.args[1], current_sheet));
      return apply_binary(e.binary_op, a, b);
    }
    case Expr::Kind::Call: {
      std::vector<Operand> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(a, current_sheet));
      return call_function(e.text, args);
    }
  }
  return CellValue(ErrorCode::Value);
}

namespace {

struct CompiledCell {
  Node node;
  std::optional<Expr> ast;  // absent when the source failed to parse
};

// Tarjan's algorithm, iterative. Returns the set of nodes that lie on a
// cycle (SCC of size > 1, or a self-loop).
std::vector<bool> cyclic_nodes(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false), cyclic(n, false);
  std::vector<int> stack;
  int counter = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < adj[f.v].size()) {
        int w = adj[f.v][f.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> component;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        bool cycle = component.size() > 1 ||
                     std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
        if (cycle)
          for (int c : component) cyclic[c] = true;
      }
    }
  }
  return cyclic;
}

// Everything needed by both graph construction and evaluation.
struct Analysis {
  std::vector<CompiledCell> formulas;
  std::vector<Node> nodes;  // sorted, unique
  std::vector<std::vector<int>> deps;  // node -> referenced nodes
  std::vector<bool> cyclic;
  std::map<Node, int> node_id;
};

Analysis analyze(const sheet::Workbook& wb, const WorkbookIndex& index) {
  Analysis a;
  std::vector<std::vector<Node>> refs;
  for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
    for (const auto& c : wb.sheets[s].cells) {
      const std::string* src = c.formula();
      if (!src) continue;
      CompiledCell cc{{static_cast<int>(s), c.address}, std::nullopt};
      try {
        cc.ast = parse_formula(*src);
      } catch (const SyntaxError&) {
      }
      refs.push_back(cc.ast ? references_of(*cc.ast, static_cast<int>(s), index)
                            : std::vector<Node>{});
      a.formulas.push_back(std::move(cc));
    }
  }
  std::set<Node> all;
  for (std::size_t i = 0; i < a.formulas.size(); ++i) {
    all.insert(a.formulas[i].node);
    all.insert(refs[i].begin(), refs[i].end());
  }
  a.nodes.assign(all.begin(), all.end());
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    a.node_id[a.nodes[i]] = static_cast<int>(i);
  a.deps.assign(a.nodes.size(), {});
  for (std::size_t i = 0; i < a.formulas.size(); ++i) {
    int id = a.node_id[a.formulas[i].node];
    for (const auto& r : refs[i]) a.deps[id].push_back(a.node_id[r]);
  }
  a.cyclic = cyclic_nodes(a.deps);
  return a;
}

}  // namespace

}  // namespace detail

using detail::Analysis;
using detail::Node;

const CellValue* EvaluatedGrid::find(std::string_view sheet,
                                     sheet::CellAddress a) const {
  for (std::size_t i = 0; i < sheet_names.size(); ++i) {
    if (sheet_names[i] != sheet) continue;
    auto it = values[i].find(a);
    return it == values[i].end() ? nullptr : &it->second;
  }
  return nullptr;
}

DepGraph build_dependency_graph(const sheet::Workbook& wb) {
  detail::WorkbookIndex index(wb);
  Analysis a = detail::analyze(wb, index);
  DepGraph g;
  auto key = [&wb](const Node& n) {
    return CellKey{wb.sheets[n.sheet].name, n.address};
  };
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    g.nodes.insert(key(a.nodes[i]));
    if (a.cyclic[i]) g.cyclic.insert(key(a.nodes[i]));
    for (int dep : a.deps[i]) g.edges.insert({key(a.nodes[dep]), key(a.nodes[i])});
  }
  return g;
}

EvaluatedGrid evaluate_workbook(const sheet::Workbook& wb) {
  detail::WorkbookIndex index(wb);
  Analysis a = detail::analyze(wb, index);

  std::vector<std::vector<CellValue>> values(wb.sheets.size());
  for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
    const auto& cells = wb.sheets[s].cells;
    values[s].resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      if (const auto* t = c.text()) {
        values[s][i] = t->empty() ? CellValue{} : CellValue(*t);
      } else if (const auto* n = c.number()) {
        values[s][i] = *n;
      }
    }
  }

  auto slot = [&](const Node& n) -> CellValue& {
    const auto& cells = index.sheets()[n.sheet].cells;
    return values[n.sheet][cells.at(n.address)];
  };

  // Formula nodes by id; plain cells need no evaluation.
  std::vector<const detail::CompiledCell*> formula_at(a.nodes.size(), nullptr);
  for (const auto& f : a.formulas) formula_at[a.node_id.at(f.node)] = &f;

  // Kahn's algorithm over the acyclic remainder, smallest node first.
  const std::size_t n = a.nodes.size();
  std::vector<std::vector<int>> dependents(n);
  std::vector<int> pending(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (a.cyclic[v]) continue;
    for (int d : a.deps[v]) {
      if (a.cyclic[d] || !formula_at[d]) continue;
      dependents[d].push_back(static_cast<int>(v));
      ++pending[v];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (a.cyclic[v] && formula_at[v]) slot(a.nodes[v]) = ErrorCode::Circ;
    if (!a.cyclic[v] && formula_at[v] && pending[v] == 0)
      ready.push(static_cast<int>(v));
  }
  detail::Evaluator ev(index, values);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    const auto* f = formula_at[v];
    CellValue result;
    if (!f->ast) {
      result = ErrorCode::Name;
    } else {
      result = detail::scalar(ev.eval(*f->ast, f->node.sheet));
      if (result.is_blank()) result = 0.0;
    }
    slot(f->node) = std::move(result);
    for (int d : dependents[v]) {
      if (--pending[d] == 0) ready.push(d);
    }
  }

  EvaluatedGrid grid;
  grid.values.resize(wb.sheets.size());
  for (std::size_t s = 0; s < wb.sheets.size(); ++s) {
    grid.sheet_names.push_back(wb.sheets[s].name);
    for (const auto& [addr, i] : index.sheets()[s].cells)
      grid.values[s].emplace(addr, values[s][i]);
  }
  for (const auto& f : a.formulas) {
    ++grid.formula_cell_count;
    if (slot(f.node).is_error()) ++grid.error_cell_count;
    if (f.ast) {
      for (auto& name : called_functions(*f.ast)) ++grid.function_usage[name];
    }
  }
  return grid;
}

namespace {

constexpr std::array<std::string_view, 6> kLookups = {
    "VLOOKUP", "HLOOKUP", "LOOKUP", "XLOOKUP", "INDEX", "MATCH"};
constexpr std::array<std::string_view, 10> kConditionals = {
    "IF",    "IFS",     "IFERROR", "SWITCH",    "SUMIF",
    "SUMIFS", "COUNTIF", "COUNTIFS", "AVERAGEIF", "AVERAGEIFS"};

}  // namespace

bool is_lookup_function(std::string_view name) {
  return std::find(kLookups.begin(), kLookups.end(), name) != kLookups.end();
}

bool is_conditional_function(std::string_view name) {
  return std::find(kConditionals.begin(), kConditionals.end(), name) !=
         kConditionals.end();
}

FunctionCounts classify_functions(const EvaluatedGrid& grid) {
  FunctionCounts out;
  out.distinct = grid.function_usage.size();
  for (const auto& [name, count] : grid.function_usage) {
    if (is_lookup_function(name)) out.lookups += count;
    if (is_conditional_function(name)) out.conditionals += count;
  }
  return out;
}

std::string grid_to_json(const EvaluatedGrid& grid) {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  nlohmann::ordered_json sheets = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < grid.sheet_names.size(); ++s) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::object();
    for (const auto& [addr, v] : grid.values[s]) {
      nlohmann::ordered_json c = nlohmann::ordered_json::object();
      if (v.is_error()) {
        c["error"] = error_text(v.error());
      } else if (v.is_number()) {
        c["value"] = v.number();
      } else if (v.is_text()) {
        c["value"] = v.text();
      } else if (v.is_bool()) {
        c["value"] = v.boolean();
      } else {
        c["value"] = nullptr;
      }
      cells[sheet::to_a1(addr)] = std::move(c);
    }
    nlohmann::ordered_json sj = nlohmann::ordered_json::object();
    sj["name"] = grid.sheet_names[s];
    sj["cells"] = std::move(cells);
    sheets.push_back(std::move(sj));
  }
  root["sheets"] = std::move(sheets);
  root["formulaCells"] = grid.formula_cell_count;
  root["errorCells"] = grid.error_cell_count;
  return root.dump();
}

}  // namespace sarena::formula
