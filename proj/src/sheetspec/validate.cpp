#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "sarena/formula/ast.hpp"
#include "sarena/formula/evaluator.hpp"
#include "sarena/sheetspec/workbook.hpp"

namespace sarena::sheet {
namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const std::set<std::string>& volatile_functions() {
  static const std::set<std::string> kNames = {"NOW", "TODAY", "RAND", "RANDBETWEEN",
                                               "OFFSET", "INDIRECT"};
  return kNames;
}

class Validator {
 public:
  explicit Validator(const Workbook& wb) : wb_(wb) {
    for (const auto& s : wb.sheets) {
      sheet_names_.insert(upper(s.name));
      for (const auto& n : s.named_ranges) names_.insert(upper(n.name));
    }
    if (wb.rules && wb.rules->allowed_functions) {
      allowed_.emplace();
      for (const auto& f : *wb.rules->allowed_functions) allowed_->insert(upper(f));
    }
  }

  ValidationReport run() {
    for (std::size_t i = 0; i < wb_.sheets.size(); ++i) check_sheet(i);
    if (wb_.outputs) {
      for (std::size_t i = 0; i < wb_.outputs->size(); ++i) {
        const auto& o = (*wb_.outputs)[i];
        std::string path = "/outputs/" + std::to_string(i) + "/ref";
        check_range_text(o.ref, path);
      }
    }
    report_.ok = report_.error_count() == 0;
    return std::move(report_);
  }

 private:
  void error(std::string path, std::string message) {
    report_.issues.push_back({Severity::Error, std::move(path), std::move(message)});
  }
  void warning(std::string path, std::string message) {
    report_.issues.push_back({Severity::Warning, std::move(path), std::move(message)});
  }

  bool sheet_exists(const std::string& name) const {
    return sheet_names_.count(upper(name)) > 0;
  }

  void check_range_text(const std::string& text, const std::string& path) {
    auto ref = parse_range(text);
    if (!ref) {
      error(path, "not a valid A1 range: \"" + text + "\"");
      return;
    }
    if (ref->sheet && !sheet_exists(*ref->sheet))
      error(path, "unknown sheet \"" + *ref->sheet + "\"");
  }

  void check_style(const std::optional<CellStyle>& style, const std::string& path) {
    if (style && style->font_size && *style->font_size <= 0)
      warning(path + "/style/fontSize", "zero-size font");
  }

  void check_formula(const std::string& source, const std::string& path) {
    formula::Expr ast;
    try {
      ast = formula::parse_formula(source);
    } catch (const formula::SyntaxError& e) {
      error(path, "formula syntax error at offset " + std::to_string(e.offset()) +
                      ": " + e.what());
      return;
    }
    std::set<std::string> reported;
    formula::walk(ast, [&](const formula::Expr& e) {
      using Kind = formula::Expr::Kind;
      if (e.kind == Kind::Cell || e.kind == Kind::Range) {
        if (e.ref.sheet && !sheet_exists(*e.ref.sheet) &&
            reported.insert("sheet:" + *e.ref.sheet).second)
          error(path, "unknown sheet \"" + *e.ref.sheet + "\"");
      } else if (e.kind == Kind::Name) {
        if (!names_.count(upper(e.text)) && reported.insert("name:" + e.text).second)
          error(path, "unknown name \"" + e.text + "\"");
      } else if (e.kind == Kind::Call) {
        if (!reported.insert("fn:" + e.text).second) return;
        if (!formula::is_supported_function(e.text))
          warning(path, "unsupported function " + e.text);
        if (allowed_ && !allowed_->count(e.text))
          warning(path, "function " + e.text + " not in allowedFunctions");
        if (wb_.rules && wb_.rules->disallow_volatile.value_or(false) &&
            volatile_functions().count(e.text))
          warning(path, "volatile function " + e.text);
      }
    });
  }

  void check_sheet(std::size_t si) {
    const Sheet& s = wb_.sheets[si];
    const std::string base = "/sheets/" + std::to_string(si);
    for (std::size_t ci = 0; ci < s.cells.size(); ++ci) {
      const Cell& c = s.cells[ci];
      std::string path = base + "/cells/" + std::to_string(ci);
      check_style(c.style, path);
      if (const auto* f = c.formula()) check_formula(*f, path + "/formula");
    }
    for (std::size_t ni = 0; ni < s.named_ranges.size(); ++ni) {
      check_range_text(s.named_ranges[ni].ref,
                       base + "/namedRanges/" + std::to_string(ni) + "/ref");
    }
    for (std::size_t ri = 0; ri < s.conditional_formats.size(); ++ri) {
      const auto& rule = s.conditional_formats[ri];
      std::string path = base + "/conditionalFormats/" + std::to_string(ri);
      check_range_text(rule_range(rule), path + "/range");
      if (const auto* expr = std::get_if<ExpressionRule>(&rule)) {
        std::string src = expr->formula;
        if (src.empty() || src[0] != '=') src.insert(src.begin(), '=');
        check_formula(src, path + "/formula");
      }
    }
  }

  const Workbook& wb_;
  std::set<std::string> sheet_names_;
  std::set<std::string> names_;
  std::optional<std::set<std::string>> allowed_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_workbook(const Workbook& wb) { return Validator(wb).run(); }

}  // namespace sarena::sheet
