#include "sarena/sheetspec/workbook.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace sarena::sheet {

using nlohmann::json;
using nlohmann::ordered_json;

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
  return buf;
}

namespace {

struct NamedColor {
  std::string_view name;
  Rgb rgb;
};

constexpr std::array<NamedColor, 16> kBasicColors = {{
    {"black", {0x00, 0x00, 0x00}},   {"silver", {0xC0, 0xC0, 0xC0}},
    {"gray", {0x80, 0x80, 0x80}},    {"white", {0xFF, 0xFF, 0xFF}},
    {"maroon", {0x80, 0x00, 0x00}},  {"red", {0xFF, 0x00, 0x00}},
    {"purple", {0x80, 0x00, 0x80}},  {"fuchsia", {0xFF, 0x00, 0xFF}},
    {"green", {0x00, 0x80, 0x00}},   {"lime", {0x00, 0xFF, 0x00}},
    {"olive", {0x80, 0x80, 0x00}},   {"yellow", {0xFF, 0xFF, 0x00}},
    {"navy", {0x00, 0x00, 0x80}},    {"blue", {0x00, 0x00, 0xFF}},
    {"teal", {0x00, 0x80, 0x80}},    {"aqua", {0x00, 0xFF, 0xFF}},
}};

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::optional<Rgb> parse_color(std::string_view text) {
  std::string lower;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c)))
      lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (const auto& named : kBasicColors) {
    if (named.name == lower) return named.rgb;
  }
  if (lower == "grey") return Rgb{0x80, 0x80, 0x80};
  std::string_view hex = lower;
  if (!hex.empty() && hex.front() == '#') hex.remove_prefix(1);
  std::array<int, 6> d{};
  if (hex.size() == 3) {
    for (int i = 0; i < 3; ++i) {
      d[2 * i] = d[2 * i + 1] = hex_digit(hex[i]);
    }
  } else if (hex.size() == 6) {
    for (int i = 0; i < 6; ++i) d[i] = hex_digit(hex[i]);
  } else {
    return std::nullopt;
  }
  if (std::any_of(d.begin(), d.end(), [](int v) { return v < 0; }))
    return std::nullopt;
  return Rgb{static_cast<std::uint8_t>(d[0] * 16 + d[1]),
             static_cast<std::uint8_t>(d[2] * 16 + d[3]),
             static_cast<std::uint8_t>(d[4] * 16 + d[5])};
}

const std::string* Cell::text() const {
  auto* t = std::get_if<TextContent>(&content);
  return t ? &t->value : nullptr;
}

const double* Cell::number() const { return std::get_if<double>(&content); }

const std::string* Cell::formula() const {
  auto* f = std::get_if<FormulaContent>(&content);
  return f ? &f->source : nullptr;
}

bool Cell::is_blank() const {
  const std::string* t = text();
  return t && t->empty();
}

const std::string& rule_range(const ConditionalFormatRule& rule) {
  return std::visit([](const auto& r) -> const std::string& { return r.range; },
                    rule);
}

const Cell* Sheet::find(CellAddress a) const {
  for (const auto& c : cells) {
    if (c.address == a) return &c;
  }
  return nullptr;
}

const Sheet* Workbook::find_sheet(std::string_view name) const {
  for (const auto& s : sheets) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(),
                    [](const Issue& i) { return i.severity == Severity::Error; }));
}

std::size_t ValidationReport::warning_count() const {
  return issues.size() - error_count();
}

ParseError::ParseError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("/") : path) + ": " +
                         message),
      kind_(kind),
      path_(std::move(path)) {}

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& msg) {
  throw ParseError(ParseError::Kind::SchemaViolation, path, msg);
}

void warn(std::vector<Issue>* warnings, std::string path, std::string msg) {
  if (warnings)
    warnings->push_back({Severity::Warning, std::move(path), std::move(msg)});
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    violation(path, std::string("missing required field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string())
    violation(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      violation(path + "/" + it.key(), "unexpected property");
  }
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) violation(path, "expected an object");
}

void expect_array(const json& v, const std::string& path) {
  if (!v.is_array()) violation(path, "expected an array");
}

std::optional<Rgb> style_color(const json& v, const std::string& path,
                               std::vector<Issue>* warnings) {
  if (!v.is_string()) {
    warn(warnings, path, "color must be a string; dropped");
    return std::nullopt;
  }
  auto rgb = parse_color(v.get<std::string>());
  if (!rgb) warn(warnings, path, "unknown color '" + v.get<std::string>() + "'; dropped");
  return rgb;
}

CellStyle parse_style(const json& v, const std::string& path,
                      std::vector<Issue>* warnings) {
  expect_object(v, path);
  CellStyle style;
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::string& key = it.key();
    const json& val = it.value();
    std::string p = path + "/" + key;
    if (key == "fill") {
      style.fill = style_color(val, p, warnings);
    } else if (key == "fontColor") {
      style.font_color = style_color(val, p, warnings);
    } else if (key == "fontWeight") {
      if (val.is_string()) {
        std::string w = val.get<std::string>();
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (w == "bold") {
          style.font_weight = FontWeight::Bold;
        } else if (w == "normal") {
          style.font_weight = FontWeight::Normal;
        } else {
          warn(warnings, p, "unknown font weight '" + w + "'; dropped");
        }
      } else if (val.is_number()) {
        style.font_weight =
            val.get<double>() >= 600 ? FontWeight::Bold : FontWeight::Normal;
      } else {
        warn(warnings, p, "font weight must be a string; dropped");
      }
    } else if (key == "fontSize") {
      if (!val.is_number()) violation(p, "fontSize must be a number");
      double size = val.get<double>();
      if (!std::isfinite(size) || size < 0)
        violation(p, "fontSize must be non-negative");
      style.font_size = size;
    } else if (key == "numberFormat") {
      if (!val.is_string()) violation(p, "numberFormat must be a string");
      style.number_format = val.get<std::string>();
    } else if (key == "border") {
      if (val.is_boolean()) {
        if (val.get<bool>()) style.border = Border{};
      } else if (val.is_string()) {
        std::string s = val.get<std::string>();
        if (s != "none" && !s.empty()) style.border = Border{s, std::nullopt};
      } else if (val.is_object()) {
        Border b;
        if (auto st = val.find("style"); st != val.end() && st->is_string())
          b.style = st->get<std::string>();
        if (auto c = val.find("color"); c != val.end())
          b.color = style_color(*c, p + "/color", warnings);
        if (b.style != "none") style.border = b;
      } else {
        warn(warnings, p, "unrecognized border descriptor; dropped");
      }
    } else {
      warn(warnings, p, "unknown style property; ignored");
    }
  }
  return style;
}

CfOperand parse_operand(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  violation(path, "expected a number or string");
}

ScaleAnchor parse_anchor(const json& v, const std::string& path,
                         std::vector<Issue>* warnings) {
  expect_object(v, path);
  ScaleAnchor a;
  std::string type = require_string(v, "type", path);
  if (type == "min") {
    a.kind = ScaleAnchor::Kind::Min;
  } else if (type == "max") {
    a.kind = ScaleAnchor::Kind::Max;
  } else if (type == "number" || type == "num") {
    a.kind = ScaleAnchor::Kind::Number;
  } else if (type == "percent") {
    a.kind = ScaleAnchor::Kind::Percent;
  } else if (type == "percentile") {
    a.kind = ScaleAnchor::Kind::Percentile;
  } else {
    violation(path + "/type", "unknown scale anchor type '" + type + "'");
  }
  if (auto it = v.find("value"); it != v.end()) {
    if (!it->is_number()) violation(path + "/value", "expected a number");
    a.value = it->get<double>();
  } else if (a.kind != ScaleAnchor::Kind::Min &&
             a.kind != ScaleAnchor::Kind::Max) {
    violation(path, "scale anchor of type '" + type + "' needs a value");
  }
  if (auto it = v.find("color"); it != v.end())
    a.color = style_color(*it, path + "/color", warnings);
  return a;
}

CellStyle optional_rule_style(const json& v, const std::string& path,
                              std::vector<Issue>* warnings) {
  if (auto it = v.find("style"); it != v.end())
    return parse_style(*it, path + "/style", warnings);
  return {};
}

ConditionalFormatRule parse_rule(const json& v, const std::string& path,
                                 std::vector<Issue>* warnings) {
  expect_object(v, path);
  std::string type = require_string(v, "type", path);
  std::string range = require_string(v, "range", path);
  if (type == "cellIs") {
    CellIsRule r;
    r.range = range;
    r.op = require_string(v, "operator", path);
    static const std::set<std::string> kOps = {
        "equal",    "notEqual",          "greaterThan",
        "lessThan", "greaterThanOrEqual", "lessThanOrEqual"};
    if (!kOps.count(r.op)) violation(path + "/operator", "unknown operator '" + r.op + "'");
    r.value = parse_operand(require(v, "value", path), path + "/value");
    r.style = optional_rule_style(v, path, warnings);
    return r;
  }
  if (type == "cellIsBetween") {
    CellIsBetweenRule r;
    r.range = range;
    r.low = parse_operand(require(v, "min", path), path + "/min");
    r.high = parse_operand(require(v, "max", path), path + "/max");
    if (auto it = v.find("operator"); it != v.end()) {
      if (!it->is_string()) violation(path + "/operator", "expected a string");
      std::string op = it->get<std::string>();
      if (op == "notBetween") {
        r.negate = true;
      } else if (op != "between") {
        violation(path + "/operator", "unknown operator '" + op + "'");
      }
    }
    r.style = optional_rule_style(v, path, warnings);
    return r;
  }
  if (type == "expression") {
    ExpressionRule r;
    r.range = range;
    r.formula = require_string(v, "formula", path);
    r.style = optional_rule_style(v, path, warnings);
    return r;
  }
  if (type == "containsText") {
    ContainsTextRule r;
    r.range = range;
    r.text = require_string(v, "text", path);
    r.style = optional_rule_style(v, path, warnings);
    return r;
  }
  if (type == "colorScale") {
    ColorScaleRule r;
    r.range = range;
    r.min = parse_anchor(require(v, "min", path), path + "/min", warnings);
    if (auto it = v.find("mid"); it != v.end())
      r.mid = parse_anchor(*it, path + "/mid", warnings);
    r.max = parse_anchor(require(v, "max", path), path + "/max", warnings);
    return r;
  }
  if (type == "dataBar") {
    DataBarRule r;
    r.range = range;
    auto color = style_color(require(v, "color", path), path + "/color", warnings);
    if (!color) violation(path + "/color", "data bar needs a valid color");
    r.color = *color;
    if (auto it = v.find("min"); it != v.end())
      r.min = parse_anchor(*it, path + "/min", warnings);
    if (auto it = v.find("max"); it != v.end())
      r.max = parse_anchor(*it, path + "/max", warnings);
    return r;
  }
  violation(path + "/type", "unknown conditional format type '" + type + "'");
}

Cell parse_cell(const json& v, const std::string& path,
                std::vector<Issue>* warnings) {
  expect_object(v, path);
  reject_unknown_keys(v, path, {"ref", "type", "text", "number", "formula", "style"});
  Cell cell;
  std::string ref = require_string(v, "ref", path);
  auto addr = parse_address(ref);
  if (!addr) violation(path + "/ref", "invalid A1 address '" + ref + "'");
  if (!in_bounds(*addr))
    violation(path + "/ref", "address '" + ref + "' is outside the " +
                                 std::to_string(kMaxRows) + "x" +
                                 std::to_string(kMaxCols) + " grid");
  cell.address = *addr;

  int payloads = static_cast<int>(v.contains("text")) +
                 static_cast<int>(v.contains("number")) +
                 static_cast<int>(v.contains("formula"));
  if (payloads != 1)
    violation(path, "a cell needs exactly one of text, number, formula");

  if (auto it = v.find("text"); it != v.end()) {
    if (!it->is_string()) violation(path + "/text", "expected a string");
    cell.content = TextContent{it->get<std::string>()};
  } else if (auto it = v.find("number"); it != v.end()) {
    if (!it->is_number()) violation(path + "/number", "expected a number");
    cell.content = it->get<double>();
  } else {
    const json& f = v.at("formula");
    if (!f.is_string()) violation(path + "/formula", "expected a string");
    std::string src = f.get<std::string>();
    if (src.size() < 2 || src.front() != '=')
      violation(path + "/formula", "formula must start with '=' and be non-empty");
    cell.content = FormulaContent{std::move(src)};
  }

  if (auto it = v.find("type"); it != v.end()) {
    static constexpr std::array<std::string_view, 3> kNames = {"text", "number",
                                                               "formula"};
    if (!it->is_string() ||
        it->get<std::string>() != kNames[static_cast<int>(cell.kind())])
      violation(path + "/type", "type does not match the cell payload");
  }
  if (auto it = v.find("style"); it != v.end()) {
    CellStyle style = parse_style(*it, path + "/style", warnings);
    if (!style.empty()) cell.style = std::move(style);
  }
  return cell;
}

Sheet parse_sheet(const json& v, const std::string& path,
                  std::vector<Issue>* warnings) {
  expect_object(v, path);
  reject_unknown_keys(v, path, {"name", "cells", "namedRanges", "conditionalFormats"});
  Sheet sheet;
  sheet.name = require_string(v, "name", path);
  if (sheet.name.empty()) violation(path + "/name", "sheet name is empty");

  const json& cells = require(v, "cells", path);
  expect_array(cells, path + "/cells");
  std::set<CellAddress> seen;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string p = path + "/cells/" + std::to_string(i);
    Cell cell = parse_cell(cells[i], p, warnings);
    if (!seen.insert(cell.address).second)
      violation(p, "duplicate cell address " + to_a1(cell.address));
    sheet.cells.push_back(std::move(cell));
  }

  if (auto it = v.find("namedRanges"); it != v.end()) {
    expect_array(*it, path + "/namedRanges");
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string p = path + "/namedRanges/" + std::to_string(i);
      const json& nr = (*it)[i];
      expect_object(nr, p);
      reject_unknown_keys(nr, p, {"name", "ref"});
      sheet.named_ranges.push_back(
          {require_string(nr, "name", p), require_string(nr, "ref", p)});
    }
  }
  if (auto it = v.find("conditionalFormats"); it != v.end()) {
    expect_array(*it, path + "/conditionalFormats");
    for (std::size_t i = 0; i < it->size(); ++i) {
      sheet.conditional_formats.push_back(parse_rule(
          (*it)[i], path + "/conditionalFormats/" + std::to_string(i), warnings));
    }
  }
  return sheet;
}

}  // namespace

Workbook parse_workbook(std::string_view document, std::vector<Issue>* warnings) {
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(ParseError::Kind::MalformedJson, "", e.what());
  }
  expect_object(root, "");
  reject_unknown_keys(root, "", {"version", "sheets", "outputs", "rules"});

  const json& version = require(root, "version", "");
  if (!version.is_string() || version.get<std::string>() != kSpecVersion)
    violation("/version", "expected \"SheetSpec@2\"");

  Workbook wb;
  const json& sheets = require(root, "sheets", "");
  expect_array(sheets, "/sheets");
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    std::string p = "/sheets/" + std::to_string(i);
    Sheet sheet = parse_sheet(sheets[i], p, warnings);
    if (!names.insert(sheet.name).second)
      violation(p + "/name", "duplicate sheet name '" + sheet.name + "'");
    wb.sheets.push_back(std::move(sheet));
  }

  if (auto it = root.find("outputs"); it != root.end()) {
    expect_array(*it, "/outputs");
    std::vector<OutputRef> outputs;
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string p = "/outputs/" + std::to_string(i);
      const json& o = (*it)[i];
      expect_object(o, p);
      reject_unknown_keys(o, p, {"name", "sheet", "ref", "metric"});
      OutputRef out{require_string(o, "name", p), require_string(o, "sheet", p),
                    require_string(o, "ref", p), require_string(o, "metric", p)};
      if (out.metric != "value" && out.metric != "values")
        violation(p + "/metric", "metric must be 'value' or 'values'");
      if (!names.count(out.sheet))
        violation(p + "/sheet", "unknown sheet '" + out.sheet + "'");
      outputs.push_back(std::move(out));
    }
    wb.outputs = std::move(outputs);
  }

  if (auto it = root.find("rules"); it != root.end()) {
    expect_object(*it, "/rules");
    reject_unknown_keys(*it, "/rules", {"disallowVolatile", "allowedFunctions"});
    Rules rules;
    if (auto d = it->find("disallowVolatile"); d != it->end()) {
      if (!d->is_boolean()) violation("/rules/disallowVolatile", "expected a boolean");
      rules.disallow_volatile = d->get<bool>();
    }
    if (auto a = it->find("allowedFunctions"); a != it->end()) {
      expect_array(*a, "/rules/allowedFunctions");
      std::vector<std::string> fns;
      for (std::size_t i = 0; i < a->size(); ++i) {
        if (!(*a)[i].is_string())
          violation("/rules/allowedFunctions/" + std::to_string(i), "expected a string");
        fns.push_back((*a)[i].get<std::string>());
      }
      rules.allowed_functions = std::move(fns);
    }
    wb.rules = std::move(rules);
  }
  return wb;
}

namespace {

ordered_json style_json(const CellStyle& s) {
  ordered_json j = ordered_json::object();
  if (s.fill) j["fill"] = s.fill->hex();
  if (s.font_color) j["fontColor"] = s.font_color->hex();
  if (s.font_weight)
    j["fontWeight"] = *s.font_weight == FontWeight::Bold ? "bold" : "normal";
  if (s.font_size) j["fontSize"] = *s.font_size;
  if (s.number_format) j["numberFormat"] = *s.number_format;
  if (s.border) {
    ordered_json b = ordered_json::object();
    b["style"] = s.border->style;
    if (s.border->color) b["color"] = s.border->color->hex();
    j["border"] = std::move(b);
  }
  return j;
}

ordered_json operand_json(const CfOperand& v) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

ordered_json anchor_json(const ScaleAnchor& a) {
  static constexpr std::array<const char*, 5> kNames = {
      "min", "max", "number", "percent", "percentile"};
  ordered_json j = ordered_json::object();
  j["type"] = kNames[static_cast<int>(a.kind)];
  if (a.value) j["value"] = *a.value;
  if (a.color) j["color"] = a.color->hex();
  return j;
}

ordered_json rule_json(const ConditionalFormatRule& rule) {
  ordered_json j = ordered_json::object();
  auto put_style = [&j](const CellStyle& s) {
    if (!s.empty()) j["style"] = style_json(s);
  };
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, CellIsRule>) {
          j["type"] = "cellIs";
          j["range"] = r.range;
          j["operator"] = r.op;
          j["value"] = operand_json(r.value);
          put_style(r.style);
        } else if constexpr (std::is_same_v<T, CellIsBetweenRule>) {
          j["type"] = "cellIsBetween";
          j["range"] = r.range;
          j["operator"] = r.negate ? "notBetween" : "between";
          j["min"] = operand_json(r.low);
          j["max"] = operand_json(r.high);
          put_style(r.style);
        } else if constexpr (std::is_same_v<T, ExpressionRule>) {
          j["type"] = "expression";
          j["range"] = r.range;
          j["formula"] = r.formula;
          put_style(r.style);
        } else if constexpr (std::is_same_v<T, ContainsTextRule>) {
          j["type"] = "containsText";
          j["range"] = r.range;
          j["text"] = r.text;
          put_style(r.style);
        } else if constexpr (std::is_same_v<T, ColorScaleRule>) {
          j["type"] = "colorScale";
          j["range"] = r.range;
          j["min"] = anchor_json(r.min);
          if (r.mid) j["mid"] = anchor_json(*r.mid);
          j["max"] = anchor_json(r.max);
        } else {
          j["type"] = "dataBar";
          j["range"] = r.range;
          j["color"] = r.color.hex();
          if (r.min) j["min"] = anchor_json(*r.min);
          if (r.max) j["max"] = anchor_json(*r.max);
        }
      },
      rule);
  return j;
}

}  // namespace

std::string serialize_workbook(const Workbook& wb) {
  ordered_json root = ordered_json::object();
  root["version"] = kSpecVersion;
  ordered_json sheets = ordered_json::array();
  for (const auto& sheet : wb.sheets) {
    ordered_json s = ordered_json::object();
    s["name"] = sheet.name;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : sheet.cells) {
      ordered_json c = ordered_json::object();
      c["ref"] = to_a1(cell.address);
      if (const auto* t = cell.text()) {
        c["text"] = *t;
      } else if (const auto* n = cell.number()) {
        c["number"] = *n;
      } else {
        c["formula"] = *cell.formula();
      }
      if (cell.style) c["style"] = style_json(*cell.style);
      cells.push_back(std::move(c));
    }
    s["cells"] = std::move(cells);
    if (!sheet.named_ranges.empty()) {
      ordered_json nrs = ordered_json::array();
      for (const auto& nr : sheet.named_ranges) {
        ordered_json n = ordered_json::object();
        n["name"] = nr.name;
        n["ref"] = nr.ref;
        nrs.push_back(std::move(n));
      }
      s["namedRanges"] = std::move(nrs);
    }
    if (!sheet.conditional_formats.empty()) {
      ordered_json cfs = ordered_json::array();
      for (const auto& rule : sheet.conditional_formats)
        cfs.push_back(rule_json(rule));
      s["conditionalFormats"] = std::move(cfs);
    }
    sheets.push_back(std::move(s));
  }
  root["sheets"] = std::move(sheets);
  if (wb.outputs) {
    ordered_json outs = ordered_json::array();
    for (const auto& o : *wb.outputs) {
      ordered_json j = ordered_json::object();
      j["name"] = o.name;
      j["sheet"] = o.sheet;
      j["ref"] = o.ref;
      j["metric"] = o.metric;
      outs.push_back(std::move(j));
    }
    root["outputs"] = std::move(outs);
  }
  if (wb.rules) {
    ordered_json r = ordered_json::object();
    if (wb.rules->disallow_volatile)
      r["disallowVolatile"] = *wb.rules->disallow_volatile;
    if (wb.rules->allowed_functions)
      r["allowedFunctions"] = *wb.rules->allowed_functions;
    root["rules"] = std::move(r);
  }
  return root.dump();
}

std::optional<Box> used_range(const Sheet& sheet) {
  std::optional<Box> box;
  for (const auto& cell : sheet.cells) {
    if (cell.is_blank()) continue;
    if (box) {
      box->extend(cell.address);
    } else {
      box = box_of(cell.address);
    }
  }
  return box;
}

}  // namespace sarena::sheet
