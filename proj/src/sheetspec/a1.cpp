#include "sarena/sheetspec/a1.hpp"

#include <algorithm>
#include <cctype>

namespace sarena::sheet {

void Box::extend(CellAddress a) {
  min_row = std::min(min_row, a.row);
  max_row = std::max(max_row, a.row);
  min_col = std::min(min_col, a.col);
  max_col = std::max(max_col, a.col);
}

Box box_of(CellAddress a) { return {a.row, a.row, a.col, a.col}; }

std::string column_label(int col) {
  std::string out;
  while (col > 0) {
    int rem = (col - 1) % 26;
    out.insert(out.begin(), static_cast<char>('A' + rem));
    col = (col - 1) / 26;
  }
  return out;
}

std::optional<int> parse_column(std::string_view letters) {
  if (letters.empty() || letters.size() > 3) return std::nullopt;
  int col = 0;
  for (char c : letters) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
    col = col * 26 + (std::toupper(static_cast<unsigned char>(c)) - 'A' + 1);
  }
  return col;
}

namespace {

std::optional<int> parse_row(std::string_view digits) {
  if (digits.empty() || digits.size() > 7 || digits[0] == '0')
    return std::nullopt;
  int row = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    row = row * 10 + (c - '0');
  }
  return row;
}

std::string_view strip_dollar(std::string_view s) {
  if (!s.empty() && s.front() == '$') s.remove_prefix(1);
  return s;
}

std::optional<int> parse_column_part(std::string_view s) {
  return parse_column(strip_dollar(s));
}

std::optional<int> parse_row_part(std::string_view s) {
  return parse_row(strip_dollar(s));
}

bool is_plain_identifier(std::string_view name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
    return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
      return false;
  }
  // Names that look like cell addresses must be quoted.
  return !parse_address(name).has_value();
}

}  // namespace

std::optional<CellAddress> parse_address(std::string_view text) {
  text = strip_dollar(text);
  size_t i = 0;
  while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
    ++i;
  auto col = parse_column(text.substr(0, i));
  if (!col) return std::nullopt;
  auto row = parse_row_part(text.substr(i));
  if (!row) return std::nullopt;
  return CellAddress{*row, *col};
}

std::string to_a1(CellAddress a) {
  return column_label(a.col) + std::to_string(a.row);
}

bool in_bounds(CellAddress a) {
  return a.row >= 1 && a.row <= kMaxRows && a.col >= 1 && a.col <= kMaxCols;
}

std::optional<RangeRef> parse_range(std::string_view text) {
  RangeRef out;
  auto bang = text.rfind('!');
  if (bang != std::string_view::npos) {
    std::string_view prefix = text.substr(0, bang);
    std::string name;
    if (prefix.size() >= 2 && prefix.front() == '\'' && prefix.back() == '\'') {
      prefix = prefix.substr(1, prefix.size() - 2);
      for (size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] == '\'') {
          if (i + 1 < prefix.size() && prefix[i + 1] == '\'') {
            name.push_back('\'');
            ++i;
          } else {
            return std::nullopt;
          }
        } else {
          name.push_back(prefix[i]);
        }
      }
    } else {
      name.assign(prefix);
    }
    if (name.empty()) return std::nullopt;
    out.sheet = std::move(name);
    text = text.substr(bang + 1);
  }

  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    auto a = parse_address(text);
    if (!a) return std::nullopt;
    out.kind = RangeRef::Kind::Cell;
    out.first = out.last = *a;
    return out;
  }
  std::string_view lhs = text.substr(0, colon);
  std::string_view rhs = text.substr(colon + 1);
  if (auto a = parse_address(lhs)) {
    auto b = parse_address(rhs);
    if (!b) return std::nullopt;
    out.kind = RangeRef::Kind::Area;
    out.first = {std::min(a->row, b->row), std::min(a->col, b->col)};
    out.last = {std::max(a->row, b->row), std::max(a->col, b->col)};
    return out;
  }
  if (auto c1 = parse_column_part(lhs)) {
    auto c2 = parse_column_part(rhs);
    if (!c2) return std::nullopt;
    out.kind = RangeRef::Kind::Columns;
    out.first = {1, std::min(*c1, *c2)};
    out.last = {kMaxRows, std::max(*c1, *c2)};
    return out;
  }
  if (auto r1 = parse_row_part(lhs)) {
    auto r2 = parse_row_part(rhs);
    if (!r2) return std::nullopt;
    out.kind = RangeRef::Kind::Rows;
    out.first = {std::min(*r1, *r2), 1};
    out.last = {std::max(*r1, *r2), kMaxCols};
    return out;
  }
  return std::nullopt;
}

std::string quote_sheet_name(std::string_view name) {
  if (is_plain_identifier(name)) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string to_string(const RangeRef& r) {
  std::string out;
  if (r.sheet) out = quote_sheet_name(*r.sheet) + "!";
  switch (r.kind) {
    case RangeRef::Kind::Cell:
      out += to_a1(r.first);
      break;
    case RangeRef::Kind::Area:
      out += to_a1(r.first) + ":" + to_a1(r.last);
      break;
    case RangeRef::Kind::Columns:
      out += column_label(r.first.col) + ":" + column_label(r.last.col);
      break;
    case RangeRef::Kind::Rows:
      out += std::to_string(r.first.row) + ":" + std::to_string(r.last.row);
      break;
  }
  return out;
}

}  // namespace sarena::sheet
