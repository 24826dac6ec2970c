#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "sarena/formula/ast.hpp"

namespace sarena::formula {

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

namespace {

using sheet::RangeRef;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

bool is_letters(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '$') return false;
  return true;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    if (src_.empty() || src_[0] != '=') throw SyntaxError(0, "formula must start with '='");
    pos_ = 1;
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "empty formula");
    Expr e = comparison();
    skip_ws();
    if (pos_ < src_.size())
      throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool peek(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  bool accept(std::string_view s) {
    skip_ws();
    if (peek(s)) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, std::size_t at) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.binary_op = op;
    e.offset = at;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  Expr comparison() {
    Expr lhs = concat();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      std::optional<BinaryOp> op;
      if (accept("<=")) op = BinaryOp::Le;
      else if (accept(">=")) op = BinaryOp::Ge;
      else if (accept("<>")) op = BinaryOp::Ne;
      else if (accept("<")) op = BinaryOp::Lt;
      else if (accept(">")) op = BinaryOp::Gt;
      else if (accept("=")) op = BinaryOp::Eq;
      if (!op) return lhs;
      lhs = binary(*op, std::move(lhs), concat(), at);
    }
  }

  Expr concat() {
    Expr lhs = additive();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (!accept("&")) return lhs;
      lhs = binary(BinaryOp::Concat, std::move(lhs), additive(), at);
    }
  }

  Expr additive() {
    Expr lhs = multiplicative();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept("+")) lhs = binary(BinaryOp::Add, std::move(lhs), multiplicative(), at);
      else if (accept("-")) lhs = binary(BinaryOp::Sub, std::move(lhs), multiplicative(), at);
      else return lhs;
    }
  }

  Expr multiplicative() {
    Expr lhs = power();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept("*")) lhs = binary(BinaryOp::Mul, std::move(lhs), power(), at);
      else if (accept("/")) lhs = binary(BinaryOp::Div, std::move(lhs), power(), at);
      else return lhs;
    }
  }

  Expr power() {
    Expr lhs = unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (!accept("^")) return lhs;
      lhs = binary(BinaryOp::Pow, std::move(lhs), unary(), at);
    }
  }

  Expr unary() {
    skip_ws();
    std::size_t at = pos_;
    std::optional<UnaryOp> op;
    if (accept("-")) op = UnaryOp::Neg;
    else if (accept("+")) op = UnaryOp::Plus;
    if (!op) return postfix();
    Expr e;
    e.kind = Expr::Kind::Unary;
    e.unary_op = *op;
    e.offset = at;
    e.args.push_back(unary());
    return e;
  }

  Expr postfix() {
    Expr e = primary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (!accept("%")) return e;
      Expr p;
      p.kind = Expr::Kind::Unary;
      p.unary_op = UnaryOp::Percent;
      p.offset = at;
      p.args.push_back(std::move(e));
      e = std::move(p);
    }
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of formula");
    std::size_t at = pos_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = comparison();
      if (!accept(")")) throw SyntaxError(pos_, "expected ')'");
      return e;
    }
    if (c == '"') return string_literal();
    if (c == '\'') {
      std::string sheet = quoted_sheet();
      return reference(std::move(sheet), at);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      // "1:3" is a row range rather than a number.
      std::size_t end = pos_;
      while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '$'))
        ++end;
      if (end < src_.size() && src_[end] == ':' && c != '.')
        return reference(std::nullopt, at);
      return number_literal();
    }
    if (c == '$' || std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return word(at);
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  Expr string_literal() {
    std::size_t at = pos_;
    ++pos_;
    std::string value;
    for (;;) {
      if (pos_ >= src_.size()) throw SyntaxError(at, "unterminated string");
      char c = src_[pos_++];
      if (c == '"') {
        if (pos_ < src_.size() && src_[pos_] == '"') {
          value.push_back('"');
          ++pos_;
        } else {
          break;
        }
      } else {
        value.push_back(c);
      }
    }
    Expr e;
    e.kind = Expr::Kind::String;
    e.text = std::move(value);
    e.offset = at;
    return e;
  }

  Expr number_literal() {
    std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp = end + 1;
      if (exp < src_.size() && (src_[exp] == '+' || src_[exp] == '-')) ++exp;
      if (exp < src_.size() && std::isdigit(static_cast<unsigned char>(src_[exp]))) {
        end = exp;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      }
    }
    std::string text(src_.substr(at, end - at));
    if (text == ".") throw SyntaxError(at, "malformed number");
    Expr e;
    e.kind = Expr::Kind::Number;
    e.number = std::strtod(text.c_str(), nullptr);
    e.offset = at;
    if (!std::isfinite(e.number)) throw SyntaxError(at, "number out of range");
    pos_ = end;
    return e;
  }

  std::string quoted_sheet() {
    std::size_t at = pos_;
    ++pos_;
    std::string name;
    for (;;) {
      if (pos_ >= src_.size()) throw SyntaxError(at, "unterminated sheet name");
      char c = src_[pos_++];
      if (c == '\'') {
        if (pos_ < src_.size() && src_[pos_] == '\'') {
          name.push_back('\'');
          ++pos_;
        } else {
          break;
        }
      } else {
        name.push_back(c);
      }
    }
    if (pos_ >= src_.size() || src_[pos_] != '!')
      throw SyntaxError(pos_, "expected '!' after sheet name");
    ++pos_;
    if (name.empty()) throw SyntaxError(at, "empty sheet name");
    return name;
  }

  std::string_view scan_word() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_word_char(src_[pos_])) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  // Parses a cell, area, column or row reference at pos_.
  Expr reference(std::optional<std::string> sheet, std::size_t at) {
    std::string_view first = scan_word();
    std::string text(first);
    if (pos_ < src_.size() && src_[pos_] == ':') {
      ++pos_;
      std::string_view second = scan_word();
      text += ":";
      text += second;
    }
    auto ref = sheet::parse_range(text);
    if (!ref) throw SyntaxError(at, "invalid reference '" + text + "'");
    ref->sheet = std::move(sheet);
    Expr e;
    e.kind = ref->kind == RangeRef::Kind::Cell ? Expr::Kind::Cell : Expr::Kind::Range;
    e.ref = std::move(*ref);
    e.offset = at;
    return e;
  }

  Expr word(std::size_t at) {
    std::size_t start = pos_;
    std::string_view w = scan_word();
    if (pos_ < src_.size() && src_[pos_] == '!') {
      ++pos_;
      return reference(std::string(w), at);
    }
    if (pos_ < src_.size() && src_[pos_] == '(') {
      ++pos_;
      return call(upper(w), at);
    }
    std::string up = upper(w);
    if (up == "TRUE" || up == "FALSE") {
      Expr e;
      e.kind = Expr::Kind::Boolean;
      e.boolean = up == "TRUE";
      e.offset = at;
      return e;
    }
    bool range_follows = pos_ < src_.size() && src_[pos_] == ':';
    if (sheet::parse_address(w) || (range_follows && is_letters(w))) {
      pos_ = start;
      return reference(std::nullopt, at);
    }
    if (w.find('$') != std::string_view::npos)
      throw SyntaxError(at, "invalid reference '" + std::string(w) + "'");
    Expr e;
    e.kind = Expr::Kind::Name;
    e.text = std::string(w);
    e.offset = at;
    return e;
  }

  Expr call(std::string name, std::size_t at) {
    Expr e;
    e.kind = Expr::Kind::Call;
    e.text = std::move(name);
    e.offset = at;
    if (accept(")")) return e;
    for (;;) {
      e.args.push_back(comparison());
      if (accept(",")) continue;
      if (accept(")")) return e;
      throw SyntaxError(pos_, "expected ',' or ')'");
    }
  }
};

const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    case BinaryOp::Concat: return "&";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace

Expr parse_formula(std::string_view source) { return Parser(source).parse(); }

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      return buf;
    }
    case Expr::Kind::String: {
      std::string out = "\"";
      for (char c : e.text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      return out + "\"";
    }
    case Expr::Kind::Boolean:
      return e.boolean ? "TRUE" : "FALSE";
    case Expr::Kind::Cell:
    case Expr::Kind::Range:
      return sheet::to_string(e.ref);
    case Expr::Kind::Name:
      return e.text;
    case Expr::Kind::Call: {
      std::string out = e.text + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ",";
        out += to_string(e.args[i]);
      }
      return out + ")";
    }
    case Expr::Kind::Binary:
      return "(" + to_string(e.args[0]) + op_text(e.binary_op) +
             to_string(e.args[1]) + ")";
    case Expr::Kind::Unary:
      if (e.unary_op == UnaryOp::Percent) return to_string(e.args[0]) + "%";
      return std::string(e.unary_op == UnaryOp::Neg ? "-" : "+") +
             to_string(e.args[0]);
  }
  return {};
}

void walk(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args) walk(a, fn);
}

std::vector<std::string> called_functions(const Expr& e) {
  std::vector<std::string> out;
  walk(e, [&out](const Expr& n) {
    if (n.kind == Expr::Kind::Call) out.push_back(n.text);
  });
  return out;
}

}  // namespace sarena::formula
