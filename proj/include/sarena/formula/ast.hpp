#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sarena/sheetspec/a1.hpp"

namespace sarena::formula {

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp { Neg, Plus, Percent };

struct Expr {
  enum class Kind { Number, String, Boolean, Cell, Range, Name, Call, Binary, Unary };

  Kind kind = Kind::Number;
  double number = 0;
  bool boolean = false;
  // String literal value, named-range name, or uppercase function name.
  std::string text;
  // Cell and Range nodes. A Cell node has ref.kind == Cell.
  sheet::RangeRef ref;
  BinaryOp binary_op = BinaryOp::Add;
  UnaryOp unary_op = UnaryOp::Neg;
  std::vector<Expr> args;
  std::size_t offset = 0;  // byte offset of the node in the source
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// `source` must start with '='. Function names come back uppercase.
Expr parse_formula(std::string_view source);

// Renders an expression without the leading '='. Binary operations are
// fully parenthesized.
std::string to_string(const Expr& e);

// Pre-order traversal.
void walk(const Expr& e, const std::function<void(const Expr&)>& fn);

// Function names in call order, one entry per occurrence.
std::vector<std::string> called_functions(const Expr& e);

}  // namespace sarena::formula
