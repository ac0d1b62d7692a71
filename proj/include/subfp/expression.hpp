#pragma once

#include "subfp/types.hpp"

#include <memory>
#include <string>

namespace subfp {

/// Scalar expression over a point, used for user-supplied force fields.
///
/// Grammar: numbers, + - * / ^, parentheses, unary minus, the variables
/// `x` (or `x1`), `y` (or `x2`), `r` = |x|, `rb` = <x>, and the functions
/// sqrt exp log abs sin cos tanh pow(a, b).
class Expression {
public:
  Expression() = default;
  explicit Expression(std::string source);

  double operator()(const Point& x) const;

  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  struct Node;

private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace subfp
