#include "subfp/expression.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace subfp {

struct Expression::Node {
  enum class Kind { number, variable, unary_minus, binary, call };
  Kind kind = Kind::number;
  double value = 0.0;
  std::string name;  // variable or function name
  char op = 0;       // binary operator
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    auto node = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return node;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression '" + text_ + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+')) lhs = binary('+', lhs, parse_product());
      else if (accept('-')) lhs = binary('-', lhs, parse_product());
      else return lhs;
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = binary('*', lhs, parse_unary());
      else if (accept('/')) lhs = binary('/', lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::unary_minus;
      n->args = {parse_unary()};
      return n;
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  // right associative, binds tighter than unary minus on its left operand
  NodePtr parse_power() {
    auto base = parse_atom();
    if (accept('^')) return binary('^', base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (accept('(')) {
      auto inner = parse_sum();
      if (!accept(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(text_.substr(pos_), &used);
      pos_ += used;
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        name += text_[pos_++];
      if (accept('(')) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->name = name;
        n->args.push_back(parse_sum());
        while (accept(',')) n->args.push_back(parse_sum());
        if (!accept(')')) fail("missing ')' after arguments of " + name);
        const std::size_t want = name == "pow" ? 2 : 1;
        static const char* known[] = {"sqrt", "exp", "log", "abs", "sin", "cos", "tanh", "pow"};
        bool ok = false;
        for (const char* k : known) ok = ok || name == k;
        if (!ok) fail("unknown function " + name);
        if (n->args.size() != want) fail("wrong argument count for " + name);
        return n;
      }
      if (name != "x" && name != "y" && name != "x1" && name != "x2" && name != "r" && name != "rb")
        fail("unknown variable " + name);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::variable;
      n->name = name == "x1" ? "x" : name == "x2" ? "y" : name;
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

double evaluate(const Node& n, const Point& x) {
  switch (n.kind) {
    case Node::Kind::number:
      return n.value;
    case Node::Kind::variable:
      if (n.name == "x") return x[0];
      if (n.name == "y") return x[1];
      if (n.name == "r") return x.norm();
      return bracket(x);
    case Node::Kind::unary_minus:
      return -evaluate(*n.args[0], x);
    case Node::Kind::binary: {
      const double a = evaluate(*n.args[0], x);
      const double b = evaluate(*n.args[1], x);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    case Node::Kind::call: {
      const double a = evaluate(*n.args[0], x);
      if (n.name == "sqrt") return std::sqrt(a);
      if (n.name == "exp") return std::exp(a);
      if (n.name == "log") return std::log(a);
      if (n.name == "abs") return std::abs(a);
      if (n.name == "sin") return std::sin(a);
      if (n.name == "cos") return std::cos(a);
      if (n.name == "tanh") return std::tanh(a);
      return std::pow(a, evaluate(*n.args[1], x));
    }
  }
  return 0.0;
}

}  // namespace

Expression::Expression(std::string source) : source_(std::move(source)) {
  root_ = Parser(source_).parse();
}

double Expression::operator()(const Point& x) const {
  if (!root_) throw std::logic_error("evaluating an empty expression");
  return evaluate(*root_, x);
}

}  // namespace subfp
