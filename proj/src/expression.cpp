#include "fbl/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace fbl {

// Nodes are immutable and shared; eval is a pure tree walk.
struct Expression::Node {
  enum class Kind { constant, var_x, var_y, add, sub, mul, pow, neg, fmin, fmax, fabs };
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double x, double y) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::var_x: return x;
      case Kind::var_y: return y;
      case Kind::add: return a->eval(x, y) + b->eval(x, y);
      case Kind::sub: return a->eval(x, y) - b->eval(x, y);
      case Kind::mul: return a->eval(x, y) * b->eval(x, y);
      case Kind::pow: return std::pow(a->eval(x, y), b->eval(x, y));
      case Kind::neg: return -a->eval(x, y);
      case Kind::fmin: return std::min(a->eval(x, y), b->eval(x, y));
      case Kind::fmax: return std::max(a->eval(x, y), b->eval(x, y));
      case Kind::fabs: return std::fabs(a->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression: " + what + " at position " +
                                std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = make(Node::Kind::add, lhs, term());
      } else if (eat('-')) {
        lhs = make(Node::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (eat('*')) lhs = make(Node::Kind::mul, lhs, factor());
    return lhs;
  }

  NodePtr factor() {  // unary minus binds looser than '^': -x^2 = -(x^2)
    if (eat('-')) return make(Node::Kind::neg, factor());
    return power();
  }

  NodePtr power() {  // right-associative: a^b^c = a^(b^c); exponents may be signed
    NodePtr base = primary();
    if (eat('^')) return make(Node::Kind::pow, base, factor());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<size_t>(end - begin);
      return make(Node::Kind::constant, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Node::Kind::var_x);
      if (name == "y") return make(Node::Kind::var_y);
      Node::Kind kind;
      int arity = 2;
      if (name == "min") {
        kind = Node::Kind::fmin;
      } else if (name == "max") {
        kind = Node::Kind::fmax;
      } else if (name == "abs") {
        kind = Node::Kind::fabs;
        arity = 1;
      } else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      NodePtr a = expr();
      NodePtr b;
      if (arity == 2) {
        if (!eat(',')) fail("expected ',' in '" + name + "'");
        b = expr();
      }
      if (!eat(')')) fail("expected ')'");
      return make(kind, a, b);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  return Expression(text, p.run());
}

double Expression::eval(double x, double y) const { return root_->eval(x, y); }

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

}  // namespace fbl
