// Tiny arithmetic expressions for boundary data and coefficient fields:
// variables x, y; numeric literals; + - * ^ (right-assoc power); unary minus;
// min(a,b), max(a,b), abs(a); parentheses. No division by design.
#pragma once

#include <memory>
#include <string>

namespace fbl {

class Expression {
 public:
  struct Node;  // immutable shared parse tree; defined in the implementation

  // Throws std::invalid_argument with the offending position on parse errors.
  static Expression parse(const std::string& text);

  double eval(double x, double y = 0.0) const;
  const std::string& text() const { return text_; }

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  ~Expression();

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fbl
