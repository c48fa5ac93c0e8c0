#pragma once

#include <memory>
#include <string>

namespace hyperbreg::tools {

/// Tiny expression language for inline coefficient specs: sums and products
/// of polynomials in t and x with sin/cos, e.g. "1 + 0.5*sin(t)" or
/// "sin(pi*x)*(1+t)".  Grammar:
///
///   expr    := term (('+'|'-') term)*
///   term    := factor ('*' factor)*
///   factor  := '-' factor | primary ('^' integer)?
///   primary := number | 'pi' | 't' | 'x' | 'sin' '(' expr ')'
///            | 'cos' '(' expr ')' | '(' expr ')'
///
/// Expressions carry exact symbolic t-derivatives.
class Expr {
 public:
  /// Parses `text`; throws std::invalid_argument with a position on bad input.
  static Expr parse(const std::string& text);

  double eval(double t, double x) const;

  /// Symbolic derivative with respect to t.
  Expr derivative_t() const;

  std::string to_string() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace hyperbreg::tools
