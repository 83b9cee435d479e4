#pragma once

#include <memory>
#include <vector>

#include "laxkit/expr/rational_form.hpp"

namespace laxkit::expr {

enum class ExprKind : std::uint8_t { Number, Atom, Sum, Product, Power, Exp };

/// Immutable expression tree. Division is a product with a negative integer power.
class Expr {
public:
  Expr();  // the number 0
  static Expr number(const Rational& value);
  static Expr number(long value) { return number(Rational(value)); }
  static Expr atom(AtomId a);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(Expr base, int exponent);
  static Expr exp(Expr argument);

  ExprKind kind() const noexcept;
  const Rational& value() const;
  AtomId atom_id() const;
  const std::vector<Expr>& children() const;
  int exponent() const;
  /// Base of a power or argument of an exponential.
  const Expr& operand() const { return children().front(); }

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

  /// Structural equality.
  bool operator==(const Expr& o) const;

private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

RationalForm normalize(const Expr& e);
bool is_zero(const Expr& e);
/// Canonical tree for a normal form; normalize(to_expr(f)) == f.
Expr to_expr(const RationalForm& f);
Expr to_expr(const Polynomial& p);

}  // namespace laxkit::expr
