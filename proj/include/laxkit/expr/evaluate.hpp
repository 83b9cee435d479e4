#pragma once

#include <functional>
#include <stdexcept>

#include "laxkit/expr/expr.hpp"

namespace laxkit::expr {

/// Thrown by evaluate when a divisor evaluates to zero (needs `is_zero`).
struct SingularPoint : std::domain_error {
  SingularPoint() : std::domain_error("divisor vanishes at the evaluation point") {}
};

/// How to map the pieces of an expression into a numeric type T. T needs
/// +, -, * and / ; `is_zero` is optional and guards every division.
template <class T>
struct Evaluation {
  std::function<T(AtomId)> atom;
  std::function<T(const Rational&)> constant;
  std::function<T(const T&)> exp;
  std::function<bool(const T&)> is_zero;
};

namespace detail {

template <class T>
T power(const T& base, int k, const Evaluation<T>& ev) {
  T r = ev.constant(Rational(1));
  for (int i = 0; i < (k < 0 ? -k : k); ++i) r = r * base;
  if (k >= 0) return r;
  if (ev.is_zero && ev.is_zero(r)) throw SingularPoint();
  return ev.constant(Rational(1)) / r;
}

}  // namespace detail

template <class T>
T evaluate(const Polynomial& p, const Evaluation<T>& ev) {
  T sum = ev.constant(Rational(0));
  for (const Term& term : p.terms()) {
    T v = ev.constant(term.coeff);
    for (const auto& [a, k] : term.mono.factors()) v = v * detail::power(ev.atom(a), k, ev);
    if (term.mono.exp() != 0) v = v * ev.exp(evaluate(exponent_argument(term.mono.exp()), ev));
    sum = sum + v;
  }
  return sum;
}

template <class T>
T evaluate_denominator(const RationalForm& f, const Evaluation<T>& ev) {
  T den = evaluate(Polynomial::monomial(f.denominator_monomial()), ev);
  for (const auto& [id, k] : f.denominator_factors()) den = den * detail::power(evaluate(factor_polynomial(id), ev), k, ev);
  return den;
}

template <class T>
T evaluate(const RationalForm& f, const Evaluation<T>& ev) {
  const T den = evaluate_denominator(f, ev);
  if (ev.is_zero && ev.is_zero(den)) throw SingularPoint();
  return evaluate(f.numerator(), ev) / den;
}

/// Tree evaluation, without normalizing first.
template <class T>
T evaluate(const Expr& e, const Evaluation<T>& ev) {
  switch (e.kind()) {
    case ExprKind::Number: return ev.constant(e.value());
    case ExprKind::Atom: return ev.atom(e.atom_id());
    case ExprKind::Sum: {
      T s = ev.constant(Rational(0));
      for (const Expr& c : e.children()) s = s + evaluate(c, ev);
      return s;
    }
    case ExprKind::Product: {
      T s = ev.constant(Rational(1));
      for (const Expr& c : e.children()) s = s * evaluate(c, ev);
      return s;
    }
    case ExprKind::Power: return detail::power(evaluate(e.operand(), ev), e.exponent(), ev);
    case ExprKind::Exp: return ev.exp(evaluate(e.operand(), ev));
  }
  throw std::logic_error("evaluate: unknown node");
}

}  // namespace laxkit::expr
