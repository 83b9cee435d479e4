#include "laxkit/expr/expr.hpp"

#include <algorithm>
#include <stdexcept>

#include "laxkit/errors.hpp"

namespace laxkit::expr {

struct Expr::Node {
  ExprKind kind = ExprKind::Number;
  Rational value;
  AtomId atom = 0;
  int exponent = 0;
  std::vector<Expr> children;
};

namespace {
const std::vector<Expr> kNoChildren;
}

Expr::Expr() : node_(std::make_shared<const Node>()) {}

Expr Expr::number(const Rational& value) {
  auto n = std::make_shared<Node>();
  n->value = value;
  n->value.canonicalize();  // callers may build mpq_class(num, den) without reducing
  return Expr(std::move(n));
}

Expr Expr::atom(AtomId a) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Atom;
  n->atom = a;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return number(0);
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sum;
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return number(1);
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Product;
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent == 1) return base;
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Power;
  n->exponent = exponent;
  n->children.push_back(std::move(base));
  return Expr(std::move(n));
}

Expr Expr::exp(Expr argument) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Exp;
  n->children.push_back(std::move(argument));
  return Expr(std::move(n));
}

ExprKind Expr::kind() const noexcept { return node_->kind; }

const Rational& Expr::value() const {
  if (node_->kind != ExprKind::Number) throw std::logic_error("value() of a non-number expression");
  return node_->value;
}

AtomId Expr::atom_id() const {
  if (node_->kind != ExprKind::Atom) throw std::logic_error("atom_id() of a non-atom expression");
  return node_->atom;
}

const std::vector<Expr>& Expr::children() const { return node_->children.empty() ? kNoChildren : node_->children; }

int Expr::exponent() const {
  if (node_->kind != ExprKind::Power) throw std::logic_error("exponent() of a non-power expression");
  return node_->exponent;
}

Expr Expr::operator-() const { return product({number(-1), *this}); }

Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Expr> terms;
  for (const Expr* e : {&a, &b}) {
    if (e->kind() == ExprKind::Sum) {
      terms.insert(terms.end(), e->children().begin(), e->children().end());
    } else {
      terms.push_back(*e);
    }
  }
  return Expr::sum(std::move(terms));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Expr> factors;
  for (const Expr* e : {&a, &b}) {
    if (e->kind() == ExprKind::Product) {
      factors.insert(factors.end(), e->children().begin(), e->children().end());
    } else {
      factors.push_back(*e);
    }
  }
  return Expr::product(std::move(factors));
}

Expr operator/(const Expr& a, const Expr& b) { return a * Expr::power(b, -1); }

bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case ExprKind::Number: return node_->value == o.node_->value;
    case ExprKind::Atom: return node_->atom == o.node_->atom;
    case ExprKind::Power:
      if (node_->exponent != o.node_->exponent) return false;
      break;
    default: break;
  }
  return node_->children == o.node_->children;
}

RationalForm normalize(const Expr& e) {
  struct Walker {
    RationalForm operator()(const Expr& e) const {
      switch (e.kind()) {
        case ExprKind::Number: return RationalForm(e.value());
        case ExprKind::Atom: return RationalForm::atom(e.atom_id());
        case ExprKind::Sum: {
          RationalSum sum;
          for (const auto& c : e.children()) sum.add((*this)(c));
          return sum.take();
        }
        case ExprKind::Product: {
          RationalForm acc(Rational(1));
          // every factor is evaluated so that a zero divisor is reported even after a zero factor
          for (const auto& c : e.children()) acc = acc * (*this)(c);
          return acc;
        }
        case ExprKind::Power: return power(e.operand(), e.exponent());
        case ExprKind::Exp: return RationalForm::exponential((*this)(e.operand()).normalized());
      }
      return {};
    }

    // 1/(a*b)^k and 1/(a^j)^k keep a and b as separate denominator factors, so
    // rendered text parses back to the same form
    RationalForm power(const Expr& base, int k) const {
      if (k < 0 && base.kind() == ExprKind::Product) {
        RationalForm acc(Rational(1));
        for (const auto& c : base.children()) acc = acc * power(c, k);
        return acc;
      }
      if (k < 0 && base.kind() == ExprKind::Power && base.exponent() > 0) return power(base.operand(), k * base.exponent());
      return (*this)(base).pow(k);
    }
  };
  return Walker{}(e).normalized();
}

bool is_zero(const Expr& e) { return normalize(e).is_zero(); }

namespace {

Expr term_expr(const Term& t) {
  std::vector<Expr> factors;
  if (t.coeff != 1 || (t.mono.is_one())) factors.push_back(Expr::number(t.coeff));
  auto fs = t.mono.factors();
  std::sort(fs.begin(), fs.end(), [](const auto& a, const auto& b) { return atom_less(a.first, b.first); });
  for (const auto& [a, k] : fs) factors.push_back(Expr::power(Expr::atom(a), k));
  if (t.mono.exp() != 0) factors.push_back(Expr::exp(to_expr(exponent_argument(t.mono.exp()))));
  return Expr::product(std::move(factors));
}

}  // namespace

Expr to_expr(const Polynomial& p) {
  std::vector<Expr> terms;
  for (const Term* t : p.canonical_terms()) terms.push_back(term_expr(*t));
  return Expr::sum(std::move(terms));
}

Expr to_expr(const RationalForm& f) {
  Expr num = to_expr(f.numerator());
  if (f.is_polynomial()) return num;
  std::vector<Expr> factors;
  if (num.kind() == ExprKind::Product) {
    factors = num.children();
  } else {
    factors.push_back(num);
  }
  auto mono = f.denominator_monomial().factors();
  std::sort(mono.begin(), mono.end(), [](const auto& a, const auto& b) { return atom_less(a.first, b.first); });
  for (const auto& [a, k] : mono) factors.push_back(Expr::power(Expr::atom(a), -k));
  auto dens = f.denominator_factors();
  std::sort(dens.begin(), dens.end(), [](const auto& a, const auto& b) {
    return canonical_compare(factor_polynomial(a.first), factor_polynomial(b.first)) < 0;
  });
  for (const auto& [id, k] : dens) factors.push_back(Expr::power(to_expr(factor_polynomial(id)), -k));
  return Expr::product(std::move(factors));
}

}  // namespace laxkit::expr
