#pragma once

#include <gmpxx.h>

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "laxkit/expr/atom.hpp"

namespace laxkit::expr {

/// Exact rational number; GMP keeps it in lowest terms with a positive denominator.
using Rational = mpq_class;

/// Handle of an interned exponential argument. Zero means "no exponential factor".
using ExpId = std::uint32_t;

/// Power product of atoms, optionally times a single exp(E) factor.
///
/// exp(a)*exp(b) is stored as exp(a+b), so every monomial carries at most one
/// exponential and distinct arguments stay algebraically independent.
class Monomial {
public:
  using Factor = std::pair<AtomId, std::int32_t>;
  using Factors = boost::container::small_vector<Factor, 6>;

  Monomial() = default;
  static Monomial of(AtomId atom, int power = 1);
  static Monomial exponential(ExpId e);

  const Factors& factors() const noexcept { return factors_; }
  ExpId exp() const noexcept { return exp_; }
  bool is_one() const noexcept { return factors_.empty() && exp_ == 0; }
  int degree(AtomId a) const;
  int total_degree() const;
  bool contains(AtomId a) const { return degree(a) > 0; }

  Monomial operator*(const Monomial& o) const;
  /// True when the atom part of `o` divides the atom part of *this.
  bool divisible_by(const Monomial& o) const;
  /// Exact quotient; exponential parts subtract.
  Monomial quotient(const Monomial& o) const;
  Monomial atoms_only() const;
  Monomial without(AtomId a) const;
  Monomial lowered(AtomId a) const;

  static Monomial gcd(const Monomial& a, const Monomial& b);
  static Monomial lcm(const Monomial& a, const Monomial& b);

  bool operator==(const Monomial&) const = default;
  std::size_t hash() const noexcept;

private:
  Factors factors_;
  ExpId exp_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

/// Storage order: exponential id major, then lexicographic on atom ids.
/// Multiplicative within one exponential class, which is all division needs.
bool storage_less(const Monomial& a, const Monomial& b);

/// Canonical degree-lexicographic order used for rendering and leading terms.
int canonical_compare(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coeff;
};

class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(const Rational& c);
  explicit Polynomial(long c) : Polynomial(Rational(c)) {}
  static Polynomial atom(AtomId a);
  static Polynomial monomial(const Monomial& m, const Rational& c = 1);
  /// Builds from unsorted terms, merging duplicates and dropping zeros.
  static Polynomial from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  std::optional<Rational> constant_value() const;
  bool has_exponentials() const noexcept;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
  Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
  Polynomial scaled(const Rational& c) const;
  Polynomial times(const Monomial& m, const Rational& c = 1) const;
  Polynomial pow(unsigned k) const;

  /// Partial derivative, including the chain rule through exp(E) factors.
  Polynomial derivative(AtomId a) const;
  /// Every atom occurring in a monomial or inside an exponential argument.
  std::vector<AtomId> atoms() const;
  bool contains(AtomId a) const;

  /// Greatest common monomial divisor. The exponential part is included only
  /// when every term carries the same one.
  Monomial content() const;
  Polynomial divided_by(const Monomial& m) const;
  /// Exact quotient, or nothing if it does not divide. With exponentials the search is
  /// bounded, so a very long exact quotient may be reported as not dividing.
  std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

  const Term& canonical_leading() const;
  std::vector<const Term*> canonical_terms() const;

  bool operator==(const Polynomial& o) const;
  std::size_t hash() const noexcept;

private:
  std::vector<Term> terms_;
};

int canonical_compare(const Polynomial& a, const Polynomial& b);

struct PolynomialHash {
  std::size_t operator()(const Polynomial& p) const noexcept { return p.hash(); }
};

/// Sparse accumulator for sums of many terms.
class PolynomialAccumulator {
public:
  void add(const Monomial& m, const Rational& c);
  void add(const Polynomial& p, const Rational& scale = 1);
  void add_product(const Polynomial& p, const Monomial& m, const Rational& scale);
  Polynomial take();

private:
  std::unordered_map<Monomial, Rational, MonomialHash> acc_;
};

ExpId intern_exponent(const Polynomial& argument);
const Polynomial& exponent_argument(ExpId id);

}  // namespace laxkit::expr
