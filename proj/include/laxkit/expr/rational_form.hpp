#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "laxkit/expr/polynomial.hpp"

namespace laxkit::expr {

/// Handle of an interned denominator factor: a polynomial with at least two
/// terms, no monomial content, and canonical leading coefficient 1.
using FactorId = std::uint32_t;

const Polynomial& factor_polynomial(FactorId id);

/// numerator / (monomial * product of factor powers).
///
/// The numerator carries every scalar and every exponential, so the
/// denominator is monic. The numerator is zero exactly when the represented
/// function is zero.
class RationalForm {
public:
  using Factors = std::vector<std::pair<FactorId, int>>;

  RationalForm() = default;
  RationalForm(Polynomial numerator);  // NOLINT(google-explicit-constructor)
  explicit RationalForm(const Rational& c) : RationalForm(Polynomial(c)) {}
  explicit RationalForm(long c) : RationalForm(Polynomial(c)) {}
  static RationalForm atom(AtomId a) { return RationalForm(Polynomial::atom(a)); }
  /// exp(argument); the argument must be an exponential-free polynomial.
  static RationalForm exponential(const RationalForm& argument);

  const Polynomial& numerator() const noexcept { return num_; }
  const Monomial& denominator_monomial() const noexcept { return den_mono_; }
  const Factors& denominator_factors() const noexcept { return factors_; }
  Polynomial denominator() const;

  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_polynomial() const noexcept { return den_mono_.is_one() && factors_.empty(); }
  std::optional<Rational> constant_value() const;

  RationalForm operator-() const;
  RationalForm operator+(const RationalForm& o) const;
  RationalForm operator-(const RationalForm& o) const;
  RationalForm operator*(const RationalForm& o) const;
  RationalForm operator/(const RationalForm& o) const { return *this * o.inverse(); }
  RationalForm& operator+=(const RationalForm& o) { return *this = *this + o; }
  RationalForm& operator-=(const RationalForm& o) { return *this = *this - o; }
  RationalForm& operator*=(const RationalForm& o) { return *this = *this * o; }
  RationalForm scaled(const Rational& c) const;
  RationalForm inverse() const;
  /// 1 / denominator.
  RationalForm denominator_inverse() const;
  RationalForm pow(int k) const;

  /// Cancels denominator factors that divide the numerator exactly.
  RationalForm normalized() const;

  RationalForm derivative(AtomId a) const;
  std::vector<AtomId> atoms() const;
  bool contains(AtomId a) const;

  bool operator==(const RationalForm& o) const {
    return den_mono_ == o.den_mono_ && factors_ == o.factors_ && num_ == o.num_;
  }
  std::size_t hash() const noexcept;

private:
  friend class RationalSum;
  RationalForm(Polynomial num, Monomial den_mono, Factors factors);
  void cancel_content();

  Polynomial num_;
  Monomial den_mono_;
  Factors factors_;
};

/// Sums many rational forms over a single common denominator.
class RationalSum {
public:
  void add(RationalForm term);
  void add(const Polynomial& p);
  RationalForm take();

private:
  std::vector<RationalForm> terms_;
  PolynomialAccumulator polynomial_part_;
  bool has_polynomial_part_ = false;
};

/// Applies the derivation determined by its values on atoms. `image` returns
/// nothing for atoms the derivation annihilates.
using AtomImage = std::function<std::optional<RationalForm>(AtomId)>;
RationalForm apply_derivation(const RationalForm& e, const AtomImage& image);

}  // namespace laxkit::expr
