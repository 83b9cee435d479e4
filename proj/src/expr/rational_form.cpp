#include "laxkit/expr/rational_form.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>

#include "laxkit/errors.hpp"

namespace laxkit::expr {
namespace {

class FactorTable {
public:
  FactorId intern(const Polynomial& p) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(p); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(p); it != index_.end()) return it->second;
    const auto id = static_cast<FactorId>(polys_.size());
    polys_.push_back(p);
    index_.emplace(p, id);
    return id;
  }

  const Polynomial& get(FactorId id) const {
    std::shared_lock lock(mutex_);
    return polys_.at(id);
  }

private:
  mutable std::shared_mutex mutex_;
  std::deque<Polynomial> polys_;
  std::unordered_map<Polynomial, FactorId, PolynomialHash> index_;
};

FactorTable& factor_table() {
  static FactorTable table;
  return table;
}

// A polynomial split as  scale * exp-part * monomial * factor.
struct DenominatorParts {
  Polynomial unit = Polynomial(1L);  // scalar and exponential part, moved to the numerator inverted
  Monomial mono;
  std::optional<FactorId> factor;
};

DenominatorParts split_denominator(const Polynomial& p) {
  if (p.is_zero()) throw DivisionByZeroExpression();
  DenominatorParts parts;
  const Monomial content = p.content();
  Polynomial rest = p.divided_by(content);
  parts.mono = content.atoms_only();
  Rational scale;
  if (rest.size() == 1) {
    scale = rest.terms().front().coeff;
  } else {
    scale = rest.canonical_leading().coeff;
    if (scale != 1) rest = rest.scaled(1 / scale);
    parts.factor = factor_table().intern(rest);
  }
  Monomial inv_exp;
  if (content.exp() != 0) inv_exp = Monomial::exponential(intern_exponent(-exponent_argument(content.exp())));
  parts.unit = Polynomial::monomial(inv_exp, 1 / scale);
  return parts;
}

RationalForm::Factors merge_factors(const RationalForm::Factors& a, const RationalForm::Factors& b, bool take_max) {
  RationalForm::Factors out;
  out.reserve(a.size() + b.size());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      out.push_back(*i++);
    } else if (j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, take_max ? std::max(i->second, j->second) : i->second + j->second);
      ++i;
      ++j;
    }
  }
  out.insert(out.end(), i, a.end());
  out.insert(out.end(), j, b.end());
  return out;
}

// Expanded product of factor powers; `have` is subtracted from `want` multiplicities.
Polynomial cofactor(const Monomial& mono, const RationalForm::Factors& want, const RationalForm::Factors& have) {
  Polynomial result = Polynomial::monomial(mono);
  auto j = have.begin();
  for (const auto& [id, k] : want) {
    int e = k;
    while (j != have.end() && j->first < id) ++j;
    if (j != have.end() && j->first == id) e -= j->second;
    if (e > 0) result = result * factor_polynomial(id).pow(static_cast<unsigned>(e));
  }
  return result;
}

inline void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

}  // namespace

const Polynomial& factor_polynomial(FactorId id) { return factor_table().get(id); }

RationalForm::RationalForm(Polynomial numerator) : num_(std::move(numerator)) {}

RationalForm::RationalForm(Polynomial num, Monomial den_mono, Factors factors)
    : num_(std::move(num)), den_mono_(std::move(den_mono)), factors_(std::move(factors)) {
  cancel_content();
}

void RationalForm::cancel_content() {
  if (num_.is_zero()) {
    den_mono_ = Monomial{};
    factors_.clear();
    return;
  }
  if (den_mono_.is_one()) return;
  const Monomial g = Monomial::gcd(num_.content().atoms_only(), den_mono_);
  if (g.is_one()) return;
  num_ = num_.divided_by(g);
  den_mono_ = den_mono_.quotient(g);
}

RationalForm RationalForm::exponential(const RationalForm& argument) {
  if (!argument.is_polynomial() || argument.num_.has_exponentials())
    throw UnsupportedExpression("exp() argument must normalize to a polynomial without exponentials");
  const ExpId id = intern_exponent(argument.num_);
  if (id == 0) return RationalForm(Rational(1));
  return RationalForm(Polynomial::monomial(Monomial::exponential(id)));
}

Polynomial RationalForm::denominator() const { return cofactor(den_mono_, factors_, {}); }

std::optional<Rational> RationalForm::constant_value() const {
  if (!is_polynomial()) return std::nullopt;
  return num_.constant_value();
}

RationalForm RationalForm::operator-() const {
  RationalForm r = *this;
  r.num_ = -num_;
  return r;
}

RationalForm RationalForm::scaled(const Rational& c) const {
  if (sgn(c) == 0) return {};
  RationalForm r = *this;
  r.num_ = num_.scaled(c);
  return r;
}

RationalForm RationalForm::operator+(const RationalForm& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (den_mono_ == o.den_mono_ && factors_ == o.factors_) {
    return RationalForm(num_ + o.num_, den_mono_, factors_);
  }
  RationalSum sum;
  sum.add(*this);
  sum.add(o);
  return sum.take();
}

RationalForm RationalForm::operator-(const RationalForm& o) const { return *this + (-o); }

RationalForm RationalForm::operator*(const RationalForm& o) const {
  if (is_zero() || o.is_zero()) return {};
  if (is_polynomial() && o.is_polynomial()) return RationalForm(num_ * o.num_);
  return RationalForm(num_ * o.num_, den_mono_ * o.den_mono_, merge_factors(factors_, o.factors_, false));
}

RationalForm RationalForm::inverse() const {
  if (is_zero()) throw DivisionByZeroExpression();
  DenominatorParts parts = split_denominator(num_);
  Polynomial new_num = denominator() * parts.unit;
  Factors fs;
  if (parts.factor) fs.emplace_back(*parts.factor, 1);
  return RationalForm(std::move(new_num), parts.mono, std::move(fs));
}

RationalForm RationalForm::denominator_inverse() const {
  return RationalForm(Polynomial(1L), den_mono_, factors_);
}

RationalForm RationalForm::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  RationalForm result(Rational(1));
  RationalForm base = *this;
  auto e = static_cast<unsigned>(k);
  while (e > 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

RationalForm RationalForm::normalized() const {
  if (factors_.empty()) return *this;
  Polynomial num = num_;
  Factors kept;
  for (const auto& [id, k] : factors_) {
    int left = k;
    const Polynomial& f = factor_polynomial(id);
    while (left > 0) {
      auto q = num.divide_exact(f);
      if (!q) break;
      num = std::move(*q);
      --left;
    }
    if (left > 0) kept.emplace_back(id, left);
  }
  if (kept.size() == factors_.size() &&
      std::equal(kept.begin(), kept.end(), factors_.begin()))
    return *this;
  return RationalForm(std::move(num), den_mono_, std::move(kept));
}

RationalForm RationalForm::derivative(AtomId a) const {
  return apply_derivation(*this, [a](AtomId b) -> std::optional<RationalForm> {
    if (b == a) return RationalForm(Rational(1));
    return std::nullopt;
  });
}

std::vector<AtomId> RationalForm::atoms() const {
  std::vector<AtomId> out = num_.atoms();
  for (const auto& f : den_mono_.factors()) out.push_back(f.first);
  for (const auto& [id, k] : factors_) {
    auto more = factor_polynomial(id).atoms();
    out.insert(out.end(), more.begin(), more.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool RationalForm::contains(AtomId a) const {
  if (num_.contains(a) || den_mono_.contains(a)) return true;
  return std::any_of(factors_.begin(), factors_.end(),
                     [a](const auto& f) { return factor_polynomial(f.first).contains(a); });
}

std::size_t RationalForm::hash() const noexcept {
  std::size_t h = num_.hash();
  mix(h, den_mono_.hash());
  for (const auto& [id, k] : factors_) {
    mix(h, id);
    mix(h, static_cast<std::size_t>(k));
  }
  return h;
}

// ---------------------------------------------------------------- RationalSum

void RationalSum::add(RationalForm term) {
  if (term.is_zero()) return;
  if (term.is_polynomial()) {
    polynomial_part_.add(term.num_);
    has_polynomial_part_ = true;
    return;
  }
  terms_.push_back(std::move(term));
}

void RationalSum::add(const Polynomial& p) {
  if (p.is_zero()) return;
  polynomial_part_.add(p);
  has_polynomial_part_ = true;
}

RationalForm RationalSum::take() {
  Polynomial poly = has_polynomial_part_ ? polynomial_part_.take() : Polynomial{};
  has_polynomial_part_ = false;
  std::vector<RationalForm> terms = std::move(terms_);
  terms_.clear();
  if (terms.empty()) return RationalForm(std::move(poly));

  Monomial lcm_mono;
  RationalForm::Factors lcm_factors;
  for (const auto& t : terms) {
    lcm_mono = Monomial::lcm(lcm_mono, t.den_mono_);
    lcm_factors = merge_factors(lcm_factors, t.factors_, true);
  }

  PolynomialAccumulator acc;
  std::vector<bool> done(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (done[i]) continue;
    // sum numerators over identical denominators first
    PolynomialAccumulator group;
    group.add(terms[i].num_);
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!done[j] && terms[j].den_mono_ == terms[i].den_mono_ && terms[j].factors_ == terms[i].factors_) {
        group.add(terms[j].num_);
        done[j] = true;
      }
    }
    Polynomial numer = group.take();
    if (numer.is_zero()) continue;
    const Polynomial cf = cofactor(lcm_mono.quotient(terms[i].den_mono_), lcm_factors, terms[i].factors_);
    acc.add(numer * cf);
  }
  if (!poly.is_zero()) acc.add(poly * cofactor(lcm_mono, lcm_factors, {}));
  return RationalForm(acc.take(), std::move(lcm_mono), std::move(lcm_factors));
}

// ---------------------------------------------------------------- derivations

namespace {

RationalForm derive_polynomial(const Polynomial& p, const AtomImage& image) {
  RationalSum sum;
  for (AtomId a : p.atoms()) {
    auto img = image(a);
    if (!img || img->is_zero()) continue;
    Polynomial partial = p.derivative(a);
    if (partial.is_zero()) continue;
    if (img->is_polynomial()) {
      sum.add(partial * img->numerator());
    } else {
      sum.add(RationalForm(std::move(partial)) * *img);
    }
  }
  return sum.take();
}

}  // namespace

RationalForm apply_derivation(const RationalForm& e, const AtomImage& image) {
  if (e.is_zero()) return {};
  if (e.is_polynomial()) return derive_polynomial(e.numerator(), image);

  // D(N/Q) = D(N)/Q - (N/Q) * D(Q)/Q with D(Q)/Q expanded as a log-derivative
  RationalSum sum;
  sum.add(derive_polynomial(e.numerator(), image) * e.denominator_inverse());
  RationalSum log_derivative;
  for (const auto& [atom, k] : e.denominator_monomial().factors()) {
    auto img = image(atom);
    if (!img || img->is_zero()) continue;
    log_derivative.add(img->scaled(k) * RationalForm::atom(atom).inverse());
  }
  for (const auto& [id, k] : e.denominator_factors()) {
    const Polynomial& f = factor_polynomial(id);
    RationalForm df = derive_polynomial(f, image);
    if (df.is_zero()) continue;
    log_derivative.add(df.scaled(k) * RationalForm(f).inverse());
  }
  RationalForm ld = log_derivative.take();
  if (!ld.is_zero()) sum.add(-(e * ld));
  return sum.take();
}

}  // namespace laxkit::expr
