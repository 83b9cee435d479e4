#include "laxkit/expr/polynomial.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "laxkit/errors.hpp"

namespace laxkit::expr {
namespace {

class ExponentTable {
public:
  ExponentTable() { args_.emplace_back(); }

  ExpId intern(const Polynomial& p) {
    if (p.is_zero()) return 0;
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(p); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(p); it != index_.end()) return it->second;
    const auto id = static_cast<ExpId>(args_.size());
    args_.push_back(p);
    index_.emplace(p, id);
    return id;
  }

  const Polynomial& get(ExpId id) const {
    std::shared_lock lock(mutex_);
    return args_.at(id);
  }

private:
  mutable std::shared_mutex mutex_;
  std::deque<Polynomial> args_;
  std::unordered_map<Polynomial, ExpId, PolynomialHash> index_;
};

ExponentTable& exponents() {
  static ExponentTable table;
  return table;
}

ExpId combine_exponents(ExpId a, ExpId b, bool subtract) {
  if (b == 0) return a;
  if (a == 0 && !subtract) return b;
  const Polynomial& pb = exponent_argument(b);
  Polynomial sum = a == 0 ? -pb : (subtract ? exponent_argument(a) - pb : exponent_argument(a) + pb);
  return intern_exponent(sum);
}

inline void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

}  // namespace

// ---------------------------------------------------------------- Monomial

Monomial Monomial::of(AtomId atom, int power) {
  Monomial m;
  if (power < 0) throw std::invalid_argument("negative monomial exponent");
  if (power > 0) m.factors_.emplace_back(atom, power);
  return m;
}

Monomial Monomial::exponential(ExpId e) {
  Monomial m;
  m.exp_ = e;
  return m;
}

int Monomial::degree(AtomId a) const {
  for (const auto& [id, k] : factors_) {
    if (id == a) return k;
    if (id > a) break;
  }
  return 0;
}

int Monomial::total_degree() const {
  int d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + o.factors_.size());
  auto i = factors_.begin(), ie = factors_.end();
  auto j = o.factors_.begin(), je = o.factors_.end();
  while (i != ie && j != je) {
    if (i->first < j->first) {
      r.factors_.push_back(*i++);
    } else if (j->first < i->first) {
      r.factors_.push_back(*j++);
    } else {
      r.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  r.factors_.insert(r.factors_.end(), i, ie);
  r.factors_.insert(r.factors_.end(), j, je);
  r.exp_ = (exp_ == 0 && o.exp_ == 0) ? 0 : combine_exponents(exp_, o.exp_, false);
  return r;
}

bool Monomial::divisible_by(const Monomial& o) const {
  auto i = factors_.begin(), ie = factors_.end();
  for (const auto& [id, k] : o.factors_) {
    while (i != ie && i->first < id) ++i;
    if (i == ie || i->first != id || i->second < k) return false;
  }
  return true;
}

Monomial Monomial::quotient(const Monomial& o) const {
  Monomial r;
  auto j = o.factors_.begin(), je = o.factors_.end();
  for (const auto& [id, k] : factors_) {
    int e = k;
    if (j != je && j->first == id) {
      e -= j->second;
      ++j;
    }
    if (e < 0) throw std::logic_error("monomial quotient is not exact");
    if (e > 0) r.factors_.emplace_back(id, e);
  }
  if (j != je) throw std::logic_error("monomial quotient is not exact");
  r.exp_ = combine_exponents(exp_, o.exp_, true);
  return r;
}

Monomial Monomial::atoms_only() const {
  Monomial r = *this;
  r.exp_ = 0;
  return r;
}

Monomial Monomial::without(AtomId a) const {
  Monomial r;
  r.exp_ = exp_;
  for (const auto& f : factors_)
    if (f.first != a) r.factors_.push_back(f);
  return r;
}

Monomial Monomial::lowered(AtomId a) const {
  Monomial r;
  r.exp_ = exp_;
  for (const auto& [id, k] : factors_) {
    if (id == a) {
      if (k > 1) r.factors_.emplace_back(id, k - 1);
    } else {
      r.factors_.emplace_back(id, k);
    }
  }
  return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto j = b.factors_.begin(), je = b.factors_.end();
  for (const auto& [id, k] : a.factors_) {
    while (j != je && j->first < id) ++j;
    if (j != je && j->first == id) r.factors_.emplace_back(id, std::min(k, j->second));
  }
  return r;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto i = a.factors_.begin(), ie = a.factors_.end();
  auto j = b.factors_.begin(), je = b.factors_.end();
  while (i != ie && j != je) {
    if (i->first < j->first) {
      r.factors_.push_back(*i++);
    } else if (j->first < i->first) {
      r.factors_.push_back(*j++);
    } else {
      r.factors_.emplace_back(i->first, std::max(i->second, j->second));
      ++i;
      ++j;
    }
  }
  r.factors_.insert(r.factors_.end(), i, ie);
  r.factors_.insert(r.factors_.end(), j, je);
  return r;
}

std::size_t Monomial::hash() const noexcept {
  std::size_t h = exp_ * 0x51ed27ULL;
  for (const auto& [id, k] : factors_) {
    mix(h, id);
    mix(h, static_cast<std::size_t>(k));
  }
  return h;
}

bool storage_less(const Monomial& a, const Monomial& b) {
  if (a.exp() != b.exp()) return a.exp() < b.exp();
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  const std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].first != fb[i].first) {
      // the monomial holding the smaller (more significant) atom is larger
      return fa[i].first > fb[i].first;
    }
    if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second;
  }
  return fa.size() < fb.size();
}

int canonical_compare(const Monomial& a, const Monomial& b) {
  const int da = a.total_degree() + (a.exp() ? 1 : 0);
  const int db = b.total_degree() + (b.exp() ? 1 : 0);
  if (da != db) return da < db ? -1 : 1;
  if (a.exp() != b.exp()) {
    if (a.exp() == 0) return -1;
    if (b.exp() == 0) return 1;
    if (int c = canonical_compare(exponent_argument(a.exp()), exponent_argument(b.exp())); c != 0) return c;
  }
  auto sorted_desc = [](const Monomial& m) {
    Monomial::Factors f = m.factors();
    std::sort(f.begin(), f.end(), [](const auto& x, const auto& y) { return compare_atoms(x.first, y.first) > 0; });
    return f;
  };
  const auto fa = sorted_desc(a);
  const auto fb = sorted_desc(b);
  const std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].first != fb[i].first) return compare_atoms(fa[i].first, fb[i].first);
    if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second ? -1 : 1;
  }
  if (fa.size() == fb.size()) return 0;
  return fa.size() < fb.size() ? -1 : 1;
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(const Rational& c) {
  if (sgn(c) != 0) {
    terms_.push_back(Term{Monomial{}, c});
    terms_.back().coeff.canonicalize();
  }
}

Polynomial Polynomial::atom(AtomId a) { return monomial(Monomial::of(a), 1); }

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p;
  if (sgn(c) != 0) p.terms_.push_back(Term{m, c});
  return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return storage_less(a.mono, b.mono); });
  Polynomial p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
      p.terms_.back().coeff += t.coeff;
      if (sgn(p.terms_.back().coeff) == 0) p.terms_.pop_back();
    } else if (sgn(t.coeff) != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

bool Polynomial::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().mono.is_one());
}

std::optional<Rational> Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.front().mono.is_one()) return terms_.front().coeff;
  return std::nullopt;
}

bool Polynomial::has_exponentials() const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.mono.exp() != 0; });
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return o;
  Polynomial r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin(), ie = terms_.end();
  auto j = o.terms_.begin(), je = o.terms_.end();
  while (i != ie && j != je) {
    if (storage_less(i->mono, j->mono)) {
      r.terms_.push_back(*i++);
    } else if (storage_less(j->mono, i->mono)) {
      r.terms_.push_back(*j++);
    } else {
      Rational c = i->coeff + j->coeff;
      if (sgn(c) != 0) r.terms_.push_back(Term{i->mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  r.terms_.insert(r.terms_.end(), i, ie);
  r.terms_.insert(r.terms_.end(), j, je);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (terms_.empty() || o.terms_.empty()) return {};
  if (o.terms_.size() == 1) return times(o.terms_[0].mono, o.terms_[0].coeff);
  if (terms_.size() == 1) return o.times(terms_[0].mono, terms_[0].coeff);
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(terms_.size() * o.terms_.size());
  Rational prod;
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      prod = a.coeff * b.coeff;
      auto [it, inserted] = acc.try_emplace(a.mono * b.mono, prod);
      if (!inserted) it->second += prod;
    }
  }
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (sgn(c) != 0) out.push_back(Term{m, std::move(c)});
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return storage_less(a.mono, b.mono); });
  Polynomial r;
  r.terms_ = std::move(out);
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (sgn(c) == 0) return {};
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

Polynomial Polynomial::times(const Monomial& m, const Rational& c) const {
  if (sgn(c) == 0) return {};
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(Term{t.mono * m, t.coeff * c});
  if (m.exp() == 0) {
    Polynomial r;
    r.terms_ = std::move(out);
    return r;
  }
  return from_terms(std::move(out));
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result(Rational(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::derivative(AtomId a) const {
  PolynomialAccumulator acc;
  for (const auto& t : terms_) {
    if (int k = t.mono.degree(a); k > 0) acc.add(t.mono.lowered(a), t.coeff * k);
    if (t.mono.exp() != 0) {
      const Polynomial& arg = exponent_argument(t.mono.exp());
      if (arg.contains(a)) acc.add_product(arg.derivative(a), t.mono, t.coeff);
    }
  }
  return acc.take();
}

std::vector<AtomId> Polynomial::atoms() const {
  std::vector<AtomId> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.mono.factors()) out.push_back(f.first);
    if (t.mono.exp() != 0) {
      auto inner = exponent_argument(t.mono.exp()).atoms();
      out.insert(out.end(), inner.begin(), inner.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Polynomial::contains(AtomId a) const {
  for (const auto& t : terms_) {
    if (t.mono.contains(a)) return true;
    if (t.mono.exp() != 0 && exponent_argument(t.mono.exp()).contains(a)) return true;
  }
  return false;
}

Monomial Polynomial::content() const {
  if (terms_.empty()) return {};
  Monomial g = terms_.front().mono.atoms_only();
  ExpId e = terms_.front().mono.exp();
  for (const auto& t : terms_) {
    if (!g.factors().empty()) g = Monomial::gcd(g, t.mono);
    if (t.mono.exp() != e) e = 0;
  }
  return e == 0 ? g : g * Monomial::exponential(e);
}

Polynomial Polynomial::divided_by(const Monomial& m) const {
  if (m.is_one()) return *this;
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(Term{t.mono.quotient(m), t.coeff});
  if (m.exp() == 0) {
    Polynomial r;
    r.terms_ = std::move(out);
    return r;
  }
  return from_terms(std::move(out));
}

namespace {

// Exponential arguments form a vector space over Q; ordering them by the sign of the
// largest term of their difference is compatible with addition.
bool exp_less(ExpId a, ExpId b) {
  if (a == b) return false;
  const Polynomial diff = (a ? exponent_argument(a) : Polynomial{}) - (b ? exponent_argument(b) : Polynomial{});
  return sgn(diff.terms().back().coeff) < 0;
}

// Atoms lexicographically, then the exponential; multiplicative across exponential classes.
bool division_less(const Monomial& a, const Monomial& b) {
  const Monomial aa = a.atoms_only(), bb = b.atoms_only();
  if (storage_less(aa, bb)) return true;
  if (storage_less(bb, aa)) return false;
  return exp_less(a.exp(), b.exp());
}

}  // namespace

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw DivisionByZeroExpression();
  if (terms_.empty()) return Polynomial{};
  const bool with_exp = divisor.has_exponentials() || has_exponentials();
  auto less = [with_exp](const Monomial& a, const Monomial& b) {
    return with_exp ? division_less(a, b) : storage_less(a, b);
  };
  std::map<Monomial, Rational, decltype(less)> rem(less);
  for (const auto& t : terms_) rem.emplace(t.mono, t.coeff);
  std::map<Monomial, Rational, decltype(less)> dterms(less);
  for (const auto& t : divisor.terms_) dterms.emplace(t.mono, t.coeff);
  const Term lead{std::prev(dterms.end())->first, std::prev(dterms.end())->second};
  // with exponentials the order is not a well-order; an exact quotient never goes
  // below lowest(numerator)/lowest(divisor), and a step cap guards dense intervals
  if (with_exp && !rem.begin()->first.divisible_by(dterms.begin()->first)) return std::nullopt;
  const Monomial floor = with_exp ? rem.begin()->first.quotient(dterms.begin()->first) : Monomial{};
  std::size_t steps = 0;
  const std::size_t cap = 64 * (terms_.size() + 1) * (divisor.terms_.size() + 1);
  std::vector<Term> quotient;
  while (!rem.empty()) {
    auto it = std::prev(rem.end());
    if (!it->first.divisible_by(lead.mono)) return std::nullopt;
    if (with_exp) {
      if (!rem.begin()->first.divisible_by(dterms.begin()->first)) return std::nullopt;
      if (++steps > cap || division_less(it->first.quotient(lead.mono), floor)) return std::nullopt;
    }
    Monomial qm = it->first.quotient(lead.mono);
    Rational qc = it->second / lead.coeff;
    for (const auto& d : divisor.terms_) {
      Monomial key = qm * d.mono;
      Rational delta = qc * d.coeff;
      auto [pos, inserted] = rem.try_emplace(std::move(key), -delta);
      if (!inserted) {
        pos->second -= delta;
        if (sgn(pos->second) == 0) rem.erase(pos);
      }
    }
    quotient.push_back(Term{std::move(qm), std::move(qc)});
  }
  return from_terms(std::move(quotient));
}

const Term& Polynomial::canonical_leading() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
  const Term* best = &terms_.front();
  for (const auto& t : terms_)
    if (canonical_compare(t.mono, best->mono) > 0) best = &t;
  return *best;
}

std::vector<const Term*> Polynomial::canonical_terms() const {
  std::vector<const Term*> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(&t);
  std::sort(out.begin(), out.end(), [](const Term* a, const Term* b) { return canonical_compare(a->mono, b->mono) > 0; });
  return out;
}

bool Polynomial::operator==(const Polynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(terms_[i].mono == o.terms_[i].mono) || terms_[i].coeff != o.terms_[i].coeff) return false;
  }
  return true;
}

std::size_t Polynomial::hash() const noexcept {
  std::size_t h = terms_.size();
  for (const auto& t : terms_) {
    mix(h, t.mono.hash());
    mix(h, std::hash<std::string>{}(t.coeff.get_str()));
  }
  return h;
}

int canonical_compare(const Polynomial& a, const Polynomial& b) {
  const auto ta = a.canonical_terms();
  const auto tb = b.canonical_terms();
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = canonical_compare(ta[i]->mono, tb[i]->mono); c != 0) return c;
    if (int c = cmp(ta[i]->coeff, tb[i]->coeff); c != 0) return c < 0 ? -1 : 1;
  }
  if (ta.size() == tb.size()) return 0;
  return ta.size() < tb.size() ? -1 : 1;
}

// ---------------------------------------------------------------- accumulator

void PolynomialAccumulator::add(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = acc_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void PolynomialAccumulator::add(const Polynomial& p, const Rational& scale) {
  for (const auto& t : p.terms()) add(t.mono, t.coeff * scale);
}

void PolynomialAccumulator::add_product(const Polynomial& p, const Monomial& m, const Rational& scale) {
  for (const auto& t : p.terms()) add(t.mono * m, t.coeff * scale);
}

Polynomial PolynomialAccumulator::take() {
  std::vector<Term> out;
  out.reserve(acc_.size());
  for (auto& [m, c] : acc_)
    if (sgn(c) != 0) out.push_back(Term{m, std::move(c)});
  acc_.clear();
  return Polynomial::from_terms(std::move(out));
}

ExpId intern_exponent(const Polynomial& argument) {
  if (argument.has_exponentials()) throw UnsupportedExpression("nested exponentials are not supported");
  return exponents().intern(argument);
}

const Polynomial& exponent_argument(ExpId id) { return exponents().get(id); }

}  // namespace laxkit::expr
