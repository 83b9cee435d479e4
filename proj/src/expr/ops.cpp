#include "laxkit/expr/ops.hpp"

#include <algorithm>
#include <unordered_map>

#include "laxkit/errors.hpp"

namespace laxkit::expr {
namespace {

class Substituter {
public:
  explicit Substituter(const Bindings& b) : bindings_(b) {}

  bool touches(const Polynomial& p) const {
    for (AtomId a : p.atoms())
      if (bindings_.count(a)) return true;
    return false;
  }

  RationalForm polynomial(const Polynomial& p) {
    if (!touches(p)) return RationalForm(p);
    RationalSum sum;
    for (const auto& t : p.terms()) {
      RationalForm term(Polynomial::monomial(Monomial{}, t.coeff));
      Monomial kept;
      for (const auto& [a, k] : t.mono.factors()) {
        auto it = bindings_.find(a);
        if (it == bindings_.end()) {
          kept = kept * Monomial::of(a, k);
        } else {
          term = term * power(a, it->second, k);
        }
      }
      if (t.mono.exp() != 0) {
        const Polynomial& arg = exponent_argument(t.mono.exp());
        if (touches(arg)) {
          term = term * RationalForm::exponential(polynomial(arg).normalized());
        } else {
          kept = kept * Monomial::exponential(t.mono.exp());
        }
      }
      sum.add(term * RationalForm(Polynomial::monomial(kept)));
    }
    return sum.take();
  }

  RationalForm form(const RationalForm& e) {
    RationalForm result = polynomial(e.numerator());
    for (const auto& [a, k] : e.denominator_monomial().factors()) {
      auto it = bindings_.find(a);
      RationalForm base = it == bindings_.end() ? RationalForm::atom(a) : it->second;
      result = result * base.pow(-k);
    }
    for (const auto& [id, k] : e.denominator_factors()) result = result * polynomial(factor_polynomial(id)).pow(-k);
    return result.normalized();
  }

private:
  const RationalForm& power(AtomId a, const RationalForm& base, int k) {
    auto key = std::make_pair(a, k);
    auto it = powers_.find(key);
    if (it == powers_.end()) it = powers_.emplace(key, base.pow(k)).first;
    return it->second;
  }

  const Bindings& bindings_;
  std::map<std::pair<AtomId, int>, RationalForm> powers_;
};

}  // namespace

RationalForm substitute(const RationalForm& e, const Bindings& bindings) {
  for (const auto& [key, value] : bindings) {
    if (value.contains(key)) throw SelfReferentialBinding("binding for an atom refers to that atom");
  }
  if (bindings.empty()) return e;
  return Substituter(bindings).form(e);
}

Expr substitute(const Expr& e, const std::map<AtomId, Expr>& bindings) {
  Bindings b;
  for (const auto& [k, v] : bindings) b.emplace(k, normalize(v));
  return to_expr(substitute(normalize(e), b));
}

CoefficientMap collect_coefficients(const RationalForm& e, const std::vector<AtomId>& selectors) {
  CoefficientMap out;
  if (e.is_zero()) return out;
  auto is_selector = [&selectors](AtomId a) {
    return std::find(selectors.begin(), selectors.end(), a) != selectors.end();
  };
  for (const auto& [a, k] : e.denominator_monomial().factors()) {
    if (is_selector(a)) throw NotPolynomialInSelectors("a selector atom occurs in a denominator");
  }
  for (const auto& [id, k] : e.denominator_factors()) {
    for (AtomId a : factor_polynomial(id).atoms())
      if (is_selector(a)) throw NotPolynomialInSelectors("a selector atom occurs in a denominator");
  }
  std::unordered_map<Monomial, std::vector<Term>, MonomialHash> groups;
  std::vector<Monomial> order;
  for (const auto& t : e.numerator().terms()) {
    if (t.mono.exp() != 0) {
      for (AtomId a : exponent_argument(t.mono.exp()).atoms())
        if (is_selector(a)) throw NotPolynomialInSelectors("a selector atom occurs inside an exponential");
    }
    Monomial key, rest = Monomial::exponential(t.mono.exp());
    for (const auto& [a, k] : t.mono.factors()) {
      if (is_selector(a)) {
        key = key * Monomial::of(a, k);
      } else {
        rest = rest * Monomial::of(a, k);
      }
    }
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(Term{rest, t.coeff});
  }
  const RationalForm inv = e.denominator_inverse();
  for (const auto& key : order) {
    RationalForm coeff = (RationalForm(Polynomial::from_terms(std::move(groups[key]))) * inv).normalized();
    if (!coeff.is_zero()) out.emplace(key, std::move(coeff));
  }
  return out;
}

RationalForm reconstruct(const CoefficientMap& parts) {
  RationalSum sum;
  for (const auto& [mono, coeff] : parts) sum.add(RationalForm(Polynomial::monomial(mono)) * coeff);
  return sum.take().normalized();
}

int max_jet_order(const RationalForm& e, std::string_view depvar) {
  int best = -1;
  for (AtomId a : e.atoms()) {
    const auto& ai = info(a);
    if (ai.is_jet_of(depvar)) best = std::max(best, ai.order);
  }
  return best;
}

std::vector<AtomId> parameters_in(const RationalForm& e) {
  std::vector<AtomId> out;
  for (AtomId a : e.atoms())
    if (info(a).kind == AtomKind::Parameter) out.push_back(a);
  std::sort(out.begin(), out.end(), atom_less);
  return out;
}

}  // namespace laxkit::expr
