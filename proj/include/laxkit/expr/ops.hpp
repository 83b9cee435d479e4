#pragma once

#include <map>
#include <vector>

#include "laxkit/expr/expr.hpp"

namespace laxkit::expr {

/// Orders monomials by the canonical degree-lexicographic order, highest last.
struct CanonicalLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return canonical_compare(a, b) < 0; }
};

using Bindings = std::map<AtomId, RationalForm>;

/// Simultaneous replacement of atoms; the result is normalized.
/// Throws SelfReferentialBinding when a value mentions its own key.
RationalForm substitute(const RationalForm& e, const Bindings& bindings);
Expr substitute(const Expr& e, const std::map<AtomId, Expr>& bindings);

using CoefficientMap = std::map<Monomial, RationalForm, CanonicalLess>;

/// Splits e as a polynomial in the selector atoms. The key Monomial{} holds the
/// selector-free part. Throws NotPolynomialInSelectors when a selector occurs in
/// a denominator or an exponential argument.
CoefficientMap collect_coefficients(const RationalForm& e, const std::vector<AtomId>& selectors);

/// Reassembles sum(monomial * coefficient).
RationalForm reconstruct(const CoefficientMap& parts);

/// Highest order of a jet of `depvar` in e, or -1 when none occurs.
int max_jet_order(const RationalForm& e, std::string_view depvar);
std::vector<AtomId> parameters_in(const RationalForm& e);

}  // namespace laxkit::expr
