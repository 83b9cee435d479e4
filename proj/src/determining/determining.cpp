#include "laxkit/determining/determining.hpp"

#include <algorithm>
#include <sstream>

#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"

namespace laxkit::determining {

using expr::AtomInfo;
using expr::AtomKind;
using expr::info;

std::vector<AtomId> coefficient_arguments(const jet::EvolutionEquation& eq, int s, bool with_x, bool with_t) {
  std::vector<AtomId> args;
  if (with_x) args.push_back(expr::independent_x());
  if (with_t) args.push_back(expr::independent_t());
  for (int k = 0; k <= s; ++k) args.push_back(eq.u(k));
  return args;
}

manifold::LinearManifold symbolic_manifold(const jet::EvolutionEquation& eq, const SymbolicManifoldSpec& spec) {
  if (spec.p < 1) throw InvalidManifold("the manifold order must be at least 1");
  const int s = spec.s.value_or(eq.order());
  if (s < 0) throw InvalidManifold("the jet bound s must be nonnegative");
  const auto args = coefficient_arguments(eq, s, spec.depends_on_x, spec.depends_on_t);
  std::vector<RationalForm> alphas;
  for (int j = 0; j < spec.p; ++j)
    alphas.push_back(RationalForm::atom(expr::unknown_function(spec.prefix + std::to_string(j), args)));
  return manifold::LinearManifold(std::move(alphas));
}

const DeterminingEquation* DeterminingSystem::find(const Monomial& key) const {
  for (const auto& e : equations)
    if (e.key() == key) return &e;
  return nullptr;
}

std::vector<AtomId> DeterminingSystem::unknowns() const {
  std::vector<AtomId> out;
  for (const auto& e : equations) {
    for (AtomId a : e.expression.atoms())
      if (info(a).kind == AtomKind::Unknown) out.push_back(expr::base_function(a));
  }
  std::sort(out.begin(), out.end(), expr::atom_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<DeterminingEquation> split_residual(const RationalForm& residual, const std::string& depvar, int p, int s) {
  std::vector<AtomId> v_selectors;
  for (int j = 0; j < p; ++j) v_selectors.push_back(jet::v_jet(j));
  const auto by_v = expr::collect_coefficients(residual, v_selectors);
  std::vector<DeterminingEquation> out;
  // highest v-jet first, then the jet monomials from the top down
  for (auto it = by_v.rbegin(); it != by_v.rend(); ++it) {
    const auto& [v_key, coeff] = *it;
    if (v_key.total_degree() != 1)
      throw InvalidManifold("residual is not linear homogeneous in the v-jets (found key " + expr::to_text(v_key) + ")");
    std::vector<AtomId> high;
    for (AtomId a : coeff.atoms()) {
      const AtomInfo& ai = info(a);
      if (ai.is_jet_of(depvar) && ai.order > s) high.push_back(a);
    }
    const auto by_jets = expr::collect_coefficients(coeff, high);
    for (auto jt = by_jets.rbegin(); jt != by_jets.rend(); ++jt) out.push_back({v_key, jt->first, jt->second});
  }
  return out;
}

DeterminingSystem generate_for(const jet::EvolutionEquation& eq, const manifold::LinearManifold& m, int s) {
  DeterminingSystem sys;
  sys.p = m.order();
  sys.s = s;
  sys.equation = eq.text();
  sys.residual = manifold::residual(m, eq);
  sys.equations = split_residual(sys.residual, eq.depvar(), sys.p, s);
  return sys;
}

DeterminingSystem generate(const jet::EvolutionEquation& eq, const SymbolicManifoldSpec& spec) {
  return generate_for(eq, symbolic_manifold(eq, spec), spec.s.value_or(eq.order()));
}

RationalForm reassemble(const DeterminingSystem& sys) {
  expr::RationalSum sum;
  for (const auto& e : sys.equations) sum.add(RationalForm(expr::Polynomial::monomial(e.key())) * e.expression);
  return sum.take().normalized();
}

RationalForm apply_assignment(const RationalForm& e, const std::map<AtomId, RationalForm>& assignment) {
  expr::Bindings bindings;
  for (AtomId a : e.atoms()) {
    const AtomInfo& ai = info(a);
    if (ai.kind != AtomKind::Unknown) continue;
    const AtomId base = expr::base_function(a);
    auto it = assignment.find(base);
    if (it == assignment.end()) {
      throw IncompleteAssignment("no value assigned to " + expr::atom_text(base));
    }
    RationalForm value = it->second;
    for (AtomId w : ai.wrt) value = jet::partial_derivative(value, w);
    bindings.emplace(a, std::move(value));
  }
  // assigned values may mention other unknowns, never the bound ones themselves
  return expr::substitute(e, bindings);
}

std::vector<RationalForm> substitute_solution(const DeterminingSystem& sys, const std::map<AtomId, RationalForm>& assignment) {
  std::vector<RationalForm> out;
  out.reserve(sys.equations.size());
  for (const auto& e : sys.equations) out.push_back(apply_assignment(e.expression, assignment));
  return out;
}

std::string to_text(const DeterminingSystem& sys) {
  std::ostringstream out;
  out << "# determining system: " << sys.equation << ", p = " << sys.p << ", split over jets of order > " << sys.s
      << "\n";
  for (const auto& e : sys.equations) {
    out << "[" << expr::to_text(e.key()) << "] " << expr::to_text(e.expression) << " = 0\n";
  }
  return out.str();
}

std::string to_latex(const DeterminingSystem& sys) {
  std::ostringstream out;
  out << "\\begin{aligned}\n";
  for (const auto& e : sys.equations) {
    out << "  " << expr::to_latex(e.key()) << " &: \\quad " << expr::to_latex(e.expression) << " = 0 \\\\\n";
  }
  out << "\\end{aligned}\n";
  return out.str();
}

nlohmann::json to_json(const DeterminingSystem& sys) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : sys.equations) {
    eqs.push_back({{"v_key", expr::to_text(e.v_key)},
                   {"jet_key", expr::to_text(e.jet_key)},
                   {"expression", expr::to_text(e.expression)},
                   {"latex", expr::to_latex(e.expression)}});
  }
  nlohmann::json unknowns = nlohmann::json::array();
  for (AtomId a : sys.unknowns()) unknowns.push_back(expr::atom_text(a));
  return {{"equation", sys.equation}, {"p", sys.p}, {"s", sys.s}, {"unknowns", unknowns}, {"equations", eqs}};
}

}  // namespace laxkit::determining
