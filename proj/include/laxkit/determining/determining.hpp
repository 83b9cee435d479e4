#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/manifold/manifold.hpp"

namespace laxkit::determining {

using expr::AtomId;
using expr::Monomial;
using expr::RationalForm;

/// Unknown coefficients alpha_j(x, t, u_0, ..., u_s), named <prefix><j>.
struct SymbolicManifoldSpec {
  int p = 1;
  std::optional<int> s;  // defaults to the equation order
  bool depends_on_x = true;
  bool depends_on_t = true;
  std::string prefix = "a";
};

std::vector<AtomId> coefficient_arguments(const jet::EvolutionEquation& eq, int s, bool with_x = true, bool with_t = true);
manifold::LinearManifold symbolic_manifold(const jet::EvolutionEquation& eq, const SymbolicManifoldSpec& spec);

struct DeterminingEquation {
  Monomial v_key;     // the v-jet this equation is the coefficient of
  Monomial jet_key;   // monomial in the split jets (empty for the remainder)
  RationalForm expression;
  Monomial key() const { return v_key * jet_key; }
};

struct DeterminingSystem {
  int p = 0;
  int s = 0;
  std::string equation;
  std::vector<DeterminingEquation> equations;
  RationalForm residual;

  const DeterminingEquation* find(const Monomial& key) const;
  std::vector<AtomId> unknowns() const;
};

/// Residual with symbolic coefficients, split over v_0..v_{p-1} and then over jets u_k with k > s.
DeterminingSystem generate(const jet::EvolutionEquation& eq, const SymbolicManifoldSpec& spec);
/// Same splitting for an arbitrary (possibly partially specified) manifold.
DeterminingSystem generate_for(const jet::EvolutionEquation& eq, const manifold::LinearManifold& m, int s);
/// Splits a residual that is linear in v_0..v_{p-1}.
std::vector<DeterminingEquation> split_residual(const RationalForm& residual, const std::string& depvar, int p, int s);

/// sum(key * equation); equals the residual.
RationalForm reassemble(const DeterminingSystem& sys);

/// Values of the equations under an assignment of the unknown functions; formal
/// partials are resolved by differentiating the assigned expressions.
std::vector<RationalForm> substitute_solution(const DeterminingSystem& sys, const std::map<AtomId, RationalForm>& assignment);
RationalForm apply_assignment(const RationalForm& e, const std::map<AtomId, RationalForm>& assignment);

std::string to_text(const DeterminingSystem& sys);
std::string to_latex(const DeterminingSystem& sys);
nlohmann::json to_json(const DeterminingSystem& sys);

}  // namespace laxkit::determining
