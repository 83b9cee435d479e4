#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/jet/jet.hpp"

namespace laxkit::manifold {

using expr::AtomId;
using expr::RationalForm;

/// v_p = sum_{j<p} alpha_j v_j.
class LinearManifold {
public:
  explicit LinearManifold(std::vector<RationalForm> coefficients);
  /// Reads a constraint H linear in v-jets and solves it for its top v-jet.
  /// Any nonzero v-free rescaling of H gives the same manifold.
  static LinearManifold from_constraint(const RationalForm& h);

  int order() const noexcept { return static_cast<int>(coeffs_.size()); }
  const std::vector<RationalForm>& coefficients() const noexcept { return coeffs_; }
  /// Highest jet order (of any non-linear variable) the coefficients depend on,
  /// counting unknown-function arguments; -1 when they depend on none.
  int jet_bound() const noexcept { return s_; }
  /// sum_j alpha_j v_j, the value of v_p.
  RationalForm solve_top() const;
  /// H = v_p - sum_j alpha_j v_j.
  RationalForm constraint() const;
  std::vector<AtomId> parameters() const;

private:
  std::vector<RationalForm> coeffs_;
  int s_ = -1;
};

/// Rewrites modulo the manifold: v_k with k >= p become combinations of v_0..v_{p-1}.
/// Images are built incrementally, R_p = solve_top, R_{k+1} = D_x R_k with v_p replaced.
class Reducer {
public:
  explicit Reducer(LinearManifold m);

  const LinearManifold& manifold() const noexcept { return m_; }
  /// Image of v_k for k >= p.
  const RationalForm& image(int k);
  RationalForm reduce(const RationalForm& e);

private:
  LinearManifold m_;
  std::vector<RationalForm> images_;  // images_[i] is the image of v_{p+i}
};

RationalForm reduce_v(const RationalForm& e, const LinearManifold& m);

/// reduce_v(D_t H) with D_t taken on solutions of the equation and its linearization.
RationalForm residual(const LinearManifold& m, const jet::EvolutionEquation& eq);
RationalForm residual(Reducer& reducer, jet::JetFlow& flow);

/// D_t v_p computed by the Leibniz expansion sum_i sum_l C(p,l) D_x^l(df/du_i) v_{i+p-l}, then reduced.
RationalForm flow_route(Reducer& reducer, jet::JetFlow& flow);
/// D_t(sum_j alpha_j v_j) = sum_j [v_j D_t alpha_j + alpha_j D_x^j rhs_v], then reduced.
RationalForm coefficient_route(Reducer& reducer, jet::JetFlow& flow);

/// Plain-text manifold description:
///
///   equation: kdv                  (a corpus id, or "u_t = ...")
///   order: 3
///   parameters: lambda
///   constants: k0 k1               (template constants, optional)
///   a0 = <expression>
///   ...
///   H = <expression>               (alternative to the a<j> lines)
///
/// Lines starting with '#' are comments.
struct ManifoldDocument {
  std::string equation;
  std::optional<int> order;
  std::vector<std::string> parameters;
  std::vector<std::string> constants;
  std::map<int, std::string> coefficients;
  std::optional<std::string> constraint;
  std::vector<std::string> notes;
};

ManifoldDocument parse_manifold_document(std::string_view text);
std::string write_manifold_document(const ManifoldDocument& doc);

/// Builds the manifold; `ctx` must already know the dependent variable and any unknown functions.
LinearManifold build_manifold(const ManifoldDocument& doc, expr::ParseContext ctx);
ManifoldDocument describe(const LinearManifold& m, const std::string& equation);

}  // namespace laxkit::manifold
