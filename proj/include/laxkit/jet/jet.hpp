#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "laxkit/expr/ops.hpp"
#include "laxkit/expr/parser.hpp"

namespace laxkit::jet {

using expr::AtomId;
using expr::RationalForm;

/// u_t = f(x, t, u, u_1, ..., u_n) with n > 1.
class EvolutionEquation {
public:
  /// Validates: n > 1, no v-jets, no jets of other variables, no unknown functions,
  /// and f depends on u_n.
  EvolutionEquation(std::string depvar, RationalForm rhs);
  static EvolutionEquation parse(std::string_view text, expr::ParseContext ctx = {});

  const std::string& depvar() const noexcept { return depvar_; }
  int order() const noexcept { return order_; }
  const RationalForm& rhs() const noexcept { return rhs_; }
  AtomId u(int k) const { return expr::jet(depvar_, k); }
  std::string text() const;

private:
  std::string depvar_;
  RationalForm rhs_;
  int order_ = 0;
};

AtomId v_jet(int k);

struct LinearizedEquation {
  RationalForm rhs_v;                 // sum of partials[i] * v_i
  std::vector<RationalForm> partials;  // df/du_i, i = 0..n
};

LinearizedEquation linearize(const EvolutionEquation& eq);

/// D_x: u_k -> u_{k+1} for every dependent variable, x -> 1, unknown functions by the chain rule.
RationalForm total_x_derivative(const RationalForm& e);
RationalForm iterate_x(const RationalForm& e, int k);

/// Partial derivative treating unknown functions as functions of their arguments,
/// so d/du_k of a(u, u_1) is the formal partial d(a, u_k).
RationalForm partial_derivative(const RationalForm& e, AtomId var);

/// Caches D_x^k f and D_x^k of the linearized right-hand side for one equation.
/// Not synchronized; use one instance per computation.
class JetFlow {
public:
  explicit JetFlow(const EvolutionEquation& eq);

  const EvolutionEquation& equation() const noexcept { return eq_; }
  const LinearizedEquation& linearized() const noexcept { return lin_; }
  /// D_t u_k on solutions, i.e. D_x^k f.
  const RationalForm& u_t(int k);
  /// D_t v_k on solutions of the linearized equation, i.e. D_x^k rhs_v.
  const RationalForm& v_t(int k);
  /// D_t restricted to solutions of the equation and of its linearization.
  RationalForm reduced_t_derivative(const RationalForm& e);

private:
  EvolutionEquation eq_;
  LinearizedEquation lin_;
  std::vector<RationalForm> u_flow_;
  std::vector<RationalForm> v_flow_;
};

RationalForm reduced_t_derivative(const RationalForm& e, const EvolutionEquation& eq);

}  // namespace laxkit::jet
