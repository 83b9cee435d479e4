#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/determining/determining.hpp"
#include "laxkit/verification/verification.hpp"

namespace laxkit::search {

using expr::AtomId;
using expr::Monomial;
using expr::Polynomial;
using expr::RationalForm;

/// Largest manifold order allowed for coefficients of jet order s <= n: 2n + 1.
int order_bound(const jet::EvolutionEquation& eq);

/// Throws OrderBoundExceeded when p > 2n+1 and s <= n. For s > n the bound is not
/// known to apply; a warning is returned instead.
std::optional<std::string> enforce_order_bound(const jet::EvolutionEquation& eq, int p, int s);

struct Witness {
  Monomial key;
  RationalForm coefficient;
};

/// First split coefficient of the symbolic residual that contains no unknown functions
/// and is not zero. Coefficients are scanned from the highest jet monomial down.
std::optional<Witness> obstruction_scan(const jet::EvolutionEquation& eq, int p, int s);

struct LayerFinding {
  Monomial key;
  RationalForm coefficient;
  bool free_of_unknowns = false;
};

struct TopQuadraticTerm {
  int p = 0;
  int n = 0;
  Monomial key;              // v_{p-1} u_{2n+1}
  RationalForm coefficient;  // full split coefficient of that key
  RationalForm leading;      // its part free of unknown functions
  RationalForm predicted;    // C(p, n+1) d^2 f / du_n^2
  std::vector<LayerFinding> layers;  // all split coefficients carrying u_{2n+1} or higher
};

/// Requires p >= 2n + 2 (OrderTooLow otherwise).
TopQuadraticTerm top_quadratic_term(const jet::EvolutionEquation& eq, int p);

/// One coefficient alpha_j = (sum k_i b_i) / (e_0 + sum d_i e_i), the k_i, d_i being
/// undetermined constants. With no denominator basis the denominator is 1.
struct CoefficientTemplate {
  std::vector<RationalForm> numerator_basis;
  std::vector<RationalForm> denominator_basis;
  std::optional<RationalForm> fixed;  // a known coefficient, no constants

  static CoefficientTemplate constant() { return {{RationalForm(1L)}, {}, {}}; }
  static CoefficientTemplate known(RationalForm value) { return {{}, {}, std::move(value)}; }
};

struct SearchConfig {
  std::vector<int> orders;  // empty: 2..2n+1
  std::optional<int> s;     // default n
  /// templates[j] for alpha_j; the last entry is reused for larger j. Empty means constants.
  std::vector<CoefficientTemplate> templates;
  int case_budget = 64;
  /// Templates with equal denominator bases get one denominator with one set of constants.
  /// Far cheaper, and any rational manifold can be put over a common denominator.
  bool shared_denominator = true;
};

enum class OutcomeKind { Inconsistent, Solved, ConstraintsRemain };
const char* to_string(OutcomeKind k);

struct Constraint {
  Monomial key;     // monomial of the independent quantities it multiplies
  Polynomial poly;  // polynomial in the template constants
};

struct Branch {
  std::string id;  // sequence of case decisions, "" for the root
  std::vector<Constraint> constraints;
  std::vector<std::string> assumptions;
};

struct OrderOutcome {
  int p = 0;
  OutcomeKind kind = OutcomeKind::ConstraintsRemain;
  std::vector<manifold::LinearManifold> solutions;
  std::vector<std::string> solution_branches;
  std::optional<Witness> witness;  // for Inconsistent, from the first closed branch
  std::vector<Branch> remaining;
  bool budget_exceeded = false;
  int branches = 0;
  double elapsed_seconds = 0;
  std::vector<std::string> notes;
};

struct SearchOutcome {
  std::vector<OrderOutcome> orders;
  std::vector<std::string> warnings;
};

/// Instantiates the templates, reduces the residual to polynomial constraints in the
/// constants and solves them: linear eliminations first, then zero/nonzero case splits on
/// constants dividing a constraint (zero case first, constants in declaration order).
/// Every solution is re-verified before it is reported.
SearchOutcome ansatz_solve(const jet::EvolutionEquation& eq, const SearchConfig& config);
OrderOutcome ansatz_solve_order(const jet::EvolutionEquation& eq, int p, const SearchConfig& config);

/// Remaining constraints in the determining-system formats.
determining::DeterminingSystem as_system(const Branch& b, int p, const std::string& equation);
nlohmann::json to_json(const SearchOutcome& o, const jet::EvolutionEquation& eq);
std::string to_text(const SearchOutcome& o, const jet::EvolutionEquation& eq);

}  // namespace laxkit::search
