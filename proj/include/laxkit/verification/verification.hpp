#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/manifold/manifold.hpp"

namespace laxkit::verification {

using expr::Monomial;
using expr::RationalForm;

enum class Status { Verified, Refuted, Inapplicable };
enum class CheckKind { InvariantManifold, ConditionalSymmetry, LaxPair };

const char* to_string(Status s);
const char* to_string(CheckKind k);

struct SubCheck {
  std::string name;
  Status status = Status::Inapplicable;
  std::string detail;
};

struct VerificationReport {
  std::string subject;
  CheckKind kind = CheckKind::InvariantManifold;
  Status status = Status::Inapplicable;
  RationalForm residual;  // zero iff Verified
  std::optional<Monomial> witness;
  std::optional<RationalForm> witness_coefficient;
  std::vector<std::string> parameters;
  bool no_spectral_parameter = false;
  double elapsed_seconds = 0;
  std::vector<SubCheck> sub_checks;
  std::vector<std::string> notes;
};

/// reduce_v(D_t H) == 0.
VerificationReport verify_invariant_manifold(const manifold::LinearManifold& m, const jet::EvolutionEquation& eq,
                                             std::string subject = {});
/// Both conditions of the symmetry system for X = H d/dv: X(u_t - f) and X(v_t - rhs_v), each
/// restricted to the equation, its linearization and H = 0.
VerificationReport verify_gcs(const manifold::LinearManifold& m, const jet::EvolutionEquation& eq,
                              std::string subject = {});
/// D_t v_p by the linearized flow against D_t(sum alpha_j v_j), both reduced.
VerificationReport verify_lax_pair(const manifold::LinearManifold& m, const jet::EvolutionEquation& eq,
                                   std::string subject = {});

/// Names of the parameters occurring in the coefficients.
std::vector<std::string> parameter_presence(const manifold::LinearManifold& m);

struct SpotcheckOptions {
  int trials = 10;
  std::uint64_t seed = 1;
  double tolerance = 1e-20;
  int max_redraws = 100;
};

/// Evaluates at pseudo-random rational points (numerators and denominators small, values in
/// [-10, 10]) with 100-digit floating arithmetic; true iff every value is below tolerance
/// relative to the largest intermediate magnitude. Throws DegeneratePoint when no point with
/// nonvanishing divisors is found.
bool numeric_spotcheck(const expr::Expr& e, const SpotcheckOptions& opt = {});
bool numeric_spotcheck(const RationalForm& e, const SpotcheckOptions& opt = {});

nlohmann::json to_json(const VerificationReport& r);
std::string to_text_table(const std::vector<VerificationReport>& reports, bool timing = true);

}  // namespace laxkit::verification
