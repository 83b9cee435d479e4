#include "laxkit/verification/verification.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "laxkit/determining/determining.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/expr/evaluate.hpp"
#include "laxkit/expr/render.hpp"

namespace laxkit::verification {

using expr::AtomId;
using manifold::LinearManifold;

const char* to_string(Status s) {
  switch (s) {
    case Status::Verified: return "Verified";
    case Status::Refuted: return "Refuted";
    case Status::Inapplicable: return "Inapplicable";
  }
  return "?";
}

const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::InvariantManifold: return "invariant-manifold";
    case CheckKind::ConditionalSymmetry: return "conditional-symmetry";
    case CheckKind::LaxPair: return "lax-pair";
  }
  return "?";
}

std::vector<std::string> parameter_presence(const LinearManifold& m) {
  std::vector<std::string> out;
  for (AtomId a : m.parameters()) out.push_back(expr::info(a).name);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

VerificationReport start(const LinearManifold& m, CheckKind kind, std::string subject) {
  VerificationReport r;
  r.subject = std::move(subject);
  r.kind = kind;
  r.parameters = parameter_presence(m);
  r.no_spectral_parameter = r.parameters.empty();
  if (r.no_spectral_parameter) r.notes.push_back("no spectral parameter: not a true Lax pair");
  return r;
}

void conclude(VerificationReport& r, const RationalForm& residual, const LinearManifold& m,
              const jet::EvolutionEquation& eq, Clock::time_point t0) {
  r.residual = residual;
  r.status = residual.is_zero() ? Status::Verified : Status::Refuted;
  if (!residual.is_zero()) {
    try {
      const int s = std::max(m.jet_bound(), eq.order());
      const auto split = determining::split_residual(residual, eq.depvar(), m.order(), s);
      if (!split.empty()) {
        r.witness = split.front().key();
        r.witness_coefficient = split.front().expression;
      }
    } catch (const Error&) {
      const auto& lead = residual.numerator().canonical_leading();
      r.witness = lead.mono;
      r.witness_coefficient = RationalForm(lead.coeff);
    }
  }
  r.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

VerificationReport verify_invariant_manifold(const LinearManifold& m, const jet::EvolutionEquation& eq,
                                             std::string subject) {
  const auto t0 = Clock::now();
  auto r = start(m, CheckKind::InvariantManifold, std::move(subject));
  conclude(r, manifold::residual(m, eq), m, eq, t0);
  return r;
}

VerificationReport verify_gcs(const LinearManifold& m, const jet::EvolutionEquation& eq, std::string subject) {
  const auto t0 = Clock::now();
  auto r = start(m, CheckKind::ConditionalSymmetry, std::move(subject));

  // The prolonged field H d/dv only moves v-jets, and u_t - f has none.
  SubCheck first{"X(u_t - f)", Status::Verified, "identically zero"};
  for (AtomId a : eq.rhs().atoms()) {
    if (expr::info(a).is_v_jet()) first = {"X(u_t - f)", Status::Refuted, "equation depends on v"};
  }
  r.sub_checks.push_back(first);

  // pr X (v_t - rhs_v) = D_t H - sum_i (df/du_i) D_x^i H, then restricted.
  manifold::Reducer reducer(m);
  jet::JetFlow flow(eq);
  const RationalForm h = m.constraint();
  expr::RationalSum sum;
  sum.add(flow.reduced_t_derivative(h));
  RationalForm dh = h;
  const auto& partials = flow.linearized().partials;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    if (i > 0) dh = jet::total_x_derivative(dh);
    if (!partials[i].is_zero()) sum.add(-(partials[i] * dh));
  }
  const RationalForm second = reducer.reduce(sum.take());
  r.sub_checks.push_back({"X(v_t - rhs_v)", second.is_zero() ? Status::Verified : Status::Refuted,
                          second.is_zero() ? "vanishes on the manifold" : "nonzero after reduction"});

  conclude(r, second, m, eq, t0);
  if (first.status != Status::Verified) r.status = Status::Refuted;
  return r;
}

VerificationReport verify_lax_pair(const LinearManifold& m, const jet::EvolutionEquation& eq, std::string subject) {
  const auto t0 = Clock::now();
  auto r = start(m, CheckKind::LaxPair, std::move(subject));
  manifold::Reducer reducer(m);
  jet::JetFlow flow(eq);
  const RationalForm by_flow = manifold::flow_route(reducer, flow);
  const RationalForm by_coefficients = manifold::coefficient_route(reducer, flow);
  conclude(r, (by_flow - by_coefficients).normalized(), m, eq, t0);
  return r;
}

// ---------------------------------------------------------------- spot check

namespace {

using Float = boost::multiprecision::cpp_bin_float_100;

// Tracks the largest magnitude entering any addition so that cancellation can be
// judged relative to the size of what cancelled.
struct Tracked {
  Float v;
  static inline thread_local Float scale = 0;
  static void note(const Float& x) {
    const Float a = boost::multiprecision::abs(x);
    if (a > scale) scale = a;
  }
  friend Tracked operator+(const Tracked& a, const Tracked& b) {
    note(a.v);
    note(b.v);
    return {a.v + b.v};
  }
  friend Tracked operator-(const Tracked& a, const Tracked& b) {
    note(a.v);
    note(b.v);
    return {a.v - b.v};
  }
  friend Tracked operator*(const Tracked& a, const Tracked& b) { return {a.v * b.v}; }
  friend Tracked operator/(const Tracked& a, const Tracked& b) { return {a.v / b.v}; }
};

Float to_float(const expr::Rational& q) { return Float(q.get_num().get_str()) / Float(q.get_den().get_str()); }

class PointSampler {
public:
  explicit PointSampler(std::uint64_t seed) : rng_(seed) {}

  std::map<AtomId, Float> draw(const std::vector<AtomId>& atoms) {
    std::uniform_int_distribution<int> den(1, 6);
    std::map<AtomId, Float> point;
    for (AtomId a : atoms) {
      const int d = den(rng_);
      std::uniform_int_distribution<int> num(-10 * d, 10 * d);
      point[a] = Float(num(rng_)) / d;
    }
    return point;
  }

private:
  std::mt19937_64 rng_;
};

std::vector<AtomId> sorted_atoms(std::vector<AtomId> atoms) {
  std::sort(atoms.begin(), atoms.end(), expr::atom_less);
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

void collect_atoms(const expr::Expr& e, std::vector<AtomId>& out) {
  if (e.kind() == expr::ExprKind::Atom) {
    out.push_back(e.atom_id());
  } else if (e.kind() != expr::ExprKind::Number) {
    for (const auto& c : e.children()) collect_atoms(c, out);
  }
}

template <class Source>
bool spotcheck(const Source& e, const std::vector<AtomId>& atoms, const SpotcheckOptions& opt) {
  if (opt.trials < 1) throw std::invalid_argument("numeric_spotcheck: trials must be >= 1");
  PointSampler sampler(opt.seed);
  const Float tol(opt.tolerance);
  for (int trial = 0; trial < opt.trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt <= opt.max_redraws && !done; ++attempt) {
      const auto point = sampler.draw(atoms);
      expr::Evaluation<Tracked> ev;
      ev.atom = [&point](AtomId a) { return Tracked{point.at(a)}; };
      ev.constant = [](const expr::Rational& q) { return Tracked{to_float(q)}; };
      ev.exp = [](const Tracked& x) { return Tracked{boost::multiprecision::exp(x.v)}; };
      ev.is_zero = [](const Tracked& x) { return boost::multiprecision::abs(x.v) < Float(1e-60); };
      Tracked::scale = 1;
      try {
        const Tracked value = expr::evaluate(e, ev);
        if (boost::multiprecision::abs(value.v) > tol * Tracked::scale) return false;
        done = true;
      } catch (const expr::SingularPoint&) {
      }
    }
    if (!done) throw DegeneratePoint("no evaluation point with nonvanishing divisors after " +
                                     std::to_string(opt.max_redraws) + " redraws");
  }
  return true;
}

}  // namespace

bool numeric_spotcheck(const expr::Expr& e, const SpotcheckOptions& opt) {
  std::vector<AtomId> atoms;
  collect_atoms(e, atoms);
  return spotcheck(e, sorted_atoms(std::move(atoms)), opt);
}

bool numeric_spotcheck(const RationalForm& e, const SpotcheckOptions& opt) {
  return spotcheck(e, sorted_atoms(e.atoms()), opt);
}

// ---------------------------------------------------------------- output

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["subject"] = r.subject;
  j["check"] = to_string(r.kind);
  j["status"] = to_string(r.status);
  j["residual"] = expr::to_text(r.residual);
  j["witness"] = r.witness ? nlohmann::json(expr::to_text(*r.witness)) : nlohmann::json();
  j["witness_coefficient"] =
      r.witness_coefficient ? nlohmann::json(expr::to_text(*r.witness_coefficient)) : nlohmann::json();
  j["parameters"] = r.parameters;
  j["no_spectral_parameter"] = r.no_spectral_parameter;
  j["elapsed_seconds"] = r.elapsed_seconds;
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : r.sub_checks) subs.push_back({{"name", s.name}, {"status", to_string(s.status)}, {"detail", s.detail}});
  j["sub_checks"] = subs;
  j["notes"] = r.notes;
  return j;
}

std::string to_text_table(const std::vector<VerificationReport>& reports, bool timing) {
  std::size_t w_subject = 7, w_check = 5;
  for (const auto& r : reports) {
    w_subject = std::max(w_subject, r.subject.size());
    w_check = std::max(w_check, std::string(to_string(r.kind)).size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w_subject)) << "subject" << "  " << std::setw(static_cast<int>(w_check))
      << "check" << "  " << std::setw(12) << "status" << "  " << std::setw(14) << "parameters"
      << (timing ? "  time(s)   witness\n" : "  witness\n");
  for (const auto& r : reports) {
    std::string params;
    for (const auto& p : r.parameters) params += (params.empty() ? "" : ",") + p;
    if (r.no_spectral_parameter) params = "none (flag)";
    std::ostringstream t;
    t << std::fixed << std::setprecision(3) << r.elapsed_seconds;
    out << std::setw(static_cast<int>(w_subject)) << r.subject << "  " << std::setw(static_cast<int>(w_check))
        << to_string(r.kind) << "  " << std::setw(12) << to_string(r.status) << "  " << std::setw(14) << params
        << "  " << (timing ? t.str() + std::string(t.str().size() < 8 ? 8 - t.str().size() : 0, ' ') + "  " : "")
        << (r.witness ? expr::to_text(*r.witness) : "-") << "\n";
  }
  return out.str();
}

}  // namespace laxkit::verification
