#include "laxkit/search/search.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"

namespace laxkit::search {

using expr::AtomInfo;
using expr::AtomKind;
using expr::info;
using manifold::LinearManifold;

int order_bound(const jet::EvolutionEquation& eq) { return 2 * eq.order() + 1; }

std::optional<std::string> enforce_order_bound(const jet::EvolutionEquation& eq, int p, int s) {
  const int n = eq.order();
  if (p < 1) throw InvalidManifold("the manifold order must be at least 1");
  if (s > n) {
    if (p > order_bound(eq))
      return "jet bound s = " + std::to_string(s) + " exceeds the equation order n = " + std::to_string(n) +
             "; the order bound p <= 2n+1 = " + std::to_string(order_bound(eq)) + " is not known to apply";
    return std::nullopt;
  }
  if (p > order_bound(eq)) {
    throw OrderBoundExceeded("requested order p = " + std::to_string(p) +
                             " exceeds the bound p <= 2n+1 = " + std::to_string(order_bound(eq)) +
                             " for coefficients depending on jets of order s <= n (n = " + std::to_string(n) +
                             ", s = " + std::to_string(s) + ")");
  }
  return std::nullopt;
}

namespace {

bool has_unknowns(const RationalForm& e) {
  for (AtomId a : e.atoms())
    if (info(a).kind == AtomKind::Unknown) return true;
  return false;
}

int max_order(const Monomial& m) {
  int k = -1;
  for (const auto& [a, e] : m.factors()) k = std::max(k, info(a).order);
  return k;
}

// Highest jet first (by the largest order present, then the canonical order), lower v-jets first.
bool scan_before(const determining::DeterminingEquation& a, const determining::DeterminingEquation& b) {
  const int oa = max_order(a.jet_key), ob = max_order(b.jet_key);
  if (oa != ob) return oa > ob;
  const int c = expr::canonical_compare(a.jet_key, b.jet_key);
  if (c != 0) return c > 0;
  return expr::canonical_compare(a.v_key, b.v_key) < 0;
}

}  // namespace

std::optional<Witness> obstruction_scan(const jet::EvolutionEquation& eq, int p, int s) {
  determining::SymbolicManifoldSpec spec;
  spec.p = p;
  spec.s = s;
  auto sys = determining::generate(eq, spec);
  std::stable_sort(sys.equations.begin(), sys.equations.end(), scan_before);
  for (const auto& e : sys.equations) {
    if (!e.expression.is_zero() && !has_unknowns(e.expression)) return Witness{e.key(), e.expression};
  }
  return std::nullopt;
}

TopQuadraticTerm top_quadratic_term(const jet::EvolutionEquation& eq, int p) {
  const int n = eq.order();
  if (p < 2 * n + 2)
    throw OrderTooLow("the top quadratic term is isolated only for p >= 2n+2 = " + std::to_string(2 * n + 2) +
                      " (got p = " + std::to_string(p) + ")");
  TopQuadraticTerm out;
  out.p = p;
  out.n = n;
  out.key = Monomial::of(jet::v_jet(p - 1)) * Monomial::of(eq.u(2 * n + 1));
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(n + 1));
  out.predicted = eq.rhs().derivative(eq.u(n)).derivative(eq.u(n)).scaled(expr::Rational(binom)).normalized();

  determining::SymbolicManifoldSpec spec;
  spec.p = p;
  spec.s = n;
  const auto sys = determining::generate(eq, spec);
  for (const auto& e : sys.equations) {
    if (max_order(e.jet_key) >= 2 * n + 1) out.layers.push_back({e.key(), e.expression, !has_unknowns(e.expression)});
    if (e.key() == out.key) out.coefficient = e.expression;
  }
  std::stable_sort(out.layers.begin(), out.layers.end(), [](const LayerFinding& a, const LayerFinding& b) {
    return expr::canonical_compare(a.key, b.key) > 0;
  });
  // The unknown-free part; the coefficient is polynomial in the unknowns.
  expr::PolynomialAccumulator lead;
  for (const auto& t : out.coefficient.numerator().terms()) {
    bool free = true;
    for (const auto& [a, k] : t.mono.factors()) free = free && info(a).kind != AtomKind::Unknown;
    if (free) lead.add(t.mono, t.coeff);
  }
  out.leading = (RationalForm(lead.take()) * out.coefficient.denominator_inverse()).normalized();
  return out;
}

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Inconsistent: return "Inconsistent";
    case OutcomeKind::Solved: return "Solved";
    case OutcomeKind::ConstraintsRemain: return "ConstraintsRemain";
  }
  return "?";
}

// ---------------------------------------------------------------- ansatz solver

namespace {

struct Instance {
  std::vector<RationalForm> alphas;
  std::vector<AtomId> constants;  // declaration order
};

Instance instantiate(int p, const SearchConfig& config) {
  Instance inst;
  int next = 0;
  auto fresh = [&] {
    const AtomId k = expr::parameter("k" + std::to_string(next++));
    inst.constants.push_back(k);
    return RationalForm::atom(k);
  };
  std::vector<std::pair<std::vector<RationalForm>, RationalForm>> shared;
  for (int j = 0; j < p; ++j) {
    const CoefficientTemplate tpl = config.templates.empty()
                                        ? CoefficientTemplate::constant()
                                        : config.templates[std::min<std::size_t>(static_cast<std::size_t>(j),
                                                                                 config.templates.size() - 1)];
    if (tpl.fixed) {
      inst.alphas.push_back(*tpl.fixed);
      continue;
    }
    expr::RationalSum num;
    for (const auto& b : tpl.numerator_basis) num.add(fresh() * b);
    RationalForm value = num.take();
    if (!tpl.denominator_basis.empty()) {
      auto it = std::find_if(shared.begin(), shared.end(),
                             [&](const auto& d) { return d.first == tpl.denominator_basis; });
      if (!config.shared_denominator || it == shared.end()) {
        expr::RationalSum den;
        den.add(tpl.denominator_basis.front());
        for (std::size_t i = 1; i < tpl.denominator_basis.size(); ++i) den.add(fresh() * tpl.denominator_basis[i]);
        shared.emplace_back(tpl.denominator_basis, den.take());
        it = std::prev(shared.end());
      }
      value = value / it->second;
    }
    inst.alphas.push_back(value.normalized());
  }
  return inst;
}

// Groups the residual numerator by its monomials in everything except the constants.
std::vector<Constraint> constraints_of(const RationalForm& residual, const std::set<AtomId>& constants) {
  std::map<Monomial, expr::PolynomialAccumulator, expr::CanonicalLess> groups;
  for (const auto& t : residual.numerator().terms()) {
    Monomial cpart, rest = t.mono.exp() ? Monomial::exponential(t.mono.exp()) : Monomial{};
    if (t.mono.exp()) {
      for (AtomId a : expr::exponent_argument(t.mono.exp()).atoms())
        if (constants.count(a)) throw UnsupportedExpression("template constants inside an exponential");
    }
    for (const auto& [a, k] : t.mono.factors()) {
      if (constants.count(a))
        cpart = cpart * Monomial::of(a, k);
      else
        rest = rest * Monomial::of(a, k);
    }
    groups[rest].add(cpart, t.coeff);
  }
  std::vector<Constraint> out;
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    Polynomial poly = it->second.take();
    if (!poly.is_zero()) out.push_back({it->first, std::move(poly)});
  }
  return out;
}

struct State {
  Branch branch;
  expr::Bindings solved;
  std::vector<RationalForm> nonzero;
};

bool known_nonzero(const State& s, AtomId k) {
  const RationalForm a = RationalForm::atom(k);
  return std::any_of(s.nonzero.begin(), s.nonzero.end(), [&](const RationalForm& e) { return e == a; });
}

bool all_known_nonzero(const State& s, const Monomial& m) {
  if (m.exp() != 0) return false;
  for (const auto& [a, k] : m.factors())
    if (!known_nonzero(s, a)) return false;
  return true;
}

enum class Simplified { Open, Contradiction };

// Drops solved and duplicate constraints and divides out known nonzero content.
Simplified simplify(State& s, std::optional<Witness>& witness) {
  std::vector<Constraint> kept;
  for (auto& c : s.branch.constraints) {
    if (c.poly.is_zero()) continue;
    const Monomial content = c.poly.content();
    Monomial strip;
    for (const auto& [a, k] : content.factors())
      if (known_nonzero(s, a)) strip = strip * Monomial::of(a, k);
    if (!strip.is_one()) c.poly = c.poly.divided_by(strip);
    if (c.poly.is_constant() || (c.poly.size() == 1 && all_known_nonzero(s, c.poly.terms().front().mono))) {
      witness = Witness{c.key, RationalForm(c.poly)};
      return Simplified::Contradiction;
    }
    const expr::Rational lead = c.poly.canonical_leading().coeff;
    c.poly = c.poly.scaled(1 / lead);
    bool dup = std::any_of(kept.begin(), kept.end(), [&](const Constraint& k) { return k.poly == c.poly; });
    if (!dup) kept.push_back(std::move(c));
  }
  s.branch.constraints = std::move(kept);
  for (const auto& e : s.nonzero) {
    if (e.is_zero()) {
      witness = Witness{Monomial{}, RationalForm(0L)};
      return Simplified::Contradiction;
    }
  }
  return Simplified::Open;
}

void assign(State& s, AtomId k, const RationalForm& value) {
  const expr::Bindings b{{k, value}};
  for (auto& [key, v] : s.solved) v = expr::substitute(v, b);
  s.solved[k] = value;
  for (auto& c : s.branch.constraints) c.poly = expr::substitute(RationalForm(c.poly), b).numerator();
  for (auto& e : s.nonzero) e = expr::substitute(e, b);
}

int degree_in(const Polynomial& p, AtomId k) {
  int d = 0;
  for (const auto& t : p.terms()) d = std::max(d, t.mono.degree(k));
  return d;
}

// A constraint linear in some constant whose coefficient is a rational times known
// nonzero constants; smallest constraints first, constants in declaration order.
bool linear_step(State& s, const std::vector<AtomId>& constants) {
  std::vector<const Constraint*> order;
  for (const auto& c : s.branch.constraints) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const Constraint* a, const Constraint* b) { return a->poly.size() < b->poly.size(); });
  for (const Constraint* c : order) {
    for (AtomId k : constants) {
      if (s.solved.count(k) || degree_in(c->poly, k) != 1) continue;
      const Polynomial coeff = c->poly.derivative(k);
      const bool usable = coeff.is_constant() || (coeff.size() == 1 && all_known_nonzero(s, coeff.terms().front().mono));
      if (!usable) continue;
      const Polynomial rest = c->poly - Polynomial::atom(k) * coeff;
      const RationalForm value = (RationalForm(-rest) * RationalForm(coeff).inverse()).normalized();
      assign(s, k, value);
      return true;
    }
  }
  return false;
}

std::optional<AtomId> pivot(const State& s, const std::vector<AtomId>& constants) {
  std::set<AtomId> candidates;
  for (const auto& c : s.branch.constraints) {
    for (const auto& [a, k] : c.poly.content().factors())
      if (!known_nonzero(s, a)) candidates.insert(a);
  }
  if (candidates.empty()) {
    for (const auto& c : s.branch.constraints) {
      for (AtomId k : constants) {
        if (s.solved.count(k) || degree_in(c.poly, k) != 1) continue;
        const Polynomial coeff = c.poly.derivative(k);
        if (coeff.size() != 1) continue;
        for (const auto& [a, e] : coeff.terms().front().mono.factors())
          if (!known_nonzero(s, a)) candidates.insert(a);
      }
    }
  }
  for (AtomId k : constants)
    if (candidates.count(k)) return k;
  return std::nullopt;
}

}  // namespace

OrderOutcome ansatz_solve_order(const jet::EvolutionEquation& eq, int p, const SearchConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OrderOutcome out;
  out.p = p;
  const Instance inst = instantiate(p, config);
  const std::set<AtomId> constant_set(inst.constants.begin(), inst.constants.end());
  const RationalForm res = manifold::residual(LinearManifold(inst.alphas), eq);

  std::vector<State> stack;
  stack.push_back(State{Branch{"", constraints_of(res, constant_set), {}}, {}, {}});
  int splits = 0;
  std::vector<std::vector<RationalForm>> seen;
  while (!stack.empty()) {
    State s = std::move(stack.back());
    stack.pop_back();
    ++out.branches;
    std::optional<Witness> witness;
    bool closed = false;
    while (true) {
      if (simplify(s, witness) == Simplified::Contradiction) {
        if (!out.witness) out.witness = witness;
        closed = true;
        break;
      }
      if (s.branch.constraints.empty()) break;
      if (linear_step(s, inst.constants)) continue;
      const auto k = pivot(s, inst.constants);
      if (!k || splits >= config.case_budget) {
        if (k) out.budget_exceeded = true;
        out.remaining.push_back(s.branch);
        closed = true;
        break;
      }
      ++splits;
      const std::string name = info(*k).name;
      State nonzero = s;
      nonzero.branch.id += (nonzero.branch.id.empty() ? "" : "/") + name + "!=0";
      nonzero.branch.assumptions.push_back(name + " != 0");
      nonzero.nonzero.push_back(RationalForm::atom(*k));
      State zero = std::move(s);
      zero.branch.id += (zero.branch.id.empty() ? "" : "/") + name + "=0";
      zero.branch.assumptions.push_back(name + " = 0");
      assign(zero, *k, RationalForm(0L));
      stack.push_back(std::move(nonzero));
      stack.push_back(std::move(zero));
      closed = true;
      break;
    }
    if (closed) continue;

    // every constraint is satisfied: build and re-verify the manifold
    std::vector<RationalForm> alphas;
    try {
      for (const auto& a : inst.alphas) alphas.push_back(expr::substitute(a, s.solved));
    } catch (const DivisionByZeroExpression&) {
      out.notes.push_back("branch " + (s.branch.id.empty() ? std::string("root") : s.branch.id) +
                          " makes a template denominator vanish; discarded");
      continue;
    }
    if (std::find(seen.begin(), seen.end(), alphas) != seen.end()) continue;
    seen.push_back(alphas);
    LinearManifold m(alphas);
    const auto report = verification::verify_invariant_manifold(m, eq);
    if (report.status != verification::Status::Verified) {
      out.notes.push_back("branch " + s.branch.id + " solved the constraints but failed re-verification; discarded");
      continue;
    }
    out.solutions.push_back(std::move(m));
    out.solution_branches.push_back(s.branch.id.empty() ? "root" : s.branch.id);
  }
  if (!out.solutions.empty())
    out.kind = OutcomeKind::Solved;
  else if (!out.remaining.empty())
    out.kind = OutcomeKind::ConstraintsRemain;
  else
    out.kind = OutcomeKind::Inconsistent;
  if (out.budget_exceeded) out.notes.push_back("case budget of " + std::to_string(config.case_budget) + " exceeded");
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SearchOutcome ansatz_solve(const jet::EvolutionEquation& eq, const SearchConfig& config) {
  SearchOutcome result;
  std::vector<int> orders = config.orders;
  if (orders.empty())
    for (int p = 2; p <= order_bound(eq); ++p) orders.push_back(p);
  int s = config.s.value_or(eq.order());
  for (const auto& t : config.templates) {
    for (const auto& b : t.numerator_basis) s = std::max(s, LinearManifold({b}).jet_bound());
    for (const auto& b : t.denominator_basis) s = std::max(s, LinearManifold({b}).jet_bound());
    if (t.fixed) s = std::max(s, LinearManifold({*t.fixed}).jet_bound());
  }
  // the gate runs for every order before any computation
  for (int p : orders)
    if (auto w = enforce_order_bound(eq, p, s)) result.warnings.push_back(*w);
  std::vector<std::future<OrderOutcome>> jobs;
  for (int p : orders) jobs.push_back(std::async(std::launch::async, [&eq, p, &config] { return ansatz_solve_order(eq, p, config); }));
  for (auto& j : jobs) result.orders.push_back(j.get());
  return result;
}

// ---------------------------------------------------------------- output

determining::DeterminingSystem as_system(const Branch& b, int p, const std::string& equation) {
  determining::DeterminingSystem sys;
  sys.p = p;
  sys.equation = equation;
  for (const auto& c : b.constraints) sys.equations.push_back({Monomial{}, c.key, RationalForm(c.poly)});
  return sys;
}

nlohmann::json to_json(const SearchOutcome& o, const jet::EvolutionEquation& eq) {
  nlohmann::json orders = nlohmann::json::array();
  for (const auto& r : o.orders) {
    nlohmann::json j;
    j["p"] = r.p;
    j["outcome"] = to_string(r.kind);
    j["branches"] = r.branches;
    j["budget_exceeded"] = r.budget_exceeded;
    j["elapsed_seconds"] = r.elapsed_seconds;
    nlohmann::json sols = nlohmann::json::array();
    for (std::size_t i = 0; i < r.solutions.size(); ++i) {
      nlohmann::json coeffs = nlohmann::json::array();
      for (const auto& a : r.solutions[i].coefficients()) coeffs.push_back(expr::to_text(a));
      sols.push_back({{"branch", r.solution_branches[i]},
                      {"coefficients", coeffs},
                      {"constraint", expr::to_text(r.solutions[i].constraint())}});
    }
    j["solutions"] = sols;
    if (r.witness)
      j["witness"] = {{"key", expr::to_text(r.witness->key)}, {"coefficient", expr::to_text(r.witness->coefficient)}};
    nlohmann::json rem = nlohmann::json::array();
    for (const auto& b : r.remaining) {
      auto sys = determining::to_json(as_system(b, r.p, eq.text()));
      sys["branch"] = b.id.empty() ? "root" : b.id;
      sys["assumptions"] = b.assumptions;
      rem.push_back(sys);
    }
    j["remaining"] = rem;
    j["notes"] = r.notes;
    orders.push_back(j);
  }
  return {{"equation", eq.text()}, {"warnings", o.warnings}, {"orders", orders}};
}

std::string to_text(const SearchOutcome& o, const jet::EvolutionEquation& eq) {
  std::ostringstream out;
  out << "search: " << eq.text() << "\n";
  for (const auto& w : o.warnings) out << "warning: " << w << "\n";
  for (const auto& r : o.orders) {
    out << "p = " << r.p << ": " << to_string(r.kind) << " (" << r.branches << " branches)\n";
    for (std::size_t i = 0; i < r.solutions.size(); ++i)
      out << "  [" << r.solution_branches[i] << "] H = " << expr::to_text(r.solutions[i].constraint()) << "\n";
    if (r.kind == OutcomeKind::Inconsistent && r.witness)
      out << "  witness " << expr::to_text(r.witness->key) << ": " << expr::to_text(r.witness->coefficient)
          << " = 0\n";
    for (const auto& b : r.remaining) {
      out << "  remaining [" << (b.id.empty() ? "root" : b.id) << "] " << b.constraints.size() << " constraints\n";
      for (const auto& c : b.constraints)
        out << "    [" << expr::to_text(c.key) << "] " << expr::to_text(RationalForm(c.poly)) << " = 0\n";
    }
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
  }
  return out.str();
}

}  // namespace laxkit::search
