#include "laxkit/cli/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "laxkit/corpus/corpus.hpp"
#include "laxkit/determining/determining.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"
#include "laxkit/search/search.hpp"

namespace laxkit::cli {
namespace {

using nlohmann::json;
using verification::Status;
using verification::VerificationReport;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string format = "text";
  std::uint64_t seed = 1;
  bool timing = false;
  std::vector<std::string> params;  // extra parameter names for inline text
};

// Bumped whenever a field is renamed or removed.
constexpr int kSchemaVersion = 1;

expr::ParseContext base_context(const Globals& g) {
  expr::ParseContext ctx;
  for (const auto& p : g.params) ctx.declare_parameter(p);
  return ctx;
}

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("elapsed_seconds");
    for (auto& item : j.items()) strip_timing(item.value());
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

void emit(std::ostream& out, json j, const Globals& g) {
  if (!g.timing) strip_timing(j);
  if (j.is_object()) j["schema_version"] = kSchemaVersion;
  out << j.dump(2) << "\n";
}

// "u_t = ..." inline, otherwise a corpus id.
jet::EvolutionEquation resolve_equation(const std::string& spec, const Globals& g) {
  if (spec.find('=') != std::string::npos) return jet::EvolutionEquation::parse(spec, base_context(g));
  try {
    return corpus::equation(corpus::entry(spec));
  } catch (const std::out_of_range&) {
    throw UsageError("'" + spec + "' is neither an equation \"u_t = ...\" nor a corpus id");
  }
}

struct LoadedManifold {
  std::string subject;
  std::string equation;  // as named by the document or the corpus
  manifold::ManifoldDocument doc;
};

LoadedManifold load_manifold(const std::string& spec) {
  namespace fs = std::filesystem;
  LoadedManifold m;
  if (fs::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::stringstream text;
    text << in.rdbuf();
    if (!in) throw UsageError("cannot read '" + spec + "'");
    m.doc = manifold::parse_manifold_document(text.str());
    m.subject = fs::path(spec).filename().string();
    m.equation = m.doc.equation;
    return m;
  }
  const auto slash = spec.find('/');
  if (slash == std::string::npos)
    throw UsageError("'" + spec + "' is neither a readable file nor a corpus item <entry>/<manifold>");
  try {
    const auto& entry = corpus::entry(spec.substr(0, slash));
    const auto& item = corpus::manifold_entry(entry.id, spec.substr(slash + 1));
    m.doc = manifold::parse_manifold_document(item.document);
    m.subject = spec;
    m.equation = entry.id;
  } catch (const std::out_of_range&) {
    throw UsageError("no file or corpus item '" + spec + "'");
  }
  return m;
}

std::string constraint_latex(const manifold::LinearManifold& m) {
  return "H^{" + std::to_string(m.order()) + "} = " + expr::to_latex(m.constraint());
}

expr::ParseContext context_for(const jet::EvolutionEquation& eq, const Globals& g) {
  expr::ParseContext ctx = base_context(g);
  ctx.declare_dependent(eq.depvar());
  return ctx;
}

// ---------------------------------------------------------------- commands

int linearize(const std::string& eq_spec, const Globals& g, std::ostream& out) {
  const auto eq = resolve_equation(eq_spec, g);
  const auto lin = jet::linearize(eq);
  if (g.format == "json") {
    json partials = json::array();
    for (const auto& p : lin.partials) partials.push_back(expr::to_text(p));
    emit(out, {{"equation", eq.text()}, {"linearized", "v_t = " + expr::to_text(lin.rhs_v)}, {"rhs", expr::to_text(lin.rhs_v)},
               {"partials", partials}},
         g);
  } else if (g.format == "latex") {
    out << "v_t = " << expr::to_latex(lin.rhs_v) << "\n";
  } else {
    out << "v_t = " << expr::to_text(lin.rhs_v) << "\n";
  }
  return Success;
}

int verify(verification::CheckKind kind, const std::string& manifold_spec, const std::string& eq_spec, bool spot,
           const Globals& g, std::ostream& out, std::ostream& err) {
  const LoadedManifold loaded = load_manifold(manifold_spec);
  std::string eq_text = eq_spec.empty() ? loaded.equation : eq_spec;
  if (eq_text.empty()) throw UsageError("no equation: pass --eq or add an 'equation:' line to the manifold");
  if (!eq_spec.empty() && !loaded.equation.empty() && eq_spec != loaded.equation)
    err << "note: checking against --eq, not the manifold's own equation '" << loaded.equation << "'\n";
  const auto eq = resolve_equation(eq_text, g);
  const auto m = manifold::build_manifold(loaded.doc, context_for(eq, g));

  VerificationReport r;
  switch (kind) {
    case verification::CheckKind::InvariantManifold: r = verification::verify_invariant_manifold(m, eq, loaded.subject); break;
    case verification::CheckKind::ConditionalSymmetry: r = verification::verify_gcs(m, eq, loaded.subject); break;
    case verification::CheckKind::LaxPair: r = verification::verify_lax_pair(m, eq, loaded.subject); break;
  }
  std::optional<bool> numeric;
  if (spot) numeric = verification::numeric_spotcheck(r.residual, {.trials = 10, .seed = g.seed});

  if (g.format == "json") {
    json j = verification::to_json(r);
    j["equation"] = eq.text();
    j["constraint"] = expr::to_text(m.constraint());
    if (numeric) j["numeric_spotcheck"] = *numeric;
    emit(out, j, g);
  } else if (g.format == "latex") {
    out << "% " << r.subject << " " << verification::to_string(r.kind) << ": " << verification::to_string(r.status) << "\n";
    out << "\\begin{equation}\n" << constraint_latex(m) << "\n\\end{equation}\n";
    if (r.witness)
      out << "% witness " << expr::to_latex(*r.witness) << ": " << expr::to_latex(*r.witness_coefficient) << "\n";
  } else {
    out << verification::to_text_table({r}, g.timing);
    for (const auto& s : r.sub_checks)
      out << "  " << s.name << ": " << verification::to_string(s.status) << " (" << s.detail << ")\n";
    if (r.witness_coefficient) out << "  witness coefficient: " << expr::to_text(*r.witness_coefficient) << "\n";
    if (numeric) out << "  numeric spot check: " << (*numeric ? "zero" : "nonzero") << "\n";
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
  }
  return r.status == Status::Verified ? Success : Refuted;
}

struct DeterminingArgs {
  std::string eq;
  int p = 1;
  std::optional<int> s;
  bool no_x = false;
  bool no_t = false;
  std::string prefix = "a";
};

int determining_system(const DeterminingArgs& a, const Globals& g, std::ostream& out) {
  const auto eq = resolve_equation(a.eq, g);
  const auto sys = determining::generate(eq, {a.p, a.s, !a.no_x, !a.no_t, a.prefix});
  if (g.format == "json")
    emit(out, determining::to_json(sys), g);
  else if (g.format == "latex")
    out << determining::to_latex(sys);
  else
    out << determining::to_text(sys);
  return Success;
}

struct SearchArgs {
  std::string eq;
  std::vector<int> orders;
  std::optional<int> s;
  std::vector<std::string> numerator;
  std::vector<std::string> denominator;
  int budget = 64;
  bool scan = false;
  bool top_term = false;
};

int scan(const jet::EvolutionEquation& eq, const SearchArgs& a, const Globals& g, std::ostream& out) {
  const int s = a.s.value_or(eq.order());
  std::vector<int> orders = a.orders;
  if (orders.empty())
    for (int p = 2; p <= search::order_bound(eq); ++p) orders.push_back(p);
  std::vector<std::string> warnings;
  for (int p : orders)
    if (auto w = search::enforce_order_bound(eq, p, s)) warnings.push_back(*w);
  bool obstructed = false;
  json rows = json::array();
  std::ostringstream text;
  for (const auto& w : warnings) text << "warning: " << w << "\n";
  for (int p : orders) {
    const auto w = search::obstruction_scan(eq, p, s);
    obstructed = obstructed || w.has_value();
    rows.push_back({{"p", p},
                    {"s", s},
                    {"witness", w ? json(expr::to_text(w->key)) : json()},
                    {"coefficient", w ? json(expr::to_text(w->coefficient)) : json()}});
    text << "p = " << p << ", s = " << s << ": ";
    if (w)
      text << "obstructed, [" << expr::to_text(w->key) << "] " << expr::to_text(w->coefficient) << " = 0\n";
    else
      text << "no obstruction\n";
  }
  if (g.format == "json")
    emit(out, {{"equation", eq.text()}, {"warnings", warnings}, {"scan", rows}}, g);
  else
    out << text.str();
  return obstructed ? Refuted : Success;
}

int top_term(const jet::EvolutionEquation& eq, const SearchArgs& a, const Globals& g, std::ostream& out) {
  if (a.orders.empty()) throw UsageError("--top-term needs --p");
  json rows = json::array();
  for (int p : a.orders) {
    const auto t = search::top_quadratic_term(eq, p);
    if (g.format == "json") {
      json layers = json::array();
      for (const auto& l : t.layers)
        layers.push_back({{"key", expr::to_text(l.key)}, {"coefficient", expr::to_text(l.coefficient)},
                          {"free_of_unknowns", l.free_of_unknowns}});
      rows.push_back({{"p", p},
                      {"key", expr::to_text(t.key)},
                      {"coefficient", expr::to_text(t.coefficient)},
                      {"leading", expr::to_text(t.leading)},
                      {"predicted", expr::to_text(t.predicted)},
                      {"layers", layers}});
    } else {
      out << "p = " << p << ": [" << expr::to_text(t.key) << "] leading " << expr::to_text(t.leading) << ", predicted "
          << expr::to_text(t.predicted) << "\n";
      for (const auto& l : t.layers)
        if (l.free_of_unknowns)
          out << "  [" << expr::to_text(l.key) << "] " << expr::to_text(l.coefficient) << "\n";
    }
  }
  if (g.format == "json") emit(out, {{"equation", eq.text()}, {"top_terms", rows}}, g);
  return Success;
}

int search_cmd(const SearchArgs& a, const Globals& g, std::ostream& out) {
  const auto eq = resolve_equation(a.eq, g);
  if (a.top_term) return top_term(eq, a, g, out);
  if (a.scan) return scan(eq, a, g, out);

  search::SearchConfig config;
  config.orders = a.orders;
  config.s = a.s;
  config.case_budget = a.budget;
  if (!a.numerator.empty()) {
    const auto ctx = context_for(eq, g);
    search::CoefficientTemplate t;
    for (const auto& b : a.numerator) t.numerator_basis.push_back(expr::normalize(expr::parse_expression(b, ctx)));
    for (const auto& b : a.denominator) t.denominator_basis.push_back(expr::normalize(expr::parse_expression(b, ctx)));
    config.templates.push_back(std::move(t));
  } else if (!a.denominator.empty()) {
    throw UsageError("--denominator needs --numerator");
  }
  const auto outcome = search::ansatz_solve(eq, config);
  if (g.format == "json") {
    emit(out, search::to_json(outcome, eq), g);
  } else if (g.format == "latex") {
    for (const auto& r : outcome.orders) {
      out << "% p = " << r.p << ": " << search::to_string(r.kind) << "\n";
      for (const auto& m : r.solutions) out << "\\begin{equation}\n" << constraint_latex(m) << "\n\\end{equation}\n";
    }
  } else {
    out << search::to_text(outcome, eq);
    if (g.timing)
      for (const auto& r : outcome.orders)
        out << "p = " << r.p << ": " << std::fixed << std::setprecision(3) << r.elapsed_seconds << " s\n";
  }
  for (const auto& r : outcome.orders)
    if (r.kind != search::OutcomeKind::Solved) return Refuted;
  return Success;
}

int corpus_list(const Globals& g, std::ostream& out) {
  const auto items = corpus::list();
  if (g.format == "json") {
    json rows = json::array();
    for (const auto& e : items) {
      json ids = json::array();
      for (const auto& m : corpus::entry(e.id).manifolds) ids.push_back(m.id);
      rows.push_back({{"id", e.id}, {"name", e.name}, {"equation", corpus::entry(e.id).equation}, {"order", e.order}, {"manifolds", ids}});
    }
    emit(out, rows, g);
  } else if (g.format == "latex") {
    out << "\\begin{tabular}{llrr}\nid & name & $n$ & manifolds \\\\\n\\hline\n";
    for (const auto& e : items) out << e.id << " & " << e.name << " & " << e.order << " & " << e.manifolds << " \\\\\n";
    out << "\\end{tabular}\n";
  } else {
    for (const auto& e : items) {
      out << std::left << std::setw(6) << e.id << " " << std::setw(34) << e.name << " n = " << e.order << "  "
          << corpus::entry(e.id).equation << "\n";
      for (const auto& m : corpus::entry(e.id).manifolds)
        out << "       " << e.id << "/" << std::setw(6) << m.id << " p = " << m.p << "  " << m.description << "\n";
    }
  }
  return Success;
}

std::vector<const corpus::CorpusEntry*> selected_entries(const std::string& id) {
  std::vector<const corpus::CorpusEntry*> out;
  if (id.empty()) {
    for (const auto& e : corpus::entries()) out.push_back(&e);
    return out;
  }
  try {
    out.push_back(&corpus::entry(id));
  } catch (const std::out_of_range&) {
    throw UsageError("no corpus entry '" + id + "'");
  }
  return out;
}

int corpus_run(const std::string& entry_id, bool variants, bool spot, const Globals& g, std::ostream& out) {
  std::vector<corpus::ItemResult> results;
  if (entry_id.empty()) {
    results = corpus::run_all(variants);
  } else {
    const auto& e = *selected_entries(entry_id).front();
    std::vector<std::future<corpus::ItemResult>> jobs;
    for (const auto* list : {&e.manifolds, &e.variants}) {
      if (list == &e.variants && !variants) continue;
      for (const auto& m : *list) jobs.push_back(std::async(std::launch::async, [&e, &m] { return corpus::run_item(e, m); }));
    }
    for (auto& j : jobs) results.push_back(j.get());
  }

  std::vector<std::vector<bool>> numeric(results.size());
  if (spot) {
    for (std::size_t i = 0; i < results.size(); ++i)
      for (const auto& r : results[i].reports)
        numeric[i].push_back(verification::numeric_spotcheck(r.residual, {.trials = 10, .seed = g.seed}));
  }
  // numeric agreement with the exact status; advisory, never changes a status
  auto concordant = [&](std::size_t i) {
    for (std::size_t k = 0; k < numeric[i].size(); ++k)
      if (numeric[i][k] != (results[i].reports[k].status == Status::Verified)) return false;
    return true;
  };

  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  if (g.format == "json") {
    json items = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      json j = corpus::to_json(results[i]);
      if (spot) j["numeric_concordance"] = concordant(i);
      items.push_back(j);
    }
    emit(out, {{"items", items}, {"summary", {{"items", results.size()}, {"as_expected", passed}}}}, g);
  } else if (g.format == "latex") {
    out << "\\begin{tabular}{llll}\nitem & invariant & symmetry & Lax pair \\\\\n\\hline\n";
    for (const auto& r : results) {
      out << r.entry << "/" << r.manifold;
      for (const auto& rep : r.reports) out << " & " << verification::to_string(rep.status);
      out << " \\\\\n";
    }
    out << "\\end{tabular}\n";
  } else {
    std::vector<VerificationReport> all;
    for (const auto& r : results) all.insert(all.end(), r.reports.begin(), r.reports.end());
    out << verification::to_text_table(all, g.timing);
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (const auto& p : results[i].problems) out << results[i].entry << "/" << results[i].manifold << ": " << p << "\n";
      if (spot && !concordant(i))
        out << results[i].entry << "/" << results[i].manifold << ": numeric spot check disagrees\n";
    }
    out << passed << " of " << results.size() << " items as expected\n";
  }
  bool ok = passed == results.size();
  for (std::size_t i = 0; i < results.size(); ++i) ok = ok && concordant(i);
  return ok ? Success : Refuted;
}

int corpus_export(const std::string& entry_id, bool variants, const std::string& dir, std::ostream& out) {
  for (const auto* e : selected_entries(entry_id)) {
    for (const auto& [name, text] : corpus::export_entry(*e, variants)) {
      if (dir.empty()) {
        out << "# ---- " << name << "\n" << text << "\n";
        continue;
      }
      const auto path = std::filesystem::path(dir) / name;
      std::ofstream f(path);
      f << text;
      if (!f) throw UsageError("cannot write '" + path.string() + "'");
      out << path.string() << "\n";
    }
  }
  return Success;
}

int spotcheck_cmd(const std::string& text, int trials, double tolerance, const Globals& g, std::ostream& out) {
  const auto e = expr::parse_expression(text, base_context(g));
  const bool zero = verification::numeric_spotcheck(e, {.trials = trials, .seed = g.seed, .tolerance = tolerance});
  if (g.format == "json")
    emit(out, {{"expression", text}, {"trials", trials}, {"seed", g.seed}, {"zero", zero}}, g);
  else
    out << (zero ? "zero" : "nonzero") << " (" << trials << " trials, seed " << g.seed << ")\n";
  return zero ? Success : Refuted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lax pairs from invariant manifolds of linearized evolution equations", "laxkit"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&g](CLI::App* c) {
    c->add_option("--format", g.format, "text, json or latex")->check(CLI::IsMember({"text", "json", "latex"}));
    c->add_option("--seed", g.seed, "seed of the numeric spot check");
    c->add_flag("--timing", g.timing, "report elapsed times (output is then not reproducible)");
    c->add_option("--param", g.params, "declare a parameter name for inline equations and expressions (repeatable)");
  };

  std::string eq, manifold_spec, entry_id, dir, expression;
  bool spot = false, variants = false;

  auto* lin = app.add_subcommand("linearize", "print the linearized equation v_t = sum (df/du_i) v_i");
  lin->add_option("--eq", eq, "\"u_t = ...\" or a corpus id")->required();

  std::vector<std::pair<CLI::App*, verification::CheckKind>> verifiers;
  for (const auto& [name, kind, what] :
       {std::tuple{"verify-manifold", verification::CheckKind::InvariantManifold, "invariance of v_p = sum a_j v_j"},
        std::tuple{"verify-gcs", verification::CheckKind::ConditionalSymmetry, "H d/dv as a conditional symmetry"},
        std::tuple{"verify-laxpair", verification::CheckKind::LaxPair, "compatibility of the resulting Lax pair"}}) {
    auto* c = app.add_subcommand(name, std::string("check ") + what);
    c->add_option("--manifold", manifold_spec, "manifold file or corpus item <entry>/<id>")->required();
    c->add_option("--eq", eq, "equation, overriding the manifold's own");
    c->add_flag("--spotcheck", spot, "also evaluate the residual at random points");
    verifiers.emplace_back(c, kind);
  }

  DeterminingArgs det;
  auto* dsys = app.add_subcommand("determining-system", "split the residual of a general order-p manifold");
  dsys->add_option("--eq", det.eq, "\"u_t = ...\" or a corpus id")->required();
  dsys->add_option("--p", det.p, "manifold order")->required()->check(CLI::PositiveNumber);
  dsys->add_option("--s", det.s, "highest jet the coefficients depend on (default: the equation order)")
      ->check(CLI::NonNegativeNumber);
  dsys->add_flag("--no-x", det.no_x, "coefficients independent of x");
  dsys->add_flag("--no-t", det.no_t, "coefficients independent of t");
  dsys->add_option("--prefix", det.prefix, "name of the unknown coefficients");

  SearchArgs sa;
  auto* srch = app.add_subcommand("search", "look for manifolds of a given form");
  srch->add_option("--eq", sa.eq, "\"u_t = ...\" or a corpus id")->required();
  srch->add_option("--p", sa.orders, "orders (default 2..2n+1)")->check(CLI::PositiveNumber);
  srch->add_option("--s", sa.s, "jet bound of the coefficients (default n)")->check(CLI::NonNegativeNumber);
  srch->add_option("--numerator", sa.numerator, "numerator basis of every coefficient (default: constants)");
  srch->add_option("--denominator", sa.denominator, "denominator basis; the first element has coefficient 1");
  srch->add_option("--budget", sa.budget, "case-split budget per order")->check(CLI::NonNegativeNumber);
  auto* scan_flag = srch->add_flag("--scan", sa.scan, "only look for a split equation that cannot hold");
  srch->add_flag("--top-term", sa.top_term, "coefficient of v_{p-1} u_{2n+1}, for p >= 2n+2")->excludes(scan_flag);

  auto* corp = app.add_subcommand("corpus", "the embedded examples");
  corp->require_subcommand(1);
  auto* clist = corp->add_subcommand("list", "list entries and manifolds");
  auto* crun = corp->add_subcommand("run", "run every check on every manifold");
  crun->add_option("--entry", entry_id, "restrict to one entry");
  crun->add_flag("--variants", variants, "include transcriptions expected to fail");
  crun->add_flag("--spotcheck", spot, "compare with numeric evaluation of every residual");
  auto* cexp = corp->add_subcommand("export", "write manifolds in the manifold file format");
  cexp->add_option("--entry", entry_id, "restrict to one entry");
  cexp->add_flag("--variants", variants, "include transcriptions expected to fail");
  cexp->add_option("--out", dir, "directory to write into (default: standard output)")->check(CLI::ExistingDirectory);

  int trials = 10;
  double tolerance = 1e-20;
  auto* spc = app.add_subcommand("spotcheck", "evaluate an expression at random rational points");
  spc->add_option("--expr", expression, "expression expected to vanish")->required();
  spc->add_option("--trials", trials, "number of points")->check(CLI::PositiveNumber);
  spc->add_option("--tolerance", tolerance, "relative tolerance");

  add_globals(&app);
  for (auto* c : {lin, dsys, srch, clist, crun, cexp, spc}) add_globals(c);
  for (auto& [c, kind] : verifiers) add_globals(c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : UsageFailure;
  }

  try {
    if (*lin) return linearize(eq, g, out);
    for (auto& [c, kind] : verifiers)
      if (*c) return verify(kind, manifold_spec, eq, spot, g, out, err);
    if (*dsys) return determining_system(det, g, out);
    if (*srch) return search_cmd(sa, g, out);
    if (*clist) return corpus_list(g, out);
    if (*crun) return corpus_run(entry_id, variants, spot, g, out);
    if (*cexp) return corpus_export(entry_id, variants, dir, out);
    if (*spc) return spotcheck_cmd(expression, trials, tolerance, g, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return UsageFailure;
  } catch (const OrderBoundExceeded& e) {
    err << "rejected: " << e.what() << "\n";
    return UsageFailure;
  } catch (const DegeneratePoint& e) {
    err << "spot check failed: " << e.what() << "\n";
    return InternalFailure;  // undecided, not a refutation
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return UsageFailure;
  } catch (const UnknownSymbol& e) {
    err << "error: " << e.what() << "\n";
    return UsageFailure;
  } catch (const InvalidEquation& e) {
    err << "error: invalid equation: " << e.what() << "\n";
    return UsageFailure;
  } catch (const InvalidManifold& e) {
    err << "error: invalid manifold: " << e.what() << "\n";
    return UsageFailure;
  } catch (const OrderTooLow& e) {
    err << "error: " << e.what() << "\n";
    return UsageFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return InternalFailure;
  }
  err << "internal error: no command ran\n";
  return InternalFailure;
}

}  // namespace laxkit::cli
