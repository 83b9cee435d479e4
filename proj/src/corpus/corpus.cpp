#include "laxkit/corpus/corpus.hpp"

#include <future>
#include <stdexcept>

#include "laxkit/errors.hpp"

namespace laxkit::corpus {

using verification::Status;

namespace {

ManifoldEntry item(std::string id, std::string description, int p, int s, std::string doc) {
  ManifoldEntry m;
  m.id = std::move(id);
  m.description = std::move(description);
  m.p = p;
  m.s = s;
  m.document = std::move(doc);
  return m;
}

CorpusEntry kdv() {
  CorpusEntry e;
  e.id = "kdv";
  e.name = "Korteweg-de Vries";
  e.equation = "u_t = u*u_x + u_xxx";
  e.manifolds.push_back(item("p3", "third-order manifold with spectral parameter", 3, 2, R"(equation: kdv
order: 3
parameters: lambda
H = v_xxx - u_xx/u_x*v_xx + (2*u/3 + lambda)*v_x
    - (2*u*u_xx/(3*u_x) + lambda*u_xx/u_x - u_x)*v
)"));
  e.manifolds.push_back(item("p4", "fourth-order manifold; the only one for 4 <= p <= 7", 4, 3, R"(equation: kdv
order: 4
parameters: lambda
H = v[4] - u_xxx/u_xx*v_xxx + (2/3*u - lambda)*v_xx
    + (5/3*u_x + u_xxx/u_xx*(lambda - 2/3*u))*v_x
    - (u_x*u_xxx/u_xx - 4/3*u_xx)*v
)"));
  e.notes.push_back("no manifold of this form exists for p = 2 or 5 <= p <= 7 with coefficients in x, t, u, ..., u_xxx");
  return e;
}

CorpusEntry mkdv() {
  CorpusEntry e;
  e.id = "mkdv";
  e.name = "modified Korteweg-de Vries";
  e.equation = "u_t = u_xxx - u^2*u_x/6";
  e.manifolds.push_back(item("p4-1", "fourth order, singular where u*u_x = 3*u_xx", 4, 3, R"(equation: mkdv
order: 4
parameters: lambda
H = v[4] - v_xxx*(u_x*u^2 + 3*u_x^2 - 9*u_xxx)/(3*(u*u_x - 3*u_xx))
    - v_xx*(lambda + u^2/9 + (3*u_xxx*u - u_xx*u^2 - 3*u_x*u_xx)/(3*(u*u_x - 3*u_xx)))
    + v_x*((9*lambda*u_x*u^2 + 27*lambda*u_x^2 - 81*lambda*u_xxx + u_x*u^4 + 3*u_x^2*u^2 - 9*u_xxx*u^2)/(27*(u*u_x - 3*u_xx))
           - 5/9*u*u_x)
    - v/(27*(u*u_x - 3*u_xx))*(9*lambda*u_xx*u^2 - 27*lambda*u_xxx*u + 27*lambda*u_x*u_xx + u_xx*u^4
           - 3*u_x^2*u^3 - 3*u_xxx*u^3 + 15*u_x*u_xx*u^2 - 36*u_xx^2*u + 27*u_x*u_xxx*u - 27*u_x^2*u_xx)
)"));
  e.manifolds.push_back(item("p4-2", "fourth order, singular where u*u_x = -3*u_xx", 4, 3, R"(equation: mkdv
order: 4
parameters: lambda
H = v[4] + v_xxx*(u_x*u^2 - 3*u_x^2 - 9*u_xxx)/(3*(u*u_x + 3*u_xx))
    - v_xx*(lambda + u^2/9 + (u_xx*u^2 + 3*u_xxx*u - 3*u_x*u_xx)/(3*(u*u_x + 3*u_xx)))
    - v_x*((9*lambda*u_x*u^2 - 27*lambda*u_x^2 - 81*lambda*u_xxx + u_x*u^4 - 3*u_x^2*u^2 - 9*u_xxx*u^2)/(27*(u*u_x + 3*u_xx))
           + 5/9*u*u_x)
    + v/(27*(u*u_x + 3*u_xx))*(9*lambda*u_xx*u^2 + 27*lambda*u_xxx*u - 27*lambda*u_x*u_xx + u_xx*u^4
           - 3*u_x^2*u^3 + 3*u_xxx*u^3 - 15*u_x*u_xx*u^2 - 36*u_xx^2*u + 27*u_x*u_xxx*u - 27*u_x^2*u_xx)
)"));
  e.related.push_back({"usual form", "w_t = w_xxx - w^2*w_x/6",
                       "same equation; the dependent variable is called u here so the manifolds read as written"});
  e.related.push_back({"KdV", "u_t = u*u_x + u_xxx",
                       "Miura-type map u = -w^2/6 + w_x takes solutions w of this equation to KdV solutions (not executed)"});
  return e;
}

const char* kStoDelta = "(exp(w)*w_x^2 + exp(w)*w_xx + lambda)";

CorpusEntry sto() {
  CorpusEntry e;
  e.id = "sto";
  e.name = "Sharma-Tasso-Olver, potential form";
  e.equation = "w_t = -(w_x^3 + 3*w_x*w_xx + w_xxx)";
  e.manifolds.push_back(item("p2-1", "second order", 2, 3, R"(equation: sto
order: 2
parameters: lambda
H = v_xx - v_x*(lambda - w_x + (2*w_x*w_xx + w_xxx)/(w_x^2 + w_xx))
    - v/(w_x^2 + w_xx)*(w_xx*(w_x^2 - 2*lambda*w_x - w_xx) + w_xxx*(w_x - lambda))
)"));
  e.manifolds.push_back(item("p2-2", "second order", 2, 3, R"(equation: sto
order: 2
parameters: lambda
H = v_xx + v_x*(w_x + (w_xx*(2*w_x - lambda) + w_xxx)/(w_x*(lambda - w_x) - w_xx + lambda))
    + v/(w_x*(lambda - w_x) - w_xx + lambda)*(w_xx*(w_x^2 - w_xx + lambda) + w_x*w_xxx)
)"));
  e.manifolds.push_back(item("p2-3", "second order, with exp(w)", 2, 3, R"(equation: sto
order: 2
parameters: lambda
H = v_xx + v_x/(lambda*w_x^2 + w_xx*(lambda - exp(w)))*(lambda*w_x^3 - lambda*w_x*w_xx - lambda*w_xxx + exp(w)*w_xxx)
    + lambda*v/(lambda*w_x^2 + w_xx*(lambda - exp(w)))*(w_xx^2 - w_x^2*w_xx - w_x*w_xxx)
)"));

  ManifoldEntry p31 = item("p3-1", "third order; denominator sign corrected", 3, 3, R"(equation: sto
order: 3
parameters: lambda
note: denominator written as lambda*w_x - w_x^2 - w_xx; with the opposite sign (variant p3-1-as-printed) the check fails
H = v_xxx + v_xx*(2*w_x^2*(lambda - w_x) - lambda*w_xx + w_xxx)/(lambda*w_x - w_x^2 - w_xx)
    + v_x*(lambda*w_x^3 + w_x*(lambda*w_xx + 2*w_xxx) - w_x^4 - 3*w_xx^2)/(lambda*w_x - w_x^2 - w_xx)
    + v*(lambda*(w_x^2 - w_xx)*w_xx + lambda*w_x*w_xxx)/(lambda*w_x - w_x^2 - w_xx)
)");
  p31.notes.push_back("every coefficient has the opposite sign of the printed transcription");
  e.manifolds.push_back(p31);
  e.manifolds.push_back(item("p3-2", "third order, no v term", 3, 3, R"(equation: sto
order: 3
parameters: lambda
H = v_xxx + v_xx*(w_x*(w_x + lambda)*(2*w_x + lambda) - w_xxx)/(w_x*(w_x + lambda) + w_xx)
    + v_x*(2*lambda*w_x^3 + lambda^2*(w_x^2 - w_xx) - w_xxx*(2*w_x + lambda) + w_x^4 + 3*w_xx^2)/(w_x*(w_x + lambda) + w_xx)
)"));
  e.manifolds.push_back(item("p3-3", "third order", 3, 3, R"(equation: sto
order: 3
parameters: lambda
H = v_xxx + v_xx*(2*w_x^3 - w_xxx)/(w_x^2 + w_xx)
    + v_x*(lambda*w_x^2 + w_xx*(3*w_xx + lambda) + w_x^4 - 2*w_xxx*w_x)/(w_x^2 + w_xx)
    - v*lambda*(2*w_x*w_xx + w_xxx)/(w_x^2 + w_xx)
)"));
  e.manifolds.push_back(item("p3-4", "third order, no v term", 3, 3, R"(equation: sto
order: 3
parameters: lambda
H = v_xxx - v_xx*(2*lambda*w_x - 2*w_x^3 + w_xxx)/(w_xx + w_x^2 - lambda)
    - v_x*(4*lambda*w_xx + 2*lambda*w_x^2 - w_x^4 + 2*w_xxx*w_x - 3*w_xx^2 - lambda^2)/(w_xx + w_x^2 - lambda)
)"));
  ManifoldEntry p35 = item("p3-5", "third order, with exp(w); the constant in the denominator equals lambda", 3, 3,
                           std::string(R"(equation: sto
order: 3
parameters: lambda
note: denominator D = exp(w)*w_x^2 + exp(w)*w_xx + lambda; an independent constant there fails (variant p3-5-free-constant)
H = v_xxx + v_xx/D*(3*lambda*w_x + exp(w)*(2*w_x^3 - w_xxx))
    + v_x/D*(3*lambda*(w_x^2 + w_xx) + exp(w)*(w_x^4 - 2*w_xxx*w_x + 3*w_xx^2))
    + v/D*(lambda*(w_x^3 + 3*w_xx*w_x + w_xxx))
)"));
  // the document grammar has no let-bindings; spell D out
  for (std::size_t at; (at = p35.document.find("/D*")) != std::string::npos;)
    p35.document.replace(at, 3, std::string("/") + kStoDelta + "*");
  p35.notes.push_back("verifies only when the constant added in the denominator is the spectral parameter itself");
  e.manifolds.push_back(p35);
  e.manifolds.push_back(item("p3-6", "third order, with exp(w), no v term", 3, 3, R"(equation: sto
order: 3
parameters: lambda
H = v_xxx + v_xx*(w_xxx*(lambda*exp(w) - 1) - lambda*exp(w)*w_xx*w_x + 2*w_x^3)/(w_x^2 - w_xx*(lambda*exp(w) - 1))
    + v_x*(w_xxx*w_x*(lambda*exp(w) - 2) - w_xx^2*(2*lambda*exp(w) - 3) + w_x^4)/(w_x^2 - w_xx*(lambda*exp(w) - 1))
)"));
  ManifoldEntry p37 = item("p3-7", "third order without a spectral parameter", 3, 3, R"(equation: sto
order: 3
H = v_xxx + v_xx*(2*w_x^3 - w_xxx)/(w_x^2 + w_xx)
    + v_x*(w_x^4 - 2*w_xxx*w_x + 3*w_xx^2)/(w_x^2 + w_xx)
)");
  p37.expect_no_spectral_parameter = true;
  p37.notes.push_back("an invariant manifold, but with no free parameter it gives no true Lax pair");
  e.manifolds.push_back(p37);

  ManifoldEntry v1 = item("p3-1-as-printed", "p3-1 with the printed denominator w_xx + w_x^2 - lambda*w_x", 3, 3,
                          R"(equation: sto
order: 3
parameters: lambda
H = v_xxx + v_xx*(2*w_x^2*(lambda - w_x) - lambda*w_xx + w_xxx)/(w_xx + w_x^2 - lambda*w_x)
    + v_x*(lambda*w_x^3 + w_x*(lambda*w_xx + 2*w_xxx) - w_x^4 - 3*w_xx^2)/(w_xx + w_x^2 - lambda*w_x)
    + v*(lambda*(w_x^2 - w_xx)*w_xx + lambda*w_x*w_xxx)/(w_xx + w_x^2 - lambda*w_x)
)");
  v1.expected = Status::Refuted;
  e.variants.push_back(v1);
  ManifoldEntry v5 = item("p3-5-free-constant", "p3-5 with an independent constant c2 in the denominator", 3, 3,
                          R"(equation: sto
order: 3
parameters: lambda c2
H = v_xxx + v_xx/(exp(w)*w_x^2 + exp(w)*w_xx + c2)*(3*lambda*w_x + exp(w)*(2*w_x^3 - w_xxx))
    + v_x/(exp(w)*w_x^2 + exp(w)*w_xx + c2)*(3*lambda*(w_x^2 + w_xx) + exp(w)*(w_x^4 - 2*w_xxx*w_x + 3*w_xx^2))
    + v/(exp(w)*w_x^2 + exp(w)*w_xx + c2)*(lambda*(w_x^3 + 3*w_xx*w_x + w_xxx))
)");
  v5.expected = Status::Refuted;
  e.variants.push_back(v5);

  e.related.push_back({"original form", "u_t = -gamma*(3*u^2*u_x + 3*u_x^2 + 3*u*u_xx + u_xxx)",
                       "u = w_x and t rescaled by gamma, integrated once with zero constant, gives the potential form"});
  e.notes.push_back("manifolds of order 4 to 7 are not catalogued");
  return e;
}

CorpusEntry heat() {
  CorpusEntry e;
  e.id = "heat";
  e.name = "heat equation";
  e.equation = "u_t = u_xx";
  e.manifolds.push_back(item("p2", "two-parameter constant-coefficient family", 2, -1, R"(equation: heat
order: 2
parameters: lambda mu
a0 = lambda
a1 = mu
)"));
  e.notes.push_back("linear; every constant-coefficient manifold is invariant");
  return e;
}

}  // namespace

const std::vector<CorpusEntry>& entries() {
  static const std::vector<CorpusEntry> all{kdv(), mkdv(), sto(), heat()};
  return all;
}

const CorpusEntry& entry(std::string_view id) {
  for (const auto& e : entries())
    if (e.id == id) return e;
  throw std::out_of_range("no corpus entry '" + std::string(id) + "'");
}

const ManifoldEntry& manifold_entry(std::string_view entry_id, std::string_view manifold_id) {
  const auto& e = entry(entry_id);
  for (const auto* list : {&e.manifolds, &e.variants})
    for (const auto& m : *list)
      if (m.id == manifold_id) return m;
  throw std::out_of_range("no manifold '" + std::string(manifold_id) + "' in corpus entry '" + e.id + "'");
}

jet::EvolutionEquation equation(const CorpusEntry& e) { return jet::EvolutionEquation::parse(e.equation); }

manifold::LinearManifold build(const ManifoldEntry& m) {
  return manifold::build_manifold(manifold::parse_manifold_document(m.document), expr::ParseContext{});
}

std::vector<EntrySummary> list() {
  std::vector<EntrySummary> out;
  for (const auto& e : entries()) out.push_back({e.id, e.name, equation(e).order(), e.manifolds.size()});
  return out;
}

ItemResult run_item(const CorpusEntry& e, const ManifoldEntry& m) {
  ItemResult r;
  r.entry = e.id;
  r.manifold = m.id;
  r.expected = m.expected;
  const auto eq = equation(e);
  const auto man = build(m);
  const std::string subject = e.id + "/" + m.id;
  if (man.order() != m.p) r.problems.push_back("order " + std::to_string(man.order()) + " != recorded " + std::to_string(m.p));
  if (man.jet_bound() != m.s)
    r.problems.push_back("jet bound " + std::to_string(man.jet_bound()) + " != recorded " + std::to_string(m.s));
  r.metadata_ok = r.problems.empty();
  r.reports.push_back(verification::verify_invariant_manifold(man, eq, subject));
  r.reports.push_back(verification::verify_gcs(man, eq, subject));
  r.reports.push_back(verification::verify_lax_pair(man, eq, subject));
  r.parameters = verification::parameter_presence(man);
  for (const auto& rep : r.reports) {
    if (rep.status != m.expected)
      r.problems.push_back(std::string(verification::to_string(rep.kind)) + ": " + verification::to_string(rep.status) +
                           ", expected " + verification::to_string(m.expected));
  }
  if (r.parameters.empty() != m.expect_no_spectral_parameter)
    r.problems.push_back(r.parameters.empty() ? "unexpectedly parameter-free" : "expected no spectral parameter");
  r.passed = r.problems.empty();
  return r;
}

std::vector<ItemResult> run_all(bool include_variants) {
  std::vector<std::future<ItemResult>> jobs;
  for (const auto& e : entries()) {
    for (const auto& m : e.manifolds) jobs.push_back(std::async(std::launch::async, [&e, &m] { return run_item(e, m); }));
    if (include_variants)
      for (const auto& m : e.variants) jobs.push_back(std::async(std::launch::async, [&e, &m] { return run_item(e, m); }));
  }
  std::vector<ItemResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

nlohmann::json to_json(const ItemResult& r) {
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& rep : r.reports) reports.push_back(verification::to_json(rep));
  return {{"entry", r.entry},
          {"manifold", r.manifold},
          {"expected", verification::to_string(r.expected)},
          {"parameters", r.parameters},
          {"no_spectral_parameter", r.parameters.empty()},
          {"passed", r.passed},
          {"problems", r.problems},
          {"reports", reports}};
}

std::vector<std::pair<std::string, std::string>> export_entry(const CorpusEntry& e, bool include_variants) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](const ManifoldEntry& m) {
    std::string text = "# " + e.name + ": " + e.equation + "\n# " + m.description + "\n" + m.document;
    out.emplace_back(e.id + "_" + m.id + ".manifold", std::move(text));
  };
  for (const auto& m : e.manifolds) add(m);
  if (include_variants)
    for (const auto& m : e.variants) add(m);
  return out;
}

}  // namespace laxkit::corpus
