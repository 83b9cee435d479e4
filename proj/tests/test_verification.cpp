#include <catch_amalgamated.hpp>

#include "laxkit/corpus/corpus.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"
#include "laxkit/verification/verification.hpp"
#include "support/helpers.hpp"

using namespace laxkit;
using expr::RationalForm;
using verification::Status;
using th::nf;

namespace {

using Check = verification::VerificationReport (*)(const manifold::LinearManifold&, const jet::EvolutionEquation&,
                                                   std::string);
const std::vector<Check> kChecks{verification::verify_invariant_manifold, verification::verify_gcs,
                                 verification::verify_lax_pair};

}  // namespace

TEST_CASE("every corpus manifold verifies three ways", "[verification]") {
  for (const auto& e : corpus::entries()) {
    const auto eq = corpus::equation(e);
    for (const auto& me : e.manifolds) {
      const auto m = corpus::build(me);
      for (auto check : kChecks) {
        const auto r = check(m, eq, me.id);
        INFO(e.id << "/" << me.id << " " << verification::to_string(r.kind));
        CHECK(r.status == Status::Verified);
        CHECK(r.residual.is_zero());
        CHECK_FALSE(r.witness.has_value());
        CHECK(r.elapsed_seconds < 10);
      }
    }
  }
}

TEST_CASE("as-printed variants are refuted with a witness", "[verification]") {
  for (const auto& e : corpus::entries()) {
    for (const auto& me : e.variants) {
      const auto r = verification::verify_invariant_manifold(corpus::build(me), corpus::equation(e), me.id);
      INFO(me.id);
      CHECK(r.status == Status::Refuted);
      REQUIRE(r.witness.has_value());
      REQUIRE(r.witness_coefficient.has_value());
      CHECK_FALSE(r.witness_coefficient->is_zero());
    }
  }
  const auto& sto = corpus::entry("sto");
  for (const auto& me : sto.variants) {
    const auto r = verification::verify_invariant_manifold(corpus::build(me), corpus::equation(sto), me.id);
    if (me.id == "p3-1-as-printed") CHECK(expr::to_text(*r.witness) == "w[4]^2*v_xx");
    if (me.id == "p3-5-free-constant") CHECK(expr::to_text(*r.witness) == "w[5]*v_xx");
  }
}

TEST_CASE("manifolds under the wrong flow are refuted", "[verification]") {
  const auto kdv_p3 = corpus::build(corpus::manifold_entry("kdv", "p3"));
  const auto mkdv_p4 = corpus::build(corpus::manifold_entry("mkdv", "p4-1"));
  for (auto check : kChecks) {
    const auto a = check(kdv_p3, th::mkdv(), "kdv/p3");
    const auto b = check(mkdv_p4, th::kdv(), "mkdv/p4-1");
    for (const auto* r : {&a, &b}) {
      INFO(r->subject << " " << verification::to_string(r->kind));
      CHECK(r->status == Status::Refuted);
      CHECK_FALSE(r->residual.is_zero());
      CHECK(r->witness.has_value());
    }
  }
  // the witness coefficient is the residual's coefficient of the witness key
  const auto r = verification::verify_invariant_manifold(kdv_p3, th::mkdv());
  REQUIRE(r.witness.has_value());
  CHECK(expr::to_text(*r.witness) == "v_xx");
  const auto parts = expr::collect_coefficients(r.residual, {jet::v_jet(0), jet::v_jet(1), jet::v_jet(2), expr::jet("u", 4)});
  const auto& vxx = parts.at(*r.witness);
  CHECK((vxx - *r.witness_coefficient).normalized().is_zero());
}

TEST_CASE("symmetry check reports both conditions", "[verification]") {
  const auto good = verification::verify_gcs(corpus::build(corpus::manifold_entry("kdv", "p3")), th::kdv());
  REQUIRE(good.sub_checks.size() == 2);
  for (const auto& sc : good.sub_checks) CHECK(sc.status == Status::Verified);

  const auto bad = verification::verify_gcs(corpus::build(corpus::manifold_entry("kdv", "p3")), th::mkdv());
  REQUIRE(bad.sub_checks.size() == 2);
  CHECK(bad.sub_checks[0].status == Status::Verified);  // H d/dv does not act on u
  CHECK(bad.sub_checks[1].status == Status::Refuted);
}

TEST_CASE("spectral parameter presence", "[verification]") {
  const auto& sto = corpus::entry("sto");
  std::vector<std::string> parameter_free;
  for (const auto& me : sto.manifolds) {
    const auto m = corpus::build(me);
    if (m.order() != 3) continue;
    const auto params = verification::parameter_presence(m);
    if (params.empty()) parameter_free.push_back(me.id);
    const auto r = verification::verify_invariant_manifold(m, corpus::equation(sto), me.id);
    CHECK(r.no_spectral_parameter == params.empty());
    CHECK(r.parameters == params);
  }
  CHECK(parameter_free == std::vector<std::string>{"p3-7"});

  CHECK(verification::parameter_presence(corpus::build(corpus::manifold_entry("sto", "p3-5"))) ==
        std::vector<std::string>{"lambda"});
  for (const auto& me : sto.variants)
    if (me.id == "p3-5-free-constant")
      CHECK(verification::parameter_presence(corpus::build(me)) == std::vector<std::string>{"c2", "lambda"});
  CHECK(verification::parameter_presence(corpus::build(corpus::manifold_entry("heat", "p2"))) ==
        std::vector<std::string>{"lambda", "mu"});
}

TEST_CASE("numeric spot checks agree with the exact residual", "[verification][spotcheck]") {
  // every corpus residual, seeded, ten trials each
  std::uint64_t seed = 100;
  for (const auto& e : corpus::entries()) {
    const auto eq = corpus::equation(e);
    for (const auto& me : e.manifolds) {
      const RationalForm res = manifold::residual(corpus::build(me), eq);
      INFO(me.id);
      CHECK(verification::numeric_spotcheck(res, {.trials = 10, .seed = seed++}));
    }
    for (const auto& me : e.variants) {
      const RationalForm res = manifold::residual(corpus::build(me), eq);
      INFO(me.id);
      CHECK_FALSE(verification::numeric_spotcheck(res, {.trials = 10, .seed = seed++}));
    }
  }

  // small perturbations of a verified manifold are caught both ways
  const auto base = corpus::build(corpus::manifold_entry("kdv", "p3"));
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coeff(1, 9), which(0, 2), jet_order(0, 3);
  for (int i = 0; i < 50; ++i) {
    auto coeffs = base.coefficients();
    const RationalForm bump = RationalForm(expr::Rational(coeff(rng), 7)) * RationalForm::atom(expr::jet("u", jet_order(rng)));
    const auto j = static_cast<std::size_t>(which(rng));
    coeffs[j] = coeffs[j] + bump;
    const RationalForm res = manifold::residual(manifold::LinearManifold(coeffs), th::kdv());
    INFO("perturbation " << i);
    REQUIRE_FALSE(res.is_zero());
    CHECK_FALSE(verification::numeric_spotcheck(res, {.trials = 10, .seed = static_cast<std::uint64_t>(i)}));
  }
}

TEST_CASE("spot checks on trees", "[verification][spotcheck]") {
  const expr::Expr zero = expr::parse_expression("(u + 1)^2 - u^2 - 2*u - 1");
  CHECK(verification::numeric_spotcheck(zero));
  CHECK_FALSE(verification::numeric_spotcheck(expr::parse_expression("u_x*u_xx - u_xxx")));
  CHECK_THROWS_AS(verification::numeric_spotcheck(expr::parse_expression("1/(u - u)")), DegeneratePoint);
}

TEST_CASE("report serialization", "[verification]") {
  const auto r = verification::verify_lax_pair(corpus::build(corpus::manifold_entry("kdv", "p3")), th::mkdv(), "kdv/p3");
  const auto j = verification::to_json(r);
  for (const char* field : {"subject", "check", "status", "residual", "witness", "witness_coefficient", "parameters",
                            "no_spectral_parameter", "elapsed_seconds", "sub_checks", "notes"})
    CHECK(j.contains(field));
  CHECK(j.at("status") == "Refuted");
  CHECK(j.at("check") == "lax-pair");
  // the residual text parses back to the residual
  CHECK(nf(j.at("residual").get<std::string>()) == r.residual);

  const std::string table = verification::to_text_table({r}, false);
  CHECK(table.find("kdv/p3") != std::string::npos);
  CHECK(table.find("Refuted") != std::string::npos);
}
