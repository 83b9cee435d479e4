#include <catch_amalgamated.hpp>

#include "laxkit/errors.hpp"
#include "laxkit/expr/ops.hpp"
#include "laxkit/expr/render.hpp"
#include "support/helpers.hpp"
#include "support/random_expr.hpp"

using namespace laxkit;
using expr::Expr;
using expr::ExprKind;
using expr::RationalForm;
using th::nf;

namespace {

RationalForm atom(const char* depvar, int k) { return RationalForm::atom(expr::jet(depvar, k)); }

}  // namespace

TEST_CASE("normal forms of small identities", "[expr]") {
  CHECK(nf("u_x*u - u*u_x").is_zero());
  CHECK(nf("exp(w)*exp(-w)") == RationalForm(1L));
  CHECK(nf("(u_xx^2 - c1^2)/(u_xx - c1)") == nf("u_xx + c1"));
  CHECK(nf("(u+1)^2") == nf("u^2 + 2*u + 1"));
  CHECK(nf("1/(u_x) + 1/(u_x)") == nf("2/u_x"));
  CHECK(nf("exp(u)^2") == nf("exp(2*u)"));

  // the same cancellation with an unknown function in place of the constant
  expr::ParseContext ctx;
  ctx.declare_function(expr::unknown_function("b3", {expr::jet("u", 0), expr::jet("u", 1)}));
  CHECK(nf("(u_xx^2 - b3^2)/(u_xx - b3)", ctx) == nf("u_xx + b3", ctx));
  // cross-multiplied check of the same identity
  CHECK(nf("(u_xx^2 - b3^2) - (u_xx + b3)*(u_xx - b3)", ctx).is_zero());
}

TEST_CASE("zero test", "[expr]") {
  CHECK(expr::is_zero(expr::parse_expression("v_xxx - v_xxx")));
  CHECK_FALSE(expr::is_zero(expr::parse_expression("u_x*u_xx - u_xxx")));
  // the numeric oracle agrees at the point (2, 3, 5)
  std::map<expr::AtomId, th::Float> point{{expr::jet("u", 1), 2}, {expr::jet("u", 2), 3}, {expr::jet("u", 3), 5}};
  CHECK(*th::evaluate_at(expr::parse_expression("u_x*u_xx - u_xxx"), point) == 1);
}

TEST_CASE("parser builds the expected trees", "[expr]") {
  const Expr kdv = expr::parse_expression("u*u_x + u_xxx");
  REQUIRE(kdv.kind() == ExprKind::Sum);
  REQUIRE(kdv.children().size() == 2);
  CHECK(kdv.children()[0] == Expr::atom(expr::jet("u", 0)) * Expr::atom(expr::jet("u", 1)));
  CHECK(kdv.children()[1] == Expr::atom(expr::jet("u", 3)));

  CHECK(nf("v_xx - lambda*v") == atom("v", 2) - RationalForm::atom(expr::parameter("lambda")) * atom("v", 0));
  const Expr e = expr::parse_expression("exp(w)*w_x");
  REQUIRE(e.kind() == ExprKind::Product);
  CHECK(e.children()[0].kind() == ExprKind::Exp);
  CHECK(e.children()[0].operand() == Expr::atom(expr::jet("w", 0)));

  // every jet spelling means the same atom
  CHECK(nf("u_xxxx") == nf("u[4]"));
  CHECK(nf("u_4") == nf("u[4]"));
}

TEST_CASE("parser errors carry positions", "[expr]") {
  try {
    (void)expr::parse_expression("u*(u_x + ");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() >= 9);
  }
  try {
    (void)expr::parse_expression("u + mu");
    FAIL("no error");
  } catch (const UnknownSymbol& e) {
    CHECK(e.symbol() == "mu");
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(expr::parse_expression("u^(1/2)"), SyntaxError);
  CHECK_THROWS_AS(nf("exp(1/u)"), UnsupportedExpression);
  CHECK_THROWS_AS(nf("1/(u - u)"), DivisionByZeroExpression);
}

TEST_CASE("substitute", "[expr]") {
  const auto a2 = RationalForm::atom(expr::parameter("c2"));
  CHECK(expr::substitute(atom("v", 3), {{expr::jet("v", 3), a2 * atom("v", 2)}}) == a2 * atom("v", 2));
  CHECK(expr::substitute(nf("u*u_x"), {{expr::jet("u", 0), RationalForm(0L)}}).is_zero());
  // H vanishes once its top jet is replaced by the solved value
  const RationalForm h = nf("v_xxx - u_xx/u_x*v_xx + (2*u/3 + lambda)*v_x - (2*u*u_xx/(3*u_x) + lambda*u_xx/u_x - u_x)*v");
  const RationalForm top = atom("v", 3) - h;
  CHECK(expr::substitute(h, {{expr::jet("v", 3), top}}).is_zero());
  CHECK_THROWS_AS(expr::substitute(nf("u"), {{expr::jet("u", 0), nf("u + 1")}}), SelfReferentialBinding);
}

TEST_CASE("collect_coefficients", "[expr]") {
  const std::vector<expr::AtomId> sel{expr::jet("u", 5), expr::jet("u", 4), expr::jet("v", 3), expr::jet("v", 1)};
  const auto parts = expr::collect_coefficients(nf("u[5]*u[4]*v_xxx + u[5]*v_x"), sel);
  REQUIRE(parts.size() == 2);
  CHECK(parts.at(expr::Monomial::of(expr::jet("u", 5)) * expr::Monomial::of(expr::jet("u", 4)) *
                 expr::Monomial::of(expr::jet("v", 3))) == RationalForm(1L));
  CHECK(parts.at(expr::Monomial::of(expr::jet("u", 5)) * expr::Monomial::of(expr::jet("v", 1))) == RationalForm(1L));
  CHECK(expr::collect_coefficients(RationalForm(), sel).empty());
  CHECK_THROWS_AS(expr::collect_coefficients(nf("1/v_x"), sel), NotPolynomialInSelectors);
}

TEST_CASE("normalization is idempotent on random trees", "[expr][property]") {
  th::ExprGenerator gen(20240601);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = gen.next();
    const RationalForm once = expr::normalize(e);
    INFO(expr::to_text(e));
    REQUIRE(expr::normalize(expr::to_expr(once)) == once);
    REQUIRE(once.normalized() == once);
  }
}

TEST_CASE("zero test agrees with numeric evaluation", "[expr][property]") {
  th::ExprGenerator gen(77);
  std::mt19937_64 rng(5);
  int nonzero_seen = 0;
  for (int i = 0; i < 300; ++i) {
    const Expr e = gen.next();
    const RationalForm n = expr::normalize(e);
    INFO(expr::to_text(e));
    // tree and normal form take the same values wherever both are defined
    const Expr zero = e - expr::to_expr(n);
    REQUIRE(expr::is_zero(zero));
    int agreements = 0;
    for (int t = 0; t < 10; ++t) {
      const auto point = th::random_point(gen.atoms(), rng);
      const auto a = th::evaluate_at(e, point);
      const auto b = th::evaluate_at(n, point);
      if (!a || !b) continue;
      const th::Float scale = 1 + abs(*a) + abs(*b);
      REQUIRE(abs(*a - *b) <= th::Float(1e-60) * scale);
      ++agreements;
    }
    CHECK(agreements > 0);
    if (!n.is_zero()) {
      ++nonzero_seen;
      bool witnessed = false;
      for (int t = 0; t < 10 && !witnessed; ++t) {
        const auto a = th::evaluate_at(n, th::random_point(gen.atoms(), rng));
        witnessed = a && abs(*a) > th::Float(1e-40);
      }
      REQUIRE(witnessed);
    }
  }
  CHECK(nonzero_seen > 200);
}

TEST_CASE("ring axioms hold on normal forms", "[expr][property]") {
  // arithmetic cancels lazily; equality is meant between normalized forms
  auto n = [](const RationalForm& f) { return f.normalized(); };
  th::ExprGenerator gen(99);
  for (int i = 0; i < 150; ++i) {
    const RationalForm a = expr::normalize(gen.next(2));
    const RationalForm b = expr::normalize(gen.next(2));
    const RationalForm c = expr::normalize(gen.next(2));
    INFO(expr::to_text(a) << " ; " << expr::to_text(b) << " ; " << expr::to_text(c));
    REQUIRE(n((a + b) + c) == n(a + (b + c)));
    REQUIRE(n(a + b) == n(b + a));
    REQUIRE(n(a * b) == n(b * a));
    REQUIRE(n((a * b) * c) == n(a * (b * c)));
    REQUIRE(n(a * (b + c)) == n(a * b + a * c));
    REQUIRE((a - a).is_zero());
    if (!a.is_zero()) REQUIRE(n(a * a.inverse()) == RationalForm(1L));
  }
}

TEST_CASE("canonical text reparses to the same normal form", "[expr][property]") {
  th::ExprGenerator gen(4242);
  for (int i = 0; i < 300; ++i) {
    const RationalForm n = expr::normalize(gen.next());
    INFO(expr::to_text(n));
    REQUIRE(nf(expr::to_text(n)) == n);
    REQUIRE(nf(expr::to_text(expr::to_expr(n))) == n);
  }
}

TEST_CASE("renderings", "[expr]") {
  CHECK(expr::to_text(nf("u*u_x + u_xxx")) == "u*u_x + u_xxx");
  CHECK(expr::to_text(nf("exp(w)*w_x")) == "w_x*exp(w)");
  CHECK(expr::to_text(nf("u[5]*v[4]/3")) == "1/3*u[5]*v[4]");
  CHECK(expr::to_latex(nf("v_xx - lambda*v")) == "-\\lambda v + v_{2}");
  CHECK(expr::to_latex(nf("exp(w)*w_x")) == "w_{1} e^{w}");
  expr::ParseContext ctx;
  ctx.declare_function(expr::unknown_function("a1", {expr::jet("u", 0)}));
  CHECK(expr::to_latex(nf("d(a1, u)^2", ctx)) == "\\left(\\frac{\\partial \\alpha_{1}}{\\partial u}\\right)^{2}");
  const auto j = expr::to_json(nf("u/u_x"));
  CHECK(j.at("type") == "product");
}

TEST_CASE("derivatives and parameters", "[expr]") {
  CHECK(nf("u^2*u_x").derivative(expr::jet("u", 0)) == nf("2*u*u_x"));
  CHECK(nf("exp(u*u_x)").derivative(expr::jet("u", 1)) == nf("u*exp(u*u_x)"));
  CHECK(nf("1/u_x").derivative(expr::jet("u", 1)) == nf("-1/u_x^2"));
  const auto params = expr::parameters_in(nf("lambda*u + c2/u_x + gamma"));
  CHECK(params.size() == 3);
  CHECK(expr::max_jet_order(nf("u*u_xxx + v[7]"), "u") == 3);
  CHECK(expr::max_jet_order(nf("lambda"), "u") == -1);
}
