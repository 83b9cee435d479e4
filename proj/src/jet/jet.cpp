#include "laxkit/jet/jet.hpp"

#include <stdexcept>

#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"

namespace laxkit::jet {

using expr::AtomInfo;
using expr::AtomKind;
using expr::info;

AtomId v_jet(int k) { return expr::jet(expr::kLinearVar, k); }

EvolutionEquation::EvolutionEquation(std::string depvar, RationalForm rhs)
    : depvar_(std::move(depvar)), rhs_(rhs.normalized()) {
  if (depvar_.empty() || depvar_ == expr::kLinearVar)
    throw InvalidEquation("the dependent variable must be named and differ from '" + std::string(expr::kLinearVar) + "'");
  for (AtomId a : rhs_.atoms()) {
    const AtomInfo& ai = info(a);
    if (ai.is_v_jet()) throw InvalidEquation("the right-hand side contains the linearized variable");
    if (ai.kind == AtomKind::Jet && ai.name != depvar_)
      throw InvalidEquation("the right-hand side contains jets of '" + ai.name + "', not of '" + depvar_ + "'");
    if (ai.kind == AtomKind::Unknown) throw InvalidEquation("the right-hand side contains an unknown function");
  }
  order_ = expr::max_jet_order(rhs_, depvar_);
  if (order_ <= 1)
    throw InvalidEquation("the equation order must exceed 1 (found " + std::to_string(std::max(order_, 0)) + ")");
  if (!rhs_.contains(u(order_))) throw InvalidEquation("the right-hand side does not depend on its top jet");
}

EvolutionEquation EvolutionEquation::parse(std::string_view text, expr::ParseContext ctx) {
  auto parsed = expr::parse_equation(text, std::move(ctx));
  return EvolutionEquation(parsed.depvar, expr::normalize(parsed.rhs));
}

std::string EvolutionEquation::text() const { return depvar_ + "_t = " + expr::to_text(rhs_); }

LinearizedEquation linearize(const EvolutionEquation& eq) {
  LinearizedEquation lin;
  expr::RationalSum sum;
  for (int i = 0; i <= eq.order(); ++i) {
    RationalForm d = eq.rhs().derivative(eq.u(i)).normalized();
    sum.add(d * RationalForm::atom(v_jet(i)));
    lin.partials.push_back(std::move(d));
  }
  lin.rhs_v = sum.take().normalized();
  return lin;
}

namespace {

// Image of an unknown function under a derivation, by the chain rule over its arguments.
std::optional<RationalForm> chain_rule(AtomId fn, const expr::AtomImage& arg_image) {
  const AtomInfo& ai = info(fn);
  expr::RationalSum sum;
  bool any = false;
  for (AtomId arg : ai.args) {
    auto img = arg_image(arg);
    if (!img || img->is_zero()) continue;
    auto partial = expr::formal_partial(fn, arg);
    if (!partial) continue;
    sum.add(RationalForm::atom(*partial) * *img);
    any = true;
  }
  if (!any) return std::nullopt;
  return sum.take();
}

std::optional<RationalForm> x_image(AtomId a) {
  const AtomInfo& ai = info(a);
  switch (ai.kind) {
    case AtomKind::Parameter: return std::nullopt;
    case AtomKind::Independent:
      if (ai.name == "x") return RationalForm(1L);
      return std::nullopt;
    case AtomKind::Jet: return RationalForm::atom(expr::jet(ai.name, ai.order + 1));
    case AtomKind::Unknown: return chain_rule(a, &x_image);
  }
  return std::nullopt;
}

}  // namespace

RationalForm total_x_derivative(const RationalForm& e) { return expr::apply_derivation(e, &x_image).normalized(); }

RationalForm iterate_x(const RationalForm& e, int k) {
  if (k < 0) throw std::invalid_argument("iterate_x: negative count");
  RationalForm r = e;
  for (int i = 0; i < k; ++i) r = total_x_derivative(r);
  return r;
}

RationalForm partial_derivative(const RationalForm& e, AtomId var) {
  const expr::AtomImage image = [var](AtomId a) -> std::optional<RationalForm> {
    if (a == var) return RationalForm(1L);
    if (info(a).kind == AtomKind::Unknown) {
      if (auto p = expr::formal_partial(a, var)) return RationalForm::atom(*p);
    }
    return std::nullopt;
  };
  return expr::apply_derivation(e, image).normalized();
}

JetFlow::JetFlow(const EvolutionEquation& eq) : eq_(eq), lin_(linearize(eq)) {
  u_flow_.push_back(eq_.rhs());
  v_flow_.push_back(lin_.rhs_v);
}

const RationalForm& JetFlow::u_t(int k) {
  while (static_cast<int>(u_flow_.size()) <= k) u_flow_.push_back(total_x_derivative(u_flow_.back()));
  return u_flow_[static_cast<std::size_t>(k)];
}

const RationalForm& JetFlow::v_t(int k) {
  while (static_cast<int>(v_flow_.size()) <= k) v_flow_.push_back(total_x_derivative(v_flow_.back()));
  return v_flow_[static_cast<std::size_t>(k)];
}

RationalForm JetFlow::reduced_t_derivative(const RationalForm& e) {
  std::function<std::optional<RationalForm>(AtomId)> image = [this, &image](AtomId a) -> std::optional<RationalForm> {
    const AtomInfo& ai = info(a);
    switch (ai.kind) {
      case AtomKind::Parameter: return std::nullopt;
      case AtomKind::Independent:
        if (ai.name == "t") return RationalForm(1L);
        return std::nullopt;
      case AtomKind::Jet:
        if (ai.name == eq_.depvar()) return u_t(ai.order);
        if (ai.is_v_jet()) return v_t(ai.order);
        throw InvalidEquation("no evolution law for jets of '" + ai.name + "'");
      case AtomKind::Unknown: return chain_rule(a, image);
    }
    return std::nullopt;
  };
  return expr::apply_derivation(e, image).normalized();
}

RationalForm reduced_t_derivative(const RationalForm& e, const EvolutionEquation& eq) {
  return JetFlow(eq).reduced_t_derivative(e);
}

}  // namespace laxkit::jet
