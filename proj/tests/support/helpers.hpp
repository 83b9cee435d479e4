#pragma once

#include <map>
#include <string>

#include "laxkit/corpus/corpus.hpp"
#include "laxkit/expr/parser.hpp"
#include "support/taylor_oracle.hpp"

namespace th {

using laxkit::expr::RationalForm;

inline RationalForm nf(const std::string& text, const laxkit::expr::ParseContext& ctx = {}) {
  return laxkit::expr::normalize(laxkit::expr::parse_expression(text, ctx));
}

inline laxkit::jet::EvolutionEquation kdv() { return laxkit::jet::EvolutionEquation::parse("u_t = u*u_x + u_xxx"); }
inline laxkit::jet::EvolutionEquation mkdv() { return laxkit::corpus::equation(laxkit::corpus::entry("mkdv")); }
inline laxkit::jet::EvolutionEquation sto() { return laxkit::corpus::equation(laxkit::corpus::entry("sto")); }
inline laxkit::jet::EvolutionEquation heat() { return laxkit::jet::EvolutionEquation::parse("u_t = u_xx"); }

/// H of a corpus manifold as an unnormalized tree, parsed straight from its document.
struct TreeManifold {
  laxkit::expr::Expr h;
  int p = 0;
  std::map<laxkit::expr::AtomId, oracle::F> parameters;
};

inline TreeManifold tree_manifold(const laxkit::corpus::ManifoldEntry& m, std::uint64_t seed = 7) {
  namespace ex = laxkit::expr;
  const auto doc = laxkit::manifold::parse_manifold_document(m.document);
  ex::ParseContext ctx;
  for (const auto& p : doc.parameters) ctx.declare_parameter(p);
  TreeManifold t;
  t.p = m.p;
  if (doc.constraint) {
    t.h = ex::parse_expression(*doc.constraint, ctx);
  } else {
    t.h = ex::Expr::atom(ex::jet("v", m.p));
    for (const auto& [j, text] : doc.coefficients) t.h = t.h - ex::parse_expression(text, ctx) * ex::Expr::atom(ex::jet("v", j));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(-40, 40);
  for (const auto& name : doc.parameters) t.parameters[ex::parameter(name)] = oracle::F(pick(rng)) / 13 + oracle::F(1) / 7;
  return t;
}

inline std::map<laxkit::expr::AtomId, oracle::F> random_parameters(const std::vector<laxkit::expr::AtomId>& atoms,
                                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(-40, 40);
  std::map<laxkit::expr::AtomId, oracle::F> out;
  for (auto a : atoms) out[a] = oracle::F(pick(rng)) / 13 + oracle::F(1) / 7;
  return out;
}

}  // namespace th
