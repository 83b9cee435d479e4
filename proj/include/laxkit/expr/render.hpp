#pragma once

#include <json.hpp>
#include <string>

#include "laxkit/expr/expr.hpp"

namespace laxkit::expr {

/// Reparseable text: u, u_x, u_xx, u_xxx, u[4], ...; formal partials as d(a3, u_xxx).
std::string atom_text(AtomId a);
std::string to_text(const Expr& e);
std::string to_text(const RationalForm& f);
std::string to_text(const Monomial& m);

/// LaTeX with jet subscripts (u_{2}), Greek parameters and \alpha_{j} for unknowns named a<j>.
std::string atom_latex(AtomId a);
std::string to_latex(const Expr& e);
std::string to_latex(const RationalForm& f);
std::string to_latex(const Monomial& m);

nlohmann::json to_json(const Expr& e);
nlohmann::json to_json(const RationalForm& f);

}  // namespace laxkit::expr
