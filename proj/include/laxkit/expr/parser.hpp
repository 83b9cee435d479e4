#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "laxkit/expr/expr.hpp"

namespace laxkit::expr {

/// Names the parser resolves. Anything else is an UnknownSymbol.
struct ParseContext {
  std::vector<std::string> dependent_variables{"u", "v", "w"};
  std::vector<std::string> parameters{"lambda", "c1", "c2", "gamma"};
  std::map<std::string, AtomId, std::less<>> functions;

  ParseContext& declare_parameter(std::string name);
  ParseContext& declare_dependent(std::string name);
  ParseContext& declare_function(AtomId fn);
  /// Declares every unknown function (and the base of every formal partial) occurring in e.
  ParseContext& declare_functions_in(const RationalForm& e);
};

/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer | '^' '(' integer ')')?
///   primary := number | name | 'exp' '(' expr ')' | 'd' '(' fn (',' jet)+ ')' | '(' expr ')'
/// where a jet is written u, u_x, u_xx, u_3 or u[3].
Expr parse_expression(std::string_view text, const ParseContext& ctx = {});

struct ParsedEquation {
  std::string depvar;
  Expr rhs;
};

/// Parses "u_t = <expr>". The dependent variable is added to the context for the right-hand side.
ParsedEquation parse_equation(std::string_view text, ParseContext ctx = {});

}  // namespace laxkit::expr
