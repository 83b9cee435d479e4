#include "laxkit/expr/parser.hpp"

#include <algorithm>
#include <cctype>

#include "laxkit/errors.hpp"

namespace laxkit::expr {

ParseContext& ParseContext::declare_parameter(std::string name) {
  if (std::find(parameters.begin(), parameters.end(), name) == parameters.end()) parameters.push_back(std::move(name));
  return *this;
}

ParseContext& ParseContext::declare_dependent(std::string name) {
  if (std::find(dependent_variables.begin(), dependent_variables.end(), name) == dependent_variables.end())
    dependent_variables.push_back(std::move(name));
  return *this;
}

ParseContext& ParseContext::declare_function(AtomId fn) {
  const AtomId base = base_function(fn);
  functions[info(base).name] = base;
  return *this;
}

ParseContext& ParseContext::declare_functions_in(const RationalForm& e) {
  for (AtomId a : e.atoms())
    if (info(a).kind == AtomKind::Unknown) declare_function(a);
  return *this;
}

namespace {

enum class Tok { Number, Name, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view s) : src_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      t.kind = Tok::Number;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
        t.text += advance();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      t.kind = Tok::Name;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        t.text += advance();
      // bracket jet order, u[3]
      if (pos_ < src_.size() && src_[pos_] == '[') {
        std::size_t j = pos_ + 1;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j > pos_ + 1 && j < src_.size() && src_[j] == ']') {
          while (pos_ <= j) t.text += advance();
        }
      }
      return t;
    }
    if (std::string_view("+-*/^(),=").find(c) != std::string_view::npos) {
      t.kind = Tok::Op;
      t.text = std::string(1, advance());
      return t;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
  }

private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Rational parse_number(const Token& t) {
  const auto dot = t.text.find('.');
  if (t.text.find('.', dot == std::string::npos ? 0 : dot + 1) != std::string::npos && dot != std::string::npos)
    throw SyntaxError("malformed number '" + t.text + "'", t.line, t.column);
  if (dot == std::string::npos) return Rational(t.text);
  const std::string whole = t.text.substr(0, dot);
  const std::string frac = t.text.substr(dot + 1);
  Rational value(whole.empty() ? "0" : whole);
  if (!frac.empty()) {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    value += Rational(mpz_class(frac), den);
  }
  value.canonicalize();
  return value;
}

class Parser {
public:
  Parser(std::string_view text, const ParseContext& ctx) : lex_(text), ctx_(ctx) { cur_ = lex_.next(); }

  Expr parse_all() {
    Expr e = expr();
    if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, cur_.line, cur_.column); }

  bool is_op(char c) const { return cur_.kind == Tok::Op && cur_.text[0] == c; }
  void expect(char c) {
    if (!is_op(c)) {
      fail(std::string("expected '") + c + "'" + (cur_.kind == Tok::End ? " before end of input" : ""));
    }
    cur_ = lex_.next();
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (is_op('+') || is_op('-')) {
      const bool minus = is_op('-');
      cur_ = lex_.next();
      Expr t = term();
      terms.push_back(minus ? -t : t);
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{unary()};
    while (is_op('*') || is_op('/')) {
      const bool div = is_op('/');
      cur_ = lex_.next();
      Expr f = unary();
      factors.push_back(div ? Expr::power(f, -1) : f);
    }
    return Expr::product(std::move(factors));
  }

  Expr unary() {
    if (is_op('-')) {
      cur_ = lex_.next();
      return -unary();
    }
    if (is_op('+')) {
      cur_ = lex_.next();
      return unary();
    }
    return power();
  }

  int integer_exponent() {
    bool paren = false;
    if (is_op('(')) {
      paren = true;
      cur_ = lex_.next();
    }
    bool negative = false;
    if (is_op('-') || is_op('+')) {
      negative = is_op('-');
      cur_ = lex_.next();
    }
    if (cur_.kind != Tok::Number || cur_.text.find('.') != std::string::npos) fail("exponent must be an integer");
    long k = std::stol(cur_.text);
    if (k > 100000) fail("exponent too large");
    cur_ = lex_.next();
    if (paren) expect(')');
    return static_cast<int>(negative ? -k : k);
  }

  Expr power() {
    Expr base = primary();
    if (is_op('^')) {
      cur_ = lex_.next();
      return Expr::power(base, integer_exponent());
    }
    return base;
  }

  Expr primary() {
    if (cur_.kind == Tok::Number) {
      Expr n = Expr::number(parse_number(cur_));
      cur_ = lex_.next();
      return n;
    }
    if (is_op('(')) {
      cur_ = lex_.next();
      Expr e = expr();
      expect(')');
      return e;
    }
    if (cur_.kind == Tok::Name) return name();
    if (cur_.kind == Tok::End) fail("unexpected end of input");
    fail("unexpected '" + cur_.text + "'");
  }

  // Resolves a name token to a jet atom when its stem is a dependent variable.
  std::optional<AtomId> as_jet(const Token& t) const {
    std::string stem = t.text;
    int order = 0;
    if (auto br = t.text.find('['); br != std::string::npos) {
      stem = t.text.substr(0, br);
      order = std::stoi(t.text.substr(br + 1));
    } else if (auto us = t.text.find('_'); us != std::string::npos) {
      stem = t.text.substr(0, us);
      const std::string suffix = t.text.substr(us + 1);
      if (!is_dependent(stem)) return std::nullopt;
      if (!suffix.empty() && std::all_of(suffix.begin(), suffix.end(), [](char c) { return c == 'x'; })) {
        order = static_cast<int>(suffix.size());
      } else if (!suffix.empty() && std::all_of(suffix.begin(), suffix.end(), [](unsigned char c) { return std::isdigit(c); })) {
        order = std::stoi(suffix);
      } else if (suffix.find('t') != std::string::npos &&
                 std::all_of(suffix.begin(), suffix.end(), [](char c) { return c == 'x' || c == 't'; })) {
        throw SyntaxError("time derivatives cannot appear in an expression", t.line, t.column);
      } else {
        throw SyntaxError("malformed derivative suffix in '" + t.text + "'", t.line, t.column);
      }
    }
    if (!is_dependent(stem)) return std::nullopt;
    return jet(stem, order);
  }

  bool is_dependent(const std::string& s) const {
    return std::find(ctx_.dependent_variables.begin(), ctx_.dependent_variables.end(), s) !=
           ctx_.dependent_variables.end();
  }

  Expr name() {
    const Token t = cur_;
    cur_ = lex_.next();
    if (t.text == "exp" && is_op('(')) {
      cur_ = lex_.next();
      Expr arg = expr();
      expect(')');
      return Expr::exp(arg);
    }
    if (t.text == "d" && is_op('(') && !ctx_.functions.count("d")) return formal_derivative();
    if (t.text == "x") return Expr::atom(independent_x());
    if (t.text == "t") return Expr::atom(independent_t());
    if (auto j = as_jet(t)) return Expr::atom(*j);
    if (std::find(ctx_.parameters.begin(), ctx_.parameters.end(), t.text) != ctx_.parameters.end())
      return Expr::atom(parameter(t.text));
    if (auto it = ctx_.functions.find(t.text); it != ctx_.functions.end()) return Expr::atom(it->second);
    throw UnknownSymbol(t.text, t.line, t.column);
  }

  Expr formal_derivative() {
    expect('(');
    if (cur_.kind != Tok::Name) fail("expected a function name");
    const Token fn_tok = cur_;
    auto it = ctx_.functions.find(fn_tok.text);
    if (it == ctx_.functions.end()) throw UnknownSymbol(fn_tok.text, fn_tok.line, fn_tok.column);
    cur_ = lex_.next();
    std::optional<AtomId> atom = it->second;
    if (!is_op(',')) fail("expected ',' after the function name");
    while (is_op(',')) {
      cur_ = lex_.next();
      if (cur_.kind != Tok::Name) fail("expected a variable");
      const Token var = cur_;
      cur_ = lex_.next();
      AtomId v;
      if (var.text == "x") {
        v = independent_x();
      } else if (var.text == "t") {
        v = independent_t();
      } else if (auto j = as_jet(var)) {
        v = *j;
      } else {
        throw UnknownSymbol(var.text, var.line, var.column);
      }
      if (atom) atom = formal_partial(*atom, v);
    }
    expect(')');
    if (!atom) return Expr::number(0);
    return Expr::atom(*atom);
  }

  Lexer lex_;
  const ParseContext& ctx_;
  Token cur_;
};

}  // namespace

Expr parse_expression(std::string_view text, const ParseContext& ctx) { return Parser(text, ctx).parse_all(); }

ParsedEquation parse_equation(std::string_view text, ParseContext ctx) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw SyntaxError("expected '<var>_t = <expression>'", 1, 1);
  std::string lhs(text.substr(0, eq));
  lhs.erase(std::remove_if(lhs.begin(), lhs.end(), [](unsigned char c) { return std::isspace(c); }), lhs.end());
  if (lhs.size() < 3 || lhs.substr(lhs.size() - 2) != "_t" ||
      !std::isalpha(static_cast<unsigned char>(lhs.front())))
    throw SyntaxError("left-hand side must have the form <var>_t", 1, 1);
  ParsedEquation out;
  out.depvar = lhs.substr(0, lhs.size() - 2);
  ctx.declare_dependent(out.depvar);
  // report positions relative to the whole equation text
  const int shift = static_cast<int>(eq) + 1;
  try {
    out.rhs = parse_expression(text.substr(eq + 1), ctx);
  } catch (const UnknownSymbol& e) {
    throw UnknownSymbol(e.symbol(), e.line(), e.line() == 1 ? e.column() + shift : e.column());
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.detail(), e.line(), e.line() == 1 ? e.column() + shift : e.column());
  }
  return out;
}

}  // namespace laxkit::expr
