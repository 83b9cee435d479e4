#include "laxkit/expr/render.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace laxkit::expr {
namespace {

// Context precedence: where a rendered subexpression will be placed.
enum Prec { kTop = 0, kSumTerm = 1, kFactor = 2, kBase = 3 };

bool is_negative(const Expr& e) {
  if (e.kind() == ExprKind::Number) return sgn(e.value()) < 0;
  if (e.kind() == ExprKind::Product && e.children().front().kind() == ExprKind::Number)
    return sgn(e.children().front().value()) < 0;
  return false;
}

Expr negated(const Expr& e) {
  if (e.kind() == ExprKind::Number) return Expr::number(-e.value());
  std::vector<Expr> fs = e.children();
  const Rational c = -fs.front().value();
  if (c == 1) {
    fs.erase(fs.begin());
  } else {
    fs.front() = Expr::number(c);
  }
  return Expr::product(std::move(fs));
}

// A product split as sign * coefficient * numerator factors / denominator factors.
struct ProductParts {
  bool negative = false;
  Rational coeff = 1;
  std::vector<Expr> num;
  std::vector<Expr> den;  // positive-exponent versions
};

ProductParts split_product(const Expr& e) {
  ProductParts p;
  const std::vector<Expr> single{e};
  const auto& fs = e.kind() == ExprKind::Product ? e.children() : single;
  for (const auto& f : fs) {
    if (f.kind() == ExprKind::Number) {
      p.coeff *= f.value();
    } else if (f.kind() == ExprKind::Power && f.exponent() < 0) {
      p.den.push_back(Expr::power(f.operand(), -f.exponent()));
    } else {
      p.num.push_back(f);
    }
  }
  if (sgn(p.coeff) < 0) {
    p.negative = true;
    p.coeff = -p.coeff;
  }
  return p;
}

std::string jet_suffix_text(int order) {
  if (order == 0) return "";
  if (order <= 3) return "_" + std::string(static_cast<std::size_t>(order), 'x');
  return "[" + std::to_string(order) + "]";
}

const std::map<std::string, std::string>& greek() {
  static const std::map<std::string, std::string> names{
      {"alpha", "\\alpha"}, {"beta", "\\beta"},   {"gamma", "\\gamma"}, {"delta", "\\delta"},
      {"epsilon", "\\epsilon"}, {"kappa", "\\kappa"}, {"lambda", "\\lambda"}, {"mu", "\\mu"},
      {"nu", "\\nu"},       {"sigma", "\\sigma"}, {"omega", "\\omega"}, {"theta", "\\theta"}};
  return names;
}

// "c12" -> "c_{12}", "lambda" -> "\lambda", "a3" -> "\alpha_{3}" when `unknown`.
std::string latex_name(const std::string& name, bool unknown) {
  if (auto it = greek().find(name); it != greek().end()) return it->second;
  std::size_t split = name.size();
  while (split > 0 && std::isdigit(static_cast<unsigned char>(name[split - 1]))) --split;
  std::string stem = name.substr(0, split);
  const std::string digits = name.substr(split);
  if (unknown && stem == "a") stem = "\\alpha";
  if (unknown && stem == "b") stem = "\\beta";
  if (auto it = greek().find(stem); it != greek().end()) stem = it->second;
  if (stem.size() > 1 && stem[0] != '\\') stem = "\\mathrm{" + stem + "}";
  return digits.empty() ? stem : stem + "_{" + digits + "}";
}

class TextRenderer {
public:
  std::string render(const Expr& e, int prec) const {
    switch (e.kind()) {
      case ExprKind::Number: {
        std::string s = e.value().get_str();
        const bool wrap = (sgn(e.value()) < 0 && prec >= kFactor) || (s.find('/') != std::string::npos && prec >= kBase);
        return wrap ? "(" + s + ")" : s;
      }
      case ExprKind::Atom: return atom_text(e.atom_id());
      case ExprKind::Sum: {
        std::string s;
        bool first = true;
        for (const auto& c : e.children()) {
          if (first) {
            s = render(c, kSumTerm);
          } else if (is_negative(c)) {
            s += " - " + render(negated(c), kSumTerm);
          } else {
            s += " + " + render(c, kSumTerm);
          }
          first = false;
        }
        return prec > kSumTerm ? "(" + s + ")" : s;
      }
      case ExprKind::Exp: return "exp(" + render(e.operand(), kTop) + ")";
      case ExprKind::Power:
        if (e.exponent() >= 0) return render(e.operand(), kBase) + "^" + std::to_string(e.exponent());
        [[fallthrough]];
      case ExprKind::Product: return product(e, prec);
    }
    return {};
  }

private:
  std::string product(const Expr& e, int prec) const {
    ProductParts p = split_product(e);
    std::string num;
    auto append = [&num](const std::string& s) { num += (num.empty() ? "" : "*") + s; };
    // "2/3*u/u_x" reads as ((2/3)*u)/u_x, so the coefficient can lead as is
    if (p.coeff != 1 || p.num.empty()) append(p.coeff.get_str());
    for (const auto& f : p.num) append(render(f, kFactor));
    std::string s = num;
    if (!p.den.empty()) {
      std::string den;
      for (const auto& f : p.den) den += (den.empty() ? "" : "*") + render(f, kBase);
      if (p.den.size() > 1) den = "(" + den + ")";
      s += "/" + den;
    }
    if (p.negative) s = "-" + s;
    const bool wrap = (p.negative && prec >= kFactor) || prec >= kBase;
    return wrap ? "(" + s + ")" : s;
  }
};

class LatexRenderer {
public:
  std::string render(const Expr& e, int prec) const {
    switch (e.kind()) {
      case ExprKind::Number: {
        const Rational& v = e.value();
        std::string s;
        if (v.get_den() == 1) {
          s = v.get_str();
        } else {
          s = std::string(sgn(v) < 0 ? "-" : "") + "\\frac{" + mpz_class(abs(v.get_num())).get_str() + "}{" +
              v.get_den().get_str() + "}";
        }
        return sgn(v) < 0 && prec >= kFactor ? "\\left(" + s + "\\right)" : s;
      }
      case ExprKind::Atom: {
        std::string s = atom_latex(e.atom_id());
        // a fraction-shaped partial needs brackets before an exponent
        return prec >= kBase && info(e.atom_id()).is_formal_partial() ? "\\left(" + s + "\\right)" : s;
      }
      case ExprKind::Sum: {
        std::string s;
        bool first = true;
        for (const auto& c : e.children()) {
          if (first) {
            s = render(c, kSumTerm);
          } else if (is_negative(c)) {
            s += " - " + render(negated(c), kSumTerm);
          } else {
            s += " + " + render(c, kSumTerm);
          }
          first = false;
        }
        return prec > kSumTerm ? "\\left(" + s + "\\right)" : s;
      }
      case ExprKind::Exp: return "e^{" + render(e.operand(), kTop) + "}";
      case ExprKind::Power:
        if (e.exponent() >= 0) return render(e.operand(), kBase) + "^{" + std::to_string(e.exponent()) + "}";
        [[fallthrough]];
      case ExprKind::Product: return product(e, prec);
    }
    return {};
  }

private:
  std::string join(const std::vector<Expr>& fs, const std::string& lead, int prec) const {
    std::string s = lead;
    for (const auto& f : fs) s += (s.empty() ? "" : " ") + render(f, prec);
    return s;
  }

  std::string product(const Expr& e, int prec) const {
    ProductParts p = split_product(e);
    const std::string cnum = p.coeff.get_num().get_str();
    const std::string cden = p.coeff.get_den().get_str();
    std::string s;
    if (p.den.empty() && cden == "1") {
      s = join(p.num, cnum == "1" && !p.num.empty() ? "" : cnum, kFactor);
    } else {
      const std::string lead = cnum == "1" && !p.num.empty() ? "" : cnum;
      const int num_prec = p.num.size() == 1 && lead.empty() ? kSumTerm : kFactor;
      const std::string num = join(p.num, lead, num_prec);
      const std::string den = join(p.den, cden == "1" ? "" : cden, p.den.size() == 1 && cden == "1" ? kSumTerm : kFactor);
      s = "\\frac{" + num + "}{" + den + "}";
    }
    if (p.negative) s = "-" + s;
    const bool wrap = (p.negative && prec >= kFactor) || (prec >= kBase && s.find(' ') != std::string::npos);
    return wrap ? "\\left(" + s + "\\right)" : s;
  }
};

std::string monomial_with(const Monomial& m, std::string (*atom)(AtomId), const std::string& sep,
                          const std::string& pow_open, const std::string& pow_close, bool latex) {
  if (m.is_one()) return "1";
  auto fs = m.factors();
  std::sort(fs.begin(), fs.end(), [](const auto& a, const auto& b) { return atom_less(a.first, b.first); });
  std::string s;
  for (const auto& [a, k] : fs) {
    s += (s.empty() ? "" : sep) + atom(a);
    if (k != 1) s += pow_open + std::to_string(k) + pow_close;
  }
  if (m.exp() != 0) {
    const Expr arg = to_expr(exponent_argument(m.exp()));
    s += (s.empty() ? "" : sep) + (latex ? "e^{" + to_latex(arg) + "}" : "exp(" + to_text(arg) + ")");
  }
  return s;
}

}  // namespace

std::string atom_text(AtomId a) {
  const AtomInfo& ai = info(a);
  switch (ai.kind) {
    case AtomKind::Parameter:
    case AtomKind::Independent: return ai.name;
    case AtomKind::Jet: return ai.name + jet_suffix_text(ai.order);
    case AtomKind::Unknown: {
      if (ai.wrt.empty()) return ai.name;
      std::string s = "d(" + ai.name;
      for (AtomId w : ai.wrt) s += ", " + atom_text(w);
      return s + ")";
    }
  }
  return {};
}

std::string atom_latex(AtomId a) {
  const AtomInfo& ai = info(a);
  switch (ai.kind) {
    case AtomKind::Parameter: return latex_name(ai.name, false);
    case AtomKind::Independent: return ai.name;
    case AtomKind::Jet: return ai.order == 0 ? ai.name : ai.name + "_{" + std::to_string(ai.order) + "}";
    case AtomKind::Unknown: {
      const std::string fn = latex_name(ai.name, true);
      if (ai.wrt.empty()) return fn;
      std::vector<std::pair<AtomId, int>> runs;
      for (AtomId w : ai.wrt) {
        if (!runs.empty() && runs.back().first == w) {
          ++runs.back().second;
        } else {
          runs.emplace_back(w, 1);
        }
      }
      const std::size_t n = ai.wrt.size();
      std::string s = "\\frac{\\partial" + (n > 1 ? "^{" + std::to_string(n) + "}" : std::string()) + " " + fn + "}{";
      bool first = true;
      for (const auto& [w, k] : runs) {
        s += (first ? "" : " ") + std::string("\\partial ") + atom_latex(w) + (k > 1 ? "^{" + std::to_string(k) + "}" : "");
        first = false;
      }
      return s + "}";
    }
  }
  return {};
}

std::string to_text(const Expr& e) { return TextRenderer{}.render(e, kTop); }
std::string to_text(const RationalForm& f) { return to_text(to_expr(f)); }
std::string to_text(const Monomial& m) { return monomial_with(m, &atom_text, "*", "^", "", false); }

std::string to_latex(const Expr& e) { return LatexRenderer{}.render(e, kTop); }
std::string to_latex(const RationalForm& f) { return to_latex(to_expr(f)); }
std::string to_latex(const Monomial& m) { return monomial_with(m, &atom_latex, " ", "^{", "}", true); }

nlohmann::json to_json(const Expr& e) {
  using nlohmann::json;
  switch (e.kind()) {
    case ExprKind::Number: return json{{"type", "number"}, {"value", e.value().get_str()}};
    case ExprKind::Atom: {
      const AtomInfo& ai = info(e.atom_id());
      switch (ai.kind) {
        case AtomKind::Parameter: return json{{"type", "parameter"}, {"name", ai.name}};
        case AtomKind::Independent: return json{{"type", "independent"}, {"name", ai.name}};
        case AtomKind::Jet: return json{{"type", "jet"}, {"variable", ai.name}, {"order", ai.order}};
        case AtomKind::Unknown: {
          json args = json::array();
          for (AtomId a : ai.args) args.push_back(atom_text(a));
          json j{{"type", ai.wrt.empty() ? "function" : "partial"}, {"name", ai.name}, {"arguments", args}};
          if (!ai.wrt.empty()) {
            json wrt = json::array();
            for (AtomId a : ai.wrt) wrt.push_back(atom_text(a));
            j["with_respect_to"] = wrt;
          }
          return j;
        }
      }
      return json{};
    }
    case ExprKind::Sum:
    case ExprKind::Product: {
      json items = json::array();
      for (const auto& c : e.children()) items.push_back(to_json(c));
      return e.kind() == ExprKind::Sum ? json{{"type", "sum"}, {"terms", items}}
                                       : json{{"type", "product"}, {"factors", items}};
    }
    case ExprKind::Power: return json{{"type", "power"}, {"base", to_json(e.operand())}, {"exponent", e.exponent()}};
    case ExprKind::Exp: return json{{"type", "exp"}, {"argument", to_json(e.operand())}};
  }
  return nlohmann::json{};
}

nlohmann::json to_json(const RationalForm& f) { return to_json(to_expr(f)); }

}  // namespace laxkit::expr
