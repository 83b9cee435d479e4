#include "laxkit/manifold/manifold.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "laxkit/errors.hpp"
#include "laxkit/expr/render.hpp"

namespace laxkit::manifold {

using expr::AtomInfo;
using expr::AtomKind;
using expr::info;
using jet::v_jet;

namespace {

int jet_bound_of(const RationalForm& e) {
  int s = -1;
  for (AtomId a : e.atoms()) {
    const AtomInfo& ai = info(a);
    if (ai.kind == AtomKind::Jet && !ai.is_v_jet()) s = std::max(s, ai.order);
    if (ai.kind == AtomKind::Unknown) {
      for (AtomId arg : ai.args) {
        const AtomInfo& bi = info(arg);
        if (bi.kind == AtomKind::Jet && !bi.is_v_jet()) s = std::max(s, bi.order);
      }
    }
  }
  return s;
}

int max_v_order(const RationalForm& e) { return expr::max_jet_order(e, expr::kLinearVar); }

}  // namespace

LinearManifold::LinearManifold(std::vector<RationalForm> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw InvalidManifold("a linear manifold needs order p >= 1");
  for (auto& c : coeffs_) {
    c = c.normalized();
    if (max_v_order(c) >= 0) throw InvalidManifold("manifold coefficients must not contain v-jets");
    s_ = std::max(s_, jet_bound_of(c));
  }
}

LinearManifold LinearManifold::from_constraint(const RationalForm& h) {
  const RationalForm hn = h.normalized();
  const int p = max_v_order(hn);
  if (p < 1) throw InvalidManifold("the constraint must contain a v-jet of order >= 1");
  std::vector<AtomId> selectors;
  for (int k = 0; k <= p; ++k) selectors.push_back(v_jet(k));
  const auto parts = expr::collect_coefficients(hn, selectors);
  std::vector<RationalForm> by_order(static_cast<std::size_t>(p + 1));
  for (const auto& [mono, coeff] : parts) {
    if (mono.total_degree() != 1 || mono.exp() != 0)
      throw InvalidManifold("the constraint is not linear homogeneous in the v-jets");
    by_order[static_cast<std::size_t>(info(mono.factors().front().first).order)] = coeff;
  }
  const RationalForm& top = by_order.back();
  if (top.is_zero()) throw InvalidManifold("the constraint cannot be solved for its top v-jet");
  const RationalForm inv = top.inverse();
  std::vector<RationalForm> alphas;
  for (int j = 0; j < p; ++j) alphas.push_back((-(by_order[static_cast<std::size_t>(j)] * inv)).normalized());
  return LinearManifold(std::move(alphas));
}

RationalForm LinearManifold::solve_top() const {
  expr::RationalSum sum;
  for (int j = 0; j < order(); ++j) sum.add(coeffs_[static_cast<std::size_t>(j)] * RationalForm::atom(v_jet(j)));
  return sum.take().normalized();
}

RationalForm LinearManifold::constraint() const { return (RationalForm::atom(v_jet(order())) - solve_top()).normalized(); }

std::vector<AtomId> LinearManifold::parameters() const {
  std::vector<AtomId> out;
  for (const auto& c : coeffs_) {
    auto ps = expr::parameters_in(c);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  std::sort(out.begin(), out.end(), expr::atom_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- Reducer

Reducer::Reducer(LinearManifold m) : m_(std::move(m)) { images_.push_back(m_.solve_top()); }

const RationalForm& Reducer::image(int k) {
  const int p = m_.order();
  if (k < p) throw std::invalid_argument("Reducer::image: order below the manifold order");
  const AtomId top = v_jet(p);
  while (static_cast<int>(images_.size()) <= k - p) {
    RationalForm next = jet::total_x_derivative(images_.back());
    next = expr::substitute(next, {{top, images_.front()}});
    if (max_v_order(next) >= p) throw NonTermination("manifold reduction did not eliminate v-jets of order >= p");
    images_.push_back(std::move(next));
  }
  return images_[static_cast<std::size_t>(k - p)];
}

RationalForm Reducer::reduce(const RationalForm& e) {
  const int p = m_.order();
  const int top = max_v_order(e);
  if (top < p) return e.normalized();
  // images are needed for orders p..top; the table never revisits an order, so
  // the depth is exactly top - p + 1
  expr::Bindings bindings;
  for (int k = p; k <= top; ++k) {
    if (e.contains(v_jet(k))) bindings.emplace(v_jet(k), image(k));
  }
  RationalForm out = expr::substitute(e, bindings);
  if (max_v_order(out) >= p) throw NonTermination("reduced expression still contains v-jets of order >= p");
  return out;
}

RationalForm reduce_v(const RationalForm& e, const LinearManifold& m) { return Reducer(m).reduce(e); }

RationalForm residual(Reducer& reducer, jet::JetFlow& flow) {
  return reducer.reduce(flow.reduced_t_derivative(reducer.manifold().constraint()));
}

RationalForm residual(const LinearManifold& m, const jet::EvolutionEquation& eq) {
  Reducer reducer(m);
  jet::JetFlow flow(eq);
  return residual(reducer, flow);
}

RationalForm flow_route(Reducer& reducer, jet::JetFlow& flow) {
  const int p = reducer.manifold().order();
  const auto& partials = flow.linearized().partials;
  expr::RationalSum sum;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    RationalForm d = partials[i];
    mpz_class binom = 1;
    for (int l = 0; l <= p; ++l) {
      if (l > 0) {
        d = jet::total_x_derivative(d);
        binom = binom * (p - l + 1) / l;
      }
      if (d.is_zero()) break;
      sum.add(d.scaled(expr::Rational(binom)) * RationalForm::atom(v_jet(static_cast<int>(i) + p - l)));
    }
  }
  return reducer.reduce(sum.take());
}

RationalForm coefficient_route(Reducer& reducer, jet::JetFlow& flow) {
  const auto& alphas = reducer.manifold().coefficients();
  expr::RationalSum sum;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const int jj = static_cast<int>(j);
    sum.add(RationalForm::atom(v_jet(jj)) * flow.reduced_t_derivative(alphas[j]));
    sum.add(alphas[j] * flow.v_t(jj));
  }
  return reducer.reduce(sum.take());
}

// ---------------------------------------------------------------- documents

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

ManifoldDocument parse_manifold_document(std::string_view text) {
  ManifoldDocument doc;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::string* continued = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continued = nullptr;
      continue;
    }
    if (continued && std::isspace(static_cast<unsigned char>(line[0]))) {
      *continued += " " + t;
      continue;
    }
    continued = nullptr;
    const auto colon = t.find(':');
    const auto eq = t.find('=');
    if (colon != std::string::npos && (eq == std::string::npos || colon < eq)) {
      const std::string key = trim(t.substr(0, colon));
      const std::string value = trim(t.substr(colon + 1));
      if (key == "equation") {
        doc.equation = value;
      } else if (key == "order") {
        try {
          doc.order = std::stoi(value);
        } catch (const std::exception&) {
          throw SyntaxError("order must be an integer", line_no, static_cast<int>(colon) + 2);
        }
      } else if (key == "parameters") {
        doc.parameters = words(value);
      } else if (key == "constants") {
        doc.constants = words(value);
      } else if (key == "note") {
        doc.notes.push_back(value);
      } else {
        throw SyntaxError("unknown field '" + key + "'", line_no, 1);
      }
      continue;
    }
    if (eq == std::string::npos) throw SyntaxError("expected 'field: value' or 'a<j> = expression'", line_no, 1);
    const std::string lhs = trim(t.substr(0, eq));
    const std::string rhs = trim(t.substr(eq + 1));
    if (lhs == "H") {
      doc.constraint = rhs;
      continued = &*doc.constraint;
    } else if (lhs.size() > 1 && lhs[0] == 'a' &&
               std::all_of(lhs.begin() + 1, lhs.end(), [](unsigned char c) { return std::isdigit(c); })) {
      const int j = std::stoi(lhs.substr(1));
      if (doc.coefficients.count(j)) throw SyntaxError("coefficient " + lhs + " given twice", line_no, 1);
      continued = &(doc.coefficients[j] = rhs);
    } else {
      throw SyntaxError("unknown left-hand side '" + lhs + "'", line_no, 1);
    }
  }
  return doc;
}

std::string write_manifold_document(const ManifoldDocument& doc) {
  std::ostringstream out;
  for (const auto& n : doc.notes) out << "note: " << n << "\n";
  out << "equation: " << doc.equation << "\n";
  if (doc.order) out << "order: " << *doc.order << "\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
    return s;
  };
  if (!doc.parameters.empty()) out << "parameters: " << join(doc.parameters) << "\n";
  if (!doc.constants.empty()) out << "constants: " << join(doc.constants) << "\n";
  for (const auto& [j, e] : doc.coefficients) out << "a" << j << " = " << e << "\n";
  if (doc.constraint) out << "H = " << *doc.constraint << "\n";
  return out.str();
}

LinearManifold build_manifold(const ManifoldDocument& doc, expr::ParseContext ctx) {
  for (const auto& p : doc.parameters) ctx.declare_parameter(p);
  for (const auto& c : doc.constants) ctx.declare_parameter(c);
  if (doc.constraint) {
    if (!doc.coefficients.empty()) throw InvalidManifold("give either H or the a<j> coefficients, not both");
    LinearManifold m = LinearManifold::from_constraint(expr::normalize(expr::parse_expression(*doc.constraint, ctx)));
    if (doc.order && *doc.order != m.order())
      throw InvalidManifold("declared order " + std::to_string(*doc.order) + " differs from the constraint's order " +
                            std::to_string(m.order()));
    return m;
  }
  int p = doc.order.value_or(doc.coefficients.empty() ? 0 : doc.coefficients.rbegin()->first + 1);
  if (p < 1) throw InvalidManifold("the manifold order is missing");
  std::vector<RationalForm> coeffs(static_cast<std::size_t>(p));
  for (const auto& [j, text] : doc.coefficients) {
    if (j >= p) throw InvalidManifold("coefficient a" + std::to_string(j) + " exceeds the declared order");
    coeffs[static_cast<std::size_t>(j)] = expr::normalize(expr::parse_expression(text, ctx));
  }
  return LinearManifold(std::move(coeffs));
}

ManifoldDocument describe(const LinearManifold& m, const std::string& equation) {
  ManifoldDocument doc;
  doc.equation = equation;
  doc.order = m.order();
  for (AtomId a : m.parameters()) doc.parameters.push_back(info(a).name);
  for (int j = 0; j < m.order(); ++j) {
    const auto& c = m.coefficients()[static_cast<std::size_t>(j)];
    if (!c.is_zero()) doc.coefficients[j] = expr::to_text(c);
  }
  return doc;
}

}  // namespace laxkit::manifold
