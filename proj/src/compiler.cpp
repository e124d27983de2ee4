#include "cvd/compiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cvd/free_lie.hpp"
#include "json.hpp"

namespace cvd {

namespace {

Rational shortest_rational(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return parse_rational(std::string(buf, res.ptr));
}

int time_power(SchemeFamily f) { return f == SchemeFamily::Nested ? 3 : 2; }

double dominant(double t, int order, int p, int n) {
  return std::pow(static_cast<double>(n), p) * std::pow(std::abs(t) / n, order + 1);
}

// Nested shape of [L1,[L2,R]]: +1 for L1 == L2, -1 for L1 == R, 0 otherwise.
int nested_sign(const TreePtr& t) {
  if (t->is_leaf() || t->right->is_leaf()) return 0;
  if (same_tree(t->left, t->right->left)) return 1;
  if (same_tree(t->left, t->right->right)) return -1;
  return 0;
}

GateSequence empty_sequence(int n_modes) {
  GateSequence s;
  s.n_modes = n_modes;
  return s;
}

// Gates for e^{i sigma H_T} where the generators A, B of the scheme stand for
// H_a and H_b and the time parameter is t.
GateSequence emit(const ApproximationScheme& scheme, const TreePtr& a, const TreePtr& b, double t, double budget,
                  int n_modes, std::vector<SchemeUse>* uses, int depth, int max_rescale) {
  GateSequence out = empty_sequence(n_modes);
  for (const auto& f : merge_factors(scheme.factors)) {
    const TreePtr& g = f.generator == 0 ? a : b;
    out.append(realize(g, f.coefficient * t, budget, n_modes, uses, depth + 1, max_rescale));
  }
  return out;
}

struct Shape {
  SchemeFamily family;
  TreePtr a, b;
  double t_power_value;  // required t^p
};

Shape shape_of(const TreePtr& tree, double sigma) {
  if (tree->is_leaf()) throw std::invalid_argument("shape_of: leaf");
  if (int s = nested_sign(tree)) {
    // e^{-i s sigma [H_A,[H_A,H_B]]} against e^{i t^3 [A,[A,B]]}
    TreePtr b = s > 0 ? tree->right->right : tree->right->left;
    return {SchemeFamily::Nested, tree->left, b, -s * sigma};
  }
  // e^{-sigma [H_L,H_R]} against e^{t^2 [A,B]}
  if (sigma < 0) return {SchemeFamily::Commutation, tree->left, tree->right, -sigma};
  return {SchemeFamily::Commutation, tree->right, tree->left, sigma};
}

double time_parameter(const Shape& s) {
  if (s.family == SchemeFamily::Nested) return std::cbrt(s.t_power_value);
  return -std::sqrt(s.t_power_value);
}

}  // namespace

std::vector<SplitFactor> split(std::size_t n_terms, double t, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("split: order must be 1 or 2");
  std::vector<SplitFactor> out;
  if (n_terms == 0) return out;
  if (order == 1 || n_terms == 1) {
    for (std::size_t k = 0; k < n_terms; ++k) out.push_back({k, t});
    return out;
  }
  for (std::size_t k = 0; k + 1 < n_terms; ++k) out.push_back({k, t / 2});
  out.push_back({n_terms - 1, t});
  for (std::size_t k = n_terms - 1; k-- > 0;) out.push_back({k, t / 2});
  return out;
}

OrderChoice choose_order(double strength, double budget, SchemeFamily family, int max_rescale) {
  if (!(budget > 0)) throw std::invalid_argument("choose_order: budget must be positive");
  if (family == SchemeFamily::Generic) throw std::invalid_argument("choose_order: no library for generic targets");
  OrderChoice out;
  strength = std::abs(strength);
  if (strength == 0) return out;
  const int p = time_power(family);
  const double t = std::pow(strength, 1.0 / p);
  out.t = t;
  const auto names = library_names(family);
  for (const auto& name : names) {
    auto s = library_scheme(name);
    double e = dominant(t, s->order, p, 1);
    if (e < budget) {
      out.scheme = s;
      out.dominant_error = e;
      out.coefficient_error = s->error_coefficient * e;
      return out;
    }
  }
  // smallest n per scheme, then the fewest gates overall
  std::shared_ptr<const ApproximationScheme> best;
  int best_n = 0;
  double best_gates = std::numeric_limits<double>::infinity();
  for (const auto& name : names) {
    auto s = library_scheme(name);
    for (int n = 2; n <= max_rescale; ++n) {
      if (dominant(t, s->order, p, n) >= budget) continue;
      double gates = s->merged_gate_count() * std::pow(static_cast<double>(n), p);
      if (gates < best_gates) {
        best_gates = gates;
        best = s;
        best_n = n;
      }
      break;
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "budget " << budget << " unreachable at strength " << strength << " within rescale cap " << max_rescale;
    throw BudgetError(msg.str());
  }
  out.scheme = std::make_shared<const ApproximationScheme>(rescale(*best, best_n));
  out.rescale = best_n;
  out.dominant_error = dominant(t, best->order, p, best_n);
  out.coefficient_error = best->error_coefficient / std::pow(static_cast<double>(best_n), best->order + 1 - p) *
                          std::pow(t, best->order + 1);
  return out;
}

GateSequence realize(const TreePtr& tree, double sigma, double budget, int n_modes, std::vector<SchemeUse>* uses,
                     int depth, int max_rescale) {
  if (sigma == 0.0) return empty_sequence(n_modes);
  if (tree->is_leaf()) return leaf_sequence(tree->leaf, sigma, n_modes);
  Shape shape = shape_of(tree, sigma);
  OrderChoice choice = choose_order(shape.t_power_value, budget, shape.family, max_rescale);
  const double t = time_parameter(shape);
  if (uses)
    uses->push_back({tree->to_string(), choice.scheme->name, choice.scheme->order, choice.rescale,
                     std::abs(shape.t_power_value), t, choice.dominant_error, choice.coefficient_error, depth});
  return emit(*choice.scheme, shape.a, shape.b, t, budget, n_modes, uses, depth, max_rescale);
}

double hermitian_strength(const WeightedTree& term, double tau) {
  GaussRational r = term.weight / term.tree->phase_factor();
  if (!r.is_real()) throw std::invalid_argument("term " + term.tree->to_string() + " is not Hermitian");
  return tau * to_double(r.re);
}

GateSequence instantiate(const WeightedTree& term, double tau, const ApproximationScheme& scheme, int n_modes,
                         double budget, std::vector<SchemeUse>* uses) {
  const double sigma = hermitian_strength(term, tau);
  if (sigma == 0.0) return empty_sequence(n_modes);
  if (term.tree->is_leaf()) throw std::invalid_argument("instantiate: leaf terms need no scheme");
  Shape shape = shape_of(term.tree, sigma);
  if (shape.family != scheme.family)
    throw std::invalid_argument("instantiate: scheme " + scheme.name + " (" + to_string(scheme.family) +
                                ") does not fit " + term.tree->to_string());
  const double t = time_parameter(shape);
  if (uses)
    uses->push_back({term.tree->to_string(), scheme.name, scheme.order, 1, std::abs(shape.t_power_value), t,
                     std::pow(std::abs(t), scheme.order + 1),
                     scheme.error_coefficient * std::pow(std::abs(t), scheme.order + 1), 0});
  return emit(scheme, shape.a, shape.b, t, budget, n_modes, uses, 0, 64);
}

double naive_compile_count(const RewritePlan& p, double t, double budget) {
  std::size_t terms = p.trees.size() + p.direct_terms.size();
  if (terms == 0) return 0.0;
  const double r = terms == 1 ? 1.0 : std::max(1.0, std::ceil(t * t / budget));
  const double per_op = budget / (static_cast<double>(terms) * r);
  double per_step = static_cast<double>(p.direct_terms.size());
  for (const auto& wt : p.trees) {
    double sigma = std::abs(hermitian_strength(wt, t / r));
    if (sigma == 0) continue;
    if (nested_sign(wt.tree) != 0)
      per_step += naive_count(NaiveKind::Nested, sigma, per_op);
    else
      per_step += naive_count(NaiveKind::Commutation, sigma, per_op);
  }
  return per_step * r;
}

namespace {

// Sum of |coefficients| of the order 2 and 3 part of the gBCH of the split.
double splitting_remainder(const std::vector<QuadPolynomial>& terms, const std::vector<SplitFactor>& factors) {
  if (terms.size() < 2) return 0.0;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < terms.size(); ++k) names.push_back("O" + std::to_string(k + 1));
  Alphabet a = Alphabet::plain(names);
  std::vector<TruncatedSeries<Rational>> exps;
  for (const auto& f : factors)
    exps.push_back(TruncatedSeries<Rational>::generator(a, 3, static_cast<int>(f.term), shortest_rational(f.time)));
  LieElement<Rational> lie = project_to_lie(gbch(exps));
  std::erase_if(lie.coeffs, [](const auto& kv) { return kv.first.size() < 2; });
  std::vector<QuadPolynomial> images;
  for (const auto& o : terms) images.push_back(GaussRational::i_unit() * o);
  QuadPolynomial rem = evaluate_lie(lie, images);
  double total = 0.0;
  for (const auto& [m, c] : rem.terms()) total += std::abs(c.to_complex());
  return total;
}

}  // namespace

CompileResult compile(const QuadPolynomial& h, double t, double budget, const CompileOptions& opt) {
  if (!(budget > 0)) throw std::invalid_argument("compile: budget must be positive");
  RewritePlan p = plan(h);
  const int n_modes = p.n_modes;
  std::vector<WeightedTree> terms = p.trees;
  terms.insert(terms.end(), p.direct_terms.begin(), p.direct_terms.end());

  CompileResult out;
  auto& rep = out.report;
  rep.t = t;
  rep.budget = budget;
  rep.split_order = opt.split_order;
  rep.plan_text = p.to_text();

  GateSequence seq = empty_sequence(n_modes);
  seq.global_phase = t * to_double(p.global_phase);
  std::vector<SplitFactor> factors = split(terms.size(), t, opt.split_order);
  for (const auto& f : factors) {
    const auto& term = terms[f.term];
    double sigma = hermitian_strength(term, f.time);
    std::vector<SchemeUse> uses;
    seq.append(realize(term.tree, sigma, budget, n_modes, &uses, 0, opt.max_rescale));
    for (auto& u : uses) rep.error_estimate = std::max(rep.error_estimate, u.dominant_error);
    rep.schemes.insert(rep.schemes.end(), uses.begin(), uses.end());
  }
  out.sequence = opt.cancel ? cancel_fourier(seq) : seq;

  for (const auto& g : out.sequence.gates) ++rep.counts[to_string(g.kind)];
  rep.fourier_count = out.sequence.fourier_count();
  rep.elementary_count = out.sequence.elementary_count();
  rep.total = static_cast<int>(out.sequence.size());
  rep.naive_count = naive_compile_count(p, t, budget);
  if (opt.splitting_estimate && terms.size() > 1) {
    std::vector<QuadPolynomial> images;
    for (const auto& wt : terms) images.push_back(wt.weight * wt.tree->evaluate());
    rep.splitting_error = splitting_remainder(images, factors);
  }
  return out;
}

std::string CompileReport::to_json() const {
  nlohmann::json j;
  j["counts"] = counts;
  j["fourier_count"] = fourier_count;
  j["elementary_count"] = elementary_count;
  j["total"] = total;
  j["error_estimate"] = error_estimate;
  j["splitting_error"] = splitting_error;
  j["naive_count"] = naive_count;
  j["split_order"] = split_order;
  j["t"] = t;
  j["budget"] = budget;
  nlohmann::json s = nlohmann::json::array();
  for (const auto& u : schemes)
    s.push_back({{"tree", u.tree},
                 {"scheme", u.scheme},
                 {"order", u.order},
                 {"rescale", u.rescale},
                 {"strength", u.strength},
                 {"t", u.t},
                 {"dominant_error", u.dominant_error},
                 {"coefficient_error", u.coefficient_error},
                 {"depth", u.depth}});
  j["schemes"] = s;
  return j.dump(2);
}

}  // namespace cvd
