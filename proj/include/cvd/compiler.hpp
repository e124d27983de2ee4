#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cvd/approx.hpp"
#include "cvd/gates.hpp"
#include "cvd/quad_polynomial.hpp"
#include "cvd/rewrite.hpp"

namespace cvd {

/// One exponential e^{i time * term} of a splitting, in application order.
struct SplitFactor {
  std::size_t term = 0;
  double time = 0.0;
};

/// Order 1: sequential. Order 2: symmetric, e.g. three terms at t give
/// t/2, t/2, t, t/2, t/2.
std::vector<SplitFactor> split(std::size_t n_terms, double t, int order);

struct OrderChoice {
  std::shared_ptr<const ApproximationScheme> scheme;  // null for strength 0
  double t = 0.0;               // scheme time parameter, |t|^p = strength
  int rescale = 1;              // blocks per direction when rescaled
  double dominant_error = 0.0;  // n^p (|t|/n)^(m+1)
  double coefficient_error = 0.0;  // the same times the scheme's error coefficient
};

/// Cheapest library scheme whose dominant error at this strength is below the
/// budget, falling back to repeating the highest orders at smaller time.
/// Throws BudgetError when nothing within the rescale cap suffices.
OrderChoice choose_order(double strength, double budget, SchemeFamily family, int max_rescale = 64);

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SchemeUse {
  std::string tree;
  std::string scheme;
  int order = 0;
  int rescale = 1;
  double strength = 0.0;
  double t = 0.0;
  double dominant_error = 0.0;
  double coefficient_error = 0.0;
  int depth = 0;  // 0 for the top-level bracket of a term
};

/// Gates for e^{i sigma H_T} with H_T = i^{brackets} T Hermitian. Bracket
/// children that are not leaves are realized recursively with their own
/// schemes under the same budget.
GateSequence realize(const TreePtr& tree, double sigma, double budget, int n_modes,
                     std::vector<SchemeUse>* uses = nullptr, int depth = 0, int max_rescale = 64);

/// Substitutes leaf gates of the tree into a given scheme for e^{i tau w T}.
/// Throws std::invalid_argument when the scheme family does not fit the tree.
GateSequence instantiate(const WeightedTree& term, double tau, const ApproximationScheme& scheme, int n_modes,
                         double budget = 1e-3, std::vector<SchemeUse>* uses = nullptr);

/// Real coefficient sigma with tau w T = sigma H_T.
double hermitian_strength(const WeightedTree& term, double tau);

struct CompileOptions {
  int split_order = 2;
  int max_rescale = 64;
  bool cancel = true;
  bool splitting_estimate = true;
};

struct CompileReport {
  std::map<std::string, int> counts;  // per gate kind
  int fourier_count = 0;
  int elementary_count = 0;
  int total = 0;
  std::vector<SchemeUse> schemes;
  double error_estimate = 0.0;   // largest dominant per-tree error
  double splitting_error = 0.0;  // size of the order 2-3 splitting remainder
  double naive_count = 0.0;
  int split_order = 2;
  double t = 0.0;
  double budget = 0.0;
  std::string plan_text;

  std::string to_json() const;
};

struct CompileResult {
  GateSequence sequence;
  CompileReport report;
};

CompileResult compile(const QuadPolynomial& h, double t, double budget, const CompileOptions& opt = {});

/// Baseline operation count: first-order Trotter with r = t^2/eps steps and the
/// naive commutator constructions for every term at error eps/(terms r).
double naive_compile_count(const RewritePlan& p, double t, double budget);

}  // namespace cvd
