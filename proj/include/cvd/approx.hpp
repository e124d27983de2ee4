#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cvd/free_lie.hpp"
#include "cvd/multipoly.hpp"

namespace cvd {

using HighFloat = boost::multiprecision::cpp_bin_float_50;

template <>
struct ScalarTraits<HighFloat> {
  static constexpr bool exact = false;
  static HighFloat from(const Rational& q) {
    return HighFloat(q.get_num().get_str()) / HighFloat(q.get_den().get_str());
  }
  static bool is_zero(const HighFloat& v) { return v == 0; }
  static double magnitude(const HighFloat& v) { return static_cast<double>(abs(v)); }
};

/// Abstract two-generator alphabet: a = itA, b = itB.
const Alphabet& scheme_alphabet();

enum class SchemeFamily { Commutation, Nested, Generic };

std::string to_string(SchemeFamily f);
SchemeFamily family_from_string(const std::string& s);

/// Lie target expressed on the abstract generators, e.g. -1 * [a,b] for
/// e^{t^2[A,B]} and -1 * [a,[a,b]] for e^{i t^3 [A,[A,B]]}.
struct Target {
  Word word;
  Rational value;
  int time_power() const { return static_cast<int>(word.size()); }
};

Target family_target(SchemeFamily f);

/// One factor e^{i c t G}; lists are in application order.
struct SchemeFactor {
  int generator = 0;  // 0 = A, 1 = B
  double coefficient = 0.0;
};

struct ApproximationScheme;

/// Q(p t) when `inverse` is false, Q^{-1}(p t) otherwise.
struct CompositionBlock {
  double p = 0.0;
  bool inverse = false;
};

struct Composition {
  std::shared_ptr<const ApproximationScheme> base;
  std::vector<CompositionBlock> blocks;
};

struct ApproximationScheme {
  std::string name;
  SchemeFamily family = SchemeFamily::Commutation;
  Target target;
  int order = 0;
  std::vector<SchemeFactor> factors;
  double error_coefficient = 0.0;
  std::string precision = "full";  // or "paper-6-digit"
  std::optional<Composition> composition;

  /// Factors with nonzero coefficient.
  int gate_count() const;
  /// Gate count after merging adjacent factors on the same generator.
  int merged_gate_count() const;
};

/// Removes zero factors and merges neighbours on the same generator.
std::vector<SchemeFactor> merge_factors(const std::vector<SchemeFactor>& f);

// ---------------------------------------------------------------------------
// Constraint systems

/// Ordered slots of a first-step ansatz (application order) with names.
struct Ansatz {
  struct Slot {
    int generator;
    std::string name;
  };
  std::vector<Slot> slots;
  std::map<std::string, Rational> pins;

  /// e^{c1 a} e^{c1' b} e^{c2 a} ... with `rows` pairs.
  static Ansatz alternating(int rows, std::map<std::string, Rational> pins = {});
  std::vector<std::string> unknowns() const;
};

struct ConstraintSystem {
  std::vector<std::string> unknowns;
  std::vector<MultiPoly> values;       // f_k as polynomials in the unknowns
  std::vector<Rational> targets;       // required value of each f_k
  std::vector<std::string> provenance; // bracket each constraint came from

  std::size_t size() const { return values.size(); }
  MultiPoly residual(std::size_t k) const { return values[k] - MultiPoly(targets[k]); }
  std::vector<double> evaluate(const std::vector<double>& x) const;
  double max_residual(const std::vector<double>& x) const;
};

/// Lyndon-coordinate constraints through order m (the "f_k").
ConstraintSystem build_system(const Ansatz& a, const Target& target, int m);

/// Word-coefficient constraints of the logarithm through order m (before
/// elimination of dependent ones); identically zero words are skipped.
ConstraintSystem build_raw_system(const Ansatz& a, const Target& target, int m);

/// Maximal linearly independent subset, kept in input order.
ConstraintSystem reduce_dependent(const ConstraintSystem& cs);

struct SecondStepAnsatz {
  int base_order = 5;  // order of Q
  int time_power = 2;  // 2 for commutation, 3 for nested
  int rows = 5;
  int target_order = 9;
  std::map<std::string, Rational> pins;  // names p1, p1', p2, ...
  std::vector<std::string> unknowns() const;
};

/// Graded abstract system: Z (weight time_power) stands for the base target,
/// E_k (weight k) for its order-k residual; Z must come out with coefficient 1
/// and every other Lyndon coordinate up to target_order with 0.
ConstraintSystem build_second_step_system(const SecondStepAnsatz& a);

// ---------------------------------------------------------------------------
// Solvers

struct NewtonResult {
  bool converged = false;
  std::vector<double> x;
  double residual = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

struct NewtonOptions {
  int max_iterations = 60;
  double tolerance = 1e-12;
  double divergence_bound = 1e6;
};

NewtonResult newton_solve(const ConstraintSystem& cs, const std::vector<double>& start,
                          const NewtonOptions& opt = {});

struct HomotopyOptions {
  int paths = 64;
  double start_radius = 2.0;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<std::vector<double>> starts;  // explicit real start points (optional)
  double real_tolerance = 1e-7;
  int max_steps = 4000;
};

struct PathDiagnostic {
  int index = 0;
  std::string status;  // "real", "complex", "diverged", "stalled"
  int steps = 0;
  double max_imag = 0.0;
};

struct HomotopyResult {
  std::vector<std::vector<double>> real_solutions;  // deduplicated, polished
  std::vector<PathDiagnostic> paths;
};

/// Newton homotopy H(x, s) = F(x) - (1 - s) F(x0) from random complex x0
/// (or supplied real starts), tracked with adaptive steps.
HomotopyResult homotopy_solve(const ConstraintSystem& cs, unsigned long seed, const HomotopyOptions& opt = {});

/// Among real solutions pick min max|x|, ties by the supplied error measure.
std::size_t select_solution(const std::vector<std::vector<double>>& sols,
                            const std::vector<double>& error_measure = {});

// ---------------------------------------------------------------------------
// Schemes

struct VerifyReport {
  double target_error = 0.0;            // |g_target - value|
  double max_other = 0.0;               // max |g_w| for other w up to order
  std::vector<double> order_residuals;  // max |deviation| per order 1..m+1
  std::vector<std::pair<std::string, double>> next_order;  // order m+1 brackets
  double error_coefficient = 0.0;       // Euclidean norm of next_order
  double lie_residual = 0.0;
  double max_residual() const;          // max(target_error, max_other)
};

/// Numeric gbch of the scheme (50-digit arithmetic) through order m + extra.
VerifyReport verify_scheme(const ApproximationScheme& s, int extra_orders = 1);

/// Lyndon coordinates of log(scheme operator), scaled time t = 1.
LieElement<double> scheme_log(const ApproximationScheme& s, int order);

/// Builds a first-step scheme from coefficient rows (c_i, c_i').
ApproximationScheme scheme_from_rows(const std::string& name, SchemeFamily family, int order,
                                     const std::vector<std::pair<double, double>>& rows,
                                     const std::string& precision);

/// Newton refinement of a first-step scheme with the first row pinned.
ApproximationScheme refine_scheme(const ApproximationScheme& s, NewtonResult* info = nullptr);

ApproximationScheme second_step_compose(std::shared_ptr<const ApproximationScheme> q,
                                        const std::vector<std::pair<double, double>>& pattern,
                                        int target_order, NewtonResult* info = nullptr);

ApproximationScheme suzuki_symmetric(std::shared_ptr<const ApproximationScheme> s4);

ApproximationScheme rescale(const ApproximationScheme& s, int n);

/// Scheme with every coefficient negated and the order reversed (the inverse
/// operator).
ApproximationScheme inverse_scheme(const ApproximationScheme& s);

enum class NaiveKind { Commutation, Nested };
/// Operator count of the baseline rescaling method: 4 n^2 with
/// n = s^{3/2}/eps for commutators, 8 l^2 m^3 with l = s/eps, m = s^{4/3}/eps
/// for nested commutators.
double naive_count(NaiveKind kind, double strength, double error);

// ---------------------------------------------------------------------------
// Fixtures and library

/// The printed tables: "I", "II", "IV", "V" are first-step schemes,
/// "III" and "VI" are second-step patterns.
ApproximationScheme printed_table(const std::string& which);
std::vector<std::pair<double, double>> printed_pattern(const std::string& which);

/// Refined, verified schemes used by the compiler, built lazily and cached.
/// Names: "comm2", "comm4", "comm5", "comm9", "nested4", "nested5", "nested6",
/// "nested9".
std::shared_ptr<const ApproximationScheme> library_scheme(const std::string& name);
std::vector<std::string> library_names(SchemeFamily f);

std::string scheme_to_json(const ApproximationScheme& s);
ApproximationScheme scheme_from_json(const std::string& text);

}  // namespace cvd
