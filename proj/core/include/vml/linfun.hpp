#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vml/expr.hpp"
#include "vml/measure.hpp"

namespace vml {

// A closed-form bound in N, carried as metadata next to a rule. The source
// string is what reports print; JSON descriptors build these from the
// expression sublanguage.
struct TailBound {
  std::function<double(double)> fn;
  std::string source;

  explicit operator bool() const { return static_cast<bool>(fn); }
  double operator()(double n) const { return fn(n); }

  static TailBound from_expr(const Expr& e);
  static TailBound zero();
};

// Tail certificates attached to a coefficient or shift rule, spot-validated
// before use:
//  - tail_sq_bound:    B(N) >= sum_{n>N} f_n^2, nonincreasing in N;
//  - sq_partial_lower: L(N) <= sum_{n<=N} f_n^2, nondecreasing; an unbounded
//    L certifies divergence of the square sum.
struct TailMeta {
  TailBound tail_sq_bound;
  TailBound sq_partial_lower;
};

// A candidate measurable linear functional, given by the coefficient rule of
// the series sum_n f_n x_n. Rules are total closed forms over n >= 1, with a
// double argument so certificates can probe them at very large indices.
struct CoeffSeq {
  std::function<double(double)> rule;
  TailMeta tail;
  std::string label;

  static CoeffSeq zero();
  static CoeffSeq basis(int k, double scale = 1.0);
  static CoeffSeq from_expr(const Expr& e, std::string label = {},
                            TailMeta tail = {});

  // +infinity when no bound is declared.
  double tail_sq_bound_at(int n_trunc) const;
};

CoeffSeq coeff_add(const CoeffSeq& f, const CoeffSeq& g);
CoeffSeq coeff_sub(const CoeffSeq& f, const CoeffSeq& g);
CoeffSeq coeff_scale(double alpha, const CoeffSeq& f);

enum class Verdict { converges, diverges, inconclusive };

std::string to_string(Verdict v);

struct SeriesReport {
  std::string name;
  double partial_sum = 0.0;
  // Upper bound on the tail beyond the probe range; +infinity when unknown.
  double tail_bound = 0.0;
};

struct CauchyStat {
  int n_lo = 0;
  int n_hi = 0;
  double eps = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
};

struct ConvergenceReport {
  Verdict verdict = Verdict::inconclusive;
  std::string reason;
  std::array<SeriesReport, 3> series{};
  std::vector<CauchyStat> cauchy_stats;
};

// Kolmogorov three-series test for sum_n f_n xi_n with xi_n ~ law(n),
// truncating at |X| <= trunc_level. Convergence is certified from declared
// tail bounds; divergence from a spot-validated lower-bound certificate or
// from series terms staying bounded away from zero at large probe indices.
// Anything uncertifiable is reported inconclusive, with the reason.
ConvergenceReport three_series_test(const CoeffSeq& f, const ProductMeasure& m,
                                    double trunc_level = 1.0,
                                    int n_probe = 10000, double tol = 1e-3);

struct EvalResult {
  double value = 0.0;
  // Declared bound on sum_{n>N} f_n^2 at this truncation; +infinity when
  // unknown. Scale by the measure's per-coordinate variance for an L2 tail.
  double tail_sq_bound = 0.0;
};

// Partial sum S_N(x) = sum_{n<=N} f_n x_n over the sample's coordinates.
// Circle samples expose their interleaved real layout as coordinates.
EvalResult evaluate(const CoeffSeq& f, const TruncatedSample& x);

// Brute-force oracle for the three-series verdict: Monte Carlo estimates of
// P(|S_M - S_N| > eps) for consecutive N < M in n_grid, on truncation-
// coherent samples (common streams across the grid).
std::vector<CauchyStat> cauchy_in_measure_oracle(const CoeffSeq& f,
                                                 const Measure& m, double eps,
                                                 const std::vector<int>& n_grid,
                                                 int mc, std::uint64_t seed);

using Functional = std::function<double(const TruncatedSample&)>;

struct ViolationReport {
  double max_violation = 0.0;  // scaled by max(1, |l1 F(x)| + |l2 F(y)|)
  double mean_violation = 0.0;
  double fraction_exceeding = 0.0;
  int trials = 0;
};

// Maps two independent uniforms to a pair of scalars (lambda1, lambda2).
using PairLaw = std::function<std::pair<double, double>(double, double)>;

PairLaw gaussian_pair_law();

// Samples (x, y, l1, l2), forms the combination l1 x + l2 y at a fixed
// truncation and measures |F(l1 x + l2 y) - l1 F(x) - l2 F(y)|.
ViolationReport almost_linearity_test(const Functional& F, const Measure& m,
                                      int trials, const PairLaw& lambda_law,
                                      double tol, std::uint64_t seed,
                                      int truncation = 256);

struct DistanceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

// Monte Carlo estimate of E[min(1, |F(x) - G(x)|)], the bounded metric for
// convergence in measure.
DistanceEstimate in_measure_distance(const Functional& F, const Functional& G,
                                     const Measure& m, int mc,
                                     std::uint64_t seed, int truncation = 256);

}  // namespace vml
