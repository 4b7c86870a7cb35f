#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vml/linfun.hpp"
#include "vml/measure.hpp"

namespace vml {

// A translation direction h, given as a closed-form rule like CoeffSeq.
struct ShiftVector {
  std::function<double(double)> rule;
  TailMeta tail;
  std::string label;

  static ShiftVector zero();
  static ShiftVector basis(int k, double scale = 1.0);
  static ShiftVector from_expr(const Expr& e, std::string label = {},
                               TailMeta tail = {});
};

enum class Membership { member, non_member, inconclusive };

std::string to_string(Membership m);

struct CameronMartinReport {
  double partial_norm_sq = 0.0;  // sum_{n<=N} h_n^2 / sigma_n^2
  double tail_bound = 0.0;       // +infinity when unknown
  Membership membership = Membership::inconclusive;
  std::string reason;
};

// Cameron-Martin norm of h under a Gaussian product measure. Membership is
// certified from the same tail metadata scheme as the three-series test;
// non-gaussian coordinates are rejected.
CameronMartinReport cameron_martin_norm(const ShiftVector& h,
                                        const ProductMeasure& m,
                                        int n_probe = 10000,
                                        const TailMeta* tail_hint = nullptr);

// Radon-Nikodym model of the translated Gaussian product measure:
// log rho_h(x) = sum_n (h_n x_n / sigma_n^2 - h_n^2 / (2 sigma_n^2)).
struct DensityModel {
  ShiftVector shift;
  ProductMeasure measure;  // gaussian kinds only (validated on use)
  int truncation = 256;
};

double log_density(const DensityModel& model, const TruncatedSample& x,
                   int n_terms = -1);

// exp(log rho) computed in log space and exponentiated once.
double translate_density(const DensityModel& model, const TruncatedSample& x);

struct QiReport {
  double lhs = 0.0;    // E[rho_h(x) g(x)]
  double rhs = 0.0;    // E[g(x + h)]
  double delta = 0.0;  // |lhs - rhs|
  double std_error = 0.0;
  bool pass = false;
};

// Change-of-variables identity E[rho_h g] = E[g(. + h)], estimated with
// common random numbers so the 3-sigma acceptance is meaningful.
QiReport quasi_invariance_check(const DensityModel& model, const Functional& g,
                                int mc, std::uint64_t seed, double tol);

enum class HellingerLimit { positive, zero, undecided };

struct HellingerReport {
  std::vector<std::pair<int, double>> partial_products;  // (N, H_N)
  HellingerLimit limit = HellingerLimit::undecided;
  double limit_lower_bound = 0.0;  // when positive
  // When the limit is zero: an N (possibly astronomically large, evaluated
  // through the certificate) at which H_N provably drops below 1e-3.
  double zero_witness_n = 0.0;
  std::string note;
};

// Kakutani dichotomy diagnostic: H_N = prod_{n<=N} exp(-h_n^2/(8 sigma_n^2)).
HellingerReport hellinger_dichotomy(const ShiftVector& h,
                                    const ProductMeasure& m,
                                    const std::vector<int>& n_grid);

struct ShiftActionReport {
  double constant = 0.0;  // sum_n f_n h_n up to the probe
  double constant_tail_bound = 0.0;
  bool certified = false;  // absolute summability established from metadata
  std::string note;
};

// The affine action of translation on series functionals: T_h maps f to
// f + f(h) * 1. Requires f admissible (three-series verdict converges).
ShiftActionReport shift_action_on_linfun(const CoeffSeq& f,
                                         const ShiftVector& h,
                                         const ProductMeasure& m,
                                         int n_probe = 10000);

// Componentwise x + h at the sample's truncation.
TruncatedSample translate_sample(const TruncatedSample& x,
                                 const ShiftVector& h);

}  // namespace vml
