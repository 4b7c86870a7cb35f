#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vml/linfun.hpp"
#include "vml/measure.hpp"

namespace vml {

enum class CfMethod { closed_form, monte_carlo, quadrature };

std::string to_string(CfMethod m);

// One value of the characteristic functional xi(f) = E exp(i f(x)).
struct CharFunEstimate {
  std::complex<double> value{1.0, 0.0};
  double std_error = 0.0;
  int n_samples = 0;
  CfMethod method = CfMethod::closed_form;
  // Half-width of the multiplicative band covering the truncated tail
  // factors; +infinity when the coefficient tail is undeclared.
  double tail_band = 0.0;
  std::string tail_note;
};

// Closed-form route: product of per-coordinate cfs for product measures
// (throws UnsupportedClosedFormError when a law has no analytic cf),
// quadrature over the generating point for the circle measure.
CharFunEstimate char_functional_closed(const Measure& m, const CoeffSeq& f,
                                       int truncation);

// Monte Carlo route: empirical mean of exp(i S_N(x)).
CharFunEstimate char_functional_mc(const Measure& m, const CoeffSeq& f,
                                   int truncation, int mc, std::uint64_t seed,
                                   std::uint64_t stream = 0);

// Dispatcher: mc == 0 selects the closed form.
CharFunEstimate char_functional(const Measure& m, const CoeffSeq& f,
                                int truncation, int mc, std::uint64_t seed);

struct GramResult {
  Eigen::MatrixXcd gram;
  double max_std_error = 0.0;       // largest per-entry MC standard error
  double hermitian_defect = 0.0;    // max |G - G^H| before mirroring
};

// Gram matrix G_jk = xi(f_j - f_k), one estimate per unordered pair, then
// mirrored with conjugation so the eigensolver sees exactly Hermitian input.
// `conjugate_mirror` exists so the verification suite can run the broken
// variant and confirm it is caught.
GramResult build_gram(const Measure& m, const std::vector<CoeffSeq>& fs,
                      int truncation, int mc, std::uint64_t seed,
                      bool conjugate_mirror = true);

struct PsdReport {
  Eigen::MatrixXcd gram;
  double min_eigenvalue = 0.0;
  double propagated_std_error = 0.0;
  double hermitian_defect = 0.0;
  bool psd = false;
};

// Positive-definiteness probe of xi on span{fs}: minimum eigenvalue of the
// Gram matrix, accepted when >= -tol - 3 * propagated error.
PsdReport psd_check(const Measure& m, const std::vector<CoeffSeq>& fs,
                    int truncation, int mc, std::uint64_t seed, double tol);

struct NondegeneracyProbe {
  std::string label;
  std::complex<double> xi;
  double margin = 0.0;  // |xi(f) - 1|
  bool flagged = false;
};

struct NondegeneracyReport {
  std::vector<NondegeneracyProbe> probes;
  bool any_flagged = false;
};

// Asserts |xi(f) - 1| > tol for each nonzero probe; directions where xi
// returns to 1 (periodic coordinate cfs) are flagged, not errors.
NondegeneracyReport nondegeneracy_probe(const Measure& m,
                                        const std::vector<CoeffSeq>& fs,
                                        int truncation, double tol, int mc = 0,
                                        std::uint64_t seed = 0);

}  // namespace vml
