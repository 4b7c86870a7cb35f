#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vml/measure.hpp"

namespace vml {

enum class Smoothness { trig_polynomial, piecewise_smooth, l2_generic };

// A function on the circle [0,1), the raw material for the linearization
// demos. known_coeff, when present, is the closed form of the coefficients
// in the convention used throughout this module (see fourier_coeffs).
struct CircleFunction {
  std::function<std::complex<double>(double)> evaluator;
  Smoothness tag = Smoothness::l2_generic;
  int degree = 0;  // trig_polynomial only
  std::function<std::complex<double>(int)> known_coeff;
  std::string label;

  static CircleFunction constant(double c);
  static CircleFunction harmonic(int m);  // exp(2 pi i m lambda)
  static CircleFunction square_wave();    // -1 on [0,1/2), +1 on [1/2,1)
  static CircleFunction triangle_wave();  // 1 - 4|lambda - 1/2|
  // Piecewise-linear interpolation of equispaced samples over [0,1).
  static CircleFunction tabulated(std::vector<double> samples,
                                  std::string label = "tabulated");
};

// The embedding lambda -> {exp(2 pi i n lambda)}_{|n|<=window} as a sample
// of the circle measure (complex convention).
TruncatedSample embed(double lambda, int window);

// Coefficients c_n = int_0^1 exp(+2 pi i n lambda) f(lambda) dlambda for
// |n| <= window. Note the + sign: this is the conjugate of the common
// convention, so a harmonic exp(2 pi i m lambda) lands at index -m.
struct FourierCoeffs {
  int window = 0;
  std::vector<std::complex<double>> c;  // index n stored at n + window

  std::complex<double> at(int n) const;
  double energy() const;  // sum |c_n|^2 over the window
  // Restriction to a smaller window.
  FourierCoeffs truncated(int smaller_window) const;
};

// resolution 0 selects max(1024, 8*window), widened as needed so the
// equispaced midpoint rule is exact for declared trigonometric polynomials.
// Throws ResolutionError when an explicit resolution is too small for a
// declared degree.
FourierCoeffs fourier_coeffs(const CircleFunction& f, int window,
                             std::size_t resolution = 0);

// The pairing <c, x> = sum_n c_n x_{-n}. The index flip compensates the +
// sign in the coefficient convention, so on the image curve the pairing
// returns the partial Fourier sum of f at the sample's generating point.
std::complex<double> pair_with_sample(const FourierCoeffs& c,
                                      const TruncatedSample& x);
std::complex<double> pair_at_lambda(const FourierCoeffs& c, double lambda);

struct ReconstructionReport {
  int window = 0;
  double l2_error = 0.0;  // sqrt E_omega |<c,x> - f|^2, Monte Carlo
  double l2_error_std_error = 0.0;
  double in_measure_error = 0.0;  // E_omega min(1, |<c,x> - f|)
  double parseval_tail = 0.0;     // sqrt(int |f|^2 - sum_{|n|<=N} |c_n|^2)
};

struct LinearizeResult {
  FourierCoeffs coeffs;  // at the largest window
  std::vector<ReconstructionReport> reports;
};

// Builds the series functional of f and measures how well it reconstructs
// f under the pushforward measure, per window.
LinearizeResult linearize(const CircleFunction& f,
                          const std::vector<int>& windows, int mc,
                          std::uint64_t seed);

// Max over samples of |x_m x_n - x_{m+n}| (complex coordinates): the
// multiplicative collapse that makes nonlinear monomials almost-everywhere
// linear under the circle measure.
double product_collapse_check(int m, int n, int window, int mc,
                              std::uint64_t seed);

struct FreenessRow {
  std::string label;
  int window = 0;
  double l2_error = 0.0;
  double in_measure_error = 0.0;
  double parseval_tail = 0.0;
};

struct FreenessTable {
  std::vector<FreenessRow> rows;
  std::string to_csv() const;
};

FreenessTable freeness_demo(const std::vector<CircleFunction>& family,
                            const std::vector<int>& windows, int mc,
                            std::uint64_t seed);

}  // namespace vml
