#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vml/rng.hpp"

namespace vml {

enum class LawKind { gaussian, rademacher, uniform, custom };

// One factor of a product measure. All kinds sample through the quantile
// pathway, so a single uniform substream drives every law.
struct CoordinateLaw {
  LawKind kind = LawKind::gaussian;
  double sigma = 1.0;       // gaussian
  double half_width = 1.0;  // uniform
  std::function<double(double)> quantile;  // custom, defined on (0,1)

  static CoordinateLaw make_gaussian(double sigma);
  static CoordinateLaw make_rademacher();
  static CoordinateLaw make_uniform(double half_width);
  static CoordinateLaw make_custom(std::function<double(double)> quantile);

  double mean() const;      // NaN for custom (unknown)
  double variance() const;  // NaN for custom (unknown)

  bool has_closed_cf() const { return kind != LawKind::custom; }
  // gaussian: exp(-sigma^2 t^2 / 2); rademacher: cos t; uniform: sinc(wt).
  // Throws UnsupportedClosedFormError for custom laws.
  std::complex<double> cf(double t) const;

  double draw(double u) const;

  bool has_truncated_moments() const { return kind != LawKind::custom; }
  double tail_prob(double a) const;                // P(|X| > a)
  double truncated_mean(double a) const;           // E[X 1_{|X|<=a}]
  double truncated_second_moment(double a) const;  // E[X^2 1_{|X|<=a}]
};

struct ProductMeasure {
  // Total, deterministic rule n -> law for every n >= 1. The argument is a
  // double so closed-form rules can be probed far beyond any truncation.
  std::function<CoordinateLaw(double)> law_rule;
  std::string label;
};

enum class CircleConvention {
  complex_pairs,  // index n contributes the real pair (cos 2pi n l, sin 2pi n l)
  complex_native,
};

// Pushforward of Lebesgue measure on [0,1) under l -> {exp(2 pi i n l)} over
// the symmetric window |n| <= window. Both conventions store interleaved
// (re, im) pairs; the tag controls how pairing and marginals treat them.
struct CircleMeasure {
  int window = 1;
  CircleConvention convention = CircleConvention::complex_native;
  std::string label;
};

using Measure = std::variant<ProductMeasure, CircleMeasure>;

const ProductMeasure* as_product(const Measure& m);
const CircleMeasure* as_circle(const Measure& m);

struct TruncatedSample {
  std::vector<double> values;
  int truncation = 0;  // product: N coordinates; circle: window half-width
  bool circle = false;
  CircleConvention convention = CircleConvention::complex_native;
  double lambda = 0.0;  // circle: the generating point
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t dim() const { return values.size(); }
  // Circle accessor for window index n in [-truncation, truncation].
  std::complex<double> coord(int n) const;
};

std::size_t sample_dim(const Measure& m, int truncation);

// Draws sample `index` of the stream. Pure in (measure, truncation, seed,
// stream, index); product coordinates are keyed by coordinate index, so
// truncations are coherent prefixes of each other.
TruncatedSample sample_one(const Measure& m, int truncation, std::uint64_t seed,
                           std::uint64_t stream, std::uint64_t index);

// Streaming variant; avoids materializing count * truncation values.
void for_each_sample(const Measure& m, int truncation, int count,
                     std::uint64_t seed, std::uint64_t stream,
                     const std::function<void(const TruncatedSample&)>& fn);

std::vector<TruncatedSample> sample(const Measure& m, int truncation, int count,
                                    std::uint64_t seed,
                                    std::uint64_t stream = 0);

// Analytic marginal cf of a product measure on distinct coordinates:
// prod_j cf_{coords[j]}(t[j]).
std::complex<double> marginal_cf(const ProductMeasure& m,
                                 std::span<const int> coords,
                                 std::span<const double> t);

// Marginal cf for either kind. For the circle measure, coords are window
// indices and t carries two entries per index (re component, im component);
// the integral over the generating point is done by midpoint quadrature.
std::complex<double> cylinder_cf(const Measure& m, std::span<const int> coords,
                                 std::span<const double> t,
                                 std::size_t quadrature_resolution = 0);

struct CfEstimate {
  std::complex<double> value;
  double std_error = 0.0;
  int n_samples = 0;
};

// Monte Carlo average of exp(i t . x) over the cylinder coordinates.
CfEstimate empirical_cylinder_cf(const Measure& m, std::span<const int> coords,
                                 std::span<const double> t, int mc,
                                 std::uint64_t seed, std::uint64_t stream = 0);

struct ConsistencyReport {
  double max_discrepancy = 0.0;
  std::size_t grid_points = 0;
  double tol = 0.0;
  bool pass = false;
};

// Kolmogorov consistency of nested marginals: the hi-dimensional cf with
// t = 0 on the coordinates outside lo must match the lo-dimensional cf at
// every grid point. Each grid entry has the arity of lo (two reals per
// circle index).
ConsistencyReport consistency_check(const Measure& m,
                                    std::span<const int> lo_coords,
                                    std::span<const int> hi_coords,
                                    const std::vector<std::vector<double>>& grid,
                                    double tol);

}  // namespace vml
