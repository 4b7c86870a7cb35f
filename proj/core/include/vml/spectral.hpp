#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vml/charfun.hpp"
#include "vml/measure.hpp"

namespace vml {

// A positive-definite functional chi on (a fixed orthonormal frame of) a
// separable Hilbert space. Coefficient vectors address coordinates 1..len.
struct PdFunctional {
  enum class Form { gaussian, product, custom };

  Form form = Form::custom;
  double scale = 1.0;  // gaussian: exp(-s^2 |g|^2 / 2)
  std::function<CoordinateLaw(double)> law_rule;  // product: prod_n cf_n(g_n)
  std::function<std::complex<double>(std::span<const double>)> evaluator;
  std::string label;

  static PdFunctional gaussian(double scale);
  static PdFunctional product(std::function<CoordinateLaw(double)> law_rule,
                              std::string label = "product");
  static PdFunctional custom(
      std::function<std::complex<double>(std::span<const double>)> evaluator,
      std::string label = "custom");

  std::complex<double> operator()(std::span<const double> g) const;
  // chi restricted to span(coords): t[j] placed at coordinate coords[j].
  std::complex<double> on_cylinder(std::span<const int> coords,
                                   std::span<const double> t) const;
};

// A cylinder law on |coords| axes recovered by discrete Fourier inversion of
// chi sampled on the dual grid [-extent, extent) with `points` nodes per
// axis. x-grid spacing is pi / extent.
struct GriddedDensity {
  std::vector<int> coords;
  double extent = 0.0;
  int points = 0;
  std::vector<double> values;  // row-major over the axes

  double dx() const;
  double x_at(int k) const;  // bin center along one axis
  std::size_t dim() const { return coords.size(); }
  double cell() const;  // dx^dim

  double mass() const;
  double value_at_zero() const;
  // Total mass in the window |x - center| <= halfwidth (1D only).
  double window_mass(double center, double halfwidth) const;

  struct Atom {
    double location = 0.0;
    double mass = 0.0;
  };
  // Clusters of adjacent 1D bins whose mass exceeds the threshold.
  std::vector<Atom> atoms(double mass_threshold) const;

  // Sum over the dropped axes; `keep` must be a sub-list of coords.
  GriddedDensity marginalize(const std::vector<int>& keep) const;

  double negativity_mass = 0.0;
  double normalization_defect = 0.0;
  double max_imag = 0.0;
};

// Finite-dimensional Bochner inversion: inverse DFT of chi on the dual grid,
// negative lobes clipped and the result renormalized; defects are recorded
// and a negativity mass above the bound rejects the inversion. Gridded
// cylinders are capped at 3 axes.
GriddedDensity bochner_invert(const PdFunctional& chi,
                              std::span<const int> coords, double extent,
                              int points, double negativity_bound = 1e-3);

struct SpectralConsistency {
  double max_discrepancy = 0.0;
  std::size_t pairs_checked = 0;
};

enum class TightnessVerdict { tight, escaping, undecided };

std::string to_string(TightnessVerdict v);

struct TightnessReport {
  struct Row {
    int n = 0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
  };
  std::vector<Row> rows;
  TightnessVerdict verdict = TightnessVerdict::undecided;
  double last_relative_increment = 0.0;
  // Gaussian forms also carry the analytic series sum w_n sigma_n^2.
  std::optional<double> analytic_partial;
  std::optional<double> analytic_tail_bound;
  std::string note;
};

struct WeightRule {
  std::function<double(double)> fn;  // w_n > 0
  std::string source;
};

struct GridSpec {
  double extent = 12.0;
  int points = 1024;
};

// The spectral measure of chi, represented by its cylinder laws. Analytic
// forms (gaussian/product) keep law descriptors and stay sampleable as a
// product measure; custom forms keep gridded inversions.
struct SpectralModel {
  PdFunctional chi;
  WeightRule weights;
  GridSpec grid;
  std::vector<std::vector<int>> index_sets;
  std::vector<GriddedDensity> gridded;  // custom form only
  std::optional<ProductMeasure> sampler;
  SpectralConsistency consistency;

  bool sampleable() const { return sampler.has_value(); }
};

// Inverts every cylinder in index_sets (analytic forms shortcut the grids),
// then checks marginalization consistency across nested sets. index_sets
// must contain the singletons and the pairs of every larger set it lists.
SpectralModel build_spectral_model(const PdFunctional& chi,
                                   const std::vector<std::vector<int>>& index_sets,
                                   GridSpec grid, WeightRule weights,
                                   double consistency_tol = 1e-3);

// Index sets {1}..{k} plus adjacent pairs, the default cylinder family.
std::vector<std::vector<int>> auto_index_sets(int k);

// Quantile paths of sum_{n<=N} w_n h_n^2 across the N grid under the
// spectral measure; tight when the 99% quantile stabilizes, escaping when it
// keeps growing. Gaussian forms also report the analytic criterion
// sum w_n sigma_n^2 through partial sums and tail metadata.
TightnessReport sazonov_diagnostic(const SpectralModel& model,
                                   const std::vector<int>& n_grid, int mc,
                                   std::uint64_t seed,
                                   double stabilize_rel_tol = 0.01);

using SpectralFunctional =
    std::function<std::complex<double>(const TruncatedSample&)>;

// The representation operator applied to F at the point h:
// (pi(g) F)(h) = exp(i <h, g>) F(h).
std::complex<double> multiplicator(std::span<const double> g,
                                   const SpectralFunctional& F,
                                   const TruncatedSample& h);

// Matrix element of the cyclic vector: MC estimate of int exp(i<h,g>) dmu.
CharFunEstimate reconstruct_chi(const SpectralModel& model,
                                std::span<const double> g, int mc,
                                std::uint64_t seed);

struct HomomorphismReport {
  double max_homomorphism_violation = 0.0;  // pointwise, rounding only
  double max_unitarity_gap = 0.0;           // |E|pi(g)F|^2 - E|F|^2|
  double unitarity_std_error = 0.0;
  bool pass = false;
};

HomomorphismReport homomorphism_unitarity_check(
    const SpectralModel& model, std::span<const double> g1,
    std::span<const double> g2, const std::vector<SpectralFunctional>& F_set,
    int mc, std::uint64_t seed, double tol = 1e-12);

struct RealizeReport {
  std::vector<Verdict> verdicts;
  // E min(1, max_k |y_k(x) - y_k(x')|) over independent sample pairs: a
  // separation proxy for injectivity (near 0 means the images collapse).
  double separation = 0.0;
  double separation_std_error = 0.0;
  double max_linearity_violation = 0.0;
  int truncation = 0;
};

// Pushforward realization of (E, mu) in R^infty through a finite generating
// family: y_k = f_k(x). Functionals must be admissible (series verdict
// converges under product measures, finite support under the circle).
RealizeReport realize_in_Rinfty(const Measure& m,
                                const std::vector<CoeffSeq>& generating,
                                int mc, std::uint64_t seed,
                                int truncation = 256);

// The realization map itself: images of mc samples, one row per sample.
std::vector<std::vector<double>> realize_pushforward(
    const Measure& m, const std::vector<CoeffSeq>& generating, int truncation,
    int mc, std::uint64_t seed);

}  // namespace vml
