#include "vml/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "vml/errors.hpp"

namespace vml {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hard cap on gridded tensor size (complex nodes).
constexpr std::size_t kMaxGridNodes = std::size_t{1} << 22;

std::size_t checked_tensor_size(int points, std::size_t dim) {
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) {
    total *= static_cast<std::size_t>(points);
    if (total > kMaxGridNodes) {
      throw ConfigError("bochner_invert: grid tensor exceeds the node cap; "
                        "reduce M or the cylinder dimension");
    }
  }
  return total;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto idx = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(sorted.size()) - 1.0,
                       std::ceil(q * static_cast<double>(sorted.size())) - 1.0));
  return sorted[std::max<std::size_t>(idx, 0)];
}

}  // namespace

PdFunctional PdFunctional::gaussian(double scale) {
  if (!(scale > 0.0)) throw ConfigError("gaussian chi requires scale > 0");
  PdFunctional chi;
  chi.form = Form::gaussian;
  chi.scale = scale;
  chi.label = "gaussian(" + std::to_string(scale) + ")";
  return chi;
}

PdFunctional PdFunctional::product(std::function<CoordinateLaw(double)> law_rule,
                                   std::string label) {
  if (!law_rule) throw ConfigError("product chi requires a law rule");
  PdFunctional chi;
  chi.form = Form::product;
  chi.law_rule = std::move(law_rule);
  chi.label = std::move(label);
  return chi;
}

PdFunctional PdFunctional::custom(
    std::function<std::complex<double>(std::span<const double>)> evaluator,
    std::string label) {
  if (!evaluator) throw ConfigError("custom chi requires an evaluator");
  PdFunctional chi;
  chi.form = Form::custom;
  chi.evaluator = std::move(evaluator);
  chi.label = std::move(label);
  return chi;
}

std::complex<double> PdFunctional::operator()(std::span<const double> g) const {
  switch (form) {
    case Form::gaussian: {
      double norm_sq = 0.0;
      for (const double v : g) norm_sq += v * v;
      return {std::exp(-0.5 * scale * scale * norm_sq), 0.0};
    }
    case Form::product: {
      std::complex<double> acc{1.0, 0.0};
      for (std::size_t j = 0; j < g.size(); ++j) {
        acc *= law_rule(static_cast<int>(j) + 1).cf(g[j]);
      }
      return acc;
    }
    case Form::custom:
      return evaluator(g);
  }
  return {1.0, 0.0};
}

std::complex<double> PdFunctional::on_cylinder(std::span<const int> coords,
                                               std::span<const double> t) const {
  if (coords.size() != t.size()) {
    throw ConfigError("on_cylinder: |t| must equal |coords|");
  }
  int max_coord = 0;
  for (const int c : coords) {
    if (c < 1) throw ConfigError("on_cylinder: coordinates start at 1");
    max_coord = std::max(max_coord, c);
  }
  std::vector<double> g(static_cast<std::size_t>(max_coord), 0.0);
  for (std::size_t j = 0; j < coords.size(); ++j) {
    g[static_cast<std::size_t>(coords[j] - 1)] = t[j];
  }
  return (*this)(g);
}

double GriddedDensity::dx() const { return std::numbers::pi / extent; }

double GriddedDensity::x_at(int k) const {
  return (static_cast<double>(k) - static_cast<double>(points) / 2.0) * dx();
}

double GriddedDensity::cell() const {
  double c = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) c *= dx();
  return c;
}

double GriddedDensity::mass() const {
  double acc = 0.0;
  for (const double v : values) acc += v;
  return acc * cell();
}

double GriddedDensity::value_at_zero() const {
  const int mid = points / 2;
  std::size_t index = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    index = index * static_cast<std::size_t>(points) +
            static_cast<std::size_t>(mid);
  }
  return values[index];
}

double GriddedDensity::window_mass(double center, double halfwidth) const {
  if (dim() != 1) throw ConfigError("window_mass: 1D densities only");
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    if (std::abs(x_at(k) - center) <= halfwidth) {
      acc += values[static_cast<std::size_t>(k)];
    }
  }
  return acc * cell();
}

std::vector<GriddedDensity::Atom> GriddedDensity::atoms(
    double mass_threshold) const {
  if (dim() != 1) throw ConfigError("atoms: 1D densities only");
  std::vector<Atom> out;
  const double w = cell();
  int k = 0;
  while (k < points) {
    if (values[static_cast<std::size_t>(k)] * w <= mass_threshold) {
      ++k;
      continue;
    }
    double mass = 0.0, weighted = 0.0;
    while (k < points && values[static_cast<std::size_t>(k)] * w > mass_threshold) {
      const double m = values[static_cast<std::size_t>(k)] * w;
      mass += m;
      weighted += m * x_at(k);
      ++k;
    }
    out.push_back({weighted / mass, mass});
  }
  return out;
}

GriddedDensity GriddedDensity::marginalize(const std::vector<int>& keep) const {
  std::vector<std::size_t> keep_axes;
  for (const int c : keep) {
    const auto it = std::find(coords.begin(), coords.end(), c);
    if (it == coords.end()) {
      throw ConfigError("marginalize: kept coordinate not in the cylinder");
    }
    keep_axes.push_back(static_cast<std::size_t>(it - coords.begin()));
  }

  GriddedDensity out;
  out.coords = keep;
  out.extent = extent;
  out.points = points;
  out.values.assign(checked_tensor_size(points, keep.size()), 0.0);
  out.negativity_mass = negativity_mass;
  out.normalization_defect = normalization_defect;
  out.max_imag = max_imag;

  const std::size_t d = dim();
  const auto m = static_cast<std::size_t>(points);
  std::vector<std::size_t> idx(d, 0);
  const double dropped_cell = cell() / out.cell();

  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t rest = flat;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rest % m;
      rest /= m;
    }
    std::size_t out_flat = 0;
    for (const std::size_t a : keep_axes) {
      out_flat = out_flat * m + idx[a];
    }
    out.values[out_flat] += values[flat] * dropped_cell;
  }
  return out;
}

GriddedDensity bochner_invert(const PdFunctional& chi,
                              std::span<const int> coords, double extent,
                              int points, double negativity_bound) {
  if (coords.empty()) throw ConfigError("bochner_invert: empty index set");
  if (coords.size() > 3) {
    throw ConfigError("bochner_invert: gridded cylinders are capped at 3 axes");
  }
  if (!is_power_of_two(points)) {
    throw ConfigError("bochner_invert: M must be a power of two");
  }
  if (!(extent > 0.0)) throw ConfigError("bochner_invert: extent must be > 0");

  const std::size_t d = coords.size();
  const auto m = static_cast<std::size_t>(points);
  const std::size_t total = checked_tensor_size(points, d);
  const double dt = 2.0 * extent / static_cast<double>(points);

  // Sample chi on the dual grid t_j = -L + j dt per axis.
  std::vector<std::complex<double>> tensor(total);
  std::vector<double> t(d, 0.0);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rest % m;
      rest /= m;
    }
    for (std::size_t a = 0; a < d; ++a) {
      t[a] = -extent + static_cast<double>(idx[a]) * dt;
    }
    tensor[flat] = chi.on_cylinder(coords, t);
  }

  // Forward DFT along each axis.
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(m), transformed(m);
  for (std::size_t axis = 0; axis < d; ++axis) {
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < d; ++a) stride *= m;
    const std::size_t block = stride * m;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < m; ++j) {
          line[j] = tensor[base + off + j * stride];
        }
        fft.fwd(transformed, line);
        for (std::size_t j = 0; j < m; ++j) {
          tensor[base + off + j * stride] = transformed[j];
        }
      }
    }
  }

  // p(x_k) = (dt/2pi)^d * prod_a (-1)^(k_a - M/2) * X[(k + M/2) mod M].
  // The phase is a parity sign because L x_k is an integer multiple of pi.
  GriddedDensity out;
  out.coords.assign(coords.begin(), coords.end());
  out.extent = extent;
  out.points = points;
  out.values.assign(total, 0.0);
  double scale = 1.0;
  for (std::size_t a = 0; a < d; ++a) scale *= dt / kTwoPi;

  const std::size_t half = m / 2;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    int sign = 1;
    std::size_t src = 0;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = rest % m;
      rest /= m;
    }
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t shifted = (idx[a] + half) % m;
      src = src * m + shifted;
      if ((idx[a] + half) % 2 != 0) sign = -sign;
    }
    const std::complex<double> v =
        static_cast<double>(sign) * scale * tensor[src];
    out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
    out.values[flat] = v.real();
  }

  // Clip negative lobes, record their mass, renormalize.
  const double cell = out.cell();
  double neg = 0.0, pos = 0.0;
  for (double& v : out.values) {
    if (v < 0.0) {
      neg += -v * cell;
      v = 0.0;
    } else {
      pos += v * cell;
    }
  }
  out.negativity_mass = neg;
  if (neg > negativity_bound) {
    throw NotPositiveDefiniteError(
        "bochner_invert: negativity mass " + std::to_string(neg) +
        " exceeds the bound; chi is not positive definite at this resolution");
  }
  if (pos <= 0.0) {
    throw NotPositiveDefiniteError("bochner_invert: inversion produced no mass");
  }
  out.normalization_defect = std::abs(pos - 1.0);
  for (double& v : out.values) v /= pos;
  return out;
}

std::string to_string(TightnessVerdict v) {
  switch (v) {
    case TightnessVerdict::tight: return "tight";
    case TightnessVerdict::escaping: return "escaping";
    case TightnessVerdict::undecided: return "undecided";
  }
  return "undecided";
}

std::vector<std::vector<int>> auto_index_sets(int k) {
  if (k < 1) throw ConfigError("auto_index_sets: k must be >= 1");
  std::vector<std::vector<int>> sets;
  for (int i = 1; i <= k; ++i) sets.push_back({i});
  for (int i = 1; i < k; ++i) sets.push_back({i, i + 1});
  return sets;
}

namespace {

void validate_index_sets(const std::vector<std::vector<int>>& index_sets) {
  std::set<std::vector<int>> present(index_sets.begin(), index_sets.end());
  for (const auto& s : index_sets) {
    if (s.empty()) throw ConfigError("index sets must be nonempty");
    for (const int c : s) {
      if (c < 1) throw ConfigError("index sets use coordinates >= 1");
    }
    if (!std::is_sorted(s.begin(), s.end())) {
      throw ConfigError("index sets must be sorted");
    }
    if (s.size() >= 2) {
      for (const int c : s) {
        if (!present.count({c})) {
          throw ConfigError("index sets must contain the singletons of every "
                            "larger set");
        }
      }
    }
    if (s.size() >= 3) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
          if (!present.count({s[i], s[j]})) {
            throw ConfigError("index sets must contain the pairs of every "
                              "larger set");
          }
        }
      }
    }
  }
}

}  // namespace

SpectralModel build_spectral_model(const PdFunctional& chi,
                                   const std::vector<std::vector<int>>& index_sets,
                                   GridSpec grid, WeightRule weights,
                                   double consistency_tol) {
  if (index_sets.empty()) throw ConfigError("build_spectral_model: no index sets");
  validate_index_sets(index_sets);
  if (!weights.fn) throw ConfigError("build_spectral_model: missing weight rule");
  for (const int probe : {1, 2, 16, 1024}) {
    if (!(weights.fn(probe) > 0.0)) {
      throw ConfigError("build_spectral_model: weights must be positive");
    }
  }

  SpectralModel model;
  model.chi = chi;
  model.weights = std::move(weights);
  model.grid = grid;
  model.index_sets = index_sets;

  switch (chi.form) {
    case PdFunctional::Form::gaussian: {
      const double s = chi.scale;
      model.sampler = ProductMeasure{
          [s](double) { return CoordinateLaw::make_gaussian(s); },
          chi.label};
      model.consistency.max_discrepancy = 0.0;  // product factorization
      model.consistency.pairs_checked = index_sets.size();
      break;
    }
    case PdFunctional::Form::product: {
      model.sampler = ProductMeasure{chi.law_rule, chi.label};
      model.consistency.max_discrepancy = 0.0;
      model.consistency.pairs_checked = index_sets.size();
      break;
    }
    case PdFunctional::Form::custom: {
      for (const auto& s : index_sets) {
        model.gridded.push_back(
            bochner_invert(chi, s, grid.extent, grid.points));
      }
      // Marginalization consistency across nested sets.
      for (std::size_t i = 0; i < index_sets.size(); ++i) {
        for (std::size_t j = 0; j < index_sets.size(); ++j) {
          if (i == j) continue;
          const auto& small = index_sets[i];
          const auto& big = index_sets[j];
          if (small.size() >= big.size()) continue;
          if (!std::includes(big.begin(), big.end(), small.begin(), small.end())) {
            continue;
          }
          const GriddedDensity marg = model.gridded[j].marginalize(small);
          double disc = 0.0;
          for (std::size_t k = 0; k < marg.values.size(); ++k) {
            disc = std::max(disc,
                            std::abs(marg.values[k] - model.gridded[i].values[k]));
          }
          model.consistency.max_discrepancy =
              std::max(model.consistency.max_discrepancy, disc);
          ++model.consistency.pairs_checked;
        }
      }
      if (model.consistency.max_discrepancy > consistency_tol) {
        throw ModuleError(
            "build_spectral_model: cylinder marginals disagree beyond "
            "tolerance (" +
            std::to_string(model.consistency.max_discrepancy) + ")");
      }
      break;
    }
  }
  return model;
}

TightnessReport sazonov_diagnostic(const SpectralModel& model,
                                   const std::vector<int>& n_grid, int mc,
                                   std::uint64_t seed,
                                   double stabilize_rel_tol) {
  if (n_grid.empty() || !std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw ConfigError("sazonov_diagnostic: n_grid must be nonempty, increasing");
  }
  if (!model.sampleable()) {
    throw ModuleError(
        "sazonov_diagnostic: model is not sampleable (analytic forms only)");
  }
  if (mc < 8) throw ConfigError("sazonov_diagnostic: mc too small");

  const int n_max = n_grid.back();
  const Measure m{*model.sampler};
  std::vector<std::vector<double>> path(n_grid.size());
  for (auto& v : path) v.reserve(static_cast<std::size_t>(mc));

  for_each_sample(m, n_max, mc, seed, /*stream=*/0, [&](const TruncatedSample& h) {
    double acc = 0.0;
    std::size_t g = 0;
    for (int n = 1; n <= n_max; ++n) {
      const double hn = h.values[static_cast<std::size_t>(n - 1)];
      acc += model.weights.fn(n) * hn * hn;
      if (g < n_grid.size() && n == n_grid[g]) path[g++].push_back(acc);
    }
  });

  TightnessReport report;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    std::sort(path[g].begin(), path[g].end());
    TightnessReport::Row row;
    row.n = n_grid[g];
    row.q50 = quantile_of_sorted(path[g], 0.50);
    row.q90 = quantile_of_sorted(path[g], 0.90);
    row.q99 = quantile_of_sorted(path[g], 0.99);
    report.rows.push_back(row);
  }

  const double q_first = report.rows.front().q99;
  const double q_last = report.rows.back().q99;
  const double q_prev = report.rows.size() >= 2
                            ? report.rows[report.rows.size() - 2].q99
                            : q_first;
  report.last_relative_increment =
      std::abs(q_last - q_prev) / std::max(1e-300, std::abs(q_last));

  if (report.last_relative_increment <= stabilize_rel_tol) {
    report.verdict = TightnessVerdict::tight;
  } else if (q_last > 2.0 * std::max(q_first, 1e-12)) {
    report.verdict = TightnessVerdict::escaping;
  } else {
    report.verdict = TightnessVerdict::undecided;
  }

  // Analytic side for gaussian/product forms: partial sums of w_n sigma_n^2.
  if (model.sampler) {
    double partial = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      partial += model.weights.fn(n) * model.sampler->law_rule(n).variance();
    }
    report.analytic_partial = partial;
    report.note = "analytic partial of sum w_n sigma_n^2 at N = " +
                  std::to_string(n_max);
  }
  return report;
}

std::complex<double> multiplicator(std::span<const double> g,
                                   const SpectralFunctional& F,
                                   const TruncatedSample& h) {
  if (g.size() > h.values.size()) {
    throw IndexError("multiplicator: g support exceeds the sample truncation");
  }
  double phase = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    phase += g[k] * h.values[k];
  }
  return std::complex<double>{std::cos(phase), std::sin(phase)} * F(h);
}

CharFunEstimate reconstruct_chi(const SpectralModel& model,
                                std::span<const double> g, int mc,
                                std::uint64_t seed) {
  if (!model.sampleable()) {
    throw ModuleError("reconstruct_chi: model is not sampleable");
  }
  if (mc < 1) throw ConfigError("reconstruct_chi: mc must be >= 1");
  const int truncation = std::max<int>(1, static_cast<int>(g.size()));
  const Measure m{*model.sampler};

  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for_each_sample(m, truncation, mc, seed, /*stream=*/0,
                  [&](const TruncatedSample& h) {
                    double phase = 0.0;
                    for (std::size_t k = 0; k < g.size(); ++k) {
                      phase += g[k] * h.values[k];
                    }
                    const double re = std::cos(phase), im = std::sin(phase);
                    sum_re += re;
                    sum_im += im;
                    sum_re2 += re * re;
                    sum_im2 += im * im;
                  });
  const double n = static_cast<double>(mc);
  CharFunEstimate est;
  const double mean_re = sum_re / n;
  const double mean_im = sum_im / n;
  est.value = {mean_re, mean_im};
  est.std_error = std::sqrt((std::max(0.0, sum_re2 / n - mean_re * mean_re) +
                             std::max(0.0, sum_im2 / n - mean_im * mean_im)) /
                            n);
  est.n_samples = mc;
  est.method = CfMethod::monte_carlo;
  return est;
}

HomomorphismReport homomorphism_unitarity_check(
    const SpectralModel& model, std::span<const double> g1,
    std::span<const double> g2, const std::vector<SpectralFunctional>& F_set,
    int mc, std::uint64_t seed, double tol) {
  if (!model.sampleable()) {
    throw ModuleError("homomorphism check: model is not sampleable");
  }
  if (F_set.empty()) throw ConfigError("homomorphism check: empty F set");

  std::vector<double> g_sum(std::max(g1.size(), g2.size()), 0.0);
  for (std::size_t k = 0; k < g1.size(); ++k) g_sum[k] += g1[k];
  for (std::size_t k = 0; k < g2.size(); ++k) g_sum[k] += g2[k];
  const int truncation = std::max<int>(1, static_cast<int>(g_sum.size()));
  const Measure m{*model.sampler};

  HomomorphismReport report;
  double sum_d = 0.0, sum_d2 = 0.0;
  long count = 0;
  for_each_sample(m, truncation, mc, seed, /*stream=*/0,
                  [&](const TruncatedSample& h) {
                    for (const auto& F : F_set) {
                      const auto one_step = multiplicator(g_sum, F, h);
                      const auto two_step = multiplicator(
                          g1, [&](const TruncatedSample& hh) {
                            return multiplicator(g2, F, hh);
                          },
                          h);
                      report.max_homomorphism_violation =
                          std::max(report.max_homomorphism_violation,
                                   std::abs(one_step - two_step));
                      // |pi(g) F|^2 - |F|^2 sample difference.
                      const double d =
                          std::norm(multiplicator(g1, F, h)) - std::norm(F(h));
                      sum_d += d;
                      sum_d2 += d * d;
                      ++count;
                    }
                  });
  const double n = static_cast<double>(count);
  const double mean_d = sum_d / n;
  report.max_unitarity_gap = std::abs(mean_d);
  report.unitarity_std_error =
      std::sqrt(std::max(0.0, (sum_d2 / n - mean_d * mean_d) / n));
  report.pass = report.max_homomorphism_violation <= tol &&
                report.max_unitarity_gap <=
                    tol + 3.0 * report.unitarity_std_error;
  return report;
}

namespace {

Verdict realize_admissible(const Measure& m, const CoeffSeq& f,
                           int truncation) {
  if (const auto* prod = as_product(m)) {
    return three_series_test(f, *prod).verdict;
  }
  // Circle measure: the pairing runs over finitely many window coordinates,
  // so admissibility means the rule vanishes past the sample layout.
  const auto dim = sample_dim(m, truncation);
  for (std::size_t k = dim + 1; k <= dim + 64; ++k) {
    if (f.rule(static_cast<double>(k)) != 0.0) return Verdict::inconclusive;
  }
  for (const double p : {1e6, 1e9, 1e12, 1e300}) {
    if (f.rule(p) != 0.0) return Verdict::inconclusive;
  }
  return Verdict::converges;
}

}  // namespace

std::vector<std::vector<double>> realize_pushforward(
    const Measure& m, const std::vector<CoeffSeq>& generating, int truncation,
    int mc, std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(mc));
  for_each_sample(m, truncation, mc, seed, /*stream=*/0,
                  [&](const TruncatedSample& x) {
                    std::vector<double> row;
                    row.reserve(generating.size());
                    for (const auto& f : generating) {
                      row.push_back(evaluate(f, x).value);
                    }
                    rows.push_back(std::move(row));
                  });
  return rows;
}

RealizeReport realize_in_Rinfty(const Measure& m,
                                const std::vector<CoeffSeq>& generating,
                                int mc, std::uint64_t seed, int truncation) {
  if (generating.empty()) {
    throw ConfigError("realize_in_Rinfty: empty generating family");
  }
  RealizeReport report;
  report.truncation = truncation;
  for (const auto& f : generating) {
    const Verdict v = realize_admissible(m, f, truncation);
    report.verdicts.push_back(v);
    if (v != Verdict::converges) {
      throw RejectedInputError("realize_in_Rinfty: functional \"" + f.label +
                               "\" is not admissible (" + to_string(v) + ")");
    }
  }

  // Separation proxy over independent pairs (streams 1 and 2).
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < mc; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const TruncatedSample x = sample_one(m, truncation, seed, 1, idx);
    const TruncatedSample y = sample_one(m, truncation, seed, 2, idx);
    double worst = 0.0;
    for (const auto& f : generating) {
      worst = std::max(worst, std::abs(evaluate(f, x).value -
                                       evaluate(f, y).value));
    }
    const double d = std::min(1.0, worst);
    sum += d;
    sum2 += d * d;
  }
  const double n = static_cast<double>(mc);
  report.separation = sum / n;
  report.separation_std_error =
      std::sqrt(std::max(0.0, (sum2 / n - report.separation * report.separation) / n));

  // Linearity of the map is exact by construction; spot-check it anyway.
  for (int i = 0; i < std::min(mc, 16); ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const TruncatedSample x = sample_one(m, truncation, seed, 1, idx);
    const TruncatedSample y = sample_one(m, truncation, seed, 2, idx);
    TruncatedSample combo = x;
    for (std::size_t k = 0; k < combo.values.size(); ++k) {
      combo.values[k] = 0.5 * x.values[k] + 2.0 * y.values[k];
    }
    for (const auto& f : generating) {
      const double lhs = evaluate(f, combo).value;
      const double rhs =
          0.5 * evaluate(f, x).value + 2.0 * evaluate(f, y).value;
      report.max_linearity_violation =
          std::max(report.max_linearity_violation,
                   std::abs(lhs - rhs) /
                       std::max(1.0, std::abs(lhs) + std::abs(rhs)));
    }
  }
  return report;
}

}  // namespace vml
