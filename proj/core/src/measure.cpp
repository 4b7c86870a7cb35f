#include "vml/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "vml/errors.hpp"
#include "vml/quadrature.hpp"
#include "vml/special.hpp"

namespace vml {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Spot check that a custom quantile is nondecreasing on a fixed grid.
void check_quantile_monotone(const std::function<double(double)>& q) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 64; ++k) {
    const double u = static_cast<double>(k) / 65.0;
    const double v = q(u);
    if (!(v >= prev)) {
      throw InvalidLawError("custom law: quantile evaluator is not monotone");
    }
    prev = v;
  }
}

}  // namespace

CoordinateLaw CoordinateLaw::make_gaussian(double sigma) {
  if (!(sigma > 0.0)) throw InvalidLawError("gaussian law requires sigma > 0");
  CoordinateLaw law;
  law.kind = LawKind::gaussian;
  law.sigma = sigma;
  return law;
}

CoordinateLaw CoordinateLaw::make_rademacher() {
  CoordinateLaw law;
  law.kind = LawKind::rademacher;
  return law;
}

CoordinateLaw CoordinateLaw::make_uniform(double half_width) {
  if (!(half_width > 0.0)) {
    throw InvalidLawError("uniform law requires half_width > 0");
  }
  CoordinateLaw law;
  law.kind = LawKind::uniform;
  law.half_width = half_width;
  return law;
}

CoordinateLaw CoordinateLaw::make_custom(std::function<double(double)> quantile) {
  if (!quantile) throw InvalidLawError("custom law requires a quantile evaluator");
  CoordinateLaw law;
  law.kind = LawKind::custom;
  law.quantile = std::move(quantile);
  return law;
}

double CoordinateLaw::mean() const {
  switch (kind) {
    case LawKind::gaussian:
    case LawKind::rademacher:
    case LawKind::uniform:
      return 0.0;
    case LawKind::custom:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.0;
}

double CoordinateLaw::variance() const {
  switch (kind) {
    case LawKind::gaussian:
      return sigma * sigma;
    case LawKind::rademacher:
      return 1.0;
    case LawKind::uniform:
      return half_width * half_width / 3.0;
    case LawKind::custom:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.0;
}

std::complex<double> CoordinateLaw::cf(double t) const {
  switch (kind) {
    case LawKind::gaussian:
      return {std::exp(-0.5 * sigma * sigma * t * t), 0.0};
    case LawKind::rademacher:
      return {std::cos(t), 0.0};
    case LawKind::uniform:
      return {sinc(half_width * t), 0.0};
    case LawKind::custom:
      throw UnsupportedClosedFormError(
          "custom law has no analytic characteristic function");
  }
  return {1.0, 0.0};
}

double CoordinateLaw::draw(double u) const {
  switch (kind) {
    case LawKind::gaussian:
      return sigma * normal_quantile(u);
    case LawKind::rademacher:
      return u < 0.5 ? -1.0 : 1.0;
    case LawKind::uniform:
      return half_width * (2.0 * u - 1.0);
    case LawKind::custom:
      return quantile(u);
  }
  return 0.0;
}

double CoordinateLaw::tail_prob(double a) const {
  if (a < 0.0) return 1.0;
  switch (kind) {
    case LawKind::gaussian:
      return 2.0 * normal_sf(a / sigma);
    case LawKind::rademacher:
      return a < 1.0 ? 1.0 : 0.0;
    case LawKind::uniform:
      return a >= half_width ? 0.0 : 1.0 - a / half_width;
    case LawKind::custom:
      throw UnsupportedClosedFormError("custom law has no computable truncated moments");
  }
  return 0.0;
}

double CoordinateLaw::truncated_mean(double a) const {
  if (!has_truncated_moments()) {
    throw UnsupportedClosedFormError("custom law has no computable truncated moments");
  }
  (void)a;
  // All builtin laws are symmetric about zero.
  return 0.0;
}

double CoordinateLaw::truncated_second_moment(double a) const {
  if (a <= 0.0) return 0.0;
  switch (kind) {
    case LawKind::gaussian: {
      const double alpha = a / sigma;
      return sigma * sigma *
             ((normal_cdf(alpha) - normal_cdf(-alpha)) -
              2.0 * alpha * normal_pdf(alpha));
    }
    case LawKind::rademacher:
      return a >= 1.0 ? 1.0 : 0.0;
    case LawKind::uniform: {
      const double b = std::min(a, half_width);
      return b * b * b / (3.0 * half_width);
    }
    case LawKind::custom:
      throw UnsupportedClosedFormError("custom law has no computable truncated moments");
  }
  return 0.0;
}

const ProductMeasure* as_product(const Measure& m) {
  return std::get_if<ProductMeasure>(&m);
}

const CircleMeasure* as_circle(const Measure& m) {
  return std::get_if<CircleMeasure>(&m);
}

std::complex<double> TruncatedSample::coord(int n) const {
  if (!circle || std::abs(n) > truncation) {
    throw IndexError("sample coordinate index outside window");
  }
  const std::size_t base = 2 * static_cast<std::size_t>(n + truncation);
  return {values[base], values[base + 1]};
}

std::size_t sample_dim(const Measure& m, int truncation) {
  if (as_circle(m)) {
    return 2 * (2 * static_cast<std::size_t>(truncation) + 1);
  }
  return static_cast<std::size_t>(truncation);
}

TruncatedSample sample_one(const Measure& m, int truncation, std::uint64_t seed,
                           std::uint64_t stream, std::uint64_t index) {
  if (truncation < 1) throw ConfigError("sample: truncation must be >= 1");
  const CounterRng rng(seed, stream);
  TruncatedSample out;
  out.truncation = truncation;
  out.seed = seed;
  out.stream = stream;

  if (const auto* prod = as_product(m)) {
    out.values.resize(static_cast<std::size_t>(truncation));
    for (int n = 1; n <= truncation; ++n) {
      const CoordinateLaw law = prod->law_rule(n);
      if (law.kind == LawKind::custom) check_quantile_monotone(law.quantile);
      out.values[static_cast<std::size_t>(n - 1)] =
          law.draw(rng.uniform_open(static_cast<std::uint64_t>(n), index));
    }
    return out;
  }

  const auto& circ = std::get<CircleMeasure>(m);
  out.circle = true;
  out.convention = circ.convention;
  // One generating point per sample; coordinate key 0 is reserved for it.
  out.lambda = rng.uniform(0, index);
  out.values.resize(2 * (2 * static_cast<std::size_t>(truncation) + 1));
  for (int n = -truncation; n <= truncation; ++n) {
    const double angle = kTwoPi * static_cast<double>(n) * out.lambda;
    const std::size_t base = 2 * static_cast<std::size_t>(n + truncation);
    out.values[base] = std::cos(angle);
    out.values[base + 1] = std::sin(angle);
  }
  return out;
}

void for_each_sample(const Measure& m, int truncation, int count,
                     std::uint64_t seed, std::uint64_t stream,
                     const std::function<void(const TruncatedSample&)>& fn) {
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  for (int i = 0; i < count; ++i) {
    fn(sample_one(m, truncation, seed, stream, static_cast<std::uint64_t>(i)));
  }
}

std::vector<TruncatedSample> sample(const Measure& m, int truncation, int count,
                                    std::uint64_t seed, std::uint64_t stream) {
  std::vector<TruncatedSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for_each_sample(m, truncation, count, seed, stream,
                  [&](const TruncatedSample& s) { out.push_back(s); });
  return out;
}

std::complex<double> marginal_cf(const ProductMeasure& m,
                                 std::span<const int> coords,
                                 std::span<const double> t) {
  if (coords.size() != t.size()) {
    throw ConfigError("marginal_cf: |t| must equal |coords|");
  }
  std::set<int> distinct(coords.begin(), coords.end());
  if (distinct.size() != coords.size()) {
    throw ConfigError("marginal_cf: coordinates must be distinct");
  }
  std::complex<double> acc{1.0, 0.0};
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (coords[j] < 1) throw ConfigError("marginal_cf: coordinates start at 1");
    acc *= m.law_rule(coords[j]).cf(t[j]);
  }
  return acc;
}

namespace {

std::size_t circle_resolution(const CircleMeasure& c, std::size_t requested) {
  const std::size_t base = std::max<std::size_t>(
      1024, 8 * static_cast<std::size_t>(std::abs(c.window)));
  return requested == 0 ? base : requested;
}

}  // namespace

std::complex<double> cylinder_cf(const Measure& m, std::span<const int> coords,
                                 std::span<const double> t,
                                 std::size_t quadrature_resolution) {
  if (const auto* prod = as_product(m)) {
    return marginal_cf(*prod, coords, t);
  }
  const auto& circ = std::get<CircleMeasure>(m);
  if (t.size() != 2 * coords.size()) {
    throw ConfigError("cylinder_cf: circle marginals take two t entries per index");
  }
  for (int n : coords) {
    if (std::abs(n) > circ.window) {
      throw IndexError("cylinder_cf: index outside circle window");
    }
  }
  const std::size_t res = circle_resolution(circ, quadrature_resolution);
  return midpoint_unit_interval(res, [&](double lambda) {
    double phase = 0.0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      const double angle = kTwoPi * static_cast<double>(coords[j]) * lambda;
      phase += t[2 * j] * std::cos(angle) + t[2 * j + 1] * std::sin(angle);
    }
    return std::complex<double>{std::cos(phase), std::sin(phase)};
  });
}

CfEstimate empirical_cylinder_cf(const Measure& m, std::span<const int> coords,
                                 std::span<const double> t, int mc,
                                 std::uint64_t seed, std::uint64_t stream) {
  if (mc < 1) throw ConfigError("empirical_cylinder_cf: mc must be >= 1");
  int truncation = 1;
  if (as_product(m)) {
    for (int n : coords) truncation = std::max(truncation, n);
  } else {
    for (int n : coords) truncation = std::max(truncation, std::abs(n));
  }

  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for_each_sample(m, truncation, mc, seed, stream, [&](const TruncatedSample& x) {
    double phase = 0.0;
    if (!x.circle) {
      for (std::size_t j = 0; j < coords.size(); ++j) {
        phase += t[j] * x.values[static_cast<std::size_t>(coords[j] - 1)];
      }
    } else {
      for (std::size_t j = 0; j < coords.size(); ++j) {
        const auto z = x.coord(coords[j]);
        phase += t[2 * j] * z.real() + t[2 * j + 1] * z.imag();
      }
    }
    const double re = std::cos(phase), im = std::sin(phase);
    sum_re += re;
    sum_im += im;
    sum_re2 += re * re;
    sum_im2 += im * im;
  });

  const double n = static_cast<double>(mc);
  const double mean_re = sum_re / n;
  const double mean_im = sum_im / n;
  const double var_re = std::max(0.0, sum_re2 / n - mean_re * mean_re);
  const double var_im = std::max(0.0, sum_im2 / n - mean_im * mean_im);
  CfEstimate est;
  est.value = {mean_re, mean_im};
  est.std_error = std::sqrt((var_re + var_im) / n);
  est.n_samples = mc;
  return est;
}

ConsistencyReport consistency_check(const Measure& m,
                                    std::span<const int> lo_coords,
                                    std::span<const int> hi_coords,
                                    const std::vector<std::vector<double>>& grid,
                                    double tol) {
  std::set<int> lo(lo_coords.begin(), lo_coords.end());
  std::set<int> hi(hi_coords.begin(), hi_coords.end());
  if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) {
    throw ConfigError("consistency_check: lo_coords must be a subset of hi_coords");
  }

  const std::size_t arity = as_circle(m) ? 2 : 1;
  ConsistencyReport report;
  report.tol = tol;
  report.grid_points = grid.size();

  for (const auto& t_lo : grid) {
    if (t_lo.size() != arity * lo_coords.size()) {
      throw ConfigError("consistency_check: grid entry has wrong arity");
    }
    // Embed: t = t_lo on shared coordinates, 0 on the extra ones.
    std::vector<double> t_hi(arity * hi_coords.size(), 0.0);
    for (std::size_t j = 0; j < lo_coords.size(); ++j) {
      const auto it = std::find(hi_coords.begin(), hi_coords.end(), lo_coords[j]);
      const std::size_t pos = static_cast<std::size_t>(it - hi_coords.begin());
      for (std::size_t a = 0; a < arity; ++a) {
        t_hi[arity * pos + a] = t_lo[arity * j + a];
      }
    }
    const auto lo_cf = cylinder_cf(m, lo_coords, t_lo);
    const auto hi_cf = cylinder_cf(m, hi_coords, t_hi);
    report.max_discrepancy =
        std::max(report.max_discrepancy, std::abs(lo_cf - hi_cf));
  }
  report.pass = report.max_discrepancy <= tol;
  return report;
}

}  // namespace vml
