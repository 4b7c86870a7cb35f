#include "vml/free_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vml/errors.hpp"
#include "vml/quadrature.hpp"

namespace vml {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

CircleFunction CircleFunction::constant(double c) {
  CircleFunction f;
  f.evaluator = [c](double) { return std::complex<double>{c, 0.0}; };
  f.tag = Smoothness::trig_polynomial;
  f.degree = 0;
  f.known_coeff = [c](int n) {
    return n == 0 ? std::complex<double>{c, 0.0} : std::complex<double>{};
  };
  f.label = "const(" + std::to_string(c) + ")";
  return f;
}

CircleFunction CircleFunction::harmonic(int m) {
  CircleFunction f;
  f.evaluator = [m](double lambda) {
    const double a = kTwoPi * m * lambda;
    return std::complex<double>{std::cos(a), std::sin(a)};
  };
  f.tag = Smoothness::trig_polynomial;
  f.degree = std::abs(m);
  // int exp(2 pi i n l) exp(2 pi i m l) dl = [n + m == 0].
  f.known_coeff = [m](int n) {
    return n == -m ? std::complex<double>{1.0, 0.0} : std::complex<double>{};
  };
  f.label = "harmonic(" + std::to_string(m) + ")";
  return f;
}

CircleFunction CircleFunction::square_wave() {
  CircleFunction f;
  f.evaluator = [](double lambda) {
    return std::complex<double>{lambda < 0.5 ? -1.0 : 1.0, 0.0};
  };
  f.tag = Smoothness::piecewise_smooth;
  // c_n = (1 - (-1)^n) / (i pi n): magnitude 2/(pi |n|) at odd n.
  f.known_coeff = [](int n) {
    if (n == 0 || n % 2 == 0) return std::complex<double>{};
    return std::complex<double>{0.0, -2.0 / (std::numbers::pi * n)};
  };
  f.label = "square_wave";
  return f;
}

CircleFunction CircleFunction::triangle_wave() {
  CircleFunction f;
  f.evaluator = [](double lambda) {
    return std::complex<double>{1.0 - 4.0 * std::abs(lambda - 0.5), 0.0};
  };
  f.tag = Smoothness::piecewise_smooth;
  // c_n = -4 / (pi^2 n^2) at odd n, 0 otherwise.
  f.known_coeff = [](int n) {
    if (n == 0 || n % 2 == 0) return std::complex<double>{};
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return std::complex<double>{-4.0 / (pi2 * n * n), 0.0};
  };
  f.label = "triangle_wave";
  return f;
}

CircleFunction CircleFunction::tabulated(std::vector<double> samples,
                                         std::string label) {
  if (samples.size() < 2) {
    throw ConfigError("tabulated circle function needs at least two samples");
  }
  CircleFunction f;
  const auto n = samples.size();
  f.evaluator = [s = std::move(samples), n](double lambda) {
    const double pos = lambda * static_cast<double>(n);
    const auto i0 = static_cast<std::size_t>(pos) % n;
    const std::size_t i1 = (i0 + 1) % n;
    const double t = pos - std::floor(pos);
    return std::complex<double>{(1.0 - t) * s[i0] + t * s[i1], 0.0};
  };
  f.tag = Smoothness::l2_generic;
  f.label = std::move(label);
  return f;
}

TruncatedSample embed(double lambda, int window) {
  if (window < 0) throw ConfigError("embed: window must be >= 0");
  TruncatedSample x;
  x.circle = true;
  x.convention = CircleConvention::complex_native;
  x.truncation = window;
  x.lambda = lambda;
  x.values.resize(2 * (2 * static_cast<std::size_t>(window) + 1));
  for (int n = -window; n <= window; ++n) {
    const double a = kTwoPi * n * lambda;
    const std::size_t base = 2 * static_cast<std::size_t>(n + window);
    x.values[base] = std::cos(a);
    x.values[base + 1] = std::sin(a);
  }
  return x;
}

std::complex<double> FourierCoeffs::at(int n) const {
  if (std::abs(n) > window) return {};
  return c[static_cast<std::size_t>(n + window)];
}

double FourierCoeffs::energy() const {
  double acc = 0.0;
  for (const auto& z : c) acc += std::norm(z);
  return acc;
}

FourierCoeffs FourierCoeffs::truncated(int smaller_window) const {
  if (smaller_window > window) {
    throw ConfigError("FourierCoeffs::truncated: window can only shrink");
  }
  FourierCoeffs out;
  out.window = smaller_window;
  out.c.resize(2 * static_cast<std::size_t>(smaller_window) + 1);
  for (int n = -smaller_window; n <= smaller_window; ++n) {
    out.c[static_cast<std::size_t>(n + smaller_window)] = at(n);
  }
  return out;
}

FourierCoeffs fourier_coeffs(const CircleFunction& f, int window,
                             std::size_t resolution) {
  if (window < 0) throw ConfigError("fourier_coeffs: window must be >= 0");

  // Equispaced rules integrate e^{2 pi i k lambda} exactly unless the
  // resolution divides k; the integrand frequencies reach window + degree.
  const std::size_t needed_for_exactness =
      f.tag == Smoothness::trig_polynomial
          ? static_cast<std::size_t>(window + f.degree) + 1
          : 0;
  if (resolution == 0) {
    resolution = std::max<std::size_t>(
        {1024, 8 * static_cast<std::size_t>(window), needed_for_exactness});
  } else if (f.tag == Smoothness::trig_polynomial &&
             resolution < needed_for_exactness) {
    throw ResolutionError(
        "fourier_coeffs: quadrature under-resolved for declared degree " +
        std::to_string(f.degree));
  }

  FourierCoeffs out;
  out.window = window;
  out.c.resize(2 * static_cast<std::size_t>(window) + 1);
  for (int n = -window; n <= window; ++n) {
    out.c[static_cast<std::size_t>(n + window)] =
        midpoint_unit_interval(resolution, [&](double lambda) {
          const double a = kTwoPi * n * lambda;
          return std::complex<double>{std::cos(a), std::sin(a)} *
                 f.evaluator(lambda);
        });
  }
  return out;
}

std::complex<double> pair_with_sample(const FourierCoeffs& c,
                                      const TruncatedSample& x) {
  if (!x.circle) {
    throw ConfigError("pair_with_sample: expected a circle sample");
  }
  if (x.truncation < c.window) {
    throw IndexError("pair_with_sample: sample window too small");
  }
  std::complex<double> acc{};
  for (int n = -c.window; n <= c.window; ++n) {
    acc += c.at(n) * x.coord(-n);
  }
  return acc;
}

std::complex<double> pair_at_lambda(const FourierCoeffs& c, double lambda) {
  std::complex<double> acc{};
  for (int n = -c.window; n <= c.window; ++n) {
    const double a = -kTwoPi * n * lambda;
    acc += c.at(n) * std::complex<double>{std::cos(a), std::sin(a)};
  }
  return acc;
}

LinearizeResult linearize(const CircleFunction& f,
                          const std::vector<int>& windows, int mc,
                          std::uint64_t seed) {
  if (windows.empty()) throw ConfigError("linearize: need at least one window");
  if (mc < 1) throw ConfigError("linearize: mc must be >= 1");
  std::vector<int> sorted = windows;
  std::sort(sorted.begin(), sorted.end());

  LinearizeResult result;
  const int w_max = sorted.back();
  result.coeffs = fourier_coeffs(f, w_max);

  const double f_energy =
      midpoint_unit_interval(std::max<std::size_t>(4096, 16 * static_cast<std::size_t>(w_max)),
                             [&](double lambda) { return std::norm(f.evaluator(lambda)); });

  const CounterRng rng(seed, /*stream=*/0);
  for (const int w : sorted) {
    const FourierCoeffs cw = result.coeffs.truncated(w);
    double sum_sq = 0.0, sum_sq2 = 0.0, sum_min = 0.0;
    for (int i = 0; i < mc; ++i) {
      const double lambda = rng.uniform(0, static_cast<std::uint64_t>(i));
      const std::complex<double> recon = pair_at_lambda(cw, lambda);
      const double err = std::abs(recon - f.evaluator(lambda));
      sum_sq += err * err;
      sum_sq2 += err * err * err * err;
      sum_min += std::min(1.0, err);
    }
    const double n = static_cast<double>(mc);
    ReconstructionReport rep;
    rep.window = w;
    const double mean_sq = sum_sq / n;
    rep.l2_error = std::sqrt(mean_sq);
    const double var_sq = std::max(0.0, sum_sq2 / n - mean_sq * mean_sq);
    // Delta method: se of sqrt(mean) = se(mean) / (2 sqrt(mean)).
    rep.l2_error_std_error =
        mean_sq > 0.0 ? std::sqrt(var_sq / n) / (2.0 * rep.l2_error) : 0.0;
    rep.in_measure_error = sum_min / n;
    rep.parseval_tail = std::sqrt(std::max(0.0, f_energy - cw.energy()));
    result.reports.push_back(rep);
  }
  return result;
}

double product_collapse_check(int m, int n, int window, int mc,
                              std::uint64_t seed) {
  if (std::abs(m) > window || std::abs(n) > window || std::abs(m + n) > window) {
    throw IndexError("product_collapse_check: indices must fit the window");
  }
  if (mc < 1) throw ConfigError("product_collapse_check: mc must be >= 1");
  const Measure circle{CircleMeasure{window, CircleConvention::complex_native, "omega"}};
  double worst = 0.0;
  for_each_sample(circle, window, mc, seed, /*stream=*/0,
                  [&](const TruncatedSample& x) {
                    const auto lhs = x.coord(m) * x.coord(n);
                    const auto rhs = x.coord(m + n);
                    worst = std::max(worst, std::abs(lhs - rhs));
                  });
  return worst;
}

std::string FreenessTable::to_csv() const {
  std::ostringstream os;
  os << "label,window,l2_error,in_measure_error,parseval_tail\n";
  for (const auto& r : rows) {
    os << r.label << ',' << r.window << ',' << r.l2_error << ','
       << r.in_measure_error << ',' << r.parseval_tail << '\n';
  }
  return os.str();
}

FreenessTable freeness_demo(const std::vector<CircleFunction>& family,
                            const std::vector<int>& windows, int mc,
                            std::uint64_t seed) {
  if (family.empty()) throw ConfigError("freeness_demo: empty function family");
  FreenessTable table;
  for (const auto& f : family) {
    const LinearizeResult res = linearize(f, windows, mc, seed);
    for (const auto& rep : res.reports) {
      FreenessRow row;
      row.label = f.label;
      row.window = rep.window;
      row.l2_error = rep.l2_error;
      row.in_measure_error = rep.in_measure_error;
      row.parseval_tail = rep.parseval_tail;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace vml
