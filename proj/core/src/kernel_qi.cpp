#include "vml/kernel_qi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vml/certificates.hpp"
#include "vml/errors.hpp"

namespace vml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_gaussian(const ProductMeasure& m, int n_probe) {
  for (int n = 1; n <= std::min(n_probe, 64); ++n) {
    if (m.law_rule(n).kind != LawKind::gaussian) {
      throw UnsupportedClosedFormError(
          "kernel operations require gaussian coordinate laws");
    }
  }
  for (const double p : cert::kLargeProbes) {
    if (m.law_rule(p).kind != LawKind::gaussian) {
      throw UnsupportedClosedFormError(
          "kernel operations require gaussian coordinate laws");
    }
  }
}

// Probed bounds on sigma^2 along the tail.
std::pair<double, double> probed_sigma_sq_range(const ProductMeasure& m) {
  double lo = kInf, hi = 0.0;
  for (const double p : cert::kLargeProbes) {
    const double v = m.law_rule(p).variance();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

ShiftVector ShiftVector::zero() {
  ShiftVector h;
  h.rule = [](double) { return 0.0; };
  h.tail.tail_sq_bound = TailBound::zero();
  h.label = "0";
  return h;
}

ShiftVector ShiftVector::basis(int k, double scale) {
  ShiftVector h;
  h.rule = [k, scale](double n) { return n == static_cast<double>(k) ? scale : 0.0; };
  h.tail.tail_sq_bound.fn = [k, scale](double n) {
    return n >= static_cast<double>(k) ? 0.0 : scale * scale;
  };
  h.tail.tail_sq_bound.source = "finite support";
  h.label = scale == 1.0 ? ("e_" + std::to_string(k))
                         : (std::to_string(scale) + "*e_" + std::to_string(k));
  return h;
}

ShiftVector ShiftVector::from_expr(const Expr& e, std::string label,
                                   TailMeta tail) {
  ShiftVector h;
  h.rule = [e](double n) { return e(n); };
  h.tail = std::move(tail);
  h.label = label.empty() ? e.source() : std::move(label);
  return h;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::non_member: return "non_member";
    case Membership::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

CameronMartinReport cameron_martin_norm(const ShiftVector& h,
                                        const ProductMeasure& m, int n_probe,
                                        const TailMeta* tail_hint) {
  require_gaussian(m, n_probe);
  const TailMeta& tail = tail_hint ? *tail_hint : h.tail;

  CameronMartinReport report;
  double partial = 0.0;
  double partial_sq = 0.0;  // plain sum h_n^2, for certificate validation
  for (int n = 1; n <= n_probe; ++n) {
    const double hn = h.rule(n);
    const double s2 = m.law_rule(n).variance();
    partial += hn * hn / s2;
    partial_sq += hn * hn;
  }
  report.partial_norm_sq = partial;
  report.tail_bound = kInf;

  const auto [sigma_sq_inf, sigma_sq_sup] = probed_sigma_sq_range(m);

  if (tail.tail_sq_bound && sigma_sq_inf > 0.0) {
    const double b = std::max(0.0, tail.tail_sq_bound(n_probe));
    report.tail_bound = b / sigma_sq_inf;
    if (std::isfinite(report.tail_bound)) {
      report.membership = Membership::member;
      report.reason = "partial sum plus declared tail bound is finite";
      return report;
    }
  }

  if (tail.sq_partial_lower && std::isfinite(sigma_sq_sup) && sigma_sq_sup > 0.0) {
    const TailBound& lower = tail.sq_partial_lower;
    // Validate the certificate against the plain square partial sums.
    bool valid = lower(static_cast<double>(n_probe)) <=
                 partial_sq * (1.0 + 1e-9) + 1e-9;
    double sup = 0.0;
    for (const double big : cert::kCertProbes) sup = std::max(sup, lower(big));
    if (valid && sup > cert::kDivergenceCap) {
      report.membership = Membership::non_member;
      report.reason =
          "validated unbounded lower-bound certificate on the shift square sum";
      return report;
    }
  }

  report.membership = Membership::inconclusive;
  report.reason = "no usable tail metadata";
  return report;
}

double log_density(const DensityModel& model, const TruncatedSample& x,
                   int n_terms) {
  const int n_max = n_terms < 0 ? model.truncation : n_terms;
  if (static_cast<int>(x.values.size()) < n_max) {
    throw ConfigError("log_density: sample truncation below configured N");
  }
  double acc = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const CoordinateLaw law = model.measure.law_rule(n);
    if (law.kind != LawKind::gaussian) {
      throw UnsupportedClosedFormError("density model requires gaussian laws");
    }
    const double s2 = law.sigma * law.sigma;
    const double hn = model.shift.rule(n);
    acc += hn * x.values[static_cast<std::size_t>(n - 1)] / s2 -
           hn * hn / (2.0 * s2);
  }
  return acc;
}

double translate_density(const DensityModel& model, const TruncatedSample& x) {
  return std::exp(log_density(model, x));
}

TruncatedSample translate_sample(const TruncatedSample& x,
                                 const ShiftVector& h) {
  TruncatedSample out = x;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] += h.rule(static_cast<int>(k) + 1);
  }
  return out;
}

QiReport quasi_invariance_check(const DensityModel& model, const Functional& g,
                                int mc, std::uint64_t seed, double tol) {
  if (mc < 1) throw ConfigError("quasi_invariance_check: mc must be >= 1");
  double sum_l = 0.0, sum_r = 0.0, sum_d = 0.0, sum_d2 = 0.0;
  const Measure m{model.measure};
  for_each_sample(m, model.truncation, mc, seed, /*stream=*/0,
                  [&](const TruncatedSample& x) {
                    const double lhs = translate_density(model, x) * g(x);
                    const double rhs = g(translate_sample(x, model.shift));
                    sum_l += lhs;
                    sum_r += rhs;
                    const double d = lhs - rhs;
                    sum_d += d;
                    sum_d2 += d * d;
                  });
  const double n = static_cast<double>(mc);
  QiReport report;
  report.lhs = sum_l / n;
  report.rhs = sum_r / n;
  const double mean_d = sum_d / n;
  report.delta = std::abs(mean_d);
  report.std_error =
      std::sqrt(std::max(0.0, (sum_d2 / n - mean_d * mean_d) / n));
  report.pass = report.delta <= tol + 3.0 * report.std_error;
  return report;
}

HellingerReport hellinger_dichotomy(const ShiftVector& h,
                                    const ProductMeasure& m,
                                    const std::vector<int>& n_grid) {
  if (n_grid.empty()) throw ConfigError("hellinger_dichotomy: empty grid");
  require_gaussian(m, n_grid.back());

  HellingerReport report;
  double s = 0.0;  // sum h_n^2 / sigma_n^2
  int n = 1;
  for (const int stop : n_grid) {
    for (; n <= stop; ++n) {
      const double hn = h.rule(n);
      s += hn * hn / m.law_rule(n).variance();
    }
    report.partial_products.emplace_back(stop, std::exp(-s / 8.0));
  }

  const auto [sigma_sq_inf, sigma_sq_sup] = probed_sigma_sq_range(m);
  const double h_last = report.partial_products.back().second;

  if (h.tail.tail_sq_bound && sigma_sq_inf > 0.0) {
    const double tail = std::max(0.0, h.tail.tail_sq_bound(n_grid.back())) /
                        sigma_sq_inf;
    if (std::isfinite(tail)) {
      report.limit = HellingerLimit::positive;
      report.limit_lower_bound = h_last * std::exp(-tail / 8.0);
      report.note = "limit bounded below via declared tail bound";
      return report;
    }
  }

  if (h.tail.sq_partial_lower && std::isfinite(sigma_sq_sup) &&
      sigma_sq_sup > 0.0) {
    // H_N <= exp(-L(N) / (8 sigma_sup^2)); find a certificate N pushing it
    // below 1e-3. The witness N may be far beyond summation reach.
    for (const double big : cert::kCertProbes) {
      const double bound =
          std::exp(-h.tail.sq_partial_lower(big) / (8.0 * sigma_sq_sup));
      if (bound < 1e-3) {
        report.limit = HellingerLimit::zero;
        report.zero_witness_n = big;
        report.note = "certificate drives the product below 1e-3";
        return report;
      }
    }
  }

  report.limit = HellingerLimit::undecided;
  report.note = "no usable tail metadata";
  return report;
}

ShiftActionReport shift_action_on_linfun(const CoeffSeq& f,
                                         const ShiftVector& h,
                                         const ProductMeasure& m,
                                         int n_probe) {
  const ConvergenceReport conv = three_series_test(f, m);
  if (conv.verdict != Verdict::converges) {
    throw RejectedInputError(
        "shift_action_on_linfun: functional is not admissible (three-series "
        "verdict: " +
        to_string(conv.verdict) + ")");
  }

  ShiftActionReport report;
  double acc = 0.0;
  for (int n = 1; n <= n_probe; ++n) {
    acc += f.rule(n) * h.rule(n);
  }
  report.constant = acc;

  // Cauchy-Schwarz on the declared tails.
  const double bf = f.tail.tail_sq_bound
                        ? std::max(0.0, f.tail.tail_sq_bound(n_probe))
                        : kInf;
  const double bh = h.tail.tail_sq_bound
                        ? std::max(0.0, h.tail.tail_sq_bound(n_probe))
                        : kInf;
  if (std::isfinite(bf) && std::isfinite(bh)) {
    report.constant_tail_bound = std::sqrt(bf * bh);
    report.certified = true;
    report.note = "pairing tail bounded by Cauchy-Schwarz on declared bounds";
  } else {
    report.constant_tail_bound = kInf;
    report.certified = false;
    report.note = "inconclusive pairing: missing tail bounds";
  }
  return report;
}

}  // namespace vml
