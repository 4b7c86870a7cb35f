#include "vml/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vml/certificates.hpp"
#include "vml/errors.hpp"
#include "vml/quadrature.hpp"

namespace vml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Probed sup of per-coordinate variances, used to scale coefficient tail
// bounds into cf tail factors.
double probed_variance_sup(const ProductMeasure& m) {
  double sup = 0.0;
  for (int n = 1; n <= 64; ++n) sup = std::max(sup, m.law_rule(n).variance());
  for (const double p : cert::kLargeProbes) {
    sup = std::max(sup, m.law_rule(p).variance());
  }
  return sup;
}

void check_estimate(CharFunEstimate& est) {
  // |xi| <= 1 up to sampling noise; closed forms carry no noise.
  if (std::abs(est.value) > 1.0 + 3.0 * est.std_error + 1e-12) {
    throw ModuleError("characteristic functional estimate left the unit disk");
  }
}

}  // namespace

std::string to_string(CfMethod m) {
  switch (m) {
    case CfMethod::closed_form: return "closed_form";
    case CfMethod::monte_carlo: return "monte_carlo";
    case CfMethod::quadrature: return "quadrature";
  }
  return "closed_form";
}

CharFunEstimate char_functional_closed(const Measure& m, const CoeffSeq& f,
                                       int truncation) {
  if (truncation < 1) throw ConfigError("char_functional: truncation must be >= 1");
  CharFunEstimate est;

  if (const auto* prod = as_product(m)) {
    std::complex<double> acc{1.0, 0.0};
    for (int n = 1; n <= truncation; ++n) {
      acc *= prod->law_rule(n).cf(f.rule(n));
    }
    est.value = acc;
    est.method = CfMethod::closed_form;

    // Tail factors: for mean-zero laws |cf_n(f_n) - 1| <= sigma_n^2 f_n^2 / 2,
    // so the missing product lies within exp(V * B(N) / 2) of 1.
    const double tail_sq = f.tail_sq_bound_at(truncation);
    const double var_sup = probed_variance_sup(*prod);
    if (std::isfinite(tail_sq) && std::isfinite(var_sup)) {
      est.tail_band = std::expm1(0.5 * var_sup * tail_sq);
      est.tail_note = "multiplicative tail band from declared coefficient bound";
    } else {
      est.tail_band = kInf;
      est.tail_note = "truncated, tail unbounded";
    }
    check_estimate(est);
    return est;
  }

  // Circle measure: integrate exp(i S(lambda)) over the generating point.
  const auto& circ = std::get<CircleMeasure>(m);
  const int window = std::min(truncation, circ.window);
  const std::size_t res =
      std::max<std::size_t>(1024, 8 * static_cast<std::size_t>(circ.window));
  est.value = midpoint_unit_interval(res, [&](double lambda) {
    double phase = 0.0;
    int k = 1;
    for (int n = -window; n <= window; ++n) {
      const double angle = 2.0 * std::numbers::pi * n * lambda;
      phase += f.rule(k++) * std::cos(angle);
      phase += f.rule(k++) * std::sin(angle);
    }
    return std::complex<double>{std::cos(phase), std::sin(phase)};
  });
  est.method = CfMethod::quadrature;
  est.tail_note = "quadrature over the generating point";
  check_estimate(est);
  return est;
}

CharFunEstimate char_functional_mc(const Measure& m, const CoeffSeq& f,
                                   int truncation, int mc, std::uint64_t seed,
                                   std::uint64_t stream) {
  if (mc < 1) throw ConfigError("char_functional: mc must be >= 1");
  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for_each_sample(m, truncation, mc, seed, stream, [&](const TruncatedSample& x) {
    const double phase = evaluate(f, x).value;
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
  const double var_re = std::max(0.0, sum_re2 / n - mean_re * mean_re);
  const double var_im = std::max(0.0, sum_im2 / n - mean_im * mean_im);
  est.std_error = std::sqrt((var_re + var_im) / n);
  est.n_samples = mc;
  est.method = CfMethod::monte_carlo;
  check_estimate(est);
  return est;
}

CharFunEstimate char_functional(const Measure& m, const CoeffSeq& f,
                                int truncation, int mc, std::uint64_t seed) {
  return mc == 0 ? char_functional_closed(m, f, truncation)
                 : char_functional_mc(m, f, truncation, mc, seed);
}

GramResult build_gram(const Measure& m, const std::vector<CoeffSeq>& fs,
                      int truncation, int mc, std::uint64_t seed,
                      bool conjugate_mirror) {
  if (fs.size() < 1) throw ConfigError("build_gram: need at least one functional");
  const auto k = static_cast<Eigen::Index>(fs.size());
  GramResult result;
  result.gram = Eigen::MatrixXcd::Zero(k, k);

  std::uint64_t pair_stream = 1;
  for (Eigen::Index j = 0; j < k; ++j) {
    result.gram(j, j) = {1.0, 0.0};  // xi(0) exactly
    for (Eigen::Index l = j + 1; l < k; ++l) {
      const CoeffSeq diff = coeff_sub(fs[static_cast<std::size_t>(j)],
                                      fs[static_cast<std::size_t>(l)]);
      CharFunEstimate est;
      if (mc == 0) {
        est = char_functional_closed(m, diff, truncation);
      } else {
        est = char_functional_mc(m, diff, truncation, mc, seed, pair_stream++);
      }
      result.max_std_error = std::max(result.max_std_error, est.std_error);
      result.gram(j, l) = est.value;
      result.gram(l, j) = conjugate_mirror ? std::conj(est.value) : est.value;
    }
  }
  const Eigen::MatrixXcd defect = result.gram - result.gram.adjoint();
  result.hermitian_defect = defect.cwiseAbs().maxCoeff();
  return result;
}

PsdReport psd_check(const Measure& m, const std::vector<CoeffSeq>& fs,
                    int truncation, int mc, std::uint64_t seed, double tol) {
  if (fs.size() < 2) throw ConfigError("psd_check: need at least two functionals");
  GramResult gram = build_gram(m, fs, truncation, mc, seed);

  PsdReport report;
  report.gram = gram.gram;
  report.hermitian_defect = gram.hermitian_defect;
  if (report.hermitian_defect > 1e-12) {
    throw ModuleError("psd_check: Gram matrix is not Hermitian");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram.gram,
                                                         Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();

  // Eigenvalue perturbation is bounded by the Frobenius norm of the entry
  // errors (Weyl); each off-diagonal entry carries one estimate.
  const auto n = static_cast<double>(fs.size());
  report.propagated_std_error =
      gram.max_std_error * std::sqrt(n * (n - 1.0));
  report.psd =
      report.min_eigenvalue >= -tol - 3.0 * report.propagated_std_error;
  return report;
}

NondegeneracyReport nondegeneracy_probe(const Measure& m,
                                        const std::vector<CoeffSeq>& fs,
                                        int truncation, double tol, int mc,
                                        std::uint64_t seed) {
  NondegeneracyReport report;
  for (const auto& f : fs) {
    double max_abs = 0.0;
    for (int n = 1; n <= truncation; ++n) {
      max_abs = std::max(max_abs, std::abs(f.rule(n)));
    }
    if (max_abs <= tol) {
      throw ConfigError("nondegeneracy_probe: probe \"" + f.label +
                        "\" is zero within tolerance on the truncation");
    }
    const CharFunEstimate est = char_functional(m, f, truncation, mc, seed);
    NondegeneracyProbe probe;
    probe.label = f.label;
    probe.xi = est.value;
    probe.margin = std::abs(est.value - std::complex<double>{1.0, 0.0});
    probe.flagged = probe.margin <= tol + 3.0 * est.std_error;
    report.any_flagged = report.any_flagged || probe.flagged;
    report.probes.push_back(probe);
  }
  return report;
}

}  // namespace vml
