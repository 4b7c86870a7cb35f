#pragma once

namespace vml::cert {

// Probe indices beyond any summation range. Rules are closed forms over n,
// so evaluating them at astronomically large arguments costs nothing; the
// probes presume rules do not collapse between probe points.
inline constexpr double kLargeProbes[] = {1e5, 1e6, 1e8, 1e10, 1e13,
                                          1e50, 1e150, 1e300};

// N values at which a declared unbounded lower bound must clear the cap.
// Logarithmic certificates reach only ~700 within double range, so the cap
// is deliberately modest; the certificate declares divergence, the cap and
// the partial-sum spot checks just keep it honest.
inline constexpr double kCertProbes[] = {1e4, 1e8, 1e16, 1e32,
                                         1e64, 1e128, 1e300};
inline constexpr double kDivergenceCap = 100.0;

}  // namespace vml::cert
