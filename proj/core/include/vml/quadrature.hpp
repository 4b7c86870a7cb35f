#pragma once

#include <complex>
#include <cstddef>

namespace vml {

// Composite midpoint rule on [0,1). Spectrally accurate for smooth periodic
// integrands; exact for trigonometric polynomials of degree < resolution.
template <typename F>
auto midpoint_unit_interval(std::size_t resolution, F&& f) {
  using R = decltype(f(0.0));
  R acc{};
  const double h = 1.0 / static_cast<double>(resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    acc += f((static_cast<double>(j) + 0.5) * h);
  }
  return acc * h;
}

}  // namespace vml
