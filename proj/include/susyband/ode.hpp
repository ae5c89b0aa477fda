#pragma once

#include <array>
#include <cstddef>

namespace susyband {

struct IntegratorOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  std::size_t max_steps = 5'000'000;
};

// State of the Schrödinger system for the two canonical columns:
// (psi_a, psi_a', psi_b, psi_b').
using SchrodingerState = std::array<double, 4>;

// Adaptive Dormand–Prince 8(5,3) integration of psi'' = (V(x) - E) psi for both columns
// from x0 to x1 (either direction). `potential` is any callable double(double).
// `step` carries the step-size guess across calls; pass 0 to pick one automatically.
// Throws NumericalError on step-size underflow, carrying the location.
template <class PotentialFn>
void integrate_schrodinger(const PotentialFn& potential, double energy, double x0, double x1,
                           SchrodingerState& state, double& step,
                           const IntegratorOptions& options = {});

}  // namespace susyband

#include "susyband/detail/dop853.hpp"
