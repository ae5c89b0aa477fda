#pragma once

#include <span>
#include <vector>

#include "susyband/grid.hpp"
#include "susyband/potential.hpp"
#include "susyband/seeds.hpp"

namespace susyband {

struct KernelState {
  double epsilon = 0.0;
  std::vector<double> psi;
  double l2_norm = 0.0;  // over the working window
  bool normalizable = false;
  // log|beta_+|/T of the seed whose growth makes psi decay.
  double expected_decay_rate = 0.0;
  // Measured from the outermost periods; positive means decaying away from the origin.
  double decay_rate_left = 0.0;
  double decay_rate_right = 0.0;
};

struct TransformDiagnostics {
  double min_abs_denominator = 0.0;       // min |u| (order 1) or min |W| (order 2)
  double min_relative_denominator = 0.0;  // same, relative to the per-period amplitude
  // Periodic partners: max |V~(x+T) - V~(x)|; windowed partners: mismatch with the tails over
  // the outermost periods.
  double asymptotic_period_residual = 0.0;
  double riccati_residual = 0.0;  // worst over the seeds
  // Order 2 only.
  double beta_consistency = 0.0;
  double wprime_residual = 0.0;
  double sususy_equation_residual = 0.0;
};

struct TransformResult {
  // Periodic one-period table for Bloch seeds; windowed table with periodic tails otherwise.
  Potential partner = Potential::constant(0.0, 1.0);
  int order = 1;
  bool periodic = true;
  std::vector<double> epsilons;
  Grid grid;
  std::vector<double> original;
  std::vector<double> partner_values;
  // alpha (order 1) or beta (order 2), and its derivative.
  std::vector<double> intertwiner;
  std::vector<double> intertwiner_derivative;
  // Order 2: B^dagger = d^2/dx^2 + beta d/dx + gamma.
  std::vector<double> gamma;
  std::vector<KernelState> kernel;
  TransformDiagnostics diagnostics;
};

struct TransformOptions {
  double riccati_gate = 1e-6;
  // |W| below this fraction of its per-period amplitude counts as a zero.
  double singular_fraction = 1e-10;
};

// First-order transform V~ = 2 eps - V + 2 alpha^2, alpha = u'/u.
// Throws SingularTransformError when u has nodes in the window and NumericalError when the
// seed fails the Riccati gate.
TransformResult susy1(const SeedSolution& seed, const TransformOptions& options = {});

// Second-order transform V~ = V + 2 beta', beta = -W'/W, from closed forms in u1, u2, u1', u2'.
// Throws DomainError for eps1 == eps2 or mismatched grids and SingularTransformError when the
// Wronskian vanishes in the window.
TransformResult susy2(const SeedSolution& seed1, const SeedSolution& seed2,
                      const TransformOptions& options = {});

// Periodic partners built directly from Bloch period traces (also used as asymptotic tails).
Potential susy1_periodic_partner(const Potential& v, double epsilon, const PeriodTrace& trace,
                                 double dx);
Potential susy2_periodic_partner(const Potential& v, double eps1, const PeriodTrace& t1,
                                 double eps2, const PeriodTrace& t2, double dx);

const std::vector<KernelState>& kernel_states(const TransformResult& result);

struct TestFunction {
  double center;
  double width;
};
std::vector<TestFunction> default_test_functions(const TransformResult& result);

// Order 1: max over f of ||(B B^dagger + eps) f - H f|| / ||f|| and
// ||(B^dagger B + eps) f - H~ f|| / ||f||. Order 2: the same with
// B B^dagger = (H - eps1)(H - eps2) and B^dagger B = (H~ - eps1)(H~ - eps2), evaluated on a
// grid thinned by `stride` (0 picks T/128 spacing). Derivatives by sixth-order differences.
double factorization_residual(const TransformResult& result, std::span<const TestFunction> tests,
                              std::size_t stride = 0);

// For an eigenfunction psi of H at energy E (sampled on the result grid), B^dagger psi must
// solve the partner equation at E. Returns max |(-d^2 + V~ - E) B^dagger psi| / max |B^dagger psi|.
double intertwining_residual(const TransformResult& result, const SeedSolution& eigenfunction);

}  // namespace susyband
