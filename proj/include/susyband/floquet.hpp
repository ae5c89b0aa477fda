#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "susyband/ode.hpp"
#include "susyband/potential.hpp"

namespace susyband {

// 2x2 real matrix b with (psi, psi')(x1) = b (psi, psi')(x0).
struct TransferMatrix {
  // Row-major: [[a, b], [c, d]].
  std::array<double, 4> entries{1.0, 0.0, 0.0, 1.0};
  double x0 = 0.0;
  double x1 = 0.0;

  double a() const noexcept { return entries[0]; }
  double b() const noexcept { return entries[1]; }
  double c() const noexcept { return entries[2]; }
  double d() const noexcept { return entries[3]; }
  double trace() const noexcept { return entries[0] + entries[3]; }
  double determinant() const noexcept {
    return entries[0] * entries[3] - entries[1] * entries[2];
  }
  // Inverse of a unit-determinant matrix; maps x1 back to x0.
  TransferMatrix inverse() const noexcept;
  std::array<double, 2> apply(std::array<double, 2> v) const noexcept {
    return {entries[0] * v[0] + entries[1] * v[1], entries[2] * v[0] + entries[3] * v[1]};
  }
};

// Composition: (later * earlier) propagates across both intervals.
TransferMatrix operator*(const TransferMatrix& later, const TransferMatrix& earlier);

// Both canonical solutions sampled on a uniform grid: column a starts at (1, 0), column b at
// (0, 1).
struct SolutionTrace {
  Grid grid;
  std::vector<double> psi_a, dpsi_a, psi_b, dpsi_b;
};

struct Propagation {
  TransferMatrix matrix;
  std::optional<SolutionTrace> trace;
};

// Transfer matrix across [x0, x1]. With `intervals` > 0 the canonical solutions are also
// recorded at intervals + 1 equally spaced points.
Propagation propagate(const Potential& v, double energy, double x0, double x1,
                      std::size_t intervals = 0, const IntegratorOptions& options = {});

TransferMatrix transfer_matrix(const Potential& v, double energy, double x0, double x1,
                               const IntegratorOptions& options = {});

// Trace of the one-period Floquet matrix b(T) referenced at x = 0.
double discriminant(const Potential& v, double energy, const IntegratorOptions& options = {});

enum class EnergyTag { AllowedBand, BandEdgePeriodic, BandEdgeAntiperiodic, Gap };
std::string_view to_string(EnergyTag tag);

struct EnergyClass {
  EnergyTag tag;
  double discriminant;
  std::complex<double> beta_plus;
  std::complex<double> beta_minus;
  // At an edge: the Floquet matrix is (numerically) a multiple of the identity, i.e. a closed
  // gap with two coexisting Bloch solutions.
  bool coexistence = false;
};

inline constexpr double kDefaultEdgeTolerance = 1e-7;

// Classification from the discriminant value alone.
EnergyClass classify_discriminant(double d, double edge_tol = kDefaultEdgeTolerance);
// Classification from the Floquet matrix (detects coexistence at edges through the
// off-diagonal entries).
EnergyClass classify_floquet(const TransferMatrix& floquet, double edge_tol = kDefaultEdgeTolerance);
EnergyClass classify(const Potential& v, double energy, double edge_tol = kDefaultEdgeTolerance,
                     const IntegratorOptions& options = {});

enum class EdgeParity { Periodic, Antiperiodic };

struct BandEdge {
  double energy;
  EdgeParity parity;
};

struct EnergyInterval {
  double lo;
  double hi;
  bool contains(double e) const noexcept { return e > lo && e < hi; }
};

struct BandStructure {
  // Simple roots of D(E) = +-2, ascending: E0 < E1 <= E1' < ...
  std::vector<BandEdge> edges;
  // Double roots (closed gaps) found in the window: coincident pairs E_j = E_j'.
  std::vector<BandEdge> touching;
  // Allowed bands and spectral gaps, clipped to the window. The gap below E0 extends to -inf.
  std::vector<EnergyInterval> bands;
  std::vector<EnergyInterval> gaps;
  double window_lo = 0.0;
  double window_hi = 0.0;

  // Index into `gaps` of the gap containing e, if any.
  std::optional<std::size_t> gap_index(double e) const;
};

struct BandSearchOptions {
  IntegratorOptions integrator;
  double edge_tol = kDefaultEdgeTolerance;
  double samples_per_unit = 400.0;
  std::size_t min_samples = 64;
  double energy_tol = 1e-10;
};

BandStructure band_edges(const Potential& v, double e_min, double e_max,
                         const BandSearchOptions& options = {});

struct SweepPoint {
  double energy;
  double discriminant;
  EnergyTag tag;
};

// `count` equally spaced energies over [e_lo, e_hi].
std::vector<SweepPoint> discriminant_sweep(const Potential& v, double e_lo, double e_hi,
                                           std::size_t count, double edge_tol = kDefaultEdgeTolerance,
                                           const IntegratorOptions& options = {});

}  // namespace susyband
