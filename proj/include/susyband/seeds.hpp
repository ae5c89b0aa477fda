#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "susyband/floquet.hpp"
#include "susyband/grid.hpp"
#include "susyband/potential.hpp"

namespace susyband {

struct SeedOptions {
  std::size_t samples_per_period = 2048;
  // Working window: this many periods, from -floor(periods/2) T.
  int periods = 16;
  IntegratorOptions integrator;
  double edge_tol = kDefaultEdgeTolerance;
  // |u| below this fraction of the local amplitude counts as touching zero.
  double touch_fraction = 1e-12;
};

// One period [0, T] of a Bloch solution, samples_per_period + 1 points, u(T) = beta u(0).
struct PeriodTrace {
  double multiplier = 1.0;
  std::vector<double> u;
  std::vector<double> du;
};

// The two real Bloch solutions at one energy: `growing` has |beta| >= 1, `decaying` 1/beta.
// At a band edge both hold the same (anti)periodic solution.
struct BlochComponents {
  double epsilon = 0.0;
  double period = 0.0;
  double dx = 0.0;
  bool edge = false;
  // Jordan block (only one Bloch solution); false for coexistence at a closed gap.
  bool edge_defect = false;
  PeriodTrace growing;
  PeriodTrace decaying;
  TransferMatrix floquet;

  // log|beta_+| / T, the growth rate per unit length of the growing solution.
  double growth_rate() const;
};

enum class SeedKind { BlochEdge, BlochGap, General };
std::string_view to_string(SeedKind kind);

// A transformation function u at factorization energy epsilon sampled over the window, with
// u = c_plus u^{beta_+} + c_minus u^{beta_-} (Bloch seeds are (1, 0) or (0, 1)).
struct SeedSolution {
  double epsilon = 0.0;
  SeedKind kind = SeedKind::General;
  double multiplier = 1.0;  // beta for Bloch seeds, beta_+ for general ones
  double c_plus = 1.0;
  double c_minus = 0.0;
  double period = 0.0;
  Potential potential = Potential::constant(0.0, 1.0);
  std::shared_ptr<const BlochComponents> components;
  Grid grid;
  std::vector<double> u;
  std::vector<double> du;
  // Nodes per period for Bloch seeds, per window for general ones.
  int node_count = 0;
  std::vector<double> nodes;  // node locations inside the window
  bool grazing = false;       // some |u| fell below the touch threshold
  // max |u(T) - beta u(0)| / max |u| over the integrated period.
  double bloch_defect = 0.0;

  bool is_bloch() const noexcept { return kind != SeedKind::General; }
  // Exponential growth rates of u toward +inf and -inf (negative means decay).
  double growth_right() const;
  double growth_left() const;
  // u and u' at arbitrary x through the Bloch relation and Hermite interpolation.
  std::pair<double, double> value_at(double x) const;
};

struct BlochSeedPair {
  SeedSolution growing;   // multiplier beta, |beta| >= 1
  SeedSolution decaying;  // multiplier 1/beta
  std::shared_ptr<const BlochComponents> components;
};

// Window grid shared by all seeds built with these options.
Grid seed_grid(double period, const SeedOptions& options);

std::shared_ptr<const BlochComponents> bloch_components(const Potential& v, double epsilon,
                                                        const SeedOptions& options = {});

// Real Bloch solutions at epsilon. Throws DomainError inside an allowed band.
BlochSeedPair bloch_seed(const Potential& v, double epsilon, const SeedOptions& options = {});

// c_plus u^{beta_+} + c_minus u^{beta_-}. Needs |D(epsilon)| > 2.
SeedSolution general_seed(const Potential& v, double epsilon, double c_plus, double c_minus,
                          const SeedOptions& options = {});
SeedSolution general_seed(std::shared_ptr<const BlochComponents> components, const Potential& v,
                          double c_plus, double c_minus, const SeedOptions& options = {});

struct NodeScanEntry {
  double angle;  // (c_plus, c_minus) = (cos angle, sin angle), angle in [0, pi)
  double ratio;  // c_minus / c_plus, +inf at angle = pi/2
  int node_count;
};

// Node counts over the window for mixing angles k pi / resolution, k = 0..resolution-1.
std::vector<NodeScanEntry> node_scan(const Potential& v, double epsilon, std::size_t resolution,
                                     const SeedOptions& options = {});
std::vector<NodeScanEntry> node_scan(std::shared_ptr<const BlochComponents> components,
                                     const Potential& v, std::size_t resolution,
                                     const SeedOptions& options = {});

// Midpoint of the longest (cyclic) run of angles attaining the minimal node count.
struct Mixing {
  double c_plus;
  double c_minus;
  int node_count;
};
Mixing minimal_node_mixing(const std::vector<NodeScanEntry>& scan);

struct Superpotential {
  Grid grid;
  std::vector<double> alpha;
  double riccati_residual;
};

// alpha = u'/u. Throws SingularTransformError when u has nodes in the window.
Superpotential superpotential(const SeedSolution& seed);

// max |u''/u - (V - eps)| with u'' differenced from the integrated u' samples, over nodes where
// |u| exceeds `threshold` times the local (per-period) amplitude. Equals the residual of
// alpha' + alpha^2 = V - eps.
double riccati_residual(const SeedSolution& seed, double threshold = 1e-3);

// Sign-change node count of sampled data (grazing zeros flagged) with refined locations.
struct NodeCount {
  int count = 0;
  std::vector<double> locations;
  bool grazing = false;
};
NodeCount count_nodes(const Grid& grid, std::span<const double> u, std::span<const double> du,
                      double touch_fraction);

}  // namespace susyband
