#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "susyband/darboux.hpp"
#include "susyband/floquet.hpp"
#include "susyband/seeds.hpp"

namespace susyband {

// max over the energies of |D_V(E) - D_W(E)|. Throws DomainError when the periods differ.
double compare_band_structure(const Potential& v, const Potential& w, std::span<const double> energies,
                              const IntegratorOptions& options = {});

// `count` energies spanning the first two allowed bands: from half a unit below E0 up to the top
// of the second band (E2), or one unit past E1' when the second band is the last one.
std::vector<double> band_comparison_grid(const BandStructure& bands, std::size_t count = 50);

struct BoundState {
  double epsilon;
  std::size_t gap_index;  // index into BandStructure::gaps
  double expected_decay_rate;
  double decay_rate;  // slower of the two measured tail rates
  bool decay_consistent;
};

// Normalizable kernel states of the transform lying in gaps of `bands`, with the measured decay
// compared against log|beta_+| / T at the seed energy.
std::vector<BoundState> bound_states_in_gaps(const TransformResult& result, const BandStructure& bands,
                                             double decay_tolerance = 0.05);

struct DisplacementFit {
  double delta;     // in [0, T)
  double residual;  // max over one period of |W(x) - V(x + delta)|
};

struct DisplacementOptions {
  std::size_t offsets = 1024;
  std::size_t samples = 512;
};

DisplacementFit displacement_fit(const Potential& v, const Potential& w,
                                 const DisplacementOptions& options = {});

struct InvarianceOptions {
  SeedOptions seeds;
  DisplacementOptions displacement;
  double displacement_tol = 1e-4;
  double product_tol = 1e-4;
};

struct InvarianceReport {
  double delta = 0.0;
  double residual_displacement = 0.0;
  double residual_product = 0.0;
  bool invariant = false;
};

// Darboux invariance at epsilon. Each Bloch seed in turn generates the 1-SUSY partner, the
// displacement delta is fitted, and the variation of u^{seed}(x) u^{other}(x + delta) over one
// period is measured. The pairing with the smaller residuals is reported.
InvarianceReport invariance_test(const Potential& v, double epsilon,
                                 const InvarianceOptions& options = {});

// Shooting eigenvalue search on an asymptotically periodic partner: the solutions decaying
// toward either tail are matched at x = 0. Returns the root of the matching Wronskian nearest
// `guess` within guess +- half_width, if any.
std::optional<double> shooting_eigenvalue(const Potential& partner, double guess,
                                          double half_width = 0.02, std::size_t scan_points = 41,
                                          const IntegratorOptions& options = {});

}  // namespace susyband
