#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "susyband/analysis.hpp"
#include "susyband/darboux.hpp"
#include "susyband/floquet.hpp"
#include "susyband/seeds.hpp"

namespace susyband {

enum class SeedRequestKind { Edge, Bloch, General };
enum class BlochBranch { Auto, Growing, Decaying };

struct SeedRequest {
  SeedRequestKind kind = SeedRequestKind::Bloch;
  std::size_t edge_index = 0;  // into BandStructure::edges, for Edge requests
  double epsilon = 0.0;
  BlochBranch branch = BlochBranch::Auto;
  // General seeds: explicit coefficients unless auto_mixing is set.
  double c_plus = 1.0;
  double c_minus = 1.0;
  bool auto_mixing = true;
};

struct ScenarioConfig {
  std::string name;
  Potential potential = Potential::constant(0.0, 1.0);
  std::optional<double> e_min;
  std::optional<double> e_max;
  int order = 1;
  std::vector<SeedRequest> seeds;
  // Energy for the invariance test.
  std::optional<double> epsilon;
  SeedOptions seed_options;
  BandSearchOptions band_options;
  TransformOptions transform_options;
  std::size_t scan_resolution = 720;
  std::size_t sweep_points = 1201;
  bool shooting = true;
};

std::vector<std::string> scenario_names();
// Throws ConfigError for unknown names.
ScenarioConfig builtin_scenario(std::string_view name);

// Band-edge search window: explicit bounds, or defaults covering every Lamé edge.
std::pair<double, double> search_window(const ScenarioConfig& config);

struct ResolvedSeed {
  SeedSolution seed;
  std::optional<std::vector<NodeScanEntry>> scan;  // when the mixing was chosen automatically
};

struct TransformRun {
  BandStructure bands;
  std::vector<ResolvedSeed> seeds;
  TransformResult result;
  std::optional<DisplacementFit> displacement;  // periodic partners of periodic potentials
  std::vector<BoundState> bound_states;
  // Shooting eigenvalue near each normalizable kernel state (windowed partners only).
  std::vector<std::optional<double>> shooting;
};

// Builds the seeds, applies the transform of the requested order and runs the spectral checks.
TransformRun run_transform(const ScenarioConfig& config);

// Seed construction with the automatic selection rules. For first order a general seed takes
// the midpoint of the longest minimal-node run of mixings and a Bloch seed the nodeless branch.
// For second order the Bloch pairing with zero-free W is preferred growing-with-growing, and
// general seeds take coefficient signs that make every term of W share one sign.
std::vector<ResolvedSeed> resolve_seeds(const ScenarioConfig& config, const BandStructure& bands);

}  // namespace susyband
