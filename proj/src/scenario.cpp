#include "susyband/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "susyband/error.hpp"

namespace susyband {

namespace {

SeedRequest edge(std::size_t index) {
  SeedRequest r;
  r.kind = SeedRequestKind::Edge;
  r.edge_index = index;
  return r;
}

SeedRequest bloch(double epsilon) {
  SeedRequest r;
  r.kind = SeedRequestKind::Bloch;
  r.epsilon = epsilon;
  return r;
}

SeedRequest general(double epsilon) {
  SeedRequest r;
  r.kind = SeedRequestKind::General;
  r.epsilon = epsilon;
  return r;
}

ScenarioConfig make(std::string name, int n, int order, std::vector<SeedRequest> seeds) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.potential = Potential::lame(n, EllipticParameter(0.5));
  c.order = order;
  c.seeds = std::move(seeds);
  if (c.seeds.front().kind != SeedRequestKind::Edge) c.epsilon = c.seeds.front().epsilon;
  return c;
}

// Sign of a sampled function over the window, 0 when it changes sign or touches zero.
int definite_sign(std::span<const double> f) {
  const bool positive = f.front() > 0.0;
  for (const double x : f) {
    if (x == 0.0 || (x > 0.0) != positive) return 0;
  }
  return positive ? 1 : -1;
}

std::vector<double> wronskian(const SeedSolution& a, const SeedSolution& b) {
  std::vector<double> w(a.u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = a.u[i] * b.du[i] - a.du[i] * b.u[i];
  return w;
}

const SeedSolution& branch_of(const BlochSeedPair& p, bool growing) {
  return growing ? p.growing : p.decaying;
}

double request_energy(const SeedRequest& r, const BandStructure& bands) {
  if (r.kind != SeedRequestKind::Edge) return r.epsilon;
  if (r.edge_index >= bands.edges.size()) {
    std::ostringstream msg;
    msg << "edge index " << r.edge_index << " out of range (" << bands.edges.size()
        << " edges found in the search window)";
    throw ConfigError(msg.str());
  }
  return bands.edges[r.edge_index].energy;
}

ResolvedSeed first_order_seed(const ScenarioConfig& c, const SeedRequest& r, double energy) {
  const auto& v = c.potential;
  if (r.kind == SeedRequestKind::General) {
    const auto comps = bloch_components(v, energy, c.seed_options);
    if (!r.auto_mixing) return {general_seed(comps, v, r.c_plus, r.c_minus, c.seed_options), std::nullopt};
    auto scan = node_scan(comps, v, c.scan_resolution, c.seed_options);
    const auto mix = minimal_node_mixing(scan);
    return {general_seed(comps, v, mix.c_plus, mix.c_minus, c.seed_options), std::move(scan)};
  }
  auto pair = bloch_seed(v, energy, c.seed_options);
  switch (r.branch) {
    case BlochBranch::Growing:
      return {pair.growing, std::nullopt};
    case BlochBranch::Decaying:
      return {pair.decaying, std::nullopt};
    case BlochBranch::Auto:
      break;
  }
  if (pair.growing.nodes.empty() || !pair.decaying.nodes.empty()) return {pair.growing, std::nullopt};
  return {pair.decaying, std::nullopt};
}

std::vector<ResolvedSeed> second_order_seeds(const ScenarioConfig& c, const SeedRequest& r1,
                                             double e1, const SeedRequest& r2, double e2) {
  const auto& v = c.potential;
  const bool general1 = r1.kind == SeedRequestKind::General;
  const bool general2 = r2.kind == SeedRequestKind::General;
  if (general1 != general2) {
    throw ConfigError("second-order seeds must both be Bloch/edge or both be general");
  }
  const auto p1 = bloch_seed(v, e1, c.seed_options);
  const auto p2 = bloch_seed(v, e2, c.seed_options);

  if (!general1) {
    auto forced = [](BlochBranch b) -> std::vector<bool> {
      if (b == BlochBranch::Growing) return {true};
      if (b == BlochBranch::Decaying) return {false};
      return {true, false};
    };
    for (const bool g1 : forced(r1.branch)) {
      for (const bool g2 : forced(r2.branch)) {
        // Growing with growing first, then decaying with decaying, then the mixed pairings.
        if (g1 != g2 && r1.branch == BlochBranch::Auto && r2.branch == BlochBranch::Auto) continue;
        if (definite_sign(wronskian(branch_of(p1, g1), branch_of(p2, g2))) != 0) {
          return {{branch_of(p1, g1), std::nullopt}, {branch_of(p2, g2), std::nullopt}};
        }
      }
    }
    for (const bool g1 : forced(r1.branch)) {
      for (const bool g2 : forced(r2.branch)) {
        if (definite_sign(wronskian(branch_of(p1, g1), branch_of(p2, g2))) != 0) {
          return {{branch_of(p1, g1), std::nullopt}, {branch_of(p2, g2), std::nullopt}};
        }
      }
    }
    // No zero-free pairing: hand back the requested branches and let the transform report W's zeros.
    const bool g1 = r1.branch != BlochBranch::Decaying;
    const bool g2 = r2.branch != BlochBranch::Decaying;
    return {{branch_of(p1, g1), std::nullopt}, {branch_of(p2, g2), std::nullopt}};
  }

  if (!r1.auto_mixing || !r2.auto_mixing) {
    return {{general_seed(p1.components, v, r1.c_plus, r1.c_minus, c.seed_options), std::nullopt},
            {general_seed(p2.components, v, r2.c_plus, r2.c_minus, c.seed_options), std::nullopt}};
  }
  // W(u1, u2) for u1 = u1+ + s1 u1-, u2 = u2+ + s2 u2- is a sum of four Bloch Wronskians; choose
  // the signs so that all four terms agree in sign.
  const int spp = definite_sign(wronskian(p1.growing, p2.growing));
  const int spm = definite_sign(wronskian(p1.growing, p2.decaying));
  const int smp = definite_sign(wronskian(p1.decaying, p2.growing));
  const int smm = definite_sign(wronskian(p1.decaying, p2.decaying));
  if (spp == 0 || spm == 0 || smp == 0 || smm == 0 || spp * smm != spm * smp) {
    throw SingularTransformError(
        "no sign choice makes W(u1, u2) zero-free: the Bloch Wronskians are not sign-compatible",
        {});
  }
  const double s2 = static_cast<double>(spp * spm);
  const double s1 = static_cast<double>(spp * smp);
  return {{general_seed(p1.components, v, 1.0, s1, c.seed_options), std::nullopt},
          {general_seed(p2.components, v, 1.0, s2, c.seed_options), std::nullopt}};
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b",
          "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d"};
}

ScenarioConfig builtin_scenario(std::string_view name) {
  if (name == "fig1a") return make("fig1a", 1, 1, {edge(0)});
  if (name == "fig1b") return make("fig1b", 2, 1, {edge(0)});
  if (name == "fig1c") return make("fig1c", 3, 1, {edge(0)});
  if (name == "fig1d") return make("fig1d", 3, 2, {edge(1), edge(2)});
  if (name == "fig2a") return make("fig2a", 1, 1, {bloch(-1.0)});
  if (name == "fig2b") return make("fig2b", 2, 1, {bloch(0.4)});
  if (name == "fig2c") return make("fig2c", 2, 2, {bloch(1.6), bloch(2.9)});
  if (name == "fig2d") return make("fig2d", 3, 2, {bloch(2.3), bloch(5.0)});
  if (name == "fig3a") return make("fig3a", 1, 1, {general(0.0)});
  if (name == "fig3b") return make("fig3b", 2, 1, {general(0.4)});
  if (name == "fig3c") return make("fig3c", 1, 2, {general(1.2), general(1.3)});
  if (name == "fig3d") return make("fig3d", 2, 2, {general(1.51), general(2.51)});
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::pair<double, double> search_window(const ScenarioConfig& config) {
  const auto& v = config.potential;
  double lo = 0.0;
  double hi = 0.0;
  if (const auto* lame = std::get_if<LamePotential>(&v.kind())) {
    lo = -1.0;
    hi = lame->n * (lame->n + 1) + 1.0;
  } else {
    const Grid g{0.0, v.period() / 512.0, 513};
    const auto s = v.sample(g);
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    lo = *mn - 1.0;
    hi = *mx + 4.0;
  }
  if (config.e_min) lo = *config.e_min;
  if (config.e_max) hi = *config.e_max;
  if (!(hi > lo)) throw ConfigError("energy window must satisfy e_min < e_max");
  return {lo, hi};
}

std::vector<ResolvedSeed> resolve_seeds(const ScenarioConfig& config, const BandStructure& bands) {
  if (config.order == 1) {
    if (config.seeds.size() != 1) throw ConfigError("a first-order transform takes exactly one seed");
    const auto& r = config.seeds.front();
    return {first_order_seed(config, r, request_energy(r, bands))};
  }
  if (config.order == 2) {
    if (config.seeds.size() != 2) throw ConfigError("a second-order transform takes exactly two seeds");
    const auto& r1 = config.seeds[0];
    const auto& r2 = config.seeds[1];
    return second_order_seeds(config, r1, request_energy(r1, bands), r2, request_energy(r2, bands));
  }
  throw ConfigError("transform order must be 1 or 2");
}

TransformRun run_transform(const ScenarioConfig& config) {
  TransformRun run;
  const auto [lo, hi] = search_window(config);
  auto band_options = config.band_options;
  band_options.integrator = config.seed_options.integrator;
  band_options.edge_tol = config.seed_options.edge_tol;
  run.bands = band_edges(config.potential, lo, hi, band_options);
  run.seeds = resolve_seeds(config, run.bands);
  if (config.order == 1) {
    run.result = susy1(run.seeds[0].seed, config.transform_options);
  } else {
    run.result = susy2(run.seeds[0].seed, run.seeds[1].seed, config.transform_options);
  }
  if (run.result.periodic && config.potential.is_periodic()) {
    run.displacement = displacement_fit(config.potential, run.result.partner);
  }
  run.bound_states = bound_states_in_gaps(run.result, run.bands);
  if (config.shooting && !run.result.periodic) {
    for (const auto& b : run.bound_states) {
      const auto& gap = run.bands.gaps[b.gap_index];
      const double room = std::min(b.epsilon - gap.lo, gap.hi - b.epsilon);
      const double half_width = std::min(0.02, 0.5 * room);
      run.shooting.push_back(shooting_eigenvalue(run.result.partner, b.epsilon, half_width, 41,
                                                 config.seed_options.integrator));
    }
  }
  return run;
}

}  // namespace susyband
