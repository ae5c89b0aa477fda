#include "susyband/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "susyband/error.hpp"
#include "susyband/io.hpp"

namespace susyband {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  std::string scenario;
  std::string out_dir = ".";
};

ScenarioConfig resolve_config(const Common& c) {
  if (c.config_path.empty() && c.scenario.empty()) {
    throw ConfigError("give --config <path> or --scenario <name>");
  }
  ScenarioConfig config;
  if (c.config_path.empty()) {
    config = builtin_scenario(c.scenario);
  } else {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot open config '" + c.config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + c.config_path + "' is not valid JSON: " + e.what());
    }
    if (!c.scenario.empty()) {
      if (!doc.is_object()) throw ConfigError("config must be a JSON object");
      doc["scenario"] = c.scenario;
    }
    config = config_from_json(doc);
  }
  apply_environment(config);
  return config;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const json& doc) {
  auto f = open_out(path);
  f << doc.dump(2) << '\n';
}

void write_seed_csv(const fs::path& path, const SeedSolution& s) {
  auto f = open_out(path);
  CsvWriter csv(f, {"x", "u", "u_prime", "alpha"});
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double alpha = s.u[i] != 0.0 ? s.du[i] / s.u[i] : std::numeric_limits<double>::quiet_NaN();
    csv.row({s.grid.x(i), s.u[i], s.du[i],
             std::isfinite(alpha) ? std::optional<double>(alpha) : std::nullopt});
  }
}

json seed_json(const SeedSolution& s) {
  return {{"epsilon", s.epsilon},     {"kind", std::string(to_string(s.kind))},
          {"multiplier", s.multiplier}, {"c_plus", s.c_plus},
          {"c_minus", s.c_minus},     {"node_count", s.node_count},
          {"grazing", s.grazing},     {"bloch_defect", s.bloch_defect}};
}

json kernel_json(const KernelState& k) {
  return {{"epsilon", k.epsilon},
          {"l2_norm", k.l2_norm},
          {"normalizable", k.normalizable},
          {"expected_decay_rate", k.expected_decay_rate},
          {"decay_rate_left", k.decay_rate_left},
          {"decay_rate_right", k.decay_rate_right}};
}

json bound(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json bound_json(const TransformRun& run) {
  json out = json::array();
  for (std::size_t i = 0; i < run.bound_states.size(); ++i) {
    const auto& b = run.bound_states[i];
    const auto& gap = run.bands.gaps[b.gap_index];
    json doc{{"epsilon", b.epsilon},
             {"gap_index", b.gap_index},
             {"gap", {bound(gap.lo), bound(gap.hi)}},
             {"expected_decay_rate", b.expected_decay_rate},
             {"decay_rate", b.decay_rate},
             {"decay_consistent", b.decay_consistent}};
    if (i < run.shooting.size()) {
      doc["shooting_eigenvalue"] = run.shooting[i] ? json(*run.shooting[i]) : json(nullptr);
    }
    out.push_back(doc);
  }
  return out;
}

int cmd_bands(const Common& c, std::ostream& out) {
  const auto config = resolve_config(c);
  const auto dir = prepare_out(c.out_dir);
  const auto [lo, hi] = search_window(config);
  auto opts = config.band_options;
  opts.integrator = config.seed_options.integrator;
  opts.edge_tol = config.seed_options.edge_tol;
  const auto bands = band_edges(config.potential, lo, hi, opts);

  json doc = band_structure_to_json(bands);
  doc["potential"] = potential_to_json(config.potential);
  doc["period"] = config.potential.period();
  write_json(dir / "edges.json", doc);

  auto f = open_out(dir / "discriminant.csv");
  CsvWriter csv(f, {"E", "D", "class_tag"});
  for (const auto& p : discriminant_sweep(config.potential, lo, hi, config.sweep_points,
                                          opts.edge_tol, opts.integrator)) {
    csv.row({format_number(p.energy), format_number(p.discriminant), std::string(to_string(p.tag))});
  }
  out << bands.edges.size() << " band edges in [" << format_number(lo) << ", " << format_number(hi)
      << "]:";
  for (const auto& e : bands.edges) out << ' ' << format_number(e.energy);
  out << '\n';
  return kExitOk;
}

int cmd_transform(const Common& c, std::ostream& out) {
  const auto config = resolve_config(c);
  const auto dir = prepare_out(c.out_dir);
  const auto run = run_transform(config);
  const auto& r = run.result;

  {
    auto f = open_out(dir / "partner.csv");
    CsvWriter csv(f, {"x", "V", "V_partner", "beta_or_alpha", "psi_kernel_1", "psi_kernel_2"});
    for (std::size_t i = 0; i < r.grid.count; ++i) {
      std::optional<double> k1, k2;
      if (r.kernel.size() > 0) k1 = r.kernel[0].psi[i];
      if (r.kernel.size() > 1) k2 = r.kernel[1].psi[i];
      csv.row({r.grid.x(i), r.original[i], r.partner_values[i], r.intertwiner[i], k1, k2});
    }
  }
  write_json(dir / "partner.json", potential_to_json(r.partner));

  const auto& d = r.diagnostics;
  json doc{{"scenario", config.name},
           {"order", r.order},
           {"epsilons", r.epsilons},
           {"periodic", r.periodic},
           {"period", r.partner.period()},
           {"band_edges", json::array()},
           {"seeds", json::array()},
           {"min_abs_denominator", d.min_abs_denominator},
           {"min_relative_denominator", d.min_relative_denominator},
           {"asymptotic_period_residual", d.asymptotic_period_residual},
           {"riccati_residual", d.riccati_residual},
           {"singular", false},
           {"kernel_states", json::array()},
           {"bound_states", bound_json(run)}};
  if (r.order == 2) {
    doc["beta_consistency"] = d.beta_consistency;
    doc["wprime_residual"] = d.wprime_residual;
    doc["sususy_equation_residual"] = d.sususy_equation_residual;
  }
  for (const auto& e : run.bands.edges) doc["band_edges"].push_back(e.energy);
  for (const auto& s : run.seeds) doc["seeds"].push_back(seed_json(s.seed));
  for (const auto& k : r.kernel) doc["kernel_states"].push_back(kernel_json(k));
  doc["displacement"] = run.displacement
                            ? json{{"delta", run.displacement->delta}, {"residual", run.displacement->residual}}
                            : json(nullptr);
  write_json(dir / "diagnostics.json", doc);

  out << config.name << ": order " << r.order << (r.periodic ? " periodic" : " asymptotically periodic")
      << " partner, " << run.bound_states.size() << " bound state(s)";
  if (run.displacement) out << ", delta = " << format_number(run.displacement->delta);
  out << '\n';
  return kExitOk;
}

int cmd_invariance(const Common& c, std::optional<double> epsilon, std::ostream& out) {
  auto config = resolve_config(c);
  if (epsilon) config.epsilon = epsilon;
  if (!config.epsilon) throw ConfigError("invariance needs an energy: set 'epsilon' or pass --epsilon");
  const auto dir = prepare_out(c.out_dir);
  InvarianceOptions opts;
  opts.seeds = config.seed_options;
  const auto report = invariance_test(config.potential, *config.epsilon, opts);
  write_json(dir / "invariance.json", invariance_to_json(report));
  out << (report.invariant ? "invariant" : "not_invariant") << " at epsilon = "
      << format_number(*config.epsilon) << ", delta = " << format_number(report.delta) << '\n';
  return kExitOk;
}

int cmd_states(const Common& c, std::ostream& out) {
  const auto config = resolve_config(c);
  const auto dir = prepare_out(c.out_dir);
  const auto run = run_transform(config);
  json doc{{"scenario", config.name},
           {"seeds", json::array()},
           {"kernel_states", json::array()},
           {"bound_states", bound_json(run)}};
  for (std::size_t k = 0; k < run.seeds.size(); ++k) {
    const auto& s = run.seeds[k];
    doc["seeds"].push_back(seed_json(s.seed));
    write_seed_csv(dir / ("seed_" + std::to_string(k + 1) + ".csv"), s.seed);
    if (s.scan) {
      auto f = open_out(dir / ("node_scan_" + std::to_string(k + 1) + ".csv"));
      CsvWriter csv(f, {"angle", "ratio", "node_count"});
      for (const auto& e : *s.scan) {
        csv.row({format_number(e.angle), std::isfinite(e.ratio) ? format_number(e.ratio) : std::string("inf"),
                 std::to_string(e.node_count)});
      }
    }
  }
  for (const auto& k : run.result.kernel) doc["kernel_states"].push_back(kernel_json(k));
  write_json(dir / "states.json", doc);
  out << config.name << ": " << run.bound_states.size() << " bound state(s)";
  for (const auto& b : run.bound_states) out << ' ' << format_number(b.epsilon);
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Band structures and SUSY partners of periodic Schrodinger potentials"};
  app.require_subcommand(1);
  Common common;
  std::optional<double> epsilon;

  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file");
    sub->add_option("--scenario", common.scenario, "built-in scenario (fig1a ... fig3d)");
    sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
  };
  auto* bands = app.add_subcommand("bands", "band edges and discriminant sweep");
  auto* transform = app.add_subcommand("transform", "SUSY partner potential and diagnostics");
  auto* invariance = app.add_subcommand("invariance", "Darboux invariance report");
  auto* states = app.add_subcommand("states", "seed traces, node scans and kernel/bound states");
  for (auto* sub : {bands, transform, invariance, states}) add_common(sub);
  invariance->add_option("--epsilon", epsilon, "factorization energy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (bands->parsed()) return cmd_bands(common, out);
    if (transform->parsed()) return cmd_transform(common, out);
    if (invariance->parsed()) return cmd_invariance(common, epsilon, out);
    return cmd_states(common, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SingularTransformError& e) {
    err << "singular transform: " << e.what();
    if (!e.locations().empty()) {
      err << " (at x =";
      for (std::size_t i = 0; i < std::min<std::size_t>(e.locations().size(), 8); ++i) {
        err << ' ' << format_number(e.locations()[i]);
      }
      if (e.locations().size() > 8) err << " ...";
      err << ')';
    }
    err << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace susyband
