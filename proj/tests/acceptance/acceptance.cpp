// Acceptance gate: one PASS/FAIL line per criterion. Usage: acceptance <path-to-susyband-cli>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "susyband/analysis.hpp"
#include "susyband/darboux.hpp"
#include "susyband/elliptic.hpp"
#include "susyband/floquet.hpp"
#include "susyband/seeds.hpp"
#include "susyband/error.hpp"
#include "susyband/scenario.hpp"

using namespace susyband;
namespace fs = std::filesystem;

namespace {

const EllipticParameter kHalf(0.5);
// Criteria without a runtime limit.
constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_seconds) {
    v.pass = false;
    v.detail += "; over the " + fmt(budget_seconds) + " s budget";
  }
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

// Reference K(m) by an AGM in long double, independent of the library.
double agm_k(double m) {
  long double a = 1.0L;
  long double b = std::sqrt(1.0L - m);
  for (int i = 0; i < 40; ++i) {
    const long double an = 0.5L * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return static_cast<double>(3.14159265358979323846264338327950288L / (2.0L * a));
}

// max |-u'' + (V - E) u| / max|u| for analytic u over one period, u'' by a 6th-order stencil.
template <class U>
double substitution_residual(const Potential& v, double e, U u) {
  const double h = 1e-3;
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double x = v.period() * i / 400.0;
    const double d2 = (2 * u(x - 3 * h) - 27 * u(x - 2 * h) + 270 * u(x - h) - 490 * u(x) +
                       270 * u(x + h) - 27 * u(x + 2 * h) + 2 * u(x + 3 * h)) /
                      (180 * h * h);
    worst = std::max(worst, std::abs(-d2 + (v(x) - e) * u(x)));
    scale = std::max(scale, std::abs(u(x)));
  }
  return worst / scale;
}

// Band-edge eigenfunction integrated straight across the seed window from its Bloch data at
// x = 0, so no period joins enter the differenced samples.
SeedSolution integrated_eigenfunction(const Potential& v, double energy) {
  auto s = bloch_seed(v, energy).growing;
  const std::size_t i0 = static_cast<std::size_t>(std::lround(-s.grid.x_lo / s.grid.dx));
  const auto back = transfer_matrix(v, energy, s.grid.x_lo, 0.0).inverse();
  const double u0 = back.a() * s.u[i0] + back.b() * s.du[i0];
  const double du0 = back.c() * s.u[i0] + back.d() * s.du[i0];
  const auto prop = propagate(v, energy, s.grid.x_lo, s.grid.x_hi(), s.grid.count - 1);
  const auto& tr = *prop.trace;
  for (std::size_t i = 0; i < s.grid.count; ++i) {
    s.u[i] = u0 * tr.psi_a[i] + du0 * tr.psi_b[i];
    s.du[i] = u0 * tr.dpsi_a[i] + du0 * tr.dpsi_b[i];
  }
  return s;
}

std::vector<TransformRun> run_all(const std::vector<std::string>& names) {
  std::vector<TransformRun> out;
  for (const auto& n : names) out.push_back(run_transform(builtin_scenario(n)));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  criterion(1, "elliptic identities and K(0.5)", 1.0, [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> xs(-50.0, 50.0);
    std::uniform_real_distribution<double> ms(0.0, 1.0);
    double w1 = 0.0, w2 = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double m = ms(rng);
      const auto t = jacobi_sncndn(xs(rng), EllipticParameter(m));
      w1 = std::max(w1, std::abs(t.sn * t.sn + t.cn * t.cn - 1.0));
      w2 = std::max(w2, std::abs(t.dn * t.dn + m * t.sn * t.sn - 1.0));
    }
    const double dk = std::abs(complete_k(kHalf) - agm_k(0.5));
    return Verdict{w1 < 1e-12 && w2 < 1e-12 && dk < 1e-12,
                   "max|sn^2+cn^2-1| = " + fmt(w1) + ", max|dn^2+m sn^2-1| = " + fmt(w2) +
                       ", |K(0.5) - AGM| = " + fmt(dk)};
  });

  criterion(2, "free-particle discriminant", 5.0, [] {
    const double t = 2.0;
    const auto v = Potential::constant(0.0, t);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double e = 0.01 + (25.0 - 0.01) * i / 99.0;
      worst = std::max(worst, std::abs(discriminant(v, e) - 2.0 * std::cos(std::sqrt(e) * t)));
    }
    return Verdict{worst < 1e-8, "max |D - 2cos(sqrt(E) T)| = " + fmt(worst) + " over 100 energies"};
  });

  criterion(3, "Lame band edges", 30.0, [] {
    const auto v1 = Potential::lame(1, kHalf);
    const double m = kHalf.value();
    const double sub = std::max({substitution_residual(v1, m, [](double x) { return jacobi_sncndn(x, kHalf).dn; }),
                                 substitution_residual(v1, 1.0, [](double x) { return jacobi_sncndn(x, kHalf).cn; }),
                                 substitution_residual(v1, 1.0 + m, [](double x) { return jacobi_sncndn(x, kHalf).sn; })});
    const auto b1 = band_edges(v1, -1.0, 3.0);
    const std::vector<double> expected{m, 1.0, 1.0 + m};
    double dev = b1.edges.size() == 3 ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, b1.edges.size()); ++i) {
      dev = std::max(dev, std::abs(b1.edges[i].energy - expected[i]));
    }
    const auto n2 = band_edges(Potential::lame(2, kHalf), -1.0, 7.0).edges.size();
    const auto n3 = band_edges(Potential::lame(3, kHalf), -1.0, 13.0).edges.size();
    return Verdict{sub < 1e-7 && dev < 1e-6 && n2 == 5 && n3 == 7,
                   "n=1 edge deviation " + fmt(dev) + " (dn/cn/sn substitution residual " + fmt(sub) +
                       "), n=2: " + std::to_string(n2) + " edges, n=3: " + std::to_string(n3) + " edges"};
  });

  criterion(4, "symplectic propagation", kUnbounded, [] {
    double det = 0.0, comp = 0.0;
    std::size_t count = 0;
    auto check = [&](const Potential& v, double e) {
      const double t = v.period();
      const auto full = transfer_matrix(v, e, 0.0, t);
      const auto first = transfer_matrix(v, e, 0.0, t / 2);
      const auto second = transfer_matrix(v, e, t / 2, t);
      const auto composed = second * first;
      for (const auto* b : {&full, &first, &second}) det = std::max(det, std::abs(b->determinant() - 1.0));
      for (int k = 0; k < 4; ++k) comp = std::max(comp, std::abs(composed.entries[k] - full.entries[k]));
      count += 3;
    };
    for (int n = 1; n <= 3; ++n) {
      const auto v = Potential::lame(n, kHalf);
      const double hi = n * (n + 1) + 1.0;
      for (int i = 0; i < 60; ++i) check(v, -1.0 + (hi + 1.0) * i / 59.0);
    }
    const auto free = Potential::constant(0.0, 2.0);
    for (int i = 0; i < 30; ++i) check(free, 0.01 + 25.0 * i / 29.0);
    return Verdict{det < 1e-9 && comp < 1e-8, "max |det b - 1| = " + fmt(det) + ", composition defect " + fmt(comp) +
                                                  " over " + std::to_string(count) + " propagations"};
  });

  criterion(5, "Riccati residual gate", kUnbounded, [] {
    double worst = 0.0;
    std::size_t seeds = 0;
    for (const auto& name : scenario_names()) {
      const auto run = run_transform(builtin_scenario(name));
      for (const auto& s : run.seeds) {
        worst = std::max(worst, riccati_residual(s.seed));
        ++seeds;
      }
    }
    return Verdict{worst < 1e-6, "max residual " + fmt(worst) + " over " + std::to_string(seeds) +
                                     " accepted seeds (all built-in scenarios)"};
  });

  criterion(6, "selfisospectral shift (fig1a)", 10.0, [] {
    const auto run = run_transform(builtin_scenario("fig1a"));
    const auto fit = displacement_fit(run.seeds.front().seed.potential, run.result.partner);
    const double dd = std::abs(fit.delta - complete_k(kHalf));
    return Verdict{dd < 1e-4 && fit.residual < 1e-4,
                   "delta = " + fmt(fit.delta) + " (|delta - K| = " + fmt(dd) + "), L-inf residual " + fmt(fit.residual)};
  });

  criterion(7, "Darboux invariance", 20.0, [] {
    const auto yes = invariance_test(Potential::lame(1, kHalf), -1.0);
    const auto no = invariance_test(Potential::lame(2, kHalf), 0.4);
    const bool ok = yes.invariant && yes.residual_product < 1e-4 && !no.invariant &&
                    no.residual_displacement > 1e-2;
    return Verdict{ok, "n=1 eps=-1: " + std::string(yes.invariant ? "invariant" : "not invariant") +
                           " (displacement " + fmt(yes.residual_displacement) + ", product " +
                           fmt(yes.residual_product) + "); n=2 eps=0.4: " +
                           (no.invariant ? "invariant" : "not invariant") + " (displacement " +
                           fmt(no.residual_displacement) + ")"};
  });

  criterion(8, "isospectrality of periodic partners", 120.0, [] {
    double worst = 0.0;
    for (const auto& run : run_all({"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d"})) {
      const auto grid = band_comparison_grid(run.bands);
      worst = std::max(worst, compare_band_structure(run.seeds.front().seed.potential, run.result.partner, grid));
    }
    return Verdict{worst < 1e-5, "max |D - D~| = " + fmt(worst) + " over fig1a-d, fig2a-d (50 energies each)"};
  });

  criterion(9, "second-order consistency", kUnbounded, [] {
    double beta = 0.0, wp = 0.0;
    std::size_t count = 0;
    for (const auto& name : scenario_names()) {
      const auto cfg = builtin_scenario(name);
      if (cfg.order != 2) continue;
      const auto run = run_transform(cfg);
      beta = std::max(beta, run.result.diagnostics.beta_consistency);
      wp = std::max(wp, run.result.diagnostics.wprime_residual);
      ++count;
    }
    return Verdict{count > 0 && beta < 1e-6 && wp < 1e-7,
                   "beta consistency " + fmt(beta) + ", W' identity " + fmt(wp) + " (relative to max|W'|) over " +
                       std::to_string(count) + " second-order scenarios"};
  });

  criterion(10, "bound states in gaps", 120.0, [] {
    const std::vector<std::pair<std::string, std::size_t>> expected{
        {"fig3a", 1}, {"fig3b", 1}, {"fig3c", 2}, {"fig3d", 2}};
    bool ok = true;
    double decay = 0.0, shoot = 0.0;
    std::string counts;
    for (const auto& [name, want] : expected) {
      const auto run = run_transform(builtin_scenario(name));
      counts += (counts.empty() ? "" : "/") + std::to_string(run.bound_states.size());
      if (run.bound_states.size() != want || run.shooting.size() != want) ok = false;
      for (std::size_t i = 0; i < run.bound_states.size(); ++i) {
        const auto& b = run.bound_states[i];
        decay = std::max(decay, std::abs(b.decay_rate - b.expected_decay_rate) / b.expected_decay_rate);
        if (i < run.shooting.size() && run.shooting[i]) {
          shoot = std::max(shoot, std::abs(*run.shooting[i] - b.epsilon));
        } else {
          ok = false;
        }
      }
    }
    ok = ok && decay < 0.05 && shoot < 1e-3;
    return Verdict{ok, "normalizable states " + counts + " (expected 1/1/2/2), decay-rate deviation " +
                           fmt(100.0 * decay) + "%, shooting deviation " + fmt(shoot)};
  });

  criterion(11, "intertwining and factorization", kUnbounded, [] {
    double inter = 0.0, fact = 0.0;
    for (const auto& name : {"fig1a", "fig1d", "fig2a", "fig2c"}) {
      const auto run = run_transform(builtin_scenario(name));
      const auto& v = run.seeds.front().seed.potential;
      for (const auto& edge : run.bands.edges) {
        bool seed_energy = false;
        for (double e : run.result.epsilons) seed_energy = seed_energy || std::abs(e - edge.energy) < 1e-9;
        if (seed_energy) continue;
        inter = std::max(inter, intertwining_residual(run.result, integrated_eigenfunction(v, edge.energy)));
      }
    }
    for (const auto& name : scenario_names()) {
      const auto run = run_transform(builtin_scenario(name));
      fact = std::max(fact, factorization_residual(run.result, default_test_functions(run.result)));
    }
    return Verdict{inter < 1e-5 && fact < 1e-5,
                   "intertwining " + fmt(inter) + " on band-edge eigenfunctions (fig1a, fig1d, fig2a, fig2c), "
                   "factorization " + fmt(fact) + " on Gaussian test functions (all scenarios)"};
  });

  criterion(12, "CLI determinism", kUnbounded, [&cli] {
    if (cli.empty()) return Verdict{false, "no CLI path given"};
    const auto base = fs::temp_directory_path() / ("susyband_accept_" + std::to_string(::getpid()));
    const std::vector<std::string> runs{"bands --scenario fig1a", "transform --scenario fig3c",
                                        "transform --scenario fig2d", "states --scenario fig3a"};
    std::size_t compared = 0, differing = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      std::vector<fs::path> dirs;
      for (int rep = 0; rep < 2; ++rep) {
        const auto dir = base / (std::to_string(r) + "_" + std::to_string(rep));
        fs::create_directories(dir);
        const std::string cmd = "\"" + cli + "\" " + runs[r] + " --out \"" + dir.string() + "\" > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
          fs::remove_all(base);
          return Verdict{false, "command failed: " + runs[r]};
        }
        dirs.push_back(dir);
      }
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename())) ++differing;
      }
    }
    fs::remove_all(base);
    return Verdict{compared > 0 && differing == 0, std::to_string(compared) + " CSV files compared across repeated runs, " +
                                                       std::to_string(differing) + " differ"};
  });

  return failures == 0 ? 0 : 1;
}
