#include "susyband/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "susyband/error.hpp"

namespace susyband {

namespace {

std::array<double, 2> normalized_initial(std::array<double, 2> v) {
  const double norm = std::hypot(v[0], v[1]);
  if (std::abs(v[0]) > 1e-8 * norm) return {1.0, v[1] / v[0]};
  return {v[0] / v[1], 1.0};
}

// Null vector of (b - beta I), picking the better conditioned of the two row choices.
std::array<double, 2> eigenvector(const TransferMatrix& b, double beta) {
  const std::array<double, 2> n1{b.b(), beta - b.a()};
  const std::array<double, 2> n2{beta - b.d(), b.c()};
  return std::hypot(n1[0], n1[1]) >= std::hypot(n2[0], n2[1]) ? n1 : n2;
}

PeriodTrace combine(const SolutionTrace& trace, std::array<double, 2> v, double beta) {
  PeriodTrace out;
  out.multiplier = beta;
  const std::size_t n = trace.psi_a.size();
  out.u.resize(n);
  out.du.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.u[i] = v[0] * trace.psi_a[i] + v[1] * trace.psi_b[i];
    out.du[i] = v[0] * trace.dpsi_a[i] + v[1] * trace.dpsi_b[i];
  }
  return out;
}

double bloch_defect_of(const PeriodTrace& p) {
  double amp = 0.0;
  for (double x : p.u) amp = std::max(amp, std::abs(x));
  const double du = std::abs(p.du.back() - p.multiplier * p.du.front());
  const double dv = std::abs(p.u.back() - p.multiplier * p.u.front());
  return std::max(du, dv) / amp;
}

double ipow(double base, long k) { return std::pow(base, static_cast<double>(k)); }

long first_period(int periods) { return -static_cast<long>(periods / 2); }

// Window samples of c_plus u^+ + c_minus u^-.
void fill_window(const BlochComponents& comp, double c_plus, double c_minus, const Grid& grid,
                 std::size_t per_period, int periods, std::vector<double>& u,
                 std::vector<double>& du) {
  u.assign(grid.count, 0.0);
  du.assign(grid.count, 0.0);
  const double bp = comp.growing.multiplier;
  const double bm = comp.decaying.multiplier;
  const long k0 = first_period(periods);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const long q = static_cast<long>(j / per_period);
    const std::size_t i = j % per_period;
    const long k = k0 + q;
    double val = 0.0;
    double der = 0.0;
    if (c_plus != 0.0) {
      const double s = c_plus * ipow(bp, k);
      val += s * comp.growing.u[i];
      der += s * comp.growing.du[i];
    }
    if (c_minus != 0.0) {
      const double s = c_minus * ipow(bm, k);
      val += s * comp.decaying.u[i];
      der += s * comp.decaying.du[i];
    }
    u[j] = val;
    du[j] = der;
  }
}

double refine_zero(const Grid& grid, std::span<const double> u, std::span<const double> du,
                   std::size_t i) {
  // Bisection of the Hermite cubic on [x_i, x_{i+1}].
  const Grid cell{grid.x(i), grid.dx, 2};
  const std::array<double, 2> vals{u[i], u[i + 1]};
  const std::array<double, 2> slopes{du[i], du[i + 1]};
  double a = cell.x_lo;
  double b = cell.x_lo + grid.dx;
  double fa = vals[0];
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = hermite_eval(cell, vals, slopes, mid).value;
    if ((fm < 0) == (fa < 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

NodeCount count_nodes_blocked(const Grid& grid, std::span<const double> u,
                              std::span<const double> du, double touch_fraction,
                              std::size_t block) {
  NodeCount out;
  const auto amp = block_max_abs(u, block);
  int last_sign = 0;
  std::size_t last_index = 0;
  bool in_zero_run = false;
  std::size_t zero_start = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const bool small = std::abs(u[i]) <= touch_fraction * amp[i];
    if (small) {
      if (!in_zero_run) {
        in_zero_run = true;
        zero_start = i;
      }
      continue;
    }
    const int sign = u[i] > 0 ? 1 : -1;
    if (in_zero_run) {
      in_zero_run = false;
      out.locations.push_back(grid.x((zero_start + i - 1) / 2));
      ++out.count;
      if (last_sign == 0 || sign == last_sign) out.grazing = true;
    } else if (last_sign != 0 && sign != last_sign) {
      ++out.count;
      out.locations.push_back(i == last_index + 1 ? refine_zero(grid, u, du, last_index)
                                                  : grid.x(last_index));
    }
    last_sign = sign;
    last_index = i;
  }
  if (in_zero_run) {
    out.locations.push_back(grid.x(zero_start));
    ++out.count;
    out.grazing = true;
  }
  return out;
}

// Nodes per period of a Bloch solution, counted cyclically from the largest sample.
int nodes_per_period(const PeriodTrace& p, double touch_fraction, bool& grazing) {
  const std::size_t n = p.u.size() - 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(p.u[i]) > std::abs(p.u[start])) start = i;
  }
  std::vector<double> seq(n + 1);
  std::vector<double> dseq(n + 1);
  for (std::size_t t = 0; t <= n; ++t) {
    const std::size_t idx = start + t;
    const double s = idx < n ? 1.0 : p.multiplier;
    const std::size_t i = idx < n ? idx : idx - n;
    seq[t] = s * p.u[i];
    dseq[t] = s * p.du[i];
  }
  // Scale back the far half so the block amplitude stays meaningful for large multipliers.
  for (std::size_t t = 0; t <= n; ++t) {
    if (start + t >= n) {
      seq[t] /= std::abs(p.multiplier);
      dseq[t] /= std::abs(p.multiplier);
    }
  }
  const auto nc = count_nodes_blocked(Grid{0.0, 1.0, n + 1}, seq, dseq, touch_fraction, 0);
  grazing = grazing || nc.grazing;
  return nc.count;
}

}  // namespace

double BlochComponents::growth_rate() const {
  if (edge) return 0.0;
  return std::log(std::abs(growing.multiplier)) / period;
}

std::string_view to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::BlochEdge:
      return "bloch_edge";
    case SeedKind::BlochGap:
      return "bloch_gap";
    case SeedKind::General:
      return "general";
  }
  return "unknown";
}

double SeedSolution::growth_right() const {
  const double rate = components ? components->growth_rate() : 0.0;
  return c_plus != 0.0 ? rate : -rate;
}

double SeedSolution::growth_left() const {
  const double rate = components ? components->growth_rate() : 0.0;
  if (components && components->edge) return 0.0;
  return c_minus != 0.0 ? rate : -rate;
}

std::pair<double, double> SeedSolution::value_at(double x) const {
  const auto& comp = *components;
  const double t = comp.period;
  const double k = std::floor(x / t);
  double r = x - k * t;
  r = std::clamp(r, 0.0, t);
  const Grid g{0.0, comp.dx, comp.growing.u.size()};
  double val = 0.0;
  double der = 0.0;
  if (c_plus != 0.0) {
    const auto h = hermite_eval(g, comp.growing.u, comp.growing.du, r);
    const double s = c_plus * std::pow(comp.growing.multiplier, k);
    val += s * h.value;
    der += s * h.slope;
  }
  if (c_minus != 0.0) {
    const auto h = hermite_eval(g, comp.decaying.u, comp.decaying.du, r);
    const double s = c_minus * std::pow(comp.decaying.multiplier, k);
    val += s * h.value;
    der += s * h.slope;
  }
  return {val, der};
}

Grid seed_grid(double period, const SeedOptions& options) {
  if (options.periods < 1 || options.samples_per_period < 8) {
    throw DomainError("seed window needs at least one period and 8 samples per period");
  }
  const double dx = period / static_cast<double>(options.samples_per_period);
  const double x_lo = static_cast<double>(first_period(options.periods)) * period;
  return Grid{x_lo, dx,
              static_cast<std::size_t>(options.periods) * options.samples_per_period + 1};
}

std::shared_ptr<const BlochComponents> bloch_components(const Potential& v, double epsilon,
                                                        const SeedOptions& options) {
  if (!v.is_periodic()) {
    throw DomainError("Bloch solutions need a periodic potential");
  }
  const double t = v.period();
  const auto prop = propagate(v, epsilon, 0.0, t, options.samples_per_period, options.integrator);
  const auto& b = prop.matrix;
  const auto cls = classify_floquet(b, options.edge_tol);

  auto comp = std::make_shared<BlochComponents>();
  comp->epsilon = epsilon;
  comp->period = t;
  comp->dx = t / static_cast<double>(options.samples_per_period);
  comp->floquet = b;

  if (cls.tag == EnergyTag::AllowedBand) {
    std::ostringstream msg;
    msg << "epsilon = " << epsilon << " lies inside an allowed band (D = " << cls.discriminant
        << "); Bloch multipliers are complex";
    throw DomainError(msg.str());
  }
  if (cls.tag == EnergyTag::Gap) {
    const double bp = cls.beta_plus.real();
    const double bm = cls.beta_minus.real();
    comp->growing = combine(*prop.trace, normalized_initial(eigenvector(b, bp)), bp);
    comp->decaying = combine(*prop.trace, normalized_initial(eigenvector(b, bm)), bm);
    return comp;
  }

  // Band edge: beta = +-1 exactly.
  const double beta = cls.beta_plus.real();
  comp->edge = true;
  if (cls.coexistence) {
    comp->growing = combine(*prop.trace, {1.0, 0.0}, beta);
    comp->decaying = combine(*prop.trace, {0.0, 1.0}, beta);
  } else {
    comp->edge_defect = true;
    comp->growing = combine(*prop.trace, normalized_initial(eigenvector(b, beta)), beta);
    comp->decaying = comp->growing;
  }
  return comp;
}

namespace {

SeedSolution make_seed(std::shared_ptr<const BlochComponents> comp, const Potential& v,
                       SeedKind kind, double c_plus, double c_minus, const SeedOptions& options) {
  SeedSolution s;
  s.epsilon = comp->epsilon;
  s.kind = kind;
  s.c_plus = c_plus;
  s.c_minus = c_minus;
  s.period = comp->period;
  s.potential = v;
  s.grid = seed_grid(comp->period, options);
  fill_window(*comp, c_plus, c_minus, s.grid, options.samples_per_period, options.periods, s.u,
              s.du);

  const auto window = count_nodes_blocked(s.grid, s.u, s.du, options.touch_fraction,
                                          options.samples_per_period);
  s.nodes = window.locations;
  s.grazing = window.grazing;
  if (kind == SeedKind::General) {
    s.multiplier = comp->growing.multiplier;
    s.node_count = window.count;
    s.bloch_defect = 0.0;
  } else {
    const PeriodTrace& p = c_plus != 0.0 ? comp->growing : comp->decaying;
    s.multiplier = p.multiplier;
    s.node_count = nodes_per_period(p, options.touch_fraction, s.grazing);
    s.bloch_defect = bloch_defect_of(p);
  }
  s.components = std::move(comp);
  return s;
}

}  // namespace

BlochSeedPair bloch_seed(const Potential& v, double epsilon, const SeedOptions& options) {
  auto comp = bloch_components(v, epsilon, options);
  const SeedKind kind = comp->edge ? SeedKind::BlochEdge : SeedKind::BlochGap;
  BlochSeedPair out{make_seed(comp, v, kind, 1.0, 0.0, options),
                    make_seed(comp, v, kind, comp->edge && comp->edge_defect ? 1.0 : 0.0,
                              comp->edge && comp->edge_defect ? 0.0 : 1.0, options),
                    comp};
  return out;
}

SeedSolution general_seed(std::shared_ptr<const BlochComponents> components, const Potential& v,
                          double c_plus, double c_minus, const SeedOptions& options) {
  if (c_plus == 0.0 && c_minus == 0.0) {
    throw DomainError("general seed needs (c_plus, c_minus) != (0, 0)");
  }
  if (components->edge) {
    throw DomainError("general seeds need two distinct real Bloch solutions (|D| > 2)");
  }
  return make_seed(std::move(components), v, SeedKind::General, c_plus, c_minus, options);
}

SeedSolution general_seed(const Potential& v, double epsilon, double c_plus, double c_minus,
                          const SeedOptions& options) {
  return general_seed(bloch_components(v, epsilon, options), v, c_plus, c_minus, options);
}

std::vector<NodeScanEntry> node_scan(std::shared_ptr<const BlochComponents> components,
                                     const Potential& v, std::size_t resolution,
                                     const SeedOptions& options) {
  (void)v;
  if (components->edge) {
    throw DomainError("node scan needs |D(epsilon)| > 2");
  }
  if (resolution < 2) throw DomainError("node scan needs a resolution of at least 2");
  const Grid grid = seed_grid(components->period, options);
  std::vector<NodeScanEntry> out;
  out.reserve(resolution);
  std::vector<double> u, du;
  for (std::size_t k = 0; k < resolution; ++k) {
    const double angle = std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution);
    double cp = std::cos(angle);
    double cm = std::sin(angle);
    if (2 * k == resolution) cp = 0.0;
    if (k == 0) cm = 0.0;
    fill_window(*components, cp, cm, grid, options.samples_per_period, options.periods, u, du);
    const auto nc =
        count_nodes_blocked(grid, u, du, options.touch_fraction, options.samples_per_period);
    const double ratio = cp == 0.0 ? std::numeric_limits<double>::infinity() : cm / cp;
    out.push_back({angle, ratio, nc.count});
  }
  return out;
}

std::vector<NodeScanEntry> node_scan(const Potential& v, double epsilon, std::size_t resolution,
                                     const SeedOptions& options) {
  return node_scan(bloch_components(v, epsilon, options), v, resolution, options);
}

Mixing minimal_node_mixing(const std::vector<NodeScanEntry>& scan) {
  if (scan.empty()) throw DomainError("empty node scan");
  int best = scan.front().node_count;
  for (const auto& e : scan) best = std::min(best, e.node_count);
  const std::size_t n = scan.size();
  // Longest cyclic run of entries at the minimum.
  std::size_t best_start = 0;
  std::size_t best_len = 0;
  bool all = true;
  for (const auto& e : scan) all = all && e.node_count == best;
  if (all) {
    best_len = n;
  } else {
    std::size_t first_break = 0;
    while (scan[first_break].node_count == best) ++first_break;
    std::size_t len = 0;
    std::size_t start = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      const std::size_t i = (first_break + t) % n;
      if (scan[i].node_count == best) {
        if (len == 0) start = i;
        ++len;
        if (len > best_len) {
          best_len = len;
          best_start = start;
        }
      } else {
        len = 0;
      }
    }
  }
  const double step = std::numbers::pi / static_cast<double>(n);
  const double angle = scan[best_start].angle + 0.5 * static_cast<double>(best_len - 1) * step;
  return {std::cos(angle), std::sin(angle), best};
}

NodeCount count_nodes(const Grid& grid, std::span<const double> u, std::span<const double> du,
                      double touch_fraction) {
  return count_nodes_blocked(grid, u, du, touch_fraction, 0);
}

Superpotential superpotential(const SeedSolution& seed) {
  if (!seed.nodes.empty()) {
    std::ostringstream msg;
    msg << "seed at epsilon = " << seed.epsilon << " has " << seed.nodes.size()
        << " node(s) in the window, first at x = " << seed.nodes.front();
    throw SingularTransformError(msg.str(), seed.nodes);
  }
  Superpotential out;
  out.grid = seed.grid;
  out.alpha.resize(seed.u.size());
  for (std::size_t i = 0; i < seed.u.size(); ++i) out.alpha[i] = seed.du[i] / seed.u[i];
  out.riccati_residual = riccati_residual(seed);
  return out;
}

double riccati_residual(const SeedSolution& seed, double threshold) {
  const auto d2 = central_first_derivative(seed.du, seed.grid.dx);
  const std::size_t per_period =
      static_cast<std::size_t>(std::llround(seed.period / seed.grid.dx));
  const auto amp = block_max_abs(seed.u, per_period);
  double worst = 0.0;
  for (std::size_t i = kStencilHalfWidth; i + kStencilHalfWidth < seed.u.size(); ++i) {
    if (std::abs(seed.u[i]) <= threshold * amp[i]) continue;
    const double v = seed.potential(seed.grid.x(i));
    worst = std::max(worst, std::abs(d2[i] / seed.u[i] - (v - seed.epsilon)));
  }
  return worst;
}

}  // namespace susyband
