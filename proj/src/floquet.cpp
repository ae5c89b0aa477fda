#include "susyband/floquet.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "susyband/error.hpp"

namespace susyband {

TransferMatrix TransferMatrix::inverse() const noexcept {
  return {{entries[3], -entries[1], -entries[2], entries[0]}, x1, x0};
}

TransferMatrix operator*(const TransferMatrix& later, const TransferMatrix& earlier) {
  const auto& l = later.entries;
  const auto& e = earlier.entries;
  return {{l[0] * e[0] + l[1] * e[2], l[0] * e[1] + l[1] * e[3], l[2] * e[0] + l[3] * e[2],
           l[2] * e[1] + l[3] * e[3]},
          earlier.x0,
          later.x1};
}

namespace {

TransferMatrix from_state(const SchrodingerState& s, double x0, double x1) {
  // Columns are the images of (1, 0) and (0, 1).
  return {{s[0], s[2], s[1], s[3]}, x0, x1};
}

}  // namespace

Propagation propagate(const Potential& v, double energy, double x0, double x1,
                      std::size_t intervals, const IntegratorOptions& options) {
  if (!(x1 > x0) && !(x1 < x0)) {
    return {TransferMatrix{{1.0, 0.0, 0.0, 1.0}, x0, x1}, std::nullopt};
  }
  auto fn = [&v](double x) { return v.evaluate(x); };
  SchrodingerState state{1.0, 0.0, 0.0, 1.0};
  double step = 0.0;
  if (intervals == 0) {
    integrate_schrodinger(fn, energy, x0, x1, state, step, options);
    return {from_state(state, x0, x1), std::nullopt};
  }

  SolutionTrace trace;
  const double dx = (x1 - x0) / static_cast<double>(intervals);
  trace.grid = Grid{x0, dx, intervals + 1};
  for (auto* col : {&trace.psi_a, &trace.dpsi_a, &trace.psi_b, &trace.dpsi_b}) {
    col->reserve(intervals + 1);
  }
  auto record = [&] {
    trace.psi_a.push_back(state[0]);
    trace.dpsi_a.push_back(state[1]);
    trace.psi_b.push_back(state[2]);
    trace.dpsi_b.push_back(state[3]);
  };
  record();
  for (std::size_t i = 0; i < intervals; ++i) {
    const double xa = trace.grid.x(i);
    const double xb = i + 1 == intervals ? x1 : trace.grid.x(i + 1);
    integrate_schrodinger(fn, energy, xa, xb, state, step, options);
    record();
  }
  return {from_state(state, x0, x1), std::move(trace)};
}

TransferMatrix transfer_matrix(const Potential& v, double energy, double x0, double x1,
                               const IntegratorOptions& options) {
  return propagate(v, energy, x0, x1, 0, options).matrix;
}

double discriminant(const Potential& v, double energy, const IntegratorOptions& options) {
  return transfer_matrix(v, energy, 0.0, v.period(), options).trace();
}

std::string_view to_string(EnergyTag tag) {
  switch (tag) {
    case EnergyTag::AllowedBand:
      return "band";
    case EnergyTag::BandEdgePeriodic:
      return "edge_periodic";
    case EnergyTag::BandEdgeAntiperiodic:
      return "edge_antiperiodic";
    case EnergyTag::Gap:
      return "gap";
  }
  return "unknown";
}

EnergyClass classify_discriminant(double d, double edge_tol) {
  EnergyClass out{};
  out.discriminant = d;
  const double excess = std::abs(d) - 2.0;
  if (std::abs(excess) <= edge_tol) {
    const double sign = d > 0 ? 1.0 : -1.0;
    out.tag = d > 0 ? EnergyTag::BandEdgePeriodic : EnergyTag::BandEdgeAntiperiodic;
    out.beta_plus = out.beta_minus = sign;
    return out;
  }
  if (excess < 0) {
    out.tag = EnergyTag::AllowedBand;
    const double im = std::sqrt(1.0 - 0.25 * d * d);
    out.beta_plus = {0.5 * d, im};
    out.beta_minus = {0.5 * d, -im};
    return out;
  }
  out.tag = EnergyTag::Gap;
  // Larger-magnitude root first; the other from the product rule avoids cancellation.
  const double root = std::sqrt(0.25 * d * d - 1.0);
  const double big = 0.5 * d + std::copysign(root, d);
  out.beta_plus = big;
  out.beta_minus = 1.0 / big;
  return out;
}

EnergyClass classify_floquet(const TransferMatrix& floquet, double edge_tol) {
  EnergyClass out = classify_discriminant(floquet.trace(), edge_tol);
  if (out.tag == EnergyTag::BandEdgePeriodic || out.tag == EnergyTag::BandEdgeAntiperiodic) {
    const double scale = std::max({1.0, std::abs(floquet.a()), std::abs(floquet.d())});
    const double off = std::max(std::abs(floquet.b()), std::abs(floquet.c()));
    out.coexistence = off <= std::sqrt(edge_tol) * scale;
  }
  return out;
}

EnergyClass classify(const Potential& v, double energy, double edge_tol,
                     const IntegratorOptions& options) {
  return classify_floquet(transfer_matrix(v, energy, 0.0, v.period(), options), edge_tol);
}

std::optional<std::size_t> BandStructure::gap_index(double e) const {
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i].contains(e)) return i;
  }
  return std::nullopt;
}

std::vector<SweepPoint> discriminant_sweep(const Potential& v, double e_lo, double e_hi,
                                           std::size_t count, double edge_tol,
                                           const IntegratorOptions& options) {
  std::vector<SweepPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double e =
        count == 1 ? e_lo : e_lo + (e_hi - e_lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double d = discriminant(v, e, options);
    out.push_back({e, d, classify_discriminant(d, edge_tol).tag});
  }
  return out;
}

namespace {

struct Bracket {
  double lo;
  double hi;
  double level;  // +2 or -2
};

double refine_root(const Potential& v, const Bracket& br, const BandSearchOptions& opt) {
  auto f = [&](double e) { return discriminant(v, e, opt.integrator) - br.level; };
  double flo = f(br.lo);
  double fhi = f(br.hi);
  if (flo == 0.0) return br.lo;
  if (fhi == 0.0) return br.hi;
  if (flo * fhi > 0) {
    throw NumericalError("band-edge bracket lost its sign change", br.lo);
  }
  std::uintmax_t iters = 200;
  const double tol = opt.energy_tol;
  auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(f, br.lo, br.hi, flo, fhi, done, iters);
  return 0.5 * (a + b);
}

// Extremum of D in [lo, hi]; maximize for level +2, minimize for -2.
std::pair<double, double> refine_extremum(const Potential& v, double lo, double hi, double level,
                                          const BandSearchOptions& opt) {
  const double sign = level > 0 ? -1.0 : 1.0;
  auto f = [&](double e) { return sign * discriminant(v, e, opt.integrator); };
  std::uintmax_t iters = 200;
  const auto [e, fe] = boost::math::tools::brent_find_minima(f, lo, hi, 40, iters);
  return {e, sign * fe};
}

}  // namespace

BandStructure band_edges(const Potential& v, double e_min, double e_max,
                         const BandSearchOptions& options) {
  if (!v.is_periodic()) {
    throw DomainError("band structure requires a periodic potential");
  }
  if (!(e_max > e_min)) {
    throw DomainError("band search window must have e_max > e_min");
  }
  const auto samples = std::max<std::size_t>(
      options.min_samples,
      static_cast<std::size_t>(std::ceil(options.samples_per_unit * (e_max - e_min))));
  const auto sweep =
      discriminant_sweep(v, e_min, e_max, samples + 1, options.edge_tol, options.integrator);

  BandStructure out;
  out.window_lo = e_min;
  out.window_hi = e_max;

  std::vector<Bracket> brackets;
  std::vector<std::pair<double, double>> excluded;  // (lo, hi, level) handled by extremum logic
  std::vector<double> excluded_level;

  for (const double level : {2.0, -2.0}) {
    const double sgn = level > 0 ? 1.0 : -1.0;
    // Local extrema approaching the level: closed gaps or gaps narrower than the scan.
    for (std::size_t i = 1; i + 1 < sweep.size(); ++i) {
      const double d0 = sgn * sweep[i - 1].discriminant;
      const double d1 = sgn * sweep[i].discriminant;
      const double d2 = sgn * sweep[i + 1].discriminant;
      if (!(d1 >= d0 && d1 >= d2)) continue;
      if (!(d0 < 2.0 && d2 < 2.0)) continue;
      if (d1 < 2.0 - 0.25) continue;
      const double lo = sweep[i - 1].energy;
      const double hi = sweep[i + 1].energy;
      const auto [e_star, d_star] = refine_extremum(v, lo, hi, level, options);
      const double excess = sgn * d_star - 2.0;
      excluded.emplace_back(lo, hi);
      excluded_level.push_back(level);
      if (std::abs(excess) <= options.edge_tol) {
        out.touching.push_back(
            {e_star, level > 0 ? EdgeParity::Periodic : EdgeParity::Antiperiodic});
      } else if (excess > 0) {
        brackets.push_back({lo, e_star, level});
        brackets.push_back({e_star, hi, level});
      }
    }
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
      const double fa = sweep[i].discriminant - level;
      const double fb = sweep[i + 1].discriminant - level;
      if (fa == 0.0 || fa * fb < 0.0 || (fb == 0.0 && i + 2 == sweep.size())) {
        const double lo = sweep[i].energy;
        const double hi = sweep[i + 1].energy;
        bool handled = false;
        for (std::size_t k = 0; k < excluded.size(); ++k) {
          if (excluded_level[k] == level && lo >= excluded[k].first - 1e-15 &&
              hi <= excluded[k].second + 1e-15) {
            handled = true;
          }
        }
        if (!handled) brackets.push_back({lo, hi, level});
      }
    }
  }

  for (const auto& br : brackets) {
    const double e = refine_root(v, br, options);
    out.edges.push_back({e, br.level > 0 ? EdgeParity::Periodic : EdgeParity::Antiperiodic});
  }
  auto by_energy = [](const BandEdge& a, const BandEdge& b) { return a.energy < b.energy; };
  std::sort(out.edges.begin(), out.edges.end(), by_energy);
  std::sort(out.touching.begin(), out.touching.end(), by_energy);
  // A root sitting exactly on a scan node can be bracketed twice.
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end(),
                              [&](const BandEdge& a, const BandEdge& b) {
                                return a.parity == b.parity &&
                                       std::abs(a.energy - b.energy) <= 10 * options.energy_tol;
                              }),
                  out.edges.end());

  // Partition the window at the edges and label each piece by |D| at an interior point.
  std::vector<double> cuts{e_min};
  for (const auto& e : out.edges) cuts.push_back(e.energy);
  cuts.push_back(e_max);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    double d = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : sweep) {
      if (s.energy > lo && s.energy < hi) {
        d = s.discriminant;
        break;
      }
    }
    if (std::isnan(d)) d = discriminant(v, 0.5 * (lo + hi), options.integrator);
    if (std::abs(d) < 2.0) {
      out.bands.push_back({lo, hi});
    } else {
      out.gaps.push_back({lo, hi});
    }
  }
  if (!out.gaps.empty() && !out.edges.empty() && out.edges.front().parity == EdgeParity::Periodic &&
      out.gaps.front().hi <= out.edges.front().energy && out.gaps.front().lo == e_min) {
    out.gaps.front().lo = -std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace susyband
