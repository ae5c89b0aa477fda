#include "susyband/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "susyband/error.hpp"

namespace susyband {

double compare_band_structure(const Potential& v, const Potential& w, std::span<const double> energies,
                              const IntegratorOptions& options) {
  const double tv = v.period();
  const double tw = w.period();
  if (std::abs(tv - tw) > 1e-9 * std::max(tv, tw)) {
    std::ostringstream msg;
    msg << "period mismatch: " << tv << " vs " << tw;
    throw DomainError(msg.str());
  }
  double worst = 0.0;
  for (const double e : energies) {
    worst = std::max(worst, std::abs(discriminant(v, e, options) - discriminant(w, e, options)));
  }
  return worst;
}

std::vector<double> band_comparison_grid(const BandStructure& bands, std::size_t count) {
  if (bands.edges.size() < 3) {
    throw DomainError("band comparison grid needs at least three band edges");
  }
  const double lo = bands.edges[0].energy - 0.5;
  const double hi = bands.edges.size() >= 4 ? bands.edges[3].energy : bands.edges[2].energy + 1.0;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<BoundState> bound_states_in_gaps(const TransformResult& result, const BandStructure& bands,
                                             double decay_tolerance) {
  std::vector<BoundState> out;
  for (const auto& k : result.kernel) {
    if (!k.normalizable) continue;
    const auto gap = bands.gap_index(k.epsilon);
    if (!gap) continue;
    BoundState b;
    b.epsilon = k.epsilon;
    b.gap_index = *gap;
    b.expected_decay_rate = k.expected_decay_rate;
    b.decay_rate = std::min(k.decay_rate_left, k.decay_rate_right);
    const double worst = std::max(std::abs(k.decay_rate_left - k.expected_decay_rate),
                                  std::abs(k.decay_rate_right - k.expected_decay_rate));
    b.decay_consistent = worst <= decay_tolerance * k.expected_decay_rate;
    out.push_back(b);
  }
  return out;
}

namespace {

double shift_distance(const std::vector<double>& xs, const std::vector<double>& wx, const Potential& v,
                      double delta) {
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    worst = std::max(worst, std::abs(wx[i] - v(xs[i] + delta)));
  }
  return worst;
}

// Golden-section minimization of f on [a, b] down to an absolute bracket of `tol`.
template <class F>
std::pair<double, double> golden_minimize(F f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

DisplacementFit displacement_fit(const Potential& v, const Potential& w,
                                 const DisplacementOptions& options) {
  const double t = v.period();
  if (std::abs(t - w.period()) > 1e-9 * t) {
    throw DomainError("displacement fit needs potentials of equal period");
  }
  std::vector<double> xs(options.samples);
  std::vector<double> wx(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) {
    xs[i] = t * static_cast<double>(i) / static_cast<double>(options.samples);
    wx[i] = w(xs[i]);
  }
  const double step = t / static_cast<double>(options.offsets);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < options.offsets; ++k) {
    const double r = shift_distance(xs, wx, v, step * static_cast<double>(k));
    if (r < best_value) {
      best_value = r;
      best = k;
    }
  }
  const double center = step * static_cast<double>(best);
  auto [delta, residual] = golden_minimize(
      [&](double d) { return shift_distance(xs, wx, v, d); }, center - step, center + step,
      1e-12 * std::max(1.0, t));
  if (best_value < residual) {
    delta = center;
    residual = best_value;
  }
  delta = std::fmod(delta, t);
  if (delta < 0.0) delta += t;
  if (delta >= t) delta -= t;
  return {delta, residual};
}

InvarianceReport invariance_test(const Potential& v, double epsilon, const InvarianceOptions& options) {
  const auto pair = bloch_seed(v, epsilon, options.seeds);
  const double t = v.period();
  const std::size_t samples = options.displacement.samples;

  std::optional<InvarianceReport> best;
  for (int which = 0; which < 2; ++which) {
    const SeedSolution& seed = which == 0 ? pair.growing : pair.decaying;
    const SeedSolution& other = which == 0 ? pair.decaying : pair.growing;
    const auto result = susy1(seed);
    const auto fit = displacement_fit(v, result.partner, options.displacement);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double scale = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = t * static_cast<double>(i) / static_cast<double>(samples);
      const double p = seed.value_at(x).first * other.value_at(x + fit.delta).first;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      scale = std::max(scale, std::abs(p));
    }
    InvarianceReport report;
    report.delta = fit.delta;
    report.residual_displacement = fit.residual;
    report.residual_product = scale > 0.0 ? (hi - lo) / scale : std::numeric_limits<double>::infinity();
    report.invariant = report.residual_displacement < options.displacement_tol &&
                       report.residual_product < options.product_tol;
    const auto score = [](const InvarianceReport& r) {
      return std::max(r.residual_displacement, r.residual_product);
    };
    if (!best || score(report) < score(*best)) best = report;
    if (pair.components->edge) break;
  }
  return *best;
}

namespace {

struct Tails {
  const Potential* left;
  const Potential* right;
  double x_lo;
  double x_hi;
};

Tails window_tails(const Potential& partner) {
  const auto* table = std::get_if<TabulatedPotential>(&partner.kind());
  if (table == nullptr || table->periodic) {
    throw DomainError("shooting needs a windowed partner with periodic tails");
  }
  const Potential* right = table->tail.get();
  const Potential* left = table->tail_left ? table->tail_left.get() : right;
  return {left, right, table->grid.x_lo, table->grid.x_hi()};
}

// Unit eigenvector of the tail monodromy for the multiplier with |beta| > 1 (grow) or < 1.
std::array<double, 2> bloch_vector(const Potential& tail, double energy, double x0, bool grow,
                                   const IntegratorOptions& options) {
  const auto b = transfer_matrix(tail, energy, x0, x0 + tail.period(), options);
  const double half = 0.5 * b.trace();
  const double disc = half * half - 1.0;
  if (!(disc > 0.0)) {
    std::ostringstream msg;
    msg << "energy " << energy << " lies in an allowed band of the tail";
    throw DomainError(msg.str());
  }
  const double root = std::sqrt(disc);
  const double big = half + (half >= 0.0 ? root : -root);
  const double beta = grow ? big : 1.0 / big;
  std::array<double, 2> v1{b.b(), beta - b.a()};
  std::array<double, 2> v2{beta - b.d(), b.c()};
  auto norm = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  auto v = norm(v1) >= norm(v2) ? v1 : v2;
  const double n = norm(v);
  return {v[0] / n, v[1] / n};
}

}  // namespace

std::optional<double> shooting_eigenvalue(const Potential& partner, double guess, double half_width,
                                          std::size_t scan_points, const IntegratorOptions& options) {
  const Tails tails = window_tails(partner);
  // Eigenvector signs are pinned against the vectors at the guess so the mismatch is continuous.
  const auto ref_left = bloch_vector(*tails.left, guess, tails.x_lo - tails.left->period(), true, options);
  const auto ref_right = bloch_vector(*tails.right, guess, tails.x_hi, false, options);
  auto aligned = [](std::array<double, 2> v, const std::array<double, 2>& ref) {
    if (v[0] * ref[0] + v[1] * ref[1] < 0.0) v = {-v[0], -v[1]};
    return v;
  };
  auto mismatch = [&](double e) {
    const auto vl = aligned(bloch_vector(*tails.left, e, tails.x_lo - tails.left->period(), true, options),
                            ref_left);
    const auto vr = aligned(bloch_vector(*tails.right, e, tails.x_hi, false, options), ref_right);
    const auto l = transfer_matrix(partner, e, tails.x_lo, 0.0, options).apply(vl);
    const auto r = transfer_matrix(partner, e, tails.x_hi, 0.0, options).apply(vr);
    const double scale = std::hypot(l[0], l[1]) * std::hypot(r[0], r[1]);
    return (l[0] * r[1] - l[1] * r[0]) / scale;
  };

  std::vector<double> es(scan_points);
  std::vector<double> fs(scan_points);
  for (std::size_t i = 0; i < scan_points; ++i) {
    es[i] = guess - half_width + 2.0 * half_width * static_cast<double>(i) /
                                     static_cast<double>(scan_points - 1);
    fs[i] = mismatch(es[i]);
  }
  std::optional<double> best;
  for (std::size_t i = 0; i + 1 < scan_points; ++i) {
    if (fs[i] == 0.0) {
      if (!best || std::abs(es[i] - guess) < std::abs(*best - guess)) best = es[i];
      continue;
    }
    if ((fs[i] > 0.0) == (fs[i + 1] > 0.0)) continue;
    std::uintmax_t iterations = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(
        mismatch, es[i], es[i + 1], fs[i], fs[i + 1],
        boost::math::tools::eps_tolerance<double>(40), iterations);
    const double root = 0.5 * (a + b);
    if (!best || std::abs(root - guess) < std::abs(*best - guess)) best = root;
  }
  return best;
}

}  // namespace susyband
