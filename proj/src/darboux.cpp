#include "susyband/darboux.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "susyband/error.hpp"

namespace susyband {

namespace {

struct Order1Fields {
  std::vector<double> alpha, dalpha, partner, dpartner;
};

Order1Fields order1_fields(double eps, std::span<const double> u, std::span<const double> du,
                           std::span<const double> v, std::span<const double> dv) {
  Order1Fields f;
  const std::size_t n = u.size();
  f.alpha.resize(n);
  f.dalpha.resize(n);
  f.partner.resize(n);
  f.dpartner.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = du[i] / u[i];
    const double da = v[i] - eps - a * a;
    f.alpha[i] = a;
    f.dalpha[i] = da;
    f.partner[i] = 2.0 * eps - v[i] + 2.0 * a * a;
    f.dpartner[i] = -dv[i] + 4.0 * a * da;
  }
  return f;
}

struct Order2Fields {
  std::vector<double> w, dw, beta, dbeta, partner, dpartner, gamma;
};

Order2Fields order2_fields(double e1, double e2, std::span<const double> u1,
                           std::span<const double> du1, std::span<const double> u2,
                           std::span<const double> du2, std::span<const double> v,
                           std::span<const double> dv) {
  Order2Fields f;
  const std::size_t n = u1.size();
  for (auto* vec : {&f.w, &f.dw, &f.beta, &f.dbeta, &f.partner, &f.dpartner, &f.gamma}) {
    vec->resize(n);
  }
  const double delta = e1 - e2;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = u1[i] * du2[i] - du1[i] * u2[i];
    const double w1 = delta * u1[i] * u2[i];
    const double w2 = delta * (du1[i] * u2[i] + u1[i] * du2[i]);
    const double w3 = delta * ((2.0 * v[i] - e1 - e2) * u1[i] * u2[i] + 2.0 * du1[i] * du2[i]);
    const double r1 = w1 / w;
    const double beta = -r1;
    const double dbeta = -w2 / w + r1 * r1;
    const double ddbeta = -w3 / w + 3.0 * r1 * (w2 / w) - 2.0 * r1 * r1 * r1;
    f.w[i] = w;
    f.dw[i] = w1;
    f.beta[i] = beta;
    f.dbeta[i] = dbeta;
    f.partner[i] = v[i] + 2.0 * dbeta;
    f.dpartner[i] = dv[i] + 2.0 * ddbeta;
    f.gamma[i] = 0.5 * beta * beta - 0.5 * dbeta - v[i] + 0.5 * (e1 + e2);
  }
  return f;
}

// Zeros (sign changes or near-zeros) of sampled data, located to grid resolution.
std::vector<double> zeros_of(const Grid& grid, std::span<const double> f, std::size_t block,
                             double fraction) {
  std::vector<double> out;
  const auto amp = block_max_abs(f, block);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) <= fraction * amp[i]) {
      out.push_back(grid.x(i));
    } else if (i + 1 < f.size() && (f[i] > 0) != (f[i + 1] > 0) &&
               std::abs(f[i + 1]) > fraction * amp[i + 1]) {
      const double t = f[i] / (f[i] - f[i + 1]);
      out.push_back(grid.x(i) + t * grid.dx);
    }
  }
  return out;
}

const PeriodTrace& right_component(const SeedSolution& s) {
  return s.c_plus != 0.0 ? s.components->growing : s.components->decaying;
}
const PeriodTrace& left_component(const SeedSolution& s) {
  return s.c_minus != 0.0 ? s.components->decaying : s.components->growing;
}
bool effectively_bloch(const SeedSolution& s) {
  return s.is_bloch() || s.c_plus == 0.0 || s.c_minus == 0.0;
}

std::size_t samples_per_period(const SeedSolution& s) {
  return static_cast<std::size_t>(std::llround(s.period / s.grid.dx));
}

// Decay rates of |psi| toward -inf and +inf from per-period maxima of the outer periods.
std::pair<double, double> measured_decay(std::span<const double> psi, std::size_t block,
                                         double period) {
  const std::size_t periods = psi.size() / block;
  if (periods < 2) return {0.0, 0.0};
  std::vector<double> amp(periods, 0.0);
  for (std::size_t k = 0; k < periods; ++k) {
    for (std::size_t i = k * block; i < (k + 1) * block; ++i) {
      amp[k] = std::max(amp[k], std::abs(psi[i]));
    }
  }
  // Outermost pair of periods, where the subdominant Bloch components have died out the most.
  const double left = (std::log(amp[1]) - std::log(amp[0])) / period;
  const double right = (std::log(amp[periods - 2]) - std::log(amp[periods - 1])) / period;
  return {left, right};
}

KernelState make_kernel_state(double eps, std::vector<double> psi, const SeedSolution& grower,
                              const Grid& grid) {
  KernelState k;
  k.epsilon = eps;
  k.normalizable = grower.growth_right() > 0.0 && grower.growth_left() > 0.0;
  k.expected_decay_rate = grower.components->growth_rate();
  const auto [left, right] = measured_decay(psi, samples_per_period(grower), grower.period);
  k.decay_rate_left = left;
  k.decay_rate_right = right;
  k.l2_norm = std::sqrt(l2_norm_squared(psi, grid.dx));
  k.psi = std::move(psi);
  return k;
}

double periodicity_residual(std::span<const double> f, std::size_t block) {
  double worst = 0.0;
  for (std::size_t i = 0; i + block < f.size(); ++i) {
    worst = std::max(worst, std::abs(f[i + block] - f[i]));
  }
  return worst;
}

double tail_residual(const TransformResult& r, std::size_t block, const Potential& right,
                     const Potential& left) {
  double worst = 0.0;
  const std::size_t n = r.partner_values.size();
  for (std::size_t i = 0; i < std::min(block, n); ++i) {
    worst = std::max(worst, std::abs(r.partner_values[i] - left(r.grid.x(i))));
    const std::size_t j = n - 1 - i;
    worst = std::max(worst, std::abs(r.partner_values[j] - right(r.grid.x(j))));
  }
  return worst;
}

Potential windowed_partner(const Grid& grid, std::vector<double> values, std::vector<double> slopes,
                           double period, Potential right, Potential left) {
  TabulatedPotential t;
  t.grid = grid;
  t.values = std::move(values);
  t.slopes = std::move(slopes);
  t.period = period;
  t.periodic = false;
  t.tail = std::make_shared<const Potential>(std::move(right));
  t.tail_left = std::make_shared<const Potential>(std::move(left));
  return Potential::tabulated(std::move(t));
}

void check_riccati(const SeedSolution& seed, const TransformOptions& options, double& worst) {
  const double r = riccati_residual(seed);
  worst = std::max(worst, r);
  if (!(r < options.riccati_gate)) {
    std::ostringstream msg;
    msg << "seed at epsilon = " << seed.epsilon << " fails the Riccati gate (residual " << r
        << ")";
    throw NumericalError(msg.str());
  }
}

}  // namespace

Potential susy1_periodic_partner(const Potential& v, double epsilon, const PeriodTrace& trace,
                                 double dx) {
  const Grid g{0.0, dx, trace.u.size()};
  for (std::size_t i = 0; i < trace.u.size(); ++i) {
    if (i + 1 < trace.u.size() && ((trace.u[i] > 0) != (trace.u[i + 1] > 0) || trace.u[i] == 0.0)) {
      throw SingularTransformError("Bloch seed has a node; periodic partner is singular",
                                   {g.x(i)});
    }
  }
  const auto vs = v.sample(g);
  const auto dvs = v.sample_derivative(g);
  auto f = order1_fields(epsilon, trace.u, trace.du, vs, dvs);
  f.partner.back() = f.partner.front();
  f.dpartner.back() = f.dpartner.front();
  return Potential::periodic_table(0.0, dx, std::move(f.partner), std::move(f.dpartner));
}

Potential susy2_periodic_partner(const Potential& v, double eps1, const PeriodTrace& t1,
                                 double eps2, const PeriodTrace& t2, double dx) {
  const Grid g{0.0, dx, t1.u.size()};
  const auto vs = v.sample(g);
  const auto dvs = v.sample_derivative(g);
  auto f = order2_fields(eps1, eps2, t1.u, t1.du, t2.u, t2.du, vs, dvs);
  auto zeros = zeros_of(g, f.w, f.w.size(), 1e-10);
  if (t1.multiplier * t2.multiplier < 0.0 && zeros.empty()) zeros.push_back(g.x_hi());
  if (!zeros.empty()) {
    throw SingularTransformError("Wronskian of the Bloch pair vanishes; periodic partner is singular",
                                 std::move(zeros));
  }
  f.partner.back() = f.partner.front();
  f.dpartner.back() = f.dpartner.front();
  return Potential::periodic_table(0.0, dx, std::move(f.partner), std::move(f.dpartner));
}

TransformResult susy1(const SeedSolution& seed, const TransformOptions& options) {
  if (!seed.nodes.empty()) {
    std::ostringstream msg;
    msg << "1-SUSY seed at epsilon = " << seed.epsilon << " has " << seed.nodes.size()
        << " node(s) in the window, first at x = " << seed.nodes.front();
    throw SingularTransformError(msg.str(), seed.nodes);
  }
  TransformResult r;
  r.order = 1;
  r.epsilons = {seed.epsilon};
  r.grid = seed.grid;
  check_riccati(seed, options, r.diagnostics.riccati_residual);

  const Potential& v = seed.potential;
  r.original = v.sample(r.grid);
  const auto dv = v.sample_derivative(r.grid);
  auto f = order1_fields(seed.epsilon, seed.u, seed.du, r.original, dv);
  const std::size_t block = samples_per_period(seed);

  const auto amp = block_max_abs(seed.u, block);
  r.diagnostics.min_abs_denominator = std::abs(seed.u.front());
  r.diagnostics.min_relative_denominator = 1.0;
  for (std::size_t i = 0; i < seed.u.size(); ++i) {
    r.diagnostics.min_abs_denominator = std::min(r.diagnostics.min_abs_denominator, std::abs(seed.u[i]));
    r.diagnostics.min_relative_denominator =
        std::min(r.diagnostics.min_relative_denominator, std::abs(seed.u[i]) / amp[i]);
  }

  const double dx = seed.grid.dx;
  r.periodic = effectively_bloch(seed);
  if (r.periodic) {
    r.partner = susy1_periodic_partner(v, seed.epsilon, right_component(seed), dx);
    r.partner_values = f.partner;
    r.diagnostics.asymptotic_period_residual = periodicity_residual(f.partner, block);
  } else {
    auto right = susy1_periodic_partner(v, seed.epsilon, right_component(seed), dx);
    auto left = susy1_periodic_partner(v, seed.epsilon, left_component(seed), dx);
    r.partner = windowed_partner(r.grid, f.partner, f.dpartner, seed.period, right, left);
    r.partner_values = f.partner;
    r.diagnostics.asymptotic_period_residual = tail_residual(r, block, right, left);
  }
  r.intertwiner = std::move(f.alpha);
  r.intertwiner_derivative = std::move(f.dalpha);

  std::vector<double> psi(seed.u.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = 1.0 / seed.u[i];
  r.kernel.push_back(make_kernel_state(seed.epsilon, std::move(psi), seed, r.grid));
  return r;
}

TransformResult susy2(const SeedSolution& seed1, const SeedSolution& seed2,
                      const TransformOptions& options) {
  if (std::abs(seed1.epsilon - seed2.epsilon) <= 1e-12 * std::max(1.0, std::abs(seed1.epsilon))) {
    throw DomainError("confluent second-order transform (eps1 == eps2) is not supported");
  }
  if (!same_grid(seed1.grid, seed2.grid) || std::abs(seed1.period - seed2.period) > 1e-12) {
    throw DomainError("second-order transform needs both seeds on the same window grid");
  }
  TransformResult r;
  r.order = 2;
  r.epsilons = {seed1.epsilon, seed2.epsilon};
  r.grid = seed1.grid;
  check_riccati(seed1, options, r.diagnostics.riccati_residual);
  check_riccati(seed2, options, r.diagnostics.riccati_residual);

  const Potential& v = seed1.potential;
  const double e1 = seed1.epsilon;
  const double e2 = seed2.epsilon;
  r.original = v.sample(r.grid);
  const auto dv = v.sample_derivative(r.grid);
  auto f = order2_fields(e1, e2, seed1.u, seed1.du, seed2.u, seed2.du, r.original, dv);
  const std::size_t block = samples_per_period(seed1);

  auto zeros = zeros_of(r.grid, f.w, block, options.singular_fraction);
  if (!zeros.empty()) {
    std::ostringstream msg;
    msg << "Wronskian W(u1, u2) vanishes in the window, first near x = " << zeros.front();
    throw SingularTransformError(msg.str(), std::move(zeros));
  }
  const auto wamp = block_max_abs(f.w, block);
  r.diagnostics.min_abs_denominator = std::abs(f.w.front());
  r.diagnostics.min_relative_denominator = 1.0;
  for (std::size_t i = 0; i < f.w.size(); ++i) {
    r.diagnostics.min_abs_denominator = std::min(r.diagnostics.min_abs_denominator, std::abs(f.w[i]));
    r.diagnostics.min_relative_denominator =
        std::min(r.diagnostics.min_relative_denominator, std::abs(f.w[i]) / wamp[i]);
  }

  // Consistency of the two expressions for beta and of the closed-form W'.
  const double delta = e1 - e2;
  const auto amp1 = block_max_abs(seed1.u, block);
  const auto amp2 = block_max_abs(seed2.u, block);
  for (std::size_t i = 0; i < f.w.size(); ++i) {
    if (std::abs(seed1.u[i]) <= 1e-3 * amp1[i] || std::abs(seed2.u[i]) <= 1e-3 * amp2[i]) continue;
    const double a1 = seed1.du[i] / seed1.u[i];
    const double a2 = seed2.du[i] / seed2.u[i];
    if (std::abs(a1 - a2) <= 1e-6) continue;
    r.diagnostics.beta_consistency =
        std::max(r.diagnostics.beta_consistency, std::abs(delta / (a1 - a2) - f.beta[i]));
  }
  const auto dw_fd = central_first_derivative(f.w, r.grid.dx);
  const auto dwamp = block_max_abs(f.dw, block);
  const auto bamp = block_max_abs(f.beta, block);
  const auto dbeta_star = [&] {
    // beta'' from the closed forms, recomputed for the nonlinear equation check.
    std::vector<double> out(f.w.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = 0.5 * (f.dpartner[i] - dv[i]);
    }
    return out;
  }();
  for (std::size_t i = kStencilHalfWidth; i + kStencilHalfWidth < f.w.size(); ++i) {
    r.diagnostics.wprime_residual =
        std::max(r.diagnostics.wprime_residual, std::abs(dw_fd[i] - f.dw[i]) / dwamp[i]);
  }
  const double mean = 0.5 * (e1 + e2);
  for (std::size_t i = 0; i < f.w.size(); ++i) {
    const double b = f.beta[i];
    if (std::abs(b) <= 1e-2 * bamp[i]) continue;
    const double db = f.dbeta[i];
    const double ddb = dbeta_star[i];
    const double q = db / (2.0 * b);
    const double lhs = ddb / (2.0 * b) - q * q - db + 0.25 * b * b +
                       (delta / (2.0 * b)) * (delta / (2.0 * b)) + mean;
    r.diagnostics.sususy_equation_residual =
        std::max(r.diagnostics.sususy_equation_residual, std::abs(lhs - r.original[i]));
  }

  const double dx = r.grid.dx;
  r.periodic = effectively_bloch(seed1) && effectively_bloch(seed2);
  if (r.periodic) {
    r.partner = susy2_periodic_partner(v, e1, right_component(seed1), e2, right_component(seed2), dx);
    r.diagnostics.asymptotic_period_residual = periodicity_residual(f.partner, block);
    r.partner_values = f.partner;
  } else {
    auto right = susy2_periodic_partner(v, e1, right_component(seed1), e2, right_component(seed2), dx);
    auto left = susy2_periodic_partner(v, e1, left_component(seed1), e2, left_component(seed2), dx);
    r.partner = windowed_partner(r.grid, f.partner, f.dpartner, seed1.period, right, left);
    r.partner_values = f.partner;
    r.diagnostics.asymptotic_period_residual = tail_residual(r, block, right, left);
  }
  r.intertwiner = std::move(f.beta);
  r.intertwiner_derivative = std::move(f.dbeta);
  r.gamma = std::move(f.gamma);

  std::vector<double> psi1(f.w.size());
  std::vector<double> psi2(f.w.size());
  for (std::size_t i = 0; i < f.w.size(); ++i) {
    psi1[i] = seed2.u[i] / f.w[i];
    psi2[i] = seed1.u[i] / f.w[i];
  }
  r.kernel.push_back(make_kernel_state(e1, std::move(psi1), seed1, r.grid));
  r.kernel.push_back(make_kernel_state(e2, std::move(psi2), seed2, r.grid));
  return r;
}

const std::vector<KernelState>& kernel_states(const TransformResult& result) {
  return result.kernel;
}

std::vector<TestFunction> default_test_functions(const TransformResult& result) {
  const double t = result.partner.period();
  std::vector<TestFunction> out;
  for (const double c : {-t, -t / 3.0, 0.0, 0.5 * t, t}) {
    if (c - 8.0 * 0.5 > result.grid.x_lo && c + 8.0 * 0.5 < result.grid.x_hi()) {
      out.push_back({c, 0.5});
    }
  }
  return out;
}

namespace {

double relative_norm(std::span<const double> r, std::span<const double> f, std::size_t skip) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = skip; i + skip < f.size(); ++i) {
    num += r[i] * r[i];
    den += f[i] * f[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

double factorization_residual(const TransformResult& result, std::span<const TestFunction> tests,
                              std::size_t stride) {
  const double t = result.partner.period();
  if (stride == 0) {
    const auto per = static_cast<std::size_t>(std::llround(t / result.grid.dx));
    stride = result.order == 1 ? 1 : std::max<std::size_t>(1, per / 128);
  }
  const Grid g = result.grid.subsampled(stride);
  const double h = g.dx;
  const auto v = subsample(result.original, stride);
  const auto vt = subsample(result.partner_values, stride);
  const auto a = subsample(result.intertwiner, stride);
  const auto da = subsample(result.intertwiner_derivative, stride);
  const std::size_t n = g.count;
  const std::size_t skip = 2 * kStencilHalfWidth;

  auto d1 = [h](std::span<const double> x) { return central_first_derivative(x, h); };
  auto d2 = [h](std::span<const double> x) { return central_second_derivative(x, h); };
  auto hamiltonian = [&](std::span<const double> pot, std::span<const double> x) {
    const auto xx = d2(x);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -xx[i] + pot[i] * x[i];
    return out;
  };

  double worst = 0.0;
  for (const auto& test : tests) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (g.x(i) - test.center) / test.width;
      f[i] = std::exp(-0.5 * z * z);
    }
    std::vector<double> r1(n), r2(n);
    if (result.order == 1) {
      const double eps = result.epsilons[0];
      const auto df = d1(f);
      std::vector<double> bd(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        bd[i] = -df[i] + a[i] * f[i];  // B^dagger f
        b[i] = df[i] + a[i] * f[i];    // B f
      }
      const auto dbd = d1(bd);
      const auto db = d1(b);
      const auto hf = hamiltonian(v, f);
      const auto htf = hamiltonian(vt, f);
      for (std::size_t i = 0; i < n; ++i) {
        r1[i] = dbd[i] + a[i] * bd[i] + eps * f[i] - hf[i];
        r2[i] = -db[i] + a[i] * b[i] + eps * f[i] - htf[i];
      }
    } else {
      const double e1 = result.epsilons[0];
      const double e2 = result.epsilons[1];
      const auto gm = subsample(result.gamma, stride);
      auto bdag = [&](std::span<const double> x) {
        const auto x1 = d1(x);
        const auto x2 = d2(x);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = x2[i] + a[i] * x1[i] + gm[i] * x[i];
        return out;
      };
      auto bop = [&](std::span<const double> x) {
        const auto x1 = d1(x);
        const auto x2 = d2(x);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
          out[i] = x2[i] - a[i] * x1[i] + (gm[i] - da[i]) * x[i];
        }
        return out;
      };
      auto shifted_square = [&](std::span<const double> pot, std::span<const double> x) {
        auto p = hamiltonian(pot, x);
        for (std::size_t i = 0; i < n; ++i) p[i] -= e2 * x[i];
        auto q = hamiltonian(pot, p);
        for (std::size_t i = 0; i < n; ++i) q[i] -= e1 * p[i];
        return q;
      };
      const auto bbd = bop(bdag(f));
      const auto bdb = bdag(bop(f));
      const auto hh = shifted_square(v, f);
      const auto hth = shifted_square(vt, f);
      for (std::size_t i = 0; i < n; ++i) {
        r1[i] = bbd[i] - hh[i];
        r2[i] = bdb[i] - hth[i];
      }
    }
    worst = std::max({worst, relative_norm(r1, f, skip), relative_norm(r2, f, skip)});
  }
  return worst;
}

double intertwining_residual(const TransformResult& result, const SeedSolution& eigenfunction) {
  if (!same_grid(result.grid, eigenfunction.grid)) {
    throw DomainError("eigenfunction must be sampled on the transform grid");
  }
  const double e = eigenfunction.epsilon;
  const std::size_t n = result.grid.count;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double psi = eigenfunction.u[i];
    const double dpsi = eigenfunction.du[i];
    if (result.order == 1) {
      phi[i] = -dpsi + result.intertwiner[i] * psi;
    } else {
      phi[i] = (result.original[i] - e) * psi + result.intertwiner[i] * dpsi + result.gamma[i] * psi;
    }
  }
  double scale = 0.0;
  for (double x : phi) scale = std::max(scale, std::abs(x));
  if (!(scale > 0.0)) {
    throw DomainError("eigenfunction lies in the kernel of the intertwiner");
  }
  const auto dd = central_second_derivative(phi, result.grid.dx);
  double worst = 0.0;
  for (std::size_t i = kStencilHalfWidth; i + kStencilHalfWidth < n; ++i) {
    worst = std::max(worst, std::abs(-dd[i] + (result.partner_values[i] - e) * phi[i]));
  }
  return worst / scale;
}

}  // namespace susyband
