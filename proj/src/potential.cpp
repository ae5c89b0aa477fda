#include "susyband/potential.hpp"

#include <cmath>
#include <string>

#include "susyband/error.hpp"

namespace susyband {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double wrap_into(double x, double lo, double period) {
  double r = std::fmod(x - lo, period);
  if (r < 0) r += period;
  return lo + r;
}

}  // namespace

double lame_period(EllipticParameter m) { return 2.0 * complete_k(m); }

Potential Potential::constant(double value, double period) {
  if (!(period > 0.0) || !std::isfinite(value)) {
    throw DomainError("constant potential needs a finite value and a positive period");
  }
  return Potential(std::make_shared<const Kind>(ConstantPotential{value, period}), period, true);
}

Potential Potential::lame(int n, EllipticParameter m) {
  if (n < 1) {
    throw DomainError("Lame potential needs n >= 1 (use a constant potential for n = 0)");
  }
  if (!(m.value() > 0.0 && m.value() < 1.0)) {
    throw DomainError("Lame potential needs 0 < m < 1");
  }
  const double k = complete_k(m);
  return Potential(std::make_shared<const Kind>(LamePotential{n, m, k}), 2.0 * k, true);
}

Potential Potential::tabulated(TabulatedPotential table) {
  const std::size_t n = table.values.size();
  if (n < 5 || table.grid.count != n) {
    throw DomainError("tabulated potential needs at least 5 samples matching its grid");
  }
  if (!(table.grid.dx > 0.0) || !(table.period > 0.0)) {
    throw DomainError("tabulated potential needs positive spacing and period");
  }
  if (!table.slopes.empty() && table.slopes.size() != n) {
    throw DomainError("tabulated slopes must match the number of values");
  }
  const double span = table.grid.dx * static_cast<double>(n - 1);
  if (table.periodic) {
    if (std::abs(span - table.period) > 1e-9 * table.period) {
      throw DomainError("periodic table must span exactly one period");
    }
    table.tail.reset();
    table.tail_left.reset();
  } else {
    if (!table.tail) {
      throw DomainError("windowed table requires an asymptotic tail potential");
    }
    const double periods = span / table.period;
    if (std::abs(periods - std::round(periods)) > 1e-6) {
      throw DomainError("windowed table must span an integer number of periods");
    }
  }
  if (table.slopes.empty()) {
    table.slopes = estimate_slopes(table.values, table.grid.dx, table.periodic);
  }
  // A windowed table is asymptotically periodic; it is not itself periodic.
  const bool periodic = table.periodic;
  const double period = table.period;
  return Potential(std::make_shared<const Kind>(std::move(table)), period, periodic);
}

Potential Potential::periodic_table(double x_lo, double dx, std::vector<double> values,
                                    std::vector<double> slopes) {
  TabulatedPotential t;
  t.grid = Grid{x_lo, dx, values.size()};
  t.period = dx * static_cast<double>(values.size() - 1);
  t.values = std::move(values);
  t.slopes = std::move(slopes);
  t.periodic = true;
  return tabulated(std::move(t));
}

Potential Potential::shifted(const Potential& base, double delta) {
  if (const auto* s = std::get_if<ShiftedPotential>(base.kind_.get())) {
    return shifted(*s->base, s->delta + delta);
  }
  auto kind = std::make_shared<const Kind>(
      ShiftedPotential{std::make_shared<const Potential>(base), delta});
  return Potential(std::move(kind), base.period_, base.periodic_);
}

double Potential::evaluate(double x) const {
  return std::visit(
      Overloaded{
          [](const ConstantPotential& c) { return c.value; },
          [x](const LamePotential& l) {
            const double sn = jacobi_sncndn(x, l.m).sn;
            return l.n * (l.n + 1) * l.m.value() * sn * sn;
          },
          [x](const TabulatedPotential& t) {
            if (t.periodic) {
              return hermite_eval(t.grid, t.values, t.slopes, wrap_into(x, t.grid.x_lo, t.period))
                  .value;
            }
            if (x < t.grid.x_lo) return (t.tail_left ? *t.tail_left : *t.tail)(x);
            if (x > t.grid.x_hi()) return (*t.tail)(x);
            return hermite_eval(t.grid, t.values, t.slopes, x).value;
          },
          [x](const ShiftedPotential& s) { return s.base->evaluate(x + s.delta); },
      },
      *kind_);
}

double Potential::derivative(double x) const {
  return std::visit(
      Overloaded{
          [](const ConstantPotential&) { return 0.0; },
          [x](const LamePotential& l) {
            const auto j = jacobi_sncndn(x, l.m);
            return 2.0 * l.n * (l.n + 1) * l.m.value() * j.sn * j.cn * j.dn;
          },
          [x](const TabulatedPotential& t) {
            if (t.periodic) {
              return hermite_eval(t.grid, t.values, t.slopes, wrap_into(x, t.grid.x_lo, t.period))
                  .slope;
            }
            if (x < t.grid.x_lo) return (t.tail_left ? *t.tail_left : *t.tail).derivative(x);
            if (x > t.grid.x_hi()) return t.tail->derivative(x);
            return hermite_eval(t.grid, t.values, t.slopes, x).slope;
          },
          [x](const ShiftedPotential& s) { return s.base->derivative(x + s.delta); },
      },
      *kind_);
}

std::vector<double> Potential::sample(const Grid& grid) const {
  std::vector<double> out(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) out[i] = evaluate(grid.x(i));
  return out;
}

std::vector<double> Potential::sample_derivative(const Grid& grid) const {
  std::vector<double> out(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) out[i] = derivative(grid.x(i));
  return out;
}

}  // namespace susyband
