#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "susyband/elliptic.hpp"
#include "susyband/grid.hpp"

namespace susyband {

class Potential;

struct ConstantPotential {
  double value;
  double period;  // nominal period used for Floquet analysis
};

// V(x) = n(n+1) m sn^2(x|m), period 2K(m).
struct LamePotential {
  int n;
  EllipticParameter m;
  double quarter_period;  // K(m)
};

// Uniform samples of V with cubic Hermite interpolation. A periodic table covers exactly one
// period and wraps; otherwise the tails take over outside [x_lo, x_hi] (left tail defaults to
// the right one when absent).
struct TabulatedPotential {
  Grid grid;
  std::vector<double> values;
  std::vector<double> slopes;
  double period;
  bool periodic;
  std::shared_ptr<const Potential> tail;
  std::shared_ptr<const Potential> tail_left;
};

struct ShiftedPotential {
  std::shared_ptr<const Potential> base;
  double delta;
};

// Immutable value handle over one of the potential kinds; copies share the representation.
class Potential {
 public:
  using Kind = std::variant<ConstantPotential, LamePotential, TabulatedPotential, ShiftedPotential>;

  static Potential constant(double value, double period);
  static Potential lame(int n, EllipticParameter m);
  // Validates the table; slopes are estimated from the values when left empty.
  static Potential tabulated(TabulatedPotential table);
  // Periodic one-period table from samples at x_lo + i*dx, i = 0..N (last equals first).
  static Potential periodic_table(double x_lo, double dx, std::vector<double> values,
                                  std::vector<double> slopes = {});
  static Potential shifted(const Potential& base, double delta);

  double operator()(double x) const { return evaluate(x); }
  double evaluate(double x) const;
  double derivative(double x) const;

  double period() const noexcept { return period_; }
  bool is_periodic() const noexcept { return periodic_; }
  const Kind& kind() const noexcept { return *kind_; }

  std::vector<double> sample(const Grid& grid) const;
  std::vector<double> sample_derivative(const Grid& grid) const;

 private:
  Potential(std::shared_ptr<const Kind> kind, double period, bool periodic)
      : kind_(std::move(kind)), period_(period), periodic_(periodic) {}

  std::shared_ptr<const Kind> kind_;
  double period_;
  bool periodic_;
};

// Lamé quarter-period helper for callers that only hold (n, m).
double lame_period(EllipticParameter m);

}  // namespace susyband
