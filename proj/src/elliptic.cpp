#include "susyband/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "susyband/error.hpp"

namespace susyband {

namespace {

constexpr int kMaxAgmSteps = 16;

// Convergence test for the AGM: once |a - b| < tol * a the next quadratic step is exact to
// machine precision.
const double kAgmTol = std::sqrt(std::numeric_limits<double>::epsilon()) * 0.1;

}  // namespace

EllipticParameter::EllipticParameter(double m) : m_(m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw DomainError("elliptic parameter m must lie in [0, 1], got " + std::to_string(m));
  }
}

double complete_k(EllipticParameter m) {
  if (m.value() == 1.0) {
    throw DomainError("K(m) diverges at m = 1");
  }
  double a = 1.0;
  double b = std::sqrt(m.complement());
  for (int i = 0; i < kMaxAgmSteps; ++i) {
    if (std::abs(a - b) <= kAgmTol * a) break;
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  // One more arithmetic mean squeezes out the last rounding.
  return std::numbers::pi / (a + b);
}

JacobiTriple jacobi_sncndn(double x, EllipticParameter m) {
  if (m.value() == 0.0) {
    return {std::sin(x), std::cos(x), 1.0};
  }
  if (m.value() == 1.0) {
    const double sech = 1.0 / std::cosh(x);
    return {std::tanh(x), sech, sech};
  }

  const double quarter = complete_k(m);
  x = std::remainder(x, 4.0 * quarter);

  // Descending Gauss transformation (Bulirsch): run the AGM on (1, sqrt(1-m)), then recover
  // the amplitude by the backward recursion.
  std::array<double, kMaxAgmSteps> as{};
  std::array<double, kMaxAgmSteps> bs{};
  double mc = m.complement();
  double a = 1.0;
  double c = 1.0;
  int levels = 0;
  for (; levels < kMaxAgmSteps;) {
    as[levels] = a;
    mc = std::sqrt(mc);
    bs[levels] = mc;
    c = 0.5 * (a + mc);
    ++levels;
    if (std::abs(a - mc) <= kAgmTol * a) break;
    mc *= a;
    a = c;
  }

  const double phase = x * c;
  double sn = std::sin(phase);
  double cn = std::cos(phase);
  double dn = 1.0;
  if (sn != 0.0) {
    double ratio = cn / sn;
    c *= ratio;
    for (int l = levels - 1; l >= 0; --l) {
      const double b = as[l];
      ratio *= c;
      c *= dn;
      dn = (bs[l] + ratio) / (b + ratio);
      ratio = c / b;
    }
    const double s = 1.0 / std::sqrt(c * c + 1.0);
    sn = sn < 0.0 ? -s : s;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

}  // namespace susyband
