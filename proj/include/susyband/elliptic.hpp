#pragma once

namespace susyband {

// Parameter m of the Jacobi elliptic functions (m = k^2), restricted to [0, 1].
class EllipticParameter {
 public:
  explicit EllipticParameter(double m);

  double value() const noexcept { return m_; }
  double complement() const noexcept { return 1.0 - m_; }

 private:
  double m_;
};

// Complete elliptic integral of the first kind K(m), by the arithmetic-geometric mean.
// Throws DomainError for m = 1 (logarithmic divergence).
double complete_k(EllipticParameter m);

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

// sn, cn, dn of real argument. The argument is reduced modulo 4K(m) first; m = 1 uses the
// exact hyperbolic limit.
JacobiTriple jacobi_sncndn(double x, EllipticParameter m);

}  // namespace susyband
