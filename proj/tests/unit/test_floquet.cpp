#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "susyband/elliptic.hpp"
#include "susyband/floquet.hpp"

using namespace susyband;
using Catch::Matchers::WithinAbs;

namespace {

const EllipticParameter kHalf(0.5);

// max |-u'' + V u - E u| / max |u| for an analytic u, with u'' by a 6th-order stencil.
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

}  // namespace

TEST_CASE("free-particle transfer matrix", "[floquet]") {
  const auto v = Potential::constant(0.0, 2.0);
  const double l = 1.7;
  for (double k : {0.5, 1.0, 3.0}) {
    const auto b = transfer_matrix(v, k * k, 0.0, l);
    CHECK_THAT(b.a(), WithinAbs(std::cos(k * l), 1e-9));
    CHECK_THAT(b.b(), WithinAbs(std::sin(k * l) / k, 1e-9));
    CHECK_THAT(b.c(), WithinAbs(-k * std::sin(k * l), 1e-9));
    CHECK_THAT(b.d(), WithinAbs(std::cos(k * l), 1e-9));
  }
  const auto b0 = transfer_matrix(v, 0.0, 0.0, l);
  CHECK_THAT(b0.a(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(b0.b(), WithinAbs(l, 1e-12));
  CHECK_THAT(b0.c(), WithinAbs(0.0, 1e-12));
  CHECK_THAT(b0.d(), WithinAbs(1.0, 1e-12));
  const auto bn = transfer_matrix(v, -1.0, 0.0, l);
  CHECK_THAT(bn.a(), WithinAbs(std::cosh(l), 1e-9));
  CHECK_THAT(bn.b(), WithinAbs(std::sinh(l), 1e-9));
}

TEST_CASE("free-particle discriminant", "[floquet]") {
  const auto v = Potential::constant(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double e = 0.01 + (25.0 - 0.01) * i / 99.0;
    CHECK_THAT(discriminant(v, e), WithinAbs(2.0 * std::cos(std::sqrt(e) * 2.0), 1e-8));
  }
}

TEST_CASE("Lame n=1 edge eigenfunctions by substitution", "[floquet]") {
  const auto v = Potential::lame(1, kHalf);
  const double m = kHalf.value();
  auto sn = [&](double x) { return jacobi_sncndn(x, kHalf).sn; };
  auto cn = [&](double x) { return jacobi_sncndn(x, kHalf).cn; };
  auto dn = [&](double x) { return jacobi_sncndn(x, kHalf).dn; };
  CHECK(substitution_residual(v, m, dn) < 1e-8);
  CHECK(substitution_residual(v, 1.0, cn) < 1e-8);
  CHECK(substitution_residual(v, 1.0 + m, sn) < 1e-8);

  CHECK_THAT(discriminant(v, m), WithinAbs(2.0, 1e-8));
  CHECK_THAT(discriminant(v, 1.0), WithinAbs(-2.0, 1e-8));
  CHECK_THAT(discriminant(v, 1.0 + m), WithinAbs(-2.0, 1e-8));
  CHECK(std::abs(discriminant(v, 0.75)) < 2.0);
}

TEST_CASE("classification", "[floquet]") {
  const auto mid = classify_discriminant(0.0);
  CHECK(mid.tag == EnergyTag::AllowedBand);
  CHECK_THAT(std::abs(mid.beta_plus), WithinAbs(1.0, 1e-15));
  CHECK_THAT(mid.beta_plus.imag(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(mid.beta_minus.imag(), WithinAbs(-1.0, 1e-15));

  const auto edge = classify_discriminant(2.0);
  CHECK(edge.tag == EnergyTag::BandEdgePeriodic);
  CHECK(edge.beta_plus == std::complex<double>(1.0, 0.0));
  CHECK(edge.beta_minus == std::complex<double>(1.0, 0.0));
  CHECK(classify_discriminant(-2.0 + 5e-8).tag == EnergyTag::BandEdgeAntiperiodic);

  const auto gap = classify_discriminant(3.0);
  CHECK(gap.tag == EnergyTag::Gap);
  CHECK_THAT(gap.beta_plus.real(), WithinAbs((3.0 + std::sqrt(5.0)) / 2.0, 1e-14));
  CHECK_THAT((gap.beta_plus * gap.beta_minus).real(), WithinAbs(1.0, 1e-14));

  CHECK(to_string(EnergyTag::Gap) == "gap");
}

TEST_CASE("multiplier product", "[floquet][property]") {
  const auto v = Potential::lame(2, kHalf);
  for (int i = 0; i < 40; ++i) {
    const double e = -1.0 + 7.0 * i / 39.0;
    const auto c = classify(v, e);
    CHECK(std::abs(c.beta_plus * c.beta_minus - 1.0) < 1e-9);
  }
}

TEST_CASE("symplectic propagation", "[floquet][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> es(-1.0, 12.0);
  for (int n = 1; n <= 3; ++n) {
    const auto v = Potential::lame(n, kHalf);
    const double t = v.period();
    for (int i = 0; i < 10; ++i) {
      const double e = es(rng);
      const auto full = transfer_matrix(v, e, 0.0, t);
      const auto first = transfer_matrix(v, e, 0.0, t / 2);
      const auto second = transfer_matrix(v, e, t / 2, t);
      const auto composed = second * first;
      const double scale = std::max(1.0, std::abs(full.a()) + std::abs(full.b()) +
                                             std::abs(full.c()) + std::abs(full.d()));
      CHECK(std::abs(full.determinant() - 1.0) < 1e-9);
      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(composed.entries[k] - full.entries[k]) < 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("deep-gap determinant defect is at round-off", "[floquet][property]") {
  // Entries grow like beta; the defect of a*d - b*c cannot beat |a d| times the unit round-off.
  const auto v = Potential::lame(3, kHalf);
  for (double e : {-1.8, -3.0, -5.0}) {
    const auto b = transfer_matrix(v, e, 0.0, v.period());
    const double scale = std::abs(b.a() * b.d()) + std::abs(b.b() * b.c());
    CHECK(std::abs(b.determinant() - 1.0) < 1e-14 * scale);
  }
}

TEST_CASE("recorded trace matches endpoint matrix", "[floquet]") {
  const auto v = Potential::lame(2, kHalf);
  const auto p = propagate(v, 0.7, 0.0, v.period(), 256);
  REQUIRE(p.trace);
  CHECK(p.trace->psi_a.size() == 257);
  CHECK_THAT(p.trace->psi_a.back(), WithinAbs(p.matrix.a(), 1e-12));
  CHECK_THAT(p.trace->psi_b.back(), WithinAbs(p.matrix.b(), 1e-12));
  const auto mid = transfer_matrix(v, 0.7, 0.0, v.period() / 2);
  CHECK_THAT(p.trace->dpsi_a[128], WithinAbs(mid.c(), 1e-9));
}

TEST_CASE("Lame n=1 band edges", "[floquet]") {
  const auto bs = band_edges(Potential::lame(1, kHalf), 0.0, 3.0);
  REQUIRE(bs.edges.size() == 3);
  CHECK_THAT(bs.edges[0].energy, WithinAbs(0.5, 1e-6));
  CHECK_THAT(bs.edges[1].energy, WithinAbs(1.0, 1e-6));
  CHECK_THAT(bs.edges[2].energy, WithinAbs(1.5, 1e-6));
  CHECK(bs.edges[0].parity == EdgeParity::Periodic);
  CHECK(bs.edges[1].parity == EdgeParity::Antiperiodic);
  CHECK(bs.edges[2].parity == EdgeParity::Antiperiodic);
  REQUIRE(bs.gaps.size() == 2);
  CHECK(std::isinf(bs.gaps[0].lo));
  CHECK(bs.gap_index(1.2) == 1u);
  CHECK_FALSE(bs.gap_index(0.7).has_value());
}

TEST_CASE("Lame n=2 band edges against closed forms", "[floquet]") {
  const double m = 0.5;
  const double r = std::sqrt(1.0 - m + m * m);
  const std::vector<double> expected{2 + 2 * m - 2 * r, 1 + m, 1 + 4 * m, 4 + m, 2 + 2 * m + 2 * r};
  const auto bs = band_edges(Potential::lame(2, kHalf), 0.0, 8.0);
  REQUIRE(bs.edges.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK_THAT(bs.edges[i].energy, WithinAbs(expected[i], 1e-6));
}

TEST_CASE("Lame edge counts", "[floquet][property]") {
  for (int n = 1; n <= 3; ++n) {
    const auto bs = band_edges(Potential::lame(n, kHalf), -1.0, n * (n + 1) + 1.0);
    CHECK(bs.edges.size() == static_cast<std::size_t>(2 * n + 1));
    CHECK(bs.touching.empty());
    for (std::size_t i = 1; i < bs.edges.size(); ++i) {
      CHECK(bs.edges[i].energy > bs.edges[i - 1].energy);
    }
    // Periodic, then antiperiodic pairs and periodic pairs alternate.
    for (std::size_t i = 0; i < bs.edges.size(); ++i) {
      const bool periodic = ((i + 1) / 2) % 2 == 0;
      CHECK((bs.edges[i].parity == EdgeParity::Periodic) == periodic);
    }
  }
}

TEST_CASE("free particle has touching bands only", "[floquet]") {
  const double t = 2.0;
  const auto bs = band_edges(Potential::constant(0.0, t), -1.0, 25.0);
  REQUIRE(bs.edges.size() == 1);
  CHECK_THAT(bs.edges[0].energy, WithinAbs(0.0, 1e-8));
  REQUIRE(bs.touching.size() == 3);
  for (std::size_t k = 1; k <= 3; ++k) {
    const double e = std::pow(k * std::acos(-1.0) / t, 2);
    CHECK_THAT(bs.touching[k - 1].energy, WithinAbs(e, 1e-6));
  }
  CHECK(bs.gaps.size() == 1);
}

TEST_CASE("discriminant is decreasing through the first edge", "[floquet][property]") {
  const auto v = Potential::lame(2, kHalf);
  const auto bs = band_edges(v, 0.0, 8.0);
  const double e0 = bs.edges[0].energy;
  CHECK(discriminant(v, e0 - 1e-3) > 2.0);
  CHECK(discriminant(v, e0 + 1e-3) < 2.0);
  CHECK(discriminant(v, e0 - 1e-3) > discriminant(v, e0 + 1e-3));
}

TEST_CASE("sweep tags", "[floquet]") {
  const auto sweep = discriminant_sweep(Potential::lame(1, kHalf), 0.0, 2.0, 5);
  REQUIRE(sweep.size() == 5);
  CHECK(sweep[0].tag == EnergyTag::Gap);
  CHECK(sweep[1].tag == EnergyTag::BandEdgePeriodic);
  CHECK(sweep[2].tag == EnergyTag::BandEdgeAntiperiodic);
  CHECK(sweep[3].tag == EnergyTag::BandEdgeAntiperiodic);
  CHECK(sweep[4].tag == EnergyTag::AllowedBand);
}
