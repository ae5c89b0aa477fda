#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "susyband/elliptic.hpp"
#include "susyband/error.hpp"
#include "susyband/potential.hpp"

using namespace susyband;
using Catch::Matchers::WithinAbs;

namespace {
const EllipticParameter kHalf(0.5);
}

TEST_CASE("Lame construction and values", "[potential]") {
  const auto v = Potential::lame(1, kHalf);
  const double k = complete_k(kHalf);
  CHECK_THAT(v.period(), WithinAbs(2.0 * k, 1e-15));
  CHECK(v.is_periodic());
  CHECK_THAT(v(0.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(v(k), WithinAbs(1.0, 1e-14));

  const auto v3 = Potential::lame(3, kHalf);
  double mx = 0.0;
  for (int i = 0; i <= 4000; ++i) mx = std::max(mx, v3(v3.period() * i / 4000.0));
  CHECK_THAT(mx, WithinAbs(6.0, 1e-12));

  CHECK_THROWS_AS(Potential::lame(0, kHalf), DomainError);
  CHECK_THROWS_AS(Potential::lame(1, EllipticParameter(0.0)), DomainError);
  CHECK_THROWS_AS(Potential::lame(1, EllipticParameter(1.0)), DomainError);
}

TEST_CASE("Lame derivative", "[potential]") {
  const auto v = Potential::lame(2, kHalf);
  const double h = 1e-5;
  for (double x : {-2.0, 0.1, 0.9, 3.3}) {
    CHECK_THAT(v.derivative(x), WithinAbs((v(x + h) - v(x - h)) / (2 * h), 1e-7));
  }
}

TEST_CASE("constant potential", "[potential]") {
  const auto c = Potential::constant(0.25, 2.0);
  CHECK(c(13.0) == 0.25);
  CHECK(c.derivative(1.0) == 0.0);
  CHECK(c.period() == 2.0);
  CHECK_THROWS_AS(Potential::constant(0.0, 0.0), DomainError);
}

TEST_CASE("shifted potential", "[potential]") {
  const auto v = Potential::lame(1, kHalf);
  const auto s = Potential::shifted(v, v.period() / 2.0);
  CHECK_THAT(s(0.0), WithinAbs(1.0, 1e-14));
  CHECK(s.period() == v.period());
}

TEST_CASE("shift composition", "[potential][property]") {
  const auto v = Potential::lame(2, kHalf);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double a = d(rng);
    const double b = d(rng);
    const auto nested = Potential::shifted(Potential::shifted(v, a), b);
    const auto flat = Potential::shifted(v, a + b);
    const double x = d(rng);
    CHECK(std::abs(nested(x) - flat(x)) < 1e-12);
  }
}

TEST_CASE("periodicity", "[potential][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-40.0, 40.0);
  for (int n = 1; n <= 3; ++n) {
    const auto v = Potential::lame(n, kHalf);
    for (int i = 0; i < 200; ++i) {
      const double x = d(rng);
      CHECK(std::abs(v(x + v.period()) - v(x)) < 1e-10);
    }
  }
}

TEST_CASE("tabulated round trip", "[potential]") {
  const auto v = Potential::lame(2, kHalf);
  const std::size_t n = 2048;
  const double dx = v.period() / n;
  const Grid g{0.0, dx, n + 1};
  const auto table = Potential::periodic_table(0.0, dx, v.sample(g), v.sample_derivative(g));
  CHECK(table.is_periodic());
  CHECK_THAT(table.period(), WithinAbs(v.period(), 1e-12));
  double worst = 0.0;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3.0 * v.period(), 3.0 * v.period());
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng);
    worst = std::max(worst, std::abs(table(x) - v(x)));
  }
  CHECK(worst < 1e-8);

  // Slopes estimated from the samples alone.
  const auto est = Potential::periodic_table(0.0, dx, v.sample(g));
  double worst_est = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double x = d(rng);
    worst_est = std::max(worst_est, std::abs(est(x) - v(x)));
  }
  CHECK(worst_est < 1e-8);
}

TEST_CASE("windowed table falls back to its tails", "[potential]") {
  const auto v = Potential::lame(1, kHalf);
  const double t = v.period();
  const std::size_t per = 256;
  const Grid g{-2.0 * t, t / per, 4 * per + 1};
  TabulatedPotential tab;
  tab.grid = g;
  tab.values = Potential::shifted(v, 0.3).sample(g);
  tab.period = t;
  tab.periodic = false;
  tab.tail = std::make_shared<const Potential>(v);
  tab.tail_left = std::make_shared<const Potential>(Potential::constant(7.0, t));
  const auto w = Potential::tabulated(tab);
  CHECK_FALSE(w.is_periodic());
  const double x_hi = g.x_hi();
  CHECK_THAT(w(x_hi + 10.0 * t + 0.4), WithinAbs(v(x_hi + 10.0 * t + 0.4), 1e-15));
  CHECK(w(g.x_lo - 1.0) == 7.0);
  CHECK_THAT(w(0.1), WithinAbs(v(0.4), 1e-6));

  tab.tail.reset();
  CHECK_THROWS_AS(Potential::tabulated(tab), DomainError);
}

TEST_CASE("table validation", "[potential]") {
  TabulatedPotential tab;
  tab.grid = Grid{0.0, 0.1, 11};
  tab.values = std::vector<double>(11, 1.0);
  tab.period = 1.0;
  tab.periodic = true;
  CHECK_NOTHROW(Potential::tabulated(tab));
  tab.values.pop_back();
  CHECK_THROWS_AS(Potential::tabulated(tab), DomainError);
  tab.values.push_back(1.0);
  tab.period = 1.3;
  CHECK_THROWS_AS(Potential::tabulated(tab), DomainError);
}
