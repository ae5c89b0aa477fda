#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "susyband/analysis.hpp"
#include "susyband/error.hpp"
#include "susyband/scenario.hpp"

using namespace susyband;
using Catch::Matchers::WithinAbs;

namespace {
const EllipticParameter kHalf(0.5);
}

TEST_CASE("band structure comparison", "[analysis]") {
  const auto v = Potential::lame(1, kHalf);
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(2.5 * i / 49.0);
  CHECK(compare_band_structure(v, Potential::shifted(v, 0.77), grid) < 1e-9);

  const auto r = susy1(bloch_seed(v, 0.5).growing);
  CHECK(compare_band_structure(v, r.partner, grid) < 1e-5);

  CHECK(compare_band_structure(Potential::lame(2, kHalf), v, grid) > 0.1);
  CHECK_THROWS_AS(compare_band_structure(v, Potential::constant(0.0, 1.0), grid), DomainError);
}

TEST_CASE("comparison grid spans the first two bands", "[analysis]") {
  const auto bs = band_edges(Potential::lame(2, kHalf), 0.0, 8.0);
  const auto g = band_comparison_grid(bs);
  REQUIRE(g.size() == 50);
  CHECK(g.front() < bs.edges[0].energy);
  CHECK_THAT(g.back(), WithinAbs(bs.edges[3].energy, 1e-12));
}

TEST_CASE("displacement fit", "[analysis]") {
  const auto v = Potential::lame(1, kHalf);
  const auto fit = displacement_fit(v, Potential::shifted(v, 0.3));
  CHECK_THAT(fit.delta, WithinAbs(0.3, 1e-8));
  CHECK(fit.residual < 1e-10);

  const auto r = susy1(bloch_seed(v, 0.5).growing);
  const auto half = displacement_fit(v, r.partner);
  CHECK_THAT(half.delta, WithinAbs(complete_k(kHalf), 1e-5));
  CHECK(half.residual < 1e-5);

  const auto v2 = Potential::lame(2, kHalf);
  const auto r2 = susy1(bloch_seed(v2, band_edges(v2, 0.0, 8.0).edges[0].energy).growing);
  CHECK(displacement_fit(v2, r2.partner).residual > 0.1);
}

TEST_CASE("displacement fit recovers random shifts", "[analysis][property]") {
  const auto v = Potential::lame(2, kHalf);
  const double t = v.period();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-2.0 * t, 2.0 * t);
  for (int i = 0; i < 20; ++i) {
    const double delta = d(rng);
    const auto fit = displacement_fit(v, Potential::shifted(v, delta));
    double diff = std::fmod(fit.delta - delta, t);
    if (diff < -t / 2) diff += t;
    if (diff > t / 2) diff -= t;
    CHECK(std::abs(diff) < 1e-8);
  }
}

TEST_CASE("Darboux invariance", "[analysis]") {
  const auto v1 = Potential::lame(1, kHalf);
  const auto a = invariance_test(v1, -1.0);
  CHECK(a.invariant);
  CHECK(a.residual_product < 1e-5);

  const auto b = invariance_test(Potential::lame(2, kHalf), 0.4);
  CHECK_FALSE(b.invariant);
  CHECK(b.residual_displacement > 1e-2);

  const auto c = invariance_test(v1, 0.5);
  CHECK(c.invariant);
  CHECK_THAT(c.delta, WithinAbs(v1.period() / 2, 1e-5));

  CHECK_THROWS_AS(invariance_test(v1, 0.75), DomainError);
}

TEST_CASE("Lame n=1 is Darboux invariant across parameters", "[analysis][property]") {
  for (double m : {0.3, 0.5, 0.7}) {
    const auto v = Potential::lame(1, EllipticParameter(m));
    for (double drop : {0.05, 0.3, 1.0, 2.0, 4.0}) {
      const auto r = invariance_test(v, m - drop);
      CHECK(r.invariant);
      CHECK(r.residual_displacement < 1e-4);
      CHECK(r.residual_product < 1e-4);
    }
  }
}

TEST_CASE("bound states in gaps", "[analysis]") {
  {
    const auto run = run_transform(builtin_scenario("fig3b"));
    REQUIRE(run.bound_states.size() == 1);
    CHECK(run.bound_states[0].epsilon == 0.4);
    CHECK(run.bound_states[0].gap_index == 0);
    CHECK(run.bound_states[0].decay_consistent);
  }
  {
    const auto run = run_transform(builtin_scenario("fig3d"));
    REQUIRE(run.bound_states.size() == 2);
    const auto& gap = run.bands.gaps[run.bound_states[0].gap_index];
    CHECK(run.bound_states[0].gap_index == run.bound_states[1].gap_index);
    CHECK(gap.lo == Catch::Approx(run.bands.edges[1].energy));
    CHECK(gap.hi == Catch::Approx(run.bands.edges[2].energy));
  }
  {
    const auto run = run_transform(builtin_scenario("fig2c"));
    CHECK(run.bound_states.empty());
  }
}

TEST_CASE("shooting cross-check", "[analysis]") {
  const auto run = run_transform(builtin_scenario("fig3a"));
  REQUIRE(run.shooting.size() == 1);
  REQUIRE(run.shooting[0].has_value());
  CHECK_THAT(*run.shooting[0], WithinAbs(0.0, 1e-3));
  // No eigenvalue of the partner near an energy without a bound state.
  CHECK_FALSE(shooting_eigenvalue(run.result.partner, -0.3, 0.02).has_value());
  CHECK_THROWS_AS(shooting_eigenvalue(Potential::lame(1, kHalf), 0.0), DomainError);
}
