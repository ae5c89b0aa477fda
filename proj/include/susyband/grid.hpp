#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace susyband {

// Uniform sample grid x_i = x_lo + i * dx, i = 0 .. count-1.
struct Grid {
  double x_lo = 0.0;
  double dx = 1.0;
  std::size_t count = 0;

  double x(std::size_t i) const noexcept { return x_lo + static_cast<double>(i) * dx; }
  double x_hi() const noexcept { return x(count == 0 ? 0 : count - 1); }
  std::vector<double> points() const;

  // Same grid keeping every stride-th node.
  Grid subsampled(std::size_t stride) const;
};

bool same_grid(const Grid& a, const Grid& b, double tol = 1e-12);

// Cubic Hermite interpolation on a uniform grid from values and slopes. Arguments outside the
// grid are clamped to the end segments.
struct HermiteValue {
  double value;
  double slope;
};
HermiteValue hermite_eval(const Grid& grid, std::span<const double> values,
                          std::span<const double> slopes, double x);

// Sixth-order central finite differences. Entries within three nodes of either end are set to
// zero; callers restrict their checks to the interior.
std::vector<double> central_first_derivative(std::span<const double> f, double dx);
std::vector<double> central_second_derivative(std::span<const double> f, double dx);
constexpr std::size_t kStencilHalfWidth = 3;

// Fourth-order slopes of sampled data, one-sided at the ends (or wrapped when periodic, in which
// case the last sample duplicates the first).
std::vector<double> estimate_slopes(std::span<const double> f, double dx, bool periodic);

// Trapezoidal integral of f^2 over the grid.
double l2_norm_squared(std::span<const double> f, double dx);

std::vector<double> subsample(std::span<const double> f, std::size_t stride);

// max |f| over consecutive blocks of `block` samples, broadcast to each sample. A short trailing
// block (such as the closing sample of a window) joins the block before it.
std::vector<double> block_max_abs(std::span<const double> f, std::size_t block);

}  // namespace susyband
