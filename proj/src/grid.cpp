#include "susyband/grid.hpp"

#include <algorithm>
#include <cmath>

namespace susyband {

std::vector<double> Grid::points() const {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = x(i);
  return xs;
}

Grid Grid::subsampled(std::size_t stride) const {
  return {x_lo, dx * static_cast<double>(stride), count == 0 ? 0 : (count - 1) / stride + 1};
}

bool same_grid(const Grid& a, const Grid& b, double tol) {
  const double scale = std::max(1.0, std::abs(a.x_lo));
  return a.count == b.count && std::abs(a.x_lo - b.x_lo) <= tol * scale &&
         std::abs(a.dx - b.dx) <= tol * std::abs(a.dx);
}

HermiteValue hermite_eval(const Grid& grid, std::span<const double> values,
                          std::span<const double> slopes, double x) {
  const double s = (x - grid.x_lo) / grid.dx;
  const auto last = static_cast<double>(grid.count - 2);
  const double cell = std::clamp(std::floor(s), 0.0, last);
  const auto i = static_cast<std::size_t>(cell);
  const double t = s - cell;
  const double h = grid.dx;

  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double value = h00 * values[i] + h10 * h * slopes[i] + h01 * values[i + 1] +
                       h11 * h * slopes[i + 1];

  const double d00 = 6 * t2 - 6 * t;
  const double d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t;
  const double d11 = 3 * t2 - 2 * t;
  const double slope = (d00 * values[i] + d01 * values[i + 1]) / h + d10 * slopes[i] +
                       d11 * slopes[i + 1];
  return {value, slope};
}

std::vector<double> central_first_derivative(std::span<const double> f, double dx) {
  std::vector<double> out(f.size(), 0.0);
  if (f.size() < 2 * kStencilHalfWidth + 1) return out;
  for (std::size_t i = kStencilHalfWidth; i + kStencilHalfWidth < f.size(); ++i) {
    out[i] = (-f[i - 3] + 9 * f[i - 2] - 45 * f[i - 1] + 45 * f[i + 1] - 9 * f[i + 2] +
              f[i + 3]) /
             (60 * dx);
  }
  return out;
}

std::vector<double> central_second_derivative(std::span<const double> f, double dx) {
  std::vector<double> out(f.size(), 0.0);
  if (f.size() < 2 * kStencilHalfWidth + 1) return out;
  for (std::size_t i = kStencilHalfWidth; i + kStencilHalfWidth < f.size(); ++i) {
    out[i] = (2 * f[i - 3] - 27 * f[i - 2] + 270 * f[i - 1] - 490 * f[i] + 270 * f[i + 1] -
              27 * f[i + 2] + 2 * f[i + 3]) /
             (180 * dx * dx);
  }
  return out;
}

std::vector<double> estimate_slopes(std::span<const double> f, double dx, bool periodic) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 0; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i]) / dx;
    if (n > 1) out[n - 1] = out[n - 2];
    return out;
  }
  if (periodic) {
    // Samples 0 .. n-1 with f[n-1] == f[0]; wrap over the n-1 distinct nodes.
    const std::size_t p = n - 1;
    auto at = [&](std::ptrdiff_t k) {
      const auto pp = static_cast<std::ptrdiff_t>(p);
      return f[static_cast<std::size_t>(((k % pp) + pp) % pp)];
    };
    for (std::size_t i = 0; i < p; ++i) {
      const auto k = static_cast<std::ptrdiff_t>(i);
      out[i] = (at(k - 2) - 8 * at(k - 1) + 8 * at(k + 1) - at(k + 2)) / (12 * dx);
    }
    out[p] = out[0];
    return out;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) {
    out[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * dx);
  }
  out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dx);
  out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dx);
  out[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) /
               (12 * dx);
  out[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) /
               (12 * dx);
  return out;
}

double l2_norm_squared(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() * f.front() + f.back() * f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i] * f[i];
  return sum * dx;
}

std::vector<double> subsample(std::span<const double> f, std::size_t stride) {
  std::vector<double> out;
  out.reserve(f.size() / stride + 1);
  for (std::size_t i = 0; i < f.size(); i += stride) out.push_back(f[i]);
  return out;
}

std::vector<double> block_max_abs(std::span<const double> f, std::size_t block) {
  std::vector<double> amp(f.size(), 0.0);
  if (block == 0 || block > f.size()) block = f.size();
  for (std::size_t start = 0; start < f.size(); start += block) {
    std::size_t stop = std::min(f.size(), start + block);
    if (f.size() - stop < block) stop = f.size();
    double m = 0.0;
    for (std::size_t i = start; i < stop; ++i) m = std::max(m, std::abs(f[i]));
    for (std::size_t i = start; i < stop; ++i) amp[i] = m;
    if (stop == f.size()) break;
  }
  return amp;
}

}  // namespace susyband
