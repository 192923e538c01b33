#include "msnar/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "msnar/common.hpp"

namespace msnar {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}

void KernelConfig::validate() const {
  if (!(bandwidth > 0.0)) throw ConfigError("kernel bandwidth must be positive");
  if (grid.empty()) throw ConfigError("evaluation grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("evaluation grid must be strictly increasing");
}

double kernel_eval(KernelFamily family, double u) {
  switch (family) {
    case KernelFamily::kGaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelFamily::kEpanechnikov:
      return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  throw ConfigError("unknown kernel family");
}

double default_bandwidth(int n) {
  if (n < 2) throw ConfigError("default_bandwidth requires n >= 2");
  return std::pow(std::log(static_cast<double>(n)) / n, 0.2);
}

std::vector<double> make_default_grid(const std::vector<double>& y, double h, int points) {
  if (y.empty()) throw ConfigError("cannot build a grid from an empty sample");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return make_default_grid(y, h, points, *lo, *hi);
}

std::vector<double> make_default_grid(const std::vector<double>& y, double h, int points,
                                      double cover_lo, double cover_hi) {
  if (points < 2) throw ConfigError("grid needs at least two points");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double a = std::min(*lo - h, cover_lo);
  const double b = std::max(*hi + h, cover_hi);
  std::vector<double> grid(points);
  for (int g = 0; g < points; ++g) grid[g] = a + (b - a) * g / (points - 1);
  return grid;
}

std::vector<double> kernel_row(double y, const Trajectory& traj, const KernelConfig& config) {
  const int n = traj.steps();
  std::vector<double> row(n);
  const double h = config.bandwidth;
  for (int k = 0; k < n; ++k) row[k] = kernel_eval(config.family, (y - traj.y[k]) / h);
  return row;
}

KernelSums weighted_sums(double y, const Trajectory& traj, std::span<const double> weights,
                         const KernelConfig& config) {
  const int n = traj.steps();
  if (static_cast<int>(weights.size()) != n)
    throw ConfigError("weighted_sums needs one weight per step");
  const double h = config.bandwidth;
  KahanAccumulator s0, s1;
  for (int k = 0; k < n; ++k) {
    const double kv = kernel_eval(config.family, (y - traj.y[k]) / h);
    const double wk = weights[k] * kv;
    s0.add(wk);
    s1.add(wk * traj.y[k + 1]);
  }
  const double scale = 1.0 / (static_cast<double>(n) * h);
  return {s0.value() * scale, s1.value() * scale};
}

}  // namespace msnar
