#pragma once

#include <span>
#include <vector>

#include "msnar/trajectory.hpp"

namespace msnar {

enum class KernelFamily { kGaussian, kEpanechnikov };

struct KernelConfig {
  KernelFamily family = KernelFamily::kGaussian;
  double bandwidth = 1.0;
  std::vector<double> grid;

  void validate() const;
};

// Gaussian: (2pi)^{-1/2} exp(-u^2/2); Epanechnikov: 0.75(1-u^2) on |u|<=1.
double kernel_eval(KernelFamily family, double u);

// (log n / n)^{1/5}; shrinks with n while n*h grows, as the consistency
// theorems require.
double default_bandwidth(int n);

// 201 equispaced points spanning [min y - h, max y + h], optionally widened
// to cover an evaluation interval.
std::vector<double> make_default_grid(const std::vector<double>& y, double h, int points = 201);
std::vector<double> make_default_grid(const std::vector<double>& y, double h, int points,
                                      double cover_lo, double cover_hi);

struct KernelSums {
  double s0 = 0.0;  // (1/nh) sum_k w_k K_h(y - Y_k)
  double s1 = 0.0;  // (1/nh) sum_k w_k Y_{k+1} K_h(y - Y_k)
};

// The single shared kernel-sum primitive: regime indicators and smoothed
// posterior probabilities are both just particular weight vectors.
// Accumulation is compensated; |w| must equal the step count.
KernelSums weighted_sums(double y, const Trajectory& traj, std::span<const double> weights,
                         const KernelConfig& config);

// Kernel weights K((y - Y_k)/h) for k = 0..n-1, shared by the estimators so
// repeated passes over one trajectory reuse identical values.
std::vector<double> kernel_row(double y, const Trajectory& traj, const KernelConfig& config);

}  // namespace msnar
