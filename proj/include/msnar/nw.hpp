#pragma once

#include <vector>

#include "msnar/kernel.hpp"
#include "msnar/model.hpp"
#include "msnar/theta_field.hpp"
#include "msnar/trajectory.hpp"

namespace msnar {

struct NwComponents {
  double g_hat = 0.0;
  double f_hat = 0.0;
};

// Numerator/denominator of the per-regime kernel regression at one point,
// computed through weighted_sums with the indicator weights 1{x_{k+1} = i}.
// Requires an observed regime path.
NwComponents nw_components(double y, const Trajectory& traj, int regime,
                           const KernelConfig& config);

// Complete-data estimator on the whole grid: ratio where the denominator is
// above the zero floor, 0 otherwise.  m = 0 infers the regime count from the
// observed labels.
ThetaField nw_estimate(const Trajectory& traj, const KernelConfig& config, int m = 0);

struct SupErrorReport {
  std::vector<double> sup;               // per regime; 0 when every point was skipped
  std::vector<double> skipped_fraction;  // zero-denominator share of the region
};

// Max |theta_i - r_i| over grid points inside [lo, hi], skipping points at
// the zero floor.
SupErrorReport sup_error(const ThetaField& field, const ModelSpec& truth, double lo, double hi);

// Regime permutation minimizing the summed sup errors against the truth;
// hidden-regime estimates are identified only up to label swapping.
std::vector<int> best_alignment(const ThetaField& field, const ModelSpec& truth, double lo,
                                double hi);

}  // namespace msnar
