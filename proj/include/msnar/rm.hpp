#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "msnar/hmm.hpp"
#include "msnar/kernel.hpp"
#include "msnar/saem.hpp"
#include "msnar/theta_field.hpp"
#include "msnar/trajectory.hpp"

namespace msnar {

// gamma_t = 1 for t <= warmup, (t - warmup)^{-1} afterwards: step sums
// diverge while squared sums converge.
struct StepSchedule {
  int warmup = 50;
  int total = 2000;

  double gamma(int t) const { return t <= warmup ? 1.0 : 1.0 / (t - warmup); }
  void validate() const;
};

enum class ThetaInit { kStep0, kZero };

struct RmConfig {
  int m = 2;
  KernelFamily kernel_family = KernelFamily::kGaussian;
  double bandwidth = 0.0;     // 0 -> default rule
  std::vector<double> grid;   // empty -> default grid from the data
  int grid_points = 201;
  StepSchedule schedule;
  SaemConfig saem;
  // Hold the restoration distribution at psi^0 for the whole run; tests the
  // fixed-contrast convergence statement directly.
  bool frozen_psi = false;
  ThetaInit theta_init = ThetaInit::kStep0;
  // Re-estimate sigma from smoothed residuals each iteration; off by default,
  // psi carries only (theta, A).
  bool reestimate_sigma = false;
  bool record_history = false;
  std::uint64_t seed = 1;
};

struct RmIterationStats {
  // Median over (regime, grid point) pairs with smoothed denominator > 1e-6
  // of |d u / d theta_i| at the averaged iterate, under psi^{t-1}.
  double grad_u_norm = 0.0;
  double loglik = 0.0;
  std::vector<int> occupancy;
};

struct RmTrace {
  ThetaField theta_final;
  ThetaField theta_bar_final;
  // Smoothed-weight fixed point under the frozen psi'; empty in adaptive runs.
  ThetaField theta_star;
  TransitionMatrix a_final;
  LinearMsArParams saem_params;
  int saem_reseed_events = 0;
  PsiState psi0;
  std::vector<RmIterationStats> iterations;
  std::vector<ThetaField> theta_history;      // record_history only
  std::vector<ThetaField> theta_bar_history;  // record_history only
};

// Local weighted least-squares potential at y, normalized by 1/(nh) so the
// complete-data and smoothed contrasts share one scale.
double potential(double y, const Trajectory& traj, const std::vector<int>& x,
                 std::span<const double> theta_at_y, const KernelConfig& config);

// d/d theta_i = -2 (g_hat_i - theta_i f_hat_i) with indicator-weighted sums
// over the restored path; the exact derivative of the normalized potential.
std::vector<double> gradient(double y, const Trajectory& traj, const std::vector<int>& x,
                             std::span<const double> theta_at_y, const KernelConfig& config);

// theta - gamma * grad at every (regime, grid point); throws NumericError
// locating the first non-finite result.
ThetaField rm_step(const ThetaField& theta, const ThetaField& grad_field, double gamma);

// Running-mean recursion bar + (theta_t - bar)/t.
ThetaField polyak_update(const ThetaField& theta_bar, const ThetaField& theta_t, int t);

// Gradient of the smoothed contrast u: same shape with weights
// P(X_{k+1}=i | Y_{0:n}, psi').
std::vector<double> grad_u(double y, const Trajectory& traj, std::span<const double> theta_at_y,
                           const PsiState& psi_prime, const KernelConfig& config);

// Smoothed-weight kernel ratio: the stationary point of u at y.
std::vector<double> fixed_point_oracle(double y, const Trajectory& traj,
                                       const PsiState& psi_prime, const KernelConfig& config);

// Whole-grid variants sharing one smoothing pass.
ThetaField grad_u_field(const Trajectory& traj, const ThetaField& theta, const PsiState& psi_prime,
                        const KernelConfig& config);
ThetaField fixed_point_field(const Trajectory& traj, const PsiState& psi_prime,
                             const KernelConfig& config);

// Conditional second-moment bound on the gradient noise at y:
// sum_i (1/(nh))^2 (sum_k |Y_{k+1}-theta_i| K_h(y-Y_k))^2.
double martingale_noise_bound(double y, const Trajectory& traj,
                              std::span<const double> theta_at_y, const KernelConfig& config);

// Full restoration-estimation run: SAEM step 0, then T rounds of Carter-Kohn
// restoration, grid-wise Robbins-Monro updates, transition re-estimation and
// Polyak averaging.  Sigma stays at the step-0 estimate unless
// reestimate_sigma is set.
RmTrace run_restoration_estimation(const Trajectory& traj, const RmConfig& config);

// Iteration scalars as CSV: t, grad_u_norm, loglik, occupancy per regime.
std::string rm_iterations_to_csv(const RmTrace& trace);

}  // namespace msnar
