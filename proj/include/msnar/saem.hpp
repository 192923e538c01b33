#pragma once

#include <cstdint>
#include <vector>

#include "msnar/hmm.hpp"
#include "msnar/kernel.hpp"
#include "msnar/theta_field.hpp"
#include "msnar/trajectory.hpp"

namespace msnar {

// Linear Gaussian MS-AR fit y_k = rho_i y_{k-1} + b_i + sigma_i e_k used to
// bootstrap the nonparametric run.
struct LinearMsArParams {
  std::vector<double> slope;
  std::vector<double> intercept;
  std::vector<double> sigma;
  TransitionMatrix a_hat;
  std::vector<double> init_hat;
};

struct SaemConfig {
  int m = 2;
  int iterations = 100;
  // gamma_t = 1 for t <= warmup, then 1/(t - warmup).
  int warmup = 20;
  std::uint64_t seed = 1;
  // Independent runs from different initial assignments; the one whose final
  // parameters maximize the data likelihood wins.  Label-collapse local
  // optima are common on strongly overlapping regimes.
  int restarts = 5;
  // Optional explicit starting assignment; disables the restart search.
  // Restart 0 otherwise uses a k-means split of the (y_{k-1}, y_k) pairs,
  // later restarts use random persistent segmentations.
  std::vector<int> initial_path;

  void validate() const;
  double gamma(int t) const { return t <= warmup ? 1.0 : 1.0 / (t - warmup); }
};

// Per-regime sufficient statistics of the complete-data linear model plus
// transition counts; the stochastic approximation smooths these, the M-step
// is exact given them.
struct SaemStats {
  std::vector<double> count, sum_prev, sum_next, sum_prev_sq, sum_cross, sum_next_sq;
  std::vector<std::vector<double>> transitions;

  static SaemStats zeros(int m);
  void blend(const SaemStats& target, double gamma);
};

SaemStats path_statistics(const Trajectory& traj, const std::vector<int>& x, int m);

// Residual sum of squares for regime i under the collected statistics; the
// M-step minimizes this in (slope, intercept).
double regime_quadratic(const SaemStats& s, int i, double slope, double intercept);

struct SaemResult {
  LinearMsArParams params;
  std::vector<int> restored_path;
  std::vector<double> loglik_trace;
  int reseed_events = 0;
  // Data log-likelihood under the final parameters; the restart selector.
  double final_loglik = 0.0;
  int chosen_restart = 0;
};

// Deterministic k-means split of the lag pairs, used as the default initial
// assignment.
std::vector<int> kmeans_pair_split(const std::vector<double>& y, int m);

EmissionModel emission_model(const LinearMsArParams& params);

// Step-0 estimator: alternates Carter-Kohn restoration with smoothed
// sufficient statistics and closed-form M-steps.  Regimes that lose support
// are re-seeded by random reassignment (counted in the result).
SaemResult saem_linear_msar(const Trajectory& traj, const SaemConfig& config);

// Complete-data kernel estimate evaluated on the restored path.  m = 0 infers
// the regime count from the labels.
ThetaField init_theta_field(const Trajectory& traj, const std::vector<int>& x0,
                            const KernelConfig& config, int m = 0);

}  // namespace msnar
