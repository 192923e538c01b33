#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msnar/rng.hpp"
#include "msnar/theta_field.hpp"
#include "msnar/trajectory.hpp"
#include "msnar/transition_matrix.hpp"

namespace msnar {

// Working estimate driving restoration: tabulated regression estimates, the
// estimated transition matrix, per-regime noise scales and the initial law.
struct PsiState {
  ThetaField theta;
  TransitionMatrix a_hat;
  std::vector<double> sigma;
  std::vector<double> init_hat;

  void validate() const;
};

// Filtered/smoothed regime probabilities for one trajectory under one psi.
// Row k (0-based) refers to the regime driving the transition y_k -> y_{k+1}.
struct FilterPosterior {
  std::vector<std::vector<double>> filtered;
  std::vector<std::vector<double>> smoothed;  // empty unless smoothing was run
  double loglik = 0.0;
};

// Gaussian emission densities with a pluggable conditional-mean hook; the
// tabulated-theta and linear-AR estimators share the recursions through it.
struct EmissionModel {
  std::function<double(int regime, double y_prev)> mean;
  std::vector<double> sigma;
};

EmissionModel emission_model(const PsiState& psi);

// log N(y; r_i(y_prev), sigma_i^2) where r_i reads the theta row through the
// bridged piecewise-linear interpolation.
double emission_logdensity(const PsiState& psi, int regime, double y_prev, double y);

// Normalized forward recursion with per-step log-normalizer accumulation.
FilterPosterior forward_filter(const PsiState& psi, const Trajectory& traj);
FilterPosterior forward_filter(const EmissionModel& emission, const TransitionMatrix& a,
                               const std::vector<double>& init, const Trajectory& traj);

// Adds the backward pass: smoothed[k][i] = P(X_{k+1}=i | Y_{0:n}, psi).
FilterPosterior smoothed_probabilities(const PsiState& psi, const Trajectory& traj);
FilterPosterior smoothed_probabilities(const EmissionModel& emission, const TransitionMatrix& a,
                                       const std::vector<double>& init, const Trajectory& traj);

// Backward pass on an already-computed filtered recursion.
FilterPosterior attach_smoothed(FilterPosterior fp, const TransitionMatrix& a);

// Carter-Kohn draw of the hidden path given the filtered probabilities.
std::vector<int> backward_sample(const FilterPosterior& fp, const TransitionMatrix& a_hat,
                                 RandomStream& rng);
std::vector<int> backward_sample(const FilterPosterior& fp, const TransitionMatrix& a_hat,
                                 std::uint64_t seed);

// Exact path posterior by enumerating {1..m}^n; the oracle behind the
// forward-backward and sampler tests.  Path index digits are big-endian:
// the first step is the most significant base-m digit.
struct PathPosterior {
  int m = 0;
  int n = 0;
  std::vector<double> log_prob;  // normalized log posterior per path index
  std::vector<std::vector<double>> marginals;
  double log_normalizer = 0.0;

  std::vector<int> decode(std::size_t index) const;
  double path_probability(const std::vector<int>& path) const;
};

PathPosterior brute_force_posterior(const PsiState& psi, const Trajectory& traj);
PathPosterior brute_force_posterior(const EmissionModel& emission, const TransitionMatrix& a,
                                    const std::vector<double>& init, const Trajectory& traj);

struct TransitionCounts {
  std::vector<std::vector<double>> counts;          // n_ij
  std::vector<std::vector<double>> row_normalized;  // rows with no visits fall back to uniform
  std::vector<std::vector<double>> over_n;          // raw n_ij / n, kept for reporting
};

TransitionCounts transition_counts(const std::vector<int>& x, int m);

// Columns k, filtered_i..., smoothed_i...
std::string filter_posterior_to_csv(const FilterPosterior& fp);

}  // namespace msnar
