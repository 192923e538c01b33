#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "msnar/regression.hpp"
#include "msnar/transition_matrix.hpp"

namespace msnar {

// Full generative description of an MS-NAR process: regime chain, per-regime
// regression functions, Gaussian innovation scales, initial law.
struct ModelSpec {
  TransitionMatrix transition;
  std::vector<RegressionFunction> regimes;
  std::vector<double> noise_std;
  std::vector<double> initial_distribution;

  int regime_count() const { return transition.size(); }
  void validate() const;
  ModelSpec relabeled(const std::vector<int>& perm) const;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
  // FNV-1a over the canonical JSON rendering; embedded in trajectory CSVs.
  std::uint64_t hash() const;
};

struct StabilityReport {
  std::vector<double> stationary_distribution;
  // sum_i mu_i log rho_i; -inf whenever a visited regime is bounded (rho=0).
  double log_condition_value = 0.0;
  double spectral_radius_qs = 0.0;
  double moment_order_s = 1.0;
  bool e4_holds = false;
  bool moment_condition_holds = false;  // rho(Q_s) < 1
  bool stable = false;

  nlohmann::json to_json() const;
};

// Verifies the stationarity/moment conditions: computes the invariant law,
// the log-envelope condition, and the spectral radius of Q_s with entries
// rho_j^s * a(i,j).
StabilityReport check_stability(const ModelSpec& model, double s = 1.0);

// Spectral radius of a small nonnegative matrix by scaled repeated squaring
// (Gelfand limit); accurate to ~1e-12 relative for these sizes.
double spectral_radius(const std::vector<std::vector<double>>& matrix);

}  // namespace msnar
