#include "msnar/simulate.hpp"

#include <cmath>

#include "msnar/common.hpp"
#include "msnar/rng.hpp"

namespace msnar {

std::vector<int> simulate_chain(const TransitionMatrix& a, const std::vector<double>& init,
                                int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("simulate_chain requires n >= 1");
  if (static_cast<int>(init.size()) != a.size())
    throw ConfigError("initial distribution length must match the regime count");
  RandomStream rng(seed);
  const int m = a.size();
  std::vector<int> x(n);
  x[0] = rng.categorical(init);
  std::vector<double> row(m);
  for (int k = 1; k < n; ++k) {
    for (int j = 0; j < m; ++j) row[j] = a(x[k - 1], j);
    x[k] = rng.categorical(row);
  }
  return x;
}

Trajectory simulate_with_streams(const ModelSpec& model, int n, InitialValue y0,
                                 std::uint64_t chain_seed, std::uint64_t noise_seed,
                                 int burn_in) {
  model.validate();
  if (n < 1) throw ConfigError("simulate requires n >= 1");
  if (burn_in < 0) throw ConfigError("burn_in must be nonnegative");

  const bool stationary = std::holds_alternative<StationaryStart>(y0);
  const int extra = stationary ? burn_in : 0;
  const int total = n + extra;

  RandomStream chain_rng(chain_seed);
  RandomStream noise_rng(noise_seed);
  const int m = model.regime_count();

  std::vector<int> x_full(total);
  {
    x_full[0] = chain_rng.categorical(model.initial_distribution);
    std::vector<double> row(m);
    for (int k = 1; k < total; ++k) {
      for (int j = 0; j < m; ++j) row[j] = model.transition(x_full[k - 1], j);
      x_full[k] = chain_rng.categorical(row);
    }
  }

  double y = stationary ? 0.0 : std::get<double>(y0);
  std::vector<double> y_full;
  y_full.reserve(total + 1);
  y_full.push_back(y);
  for (int k = 0; k < total; ++k) {
    const int regime = x_full[k];
    y = eval_regression(model.regimes[regime], y) + model.noise_std[regime] * noise_rng.normal();
    if (!std::isfinite(y))
      throw NumericError("simulation produced a non-finite value at step " + std::to_string(k + 1));
    y_full.push_back(y);
  }

  Trajectory traj;
  traj.burn_in = extra;
  traj.y.assign(y_full.begin() + extra, y_full.end());
  traj.x.assign(x_full.begin() + extra, x_full.end());
  return traj;
}

Trajectory simulate(const ModelSpec& model, int n, InitialValue y0, std::uint64_t seed,
                    int burn_in) {
  Trajectory traj =
      simulate_with_streams(model, n, y0, derive_seed(seed, 1), derive_seed(seed, 2), burn_in);
  traj.seed = seed;
  return traj;
}

double sample_autocorrelation(const std::vector<double>& series, int lag) {
  const int n = static_cast<int>(series.size());
  if (lag < 0 || lag >= n) throw ConfigError("autocorrelation lag out of range");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  if (var == 0.0) return 0.0;
  double cov = 0.0;
  for (int k = 0; k + lag < n; ++k) cov += (series[k] - mean) * (series[k + lag] - mean);
  return cov / var;
}

}  // namespace msnar
