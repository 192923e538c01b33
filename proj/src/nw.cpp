#include "msnar/nw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msnar/common.hpp"

namespace msnar {

NwComponents nw_components(double y, const Trajectory& traj, int regime,
                           const KernelConfig& config) {
  if (!traj.x_observed())
    throw ConfigError("complete-data estimator requires observed regimes");
  const int n = traj.steps();
  std::vector<double> weights(n, 0.0);
  for (int k = 0; k < n; ++k)
    if (traj.x[k] == regime) weights[k] = 1.0;
  const KernelSums sums = weighted_sums(y, traj, weights, config);
  return {sums.s1, sums.s0};
}

ThetaField nw_estimate(const Trajectory& traj, const KernelConfig& config, int m) {
  if (!traj.x_observed())
    throw ConfigError("complete-data estimator requires observed regimes");
  config.validate();
  if (m <= 0) m = 1 + *std::max_element(traj.x.begin(), traj.x.end());
  ThetaField field = ThetaField::zeros(config.grid, m);
  for (int i = 0; i < m; ++i) {
    for (int g = 0; g < field.points(); ++g) {
      const NwComponents c = nw_components(field.grid[g], traj, i, config);
      field.f_hat[i][g] = c.f_hat;
      field.theta[i][g] = c.f_hat > kDenominatorFloor ? c.g_hat / c.f_hat : 0.0;
    }
  }
  return field;
}

SupErrorReport sup_error(const ThetaField& field, const ModelSpec& truth, double lo, double hi) {
  if (lo > hi) throw ConfigError("sup_error region is empty");
  if (lo < field.grid.front() || hi > field.grid.back())
    throw ConfigError("sup_error region extends outside the grid span");
  if (field.regimes() != truth.regime_count())
    throw ConfigError("field and truth disagree on the regime count");

  SupErrorReport report;
  report.sup.assign(field.regimes(), 0.0);
  report.skipped_fraction.assign(field.regimes(), 0.0);
  for (int i = 0; i < field.regimes(); ++i) {
    int considered = 0;
    int skipped = 0;
    double sup = 0.0;
    for (int g = 0; g < field.points(); ++g) {
      const double y = field.grid[g];
      if (y < lo || y > hi) continue;
      ++considered;
      if (field.f_hat[i][g] <= kDenominatorFloor) {
        ++skipped;
        continue;
      }
      sup = std::max(sup, std::fabs(field.theta[i][g] - eval_regression(truth.regimes[i], y)));
    }
    if (considered == 0) throw ConfigError("sup_error region contains no grid points");
    report.sup[i] = sup;
    report.skipped_fraction[i] = static_cast<double>(skipped) / considered;
  }
  return report;
}

std::vector<int> best_alignment(const ThetaField& field, const ModelSpec& truth, double lo,
                                double hi) {
  const int m = field.regimes();
  std::vector<int> perm(m), best(m);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    const SupErrorReport rep = sup_error(field.permuted_rows(perm), truth, lo, hi);
    const double total = std::accumulate(rep.sup.begin(), rep.sup.end(), 0.0);
    if (total < best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace msnar
