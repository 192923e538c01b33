#include "msnar/rm.hpp"

#include <cmath>
#include <sstream>

#include "msnar/common.hpp"
#include "msnar/nw.hpp"
#include "msnar/rng.hpp"

namespace msnar {

namespace {

struct BinnedSums {
  std::vector<double> s0;  // (1/nh) sum_k K 1_i
  std::vector<double> s1;  // (1/nh) sum_k K 1_i Y_{k+1}
};

// One pass over the restored path, binned by regime, compensated.
BinnedSums indicator_sums_from_row(std::span<const double> krow, const Trajectory& traj,
                                   const std::vector<int>& x, int m, double h) {
  const int n = traj.steps();
  std::vector<KahanAccumulator> acc0(m), acc1(m);
  for (int k = 0; k < n; ++k) {
    const double kv = krow[k];
    acc0[x[k]].add(kv);
    acc1[x[k]].add(kv * traj.y[k + 1]);
  }
  const double scale = 1.0 / (static_cast<double>(n) * h);
  BinnedSums sums;
  sums.s0.resize(m);
  sums.s1.resize(m);
  for (int i = 0; i < m; ++i) {
    sums.s0[i] = acc0[i].value() * scale;
    sums.s1[i] = acc1[i].value() * scale;
  }
  return sums;
}

void check_path(const Trajectory& traj, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != traj.steps())
    throw ConfigError("restored path length must match the step count");
}

// Smoothed-weight sums on the whole grid from precomputed kernel rows; adds
// terms in the same order as weighted_sums so results agree bitwise.
void smoothed_sums_fields(const std::vector<std::vector<double>>& rows, const Trajectory& traj,
                          const std::vector<std::vector<double>>& smoothed, int m, double h,
                          std::vector<std::vector<double>>& g_w,
                          std::vector<std::vector<double>>& f_w) {
  const int points = static_cast<int>(rows.size());
  const int n = traj.steps();
  const double scale = 1.0 / (static_cast<double>(n) * h);
  g_w.assign(m, std::vector<double>(points, 0.0));
  f_w.assign(m, std::vector<double>(points, 0.0));
  for (int g = 0; g < points; ++g) {
    for (int i = 0; i < m; ++i) {
      KahanAccumulator s0, s1;
      for (int k = 0; k < n; ++k) {
        const double wk = smoothed[k][i] * rows[g][k];
        s0.add(wk);
        s1.add(wk * traj.y[k + 1]);
      }
      f_w[i][g] = s0.value() * scale;
      g_w[i][g] = s1.value() * scale;
    }
  }
}

double masked_median_abs_grad(const std::vector<std::vector<double>>& g_w,
                              const std::vector<std::vector<double>>& f_w,
                              const ThetaField& theta, double floor) {
  std::vector<double> values;
  for (std::size_t i = 0; i < g_w.size(); ++i)
    for (std::size_t g = 0; g < g_w[i].size(); ++g)
      if (f_w[i][g] > floor)
        values.push_back(std::fabs(-2.0 * (g_w[i][g] - theta.theta[i][g] * f_w[i][g])));
  if (values.empty()) return 0.0;
  return median(std::move(values));
}

constexpr double kDiagnosticFloor = 1e-6;

}  // namespace

void StepSchedule::validate() const {
  if (warmup < 0) throw ConfigError("schedule warmup must be nonnegative");
  if (total < 1) throw ConfigError("schedule needs at least one iteration");
}

double potential(double y, const Trajectory& traj, const std::vector<int>& x,
                 std::span<const double> theta_at_y, const KernelConfig& config) {
  check_path(traj, x);
  const int n = traj.steps();
  const double h = config.bandwidth;
  KahanAccumulator acc;
  for (int k = 0; k < n; ++k) {
    const double kv = kernel_eval(config.family, (y - traj.y[k]) / h);
    const double resid = traj.y[k + 1] - theta_at_y[x[k]];
    acc.add(kv * resid * resid);
  }
  return acc.value() / (static_cast<double>(n) * h);
}

std::vector<double> gradient(double y, const Trajectory& traj, const std::vector<int>& x,
                             std::span<const double> theta_at_y, const KernelConfig& config) {
  check_path(traj, x);
  const int m = static_cast<int>(theta_at_y.size());
  const std::vector<double> krow = kernel_row(y, traj, config);
  const BinnedSums sums = indicator_sums_from_row(krow, traj, x, m, config.bandwidth);
  std::vector<double> grad(m);
  for (int i = 0; i < m; ++i) grad[i] = -2.0 * (sums.s1[i] - theta_at_y[i] * sums.s0[i]);
  return grad;
}

ThetaField rm_step(const ThetaField& theta, const ThetaField& grad_field, double gamma) {
  if (theta.regimes() != grad_field.regimes() || theta.points() != grad_field.points())
    throw ConfigError("rm_step shape mismatch");
  ThetaField out = theta;
  for (int i = 0; i < theta.regimes(); ++i)
    for (int g = 0; g < theta.points(); ++g) {
      out.theta[i][g] = theta.theta[i][g] - gamma * grad_field.theta[i][g];
      if (!std::isfinite(out.theta[i][g]))
        throw NumericError("non-finite update at regime " + std::to_string(i + 1) +
                           ", grid point " + std::to_string(g + 1));
    }
  return out;
}

ThetaField polyak_update(const ThetaField& theta_bar, const ThetaField& theta_t, int t) {
  if (t < 1) throw ConfigError("polyak_update requires t >= 1");
  if (theta_bar.regimes() != theta_t.regimes() || theta_bar.points() != theta_t.points())
    throw ConfigError("polyak_update shape mismatch");
  ThetaField out = theta_t;
  for (int i = 0; i < theta_t.regimes(); ++i)
    for (int g = 0; g < theta_t.points(); ++g)
      out.theta[i][g] =
          theta_bar.theta[i][g] + (theta_t.theta[i][g] - theta_bar.theta[i][g]) / t;
  return out;
}

std::vector<double> grad_u(double y, const Trajectory& traj, std::span<const double> theta_at_y,
                           const PsiState& psi_prime, const KernelConfig& config) {
  const FilterPosterior fp = smoothed_probabilities(psi_prime, traj);
  const int m = psi_prime.a_hat.size();
  const int n = traj.steps();
  std::vector<double> grad(m);
  std::vector<double> weights(n);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) weights[k] = fp.smoothed[k][i];
    const KernelSums sums = weighted_sums(y, traj, weights, config);
    grad[i] = -2.0 * (sums.s1 - theta_at_y[i] * sums.s0);
  }
  return grad;
}

std::vector<double> fixed_point_oracle(double y, const Trajectory& traj,
                                       const PsiState& psi_prime, const KernelConfig& config) {
  const FilterPosterior fp = smoothed_probabilities(psi_prime, traj);
  const int m = psi_prime.a_hat.size();
  const int n = traj.steps();
  std::vector<double> theta_star(m);
  std::vector<double> weights(n);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) weights[k] = fp.smoothed[k][i];
    const KernelSums sums = weighted_sums(y, traj, weights, config);
    theta_star[i] = sums.s0 > kDenominatorFloor ? sums.s1 / sums.s0 : 0.0;
  }
  return theta_star;
}

ThetaField grad_u_field(const Trajectory& traj, const ThetaField& theta, const PsiState& psi_prime,
                        const KernelConfig& config) {
  const FilterPosterior fp = smoothed_probabilities(psi_prime, traj);
  const int m = psi_prime.a_hat.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(config.grid.size());
  for (double y : config.grid) rows.push_back(kernel_row(y, traj, config));
  std::vector<std::vector<double>> g_w, f_w;
  smoothed_sums_fields(rows, traj, fp.smoothed, m, config.bandwidth, g_w, f_w);
  ThetaField out = ThetaField::zeros(config.grid, m);
  for (int i = 0; i < m; ++i)
    for (int g = 0; g < out.points(); ++g) {
      out.theta[i][g] = -2.0 * (g_w[i][g] - theta.theta[i][g] * f_w[i][g]);
      out.f_hat[i][g] = f_w[i][g];
    }
  return out;
}

ThetaField fixed_point_field(const Trajectory& traj, const PsiState& psi_prime,
                             const KernelConfig& config) {
  const FilterPosterior fp = smoothed_probabilities(psi_prime, traj);
  const int m = psi_prime.a_hat.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(config.grid.size());
  for (double y : config.grid) rows.push_back(kernel_row(y, traj, config));
  std::vector<std::vector<double>> g_w, f_w;
  smoothed_sums_fields(rows, traj, fp.smoothed, m, config.bandwidth, g_w, f_w);
  ThetaField out = ThetaField::zeros(config.grid, m);
  for (int i = 0; i < m; ++i)
    for (int g = 0; g < out.points(); ++g) {
      out.f_hat[i][g] = f_w[i][g];
      out.theta[i][g] = f_w[i][g] > kDenominatorFloor ? g_w[i][g] / f_w[i][g] : 0.0;
    }
  return out;
}

double martingale_noise_bound(double y, const Trajectory& traj,
                              std::span<const double> theta_at_y, const KernelConfig& config) {
  const int n = traj.steps();
  const double h = config.bandwidth;
  double bound = 0.0;
  for (std::size_t i = 0; i < theta_at_y.size(); ++i) {
    KahanAccumulator acc;
    for (int k = 0; k < n; ++k) {
      const double kv = kernel_eval(config.family, (y - traj.y[k]) / h);
      acc.add(std::fabs(traj.y[k + 1] - theta_at_y[i]) * kv);
    }
    const double scaled = acc.value() / (static_cast<double>(n) * h);
    bound += scaled * scaled;
  }
  return bound;
}

RmTrace run_restoration_estimation(const Trajectory& traj, const RmConfig& config) {
  if (config.m < 1) throw ConfigError("restoration-estimation needs at least one regime");
  config.schedule.validate();
  const Trajectory hidden = traj.without_regimes();
  const int n = hidden.steps();
  const int m = config.m;

  const double h = config.bandwidth > 0.0 ? config.bandwidth : default_bandwidth(n);
  KernelConfig kcfg;
  kcfg.family = config.kernel_family;
  kcfg.bandwidth = h;
  kcfg.grid = config.grid.empty() ? make_default_grid(hidden.y, h, config.grid_points)
                                  : config.grid;
  kcfg.validate();

  // Step 0: linear SAEM restoration.
  SaemConfig scfg = config.saem;
  scfg.m = m;
  const SaemResult saem = saem_linear_msar(hidden, scfg);
  const ThetaField theta0 = init_theta_field(hidden, saem.restored_path, kcfg, m);
  TransitionMatrix a_cur(transition_counts(saem.restored_path, m).row_normalized);
  std::vector<double> init_cur = stationary_or_uniform(a_cur);
  std::vector<double> sigma_cur = saem.params.sigma;
  const PsiState psi0{theta0, a_cur, sigma_cur, init_cur};

  std::vector<std::vector<double>> rows;
  rows.reserve(kcfg.grid.size());
  for (double y : kcfg.grid) rows.push_back(kernel_row(y, hidden, kcfg));
  const int points = static_cast<int>(kcfg.grid.size());

  ThetaField theta = config.theta_init == ThetaInit::kZero
                         ? ThetaField::zeros(kcfg.grid, m)
                         : theta0;
  ThetaField theta_bar = theta;

  RandomStream rng(derive_seed(config.seed, 11));

  // Frozen mode: the restoration distribution, smoothed weights and the
  // fixed point are all pinned at psi^0.
  FilterPosterior fp_frozen;
  std::vector<std::vector<double>> g_w, f_w;
  ThetaField theta_star;
  if (config.frozen_psi) {
    fp_frozen = smoothed_probabilities(psi0, hidden);
    smoothed_sums_fields(rows, hidden, fp_frozen.smoothed, m, h, g_w, f_w);
    theta_star = ThetaField::zeros(kcfg.grid, m);
    for (int i = 0; i < m; ++i)
      for (int g = 0; g < points; ++g) {
        theta_star.f_hat[i][g] = f_w[i][g];
        theta_star.theta[i][g] =
            f_w[i][g] > kDenominatorFloor ? g_w[i][g] / f_w[i][g] : 0.0;
      }
  }

  RmTrace trace{ThetaField{}, ThetaField{}, ThetaField{}, a_cur,
                saem.params, saem.reseed_events, psi0, {}, {}, {}};
  trace.iterations.reserve(config.schedule.total);

  for (int t = 1; t <= config.schedule.total; ++t) {
    double loglik = 0.0;
    FilterPosterior fp;
    std::vector<int> x_t;
    if (config.frozen_psi) {
      x_t = backward_sample(fp_frozen, psi0.a_hat, rng);
      loglik = fp_frozen.loglik;
    } else {
      const PsiState psi_prev{theta, a_cur, sigma_cur, init_cur};
      fp = attach_smoothed(forward_filter(psi_prev, hidden), a_cur);
      x_t = backward_sample(fp, a_cur, rng);
      loglik = fp.loglik;
    }

    std::vector<int> occupancy(m, 0);
    for (int label : x_t) ++occupancy[label];

    // Grid-wise Robbins-Monro update sharing the restored path; points whose
    // denominator sits at the zero floor stay frozen at initialization.
    const double gamma = config.schedule.gamma(t);
    for (int g = 0; g < points; ++g) {
      const BinnedSums sums = indicator_sums_from_row(rows[g], hidden, x_t, m, h);
      for (int i = 0; i < m; ++i) {
        theta.f_hat[i][g] = sums.s0[i];
        if (sums.s0[i] <= kDenominatorFloor) continue;
        const double grad = -2.0 * (sums.s1[i] - theta.theta[i][g] * sums.s0[i]);
        const double next = theta.theta[i][g] - gamma * grad;
        if (!std::isfinite(next))
          throw NumericError("non-finite update at iteration " + std::to_string(t) +
                             ", regime " + std::to_string(i + 1) + ", grid point " +
                             std::to_string(g + 1));
        theta.theta[i][g] = next;
      }
    }

    a_cur = TransitionMatrix(transition_counts(x_t, m).row_normalized);
    if (!config.frozen_psi) {
      init_cur = stationary_or_uniform(a_cur);
      if (config.reestimate_sigma) {
        const PsiState psi_prev{theta, a_cur, sigma_cur, init_cur};
        const EmissionModel emission = emission_model(psi_prev);
        for (int i = 0; i < m; ++i) {
          double wsum = 0.0, rss = 0.0;
          for (int k = 0; k < n; ++k) {
            const double resid = hidden.y[k + 1] - emission.mean(i, hidden.y[k]);
            wsum += fp.smoothed[k][i];
            rss += fp.smoothed[k][i] * resid * resid;
          }
          if (wsum > 0.0) sigma_cur[i] = std::max(std::sqrt(rss / wsum), 1e-6);
        }
      }
    }

    theta_bar = polyak_update(theta_bar, theta, t);

    if (!config.frozen_psi)
      smoothed_sums_fields(rows, hidden, fp.smoothed, m, h, g_w, f_w);
    RmIterationStats stats;
    stats.grad_u_norm = masked_median_abs_grad(g_w, f_w, theta_bar, kDiagnosticFloor);
    stats.loglik = loglik;
    stats.occupancy = std::move(occupancy);
    trace.iterations.push_back(std::move(stats));
    if (config.record_history) {
      trace.theta_history.push_back(theta);
      trace.theta_bar_history.push_back(theta_bar);
    }
  }

  trace.theta_final = theta;
  trace.theta_bar_final = theta_bar;
  // Reported averaged field carries the smoothed denominators of the last
  // pass; they drive the zero-skip logic downstream.
  for (int i = 0; i < m; ++i) trace.theta_bar_final.f_hat[i] = f_w[i];
  trace.theta_star = theta_star;
  trace.a_final = a_cur;
  return trace;
}

std::string rm_iterations_to_csv(const RmTrace& trace) {
  std::ostringstream out;
  const int m = trace.iterations.empty() ? 0
                                         : static_cast<int>(trace.iterations[0].occupancy.size());
  out << "t,grad_u_norm,loglik";
  for (int i = 0; i < m; ++i) out << ",occupancy_" << i + 1;
  out << '\n';
  for (std::size_t t = 0; t < trace.iterations.size(); ++t) {
    const RmIterationStats& s = trace.iterations[t];
    out << t + 1 << ',' << format_double(s.grad_u_norm) << ',' << format_double(s.loglik);
    for (int i = 0; i < m; ++i) out << ',' << s.occupancy[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace msnar
