#include "msnar/saem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msnar/common.hpp"
#include "msnar/nw.hpp"
#include "msnar/rng.hpp"

namespace msnar {

namespace {

constexpr double kSigmaFloor = 1e-6;

struct RegimeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sigma = 1.0;
  bool ok = false;
};

RegimeFit fit_regime(const SaemStats& s, int i) {
  RegimeFit fit;
  const double c = s.count[i];
  if (c < 2.0) return fit;
  const double denom = c * s.sum_prev_sq[i] - s.sum_prev[i] * s.sum_prev[i];
  if (!(denom > 1e-12 * std::max(1.0, c * s.sum_prev_sq[i]))) return fit;
  fit.slope = (c * s.sum_cross[i] - s.sum_prev[i] * s.sum_next[i]) / denom;
  fit.intercept = (s.sum_next[i] - fit.slope * s.sum_prev[i]) / c;
  const double rss = regime_quadratic(s, i, fit.slope, fit.intercept);
  fit.sigma = std::max(std::sqrt(std::max(rss, 0.0) / c), kSigmaFloor);
  fit.ok = true;
  return fit;
}

// Guarantees every regime keeps at least two supporting steps in the sampled
// path so the next M-step stays identifiable.
int ensure_coverage(std::vector<int>& x, int m, RandomStream& rng) {
  const int n = static_cast<int>(x.size());
  std::vector<int> visits(m, 0);
  for (int label : x) ++visits[label];
  int events = 0;
  for (int i = 0; i < m; ++i) {
    if (visits[i] >= 2) continue;
    ++events;
    const int grabs = std::max(2, n / (20 * m));
    for (int g = 0; g < grabs; ++g) {
      const int pos = static_cast<int>(rng.uniform01() * n);
      x[std::min(pos, n - 1)] = i;
    }
  }
  return events;
}

}  // namespace

void SaemConfig::validate() const {
  if (m < 1) throw ConfigError("SAEM needs at least one regime");
  if (iterations < 1) throw ConfigError("SAEM needs at least one iteration");
  if (warmup < 0) throw ConfigError("SAEM warmup must be nonnegative");
  if (restarts < 1) throw ConfigError("SAEM needs at least one restart");
}

SaemStats SaemStats::zeros(int m) {
  SaemStats s;
  s.count.assign(m, 0.0);
  s.sum_prev.assign(m, 0.0);
  s.sum_next.assign(m, 0.0);
  s.sum_prev_sq.assign(m, 0.0);
  s.sum_cross.assign(m, 0.0);
  s.sum_next_sq.assign(m, 0.0);
  s.transitions.assign(m, std::vector<double>(m, 0.0));
  return s;
}

void SaemStats::blend(const SaemStats& target, double gamma) {
  const int m = static_cast<int>(count.size());
  for (int i = 0; i < m; ++i) {
    count[i] += gamma * (target.count[i] - count[i]);
    sum_prev[i] += gamma * (target.sum_prev[i] - sum_prev[i]);
    sum_next[i] += gamma * (target.sum_next[i] - sum_next[i]);
    sum_prev_sq[i] += gamma * (target.sum_prev_sq[i] - sum_prev_sq[i]);
    sum_cross[i] += gamma * (target.sum_cross[i] - sum_cross[i]);
    sum_next_sq[i] += gamma * (target.sum_next_sq[i] - sum_next_sq[i]);
    for (int j = 0; j < m; ++j)
      transitions[i][j] += gamma * (target.transitions[i][j] - transitions[i][j]);
  }
}

SaemStats path_statistics(const Trajectory& traj, const std::vector<int>& x, int m) {
  const int n = traj.steps();
  if (static_cast<int>(x.size()) != n) throw ConfigError("path length must match the step count");
  SaemStats s = SaemStats::zeros(m);
  for (int k = 0; k < n; ++k) {
    const int i = x[k];
    const double prev = traj.y[k];
    const double next = traj.y[k + 1];
    s.count[i] += 1.0;
    s.sum_prev[i] += prev;
    s.sum_next[i] += next;
    s.sum_prev_sq[i] += prev * prev;
    s.sum_cross[i] += prev * next;
    s.sum_next_sq[i] += next * next;
    if (k >= 1) s.transitions[x[k - 1]][i] += 1.0;
  }
  return s;
}

double regime_quadratic(const SaemStats& s, int i, double slope, double intercept) {
  return s.sum_next_sq[i] - 2.0 * slope * s.sum_cross[i] - 2.0 * intercept * s.sum_next[i] +
         slope * slope * s.sum_prev_sq[i] + 2.0 * slope * intercept * s.sum_prev[i] +
         intercept * intercept * s.count[i];
}

std::vector<int> kmeans_pair_split(const std::vector<double>& y, int m) {
  const int n = static_cast<int>(y.size()) - 1;
  if (n < m) throw ConfigError("too few observations for the initial split");
  if (m == 1) return std::vector<int>(n, 0);

  // Quantile seeding along the response keeps the split deterministic.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return y[a + 1] < y[b + 1]; });
  std::vector<std::pair<double, double>> centers(m);
  for (int j = 0; j < m; ++j) {
    const int pick = order[std::min<int>(static_cast<int>((j + 0.5) * n / m), n - 1)];
    centers[j] = {y[pick], y[pick + 1]};
  }

  std::vector<int> assign(n, 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (int k = 0; k < n; ++k) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        const double dx = y[k] - centers[j].first;
        const double dy = y[k + 1] - centers[j].second;
        const double d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (assign[k] != best) {
        assign[k] = best;
        changed = true;
      }
    }
    std::vector<double> cx(m, 0.0), cy(m, 0.0), cnt(m, 0.0);
    for (int k = 0; k < n; ++k) {
      cx[assign[k]] += y[k];
      cy[assign[k]] += y[k + 1];
      cnt[assign[k]] += 1.0;
    }
    for (int j = 0; j < m; ++j) {
      if (cnt[j] == 0.0) {
        // Re-seed an empty cluster with the point farthest from its center.
        int far_k = 0;
        double far_d = -1.0;
        for (int k = 0; k < n; ++k) {
          const double dx = y[k] - centers[assign[k]].first;
          const double dy = y[k + 1] - centers[assign[k]].second;
          const double d = dx * dx + dy * dy;
          if (d > far_d) {
            far_d = d;
            far_k = k;
          }
        }
        centers[j] = {y[far_k], y[far_k + 1]};
        assign[far_k] = j;
        changed = true;
      } else {
        centers[j] = {cx[j] / cnt[j], cy[j] / cnt[j]};
      }
    }
    if (!changed) break;
  }
  return assign;
}

EmissionModel emission_model(const LinearMsArParams& params) {
  EmissionModel emission;
  emission.sigma = params.sigma;
  emission.mean = [slope = params.slope, intercept = params.intercept](int regime, double y_prev) {
    return slope[regime] * y_prev + intercept[regime];
  };
  return emission;
}

namespace {

// Random persistent segmentation: geometric segments with a mean length that
// respects the switching time scale, random label per segment.
std::vector<int> random_segment_split(int n, int m, RandomStream& rng) {
  const double switch_prob = 1.0 / std::max(20.0, n / 20.0);
  std::vector<int> path(n);
  path[0] = static_cast<int>(rng.next_u64() % m);
  for (int k = 1; k < n; ++k) {
    path[k] = path[k - 1];
    if (rng.uniform01() < switch_prob) path[k] = static_cast<int>(rng.next_u64() % m);
  }
  return path;
}

SaemResult saem_run_once(const Trajectory& traj, const SaemConfig& config,
                         std::vector<int> path, std::uint64_t run_seed) {
  const int m = config.m;
  const int n = traj.steps();

  RandomStream rng(derive_seed(run_seed, 7));
  int reseed_events = 0;
  std::vector<double> loglik_trace;

  if (static_cast<int>(path.size()) != n)
    throw ConfigError("initial path length must match the step count");
  reseed_events += ensure_coverage(path, m, rng);

  SaemStats stats = path_statistics(traj, path, m);
  LinearMsArParams params{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
                          std::vector<double>(m, 1.0), TransitionMatrix::identity(m),
                          std::vector<double>(m, 1.0 / m)};
  auto m_step = [&]() {
    for (int i = 0; i < m; ++i) {
      const RegimeFit fit = fit_regime(stats, i);
      if (!fit.ok) {
        ++reseed_events;
        continue;  // keep the previous parameters for this regime
      }
      params.slope[i] = fit.slope;
      params.intercept[i] = fit.intercept;
      params.sigma[i] = fit.sigma;
    }
    std::vector<std::vector<double>> rows(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < m; ++j) row_sum += stats.transitions[i][j];
      for (int j = 0; j < m; ++j)
        rows[i][j] = row_sum > 0.0 ? stats.transitions[i][j] / row_sum : 1.0 / m;
    }
    params.a_hat = TransitionMatrix(rows);
    params.init_hat = stationary_or_uniform(params.a_hat);
  };
  m_step();

  loglik_trace.reserve(config.iterations);
  for (int t = 1; t <= config.iterations; ++t) {
    const FilterPosterior fp = forward_filter(emission_model(params), params.a_hat,
                                              params.init_hat, traj);
    loglik_trace.push_back(fp.loglik);
    path = backward_sample(fp, params.a_hat, rng);
    reseed_events += ensure_coverage(path, m, rng);
    stats.blend(path_statistics(traj, path, m), config.gamma(t));
    m_step();
  }

  const double final_loglik =
      forward_filter(emission_model(params), params.a_hat, params.init_hat, traj).loglik;
  return SaemResult{std::move(params), std::move(path), std::move(loglik_trace),
                    reseed_events, final_loglik, 0};
}

}  // namespace

SaemResult saem_linear_msar(const Trajectory& traj, const SaemConfig& config) {
  config.validate();
  const int m = config.m;
  const int n = traj.steps();
  if (n < 10 * m)
    throw ConfigError("SAEM requires at least 10 observations per regime (n >= 10m)");

  if (!config.initial_path.empty())
    return saem_run_once(traj, config, config.initial_path, config.seed);

  const int restarts = m == 1 ? 1 : config.restarts;
  SaemResult best{LinearMsArParams{{}, {}, {}, TransitionMatrix::identity(1), {}}, {}, {}, 0,
                  -std::numeric_limits<double>::infinity(), 0};
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = derive_seed(config.seed, 1000 + r);
    std::vector<int> init;
    if (r == 0) {
      init = kmeans_pair_split(traj.y, m);
    } else {
      RandomStream init_rng(derive_seed(run_seed, 3));
      init = random_segment_split(n, m, init_rng);
    }
    SaemResult candidate = saem_run_once(traj, config, std::move(init), run_seed);
    if (candidate.final_loglik > best.final_loglik) {
      best = std::move(candidate);
      best.chosen_restart = r;
    }
  }
  return best;
}

ThetaField init_theta_field(const Trajectory& traj, const std::vector<int>& x0,
                            const KernelConfig& config, int m) {
  if (static_cast<int>(x0.size()) != traj.steps())
    throw ConfigError("restored path length must match the step count");
  Trajectory restored = traj;
  restored.x = x0;
  return nw_estimate(restored, config, m);
}

}  // namespace msnar
