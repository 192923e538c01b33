#include "msnar/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "msnar/common.hpp"

namespace msnar {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;

double gaussian_logdensity(double y, double mean, double sigma) {
  const double z = (y - mean) / sigma;
  return -kLogSqrt2Pi - std::log(sigma) - 0.5 * z * z;
}

// emis[k][i] = log p(y_{k+1} | y_k, regime i)
std::vector<std::vector<double>> emission_table(const EmissionModel& emission,
                                                const Trajectory& traj) {
  const int n = traj.steps();
  const int m = static_cast<int>(emission.sigma.size());
  std::vector<std::vector<double>> table(n, std::vector<double>(m));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < m; ++i)
      table[k][i] = gaussian_logdensity(traj.y[k + 1], emission.mean(i, traj.y[k]),
                                        emission.sigma[i]);
  return table;
}

void check_inputs(const EmissionModel& emission, const TransitionMatrix& a,
                  const std::vector<double>& init, const Trajectory& traj) {
  const int m = a.size();
  if (static_cast<int>(emission.sigma.size()) != m)
    throw ConfigError("emission sigma length must match the regime count");
  for (double s : emission.sigma)
    if (!(s > 0.0)) throw ConfigError("emission sigma must be positive");
  if (static_cast<int>(init.size()) != m)
    throw ConfigError("initial distribution length must match the regime count");
  if (traj.y.size() < 2) throw ConfigError("filtering requires at least two observations");
}

}  // namespace

void PsiState::validate() const {
  theta.validate();
  if (theta.regimes() != a_hat.size()) throw ConfigError("psi theta/transition regime mismatch");
  if (static_cast<int>(sigma.size()) != a_hat.size())
    throw ConfigError("psi sigma length must match the regime count");
  for (double s : sigma)
    if (!(s > 0.0)) throw ConfigError("psi sigma must be positive");
  if (static_cast<int>(init_hat.size()) != a_hat.size())
    throw ConfigError("psi initial distribution length must match the regime count");
}

EmissionModel emission_model(const PsiState& psi) {
  const int m = psi.theta.regimes();
  auto interpolators = std::make_shared<std::vector<RowInterpolator>>();
  interpolators->reserve(m);
  for (int i = 0; i < m; ++i)
    interpolators->emplace_back(psi.theta, i, kDenominatorFloor);
  EmissionModel emission;
  emission.sigma = psi.sigma;
  emission.mean = [interpolators](int regime, double y_prev) {
    return (*interpolators)[regime](y_prev);
  };
  return emission;
}

double emission_logdensity(const PsiState& psi, int regime, double y_prev, double y) {
  const RowInterpolator interp(psi.theta, regime, kDenominatorFloor);
  return gaussian_logdensity(y, interp(y_prev), psi.sigma[regime]);
}

FilterPosterior forward_filter(const EmissionModel& emission, const TransitionMatrix& a,
                               const std::vector<double>& init, const Trajectory& traj) {
  check_inputs(emission, a, init, traj);
  const int n = traj.steps();
  const int m = a.size();
  const auto emis = emission_table(emission, traj);

  FilterPosterior fp;
  fp.filtered.assign(n, std::vector<double>(m, 0.0));
  fp.loglik = 0.0;
  std::vector<double> predicted(m);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      predicted = init;
    } else {
      for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int l = 0; l < m; ++l) acc += a(l, i) * fp.filtered[k - 1][l];
        predicted[i] = acc;
      }
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      if (predicted[i] > 0.0) shift = std::max(shift, emis[k][i]);
    if (!std::isfinite(shift))
      throw NumericError("forward filter: all emissions vanished at step " + std::to_string(k + 1));
    double norm = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = predicted[i] > 0.0 ? predicted[i] * std::exp(emis[k][i] - shift) : 0.0;
      fp.filtered[k][i] = v;
      norm += v;
    }
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw NumericError("forward filter underflow at step " + std::to_string(k + 1));
    for (int i = 0; i < m; ++i) fp.filtered[k][i] /= norm;
    fp.loglik += std::log(norm) + shift;
  }
  return fp;
}

FilterPosterior forward_filter(const PsiState& psi, const Trajectory& traj) {
  psi.validate();
  return forward_filter(emission_model(psi), psi.a_hat, psi.init_hat, traj);
}

FilterPosterior smoothed_probabilities(const EmissionModel& emission, const TransitionMatrix& a,
                                       const std::vector<double>& init, const Trajectory& traj) {
  return attach_smoothed(forward_filter(emission, a, init, traj), a);
}

FilterPosterior attach_smoothed(FilterPosterior fp, const TransitionMatrix& a) {
  const int n = static_cast<int>(fp.filtered.size());
  if (n == 0) throw ConfigError("attach_smoothed requires filtered probabilities");
  const int m = a.size();
  fp.smoothed.assign(n, std::vector<double>(m, 0.0));
  fp.smoothed[n - 1] = fp.filtered[n - 1];
  std::vector<double> predicted(m);
  for (int k = n - 2; k >= 0; --k) {
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int l = 0; l < m; ++l) acc += a(l, i) * fp.filtered[k][l];
      predicted[i] = acc;
    }
    for (int l = 0; l < m; ++l) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        if (fp.smoothed[k + 1][i] == 0.0) continue;  // predicted[i] = 0 forces smoothed = 0
        acc += a(l, i) * fp.smoothed[k + 1][i] / predicted[i];
      }
      fp.smoothed[k][l] = fp.filtered[k][l] * acc;
    }
    double norm = 0.0;
    for (int l = 0; l < m; ++l) norm += fp.smoothed[k][l];
    if (!(norm > 0.0))
      throw NumericError("smoother underflow at step " + std::to_string(k + 1));
    for (int l = 0; l < m; ++l) fp.smoothed[k][l] /= norm;
  }
  return fp;
}

FilterPosterior smoothed_probabilities(const PsiState& psi, const Trajectory& traj) {
  psi.validate();
  return smoothed_probabilities(emission_model(psi), psi.a_hat, psi.init_hat, traj);
}

std::vector<int> backward_sample(const FilterPosterior& fp, const TransitionMatrix& a_hat,
                                 RandomStream& rng) {
  const int n = static_cast<int>(fp.filtered.size());
  if (n == 0) throw ConfigError("backward_sample requires filtered probabilities");
  const int m = a_hat.size();
  std::vector<int> x(n);
  x[n - 1] = rng.categorical(fp.filtered[n - 1]);
  std::vector<double> weights(m);
  for (int k = n - 2; k >= 0; --k) {
    double norm = 0.0;
    for (int i = 0; i < m; ++i) {
      weights[i] = a_hat(i, x[k + 1]) * fp.filtered[k][i];
      norm += weights[i];
    }
    if (!(norm > 0.0))
      throw NumericError("backward sampler hit a zero normalizer at step " + std::to_string(k + 1));
    x[k] = rng.categorical(weights);
  }
  return x;
}

std::vector<int> backward_sample(const FilterPosterior& fp, const TransitionMatrix& a_hat,
                                 std::uint64_t seed) {
  RandomStream rng(seed);
  return backward_sample(fp, a_hat, rng);
}

std::vector<int> PathPosterior::decode(std::size_t index) const {
  std::vector<int> path(n);
  for (int k = n - 1; k >= 0; --k) {
    path[k] = static_cast<int>(index % m);
    index /= m;
  }
  return path;
}

double PathPosterior::path_probability(const std::vector<int>& path) const {
  if (static_cast<int>(path.size()) != n) throw ConfigError("path length mismatch");
  std::size_t index = 0;
  for (int k = 0; k < n; ++k) index = index * m + path[k];
  return std::exp(log_prob[index]);
}

PathPosterior brute_force_posterior(const EmissionModel& emission, const TransitionMatrix& a,
                                    const std::vector<double>& init, const Trajectory& traj) {
  check_inputs(emission, a, init, traj);
  const int n = traj.steps();
  const int m = a.size();
  double count = std::pow(static_cast<double>(m), n);
  if (count > 1e6) throw ConfigError("brute-force enumeration limit m^n <= 1e6 exceeded");
  const std::size_t paths = static_cast<std::size_t>(count);
  const auto emis = emission_table(emission, traj);

  PathPosterior post;
  post.m = m;
  post.n = n;
  post.log_prob.resize(paths);

  // Lemma-style factorization: init_{x_1} * prod a * prod emissions.
  std::vector<int> path(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < paths; ++idx) {
    std::size_t rest = idx;
    for (int k = n - 1; k >= 0; --k) {
      path[k] = static_cast<int>(rest % m);
      rest /= m;
    }
    double lp = init[path[0]] > 0.0 ? std::log(init[path[0]])
                                    : -std::numeric_limits<double>::infinity();
    lp += emis[0][path[0]];
    for (int k = 1; k < n; ++k) {
      const double aij = a(path[k - 1], path[k]);
      lp += aij > 0.0 ? std::log(aij) : -std::numeric_limits<double>::infinity();
      lp += emis[k][path[k]];
    }
    post.log_prob[idx] = lp;
    max_log = std::max(max_log, lp);
  }
  if (!std::isfinite(max_log)) throw NumericError("brute-force posterior has zero total mass");

  KahanAccumulator total;
  for (double lp : post.log_prob) total.add(std::exp(lp - max_log));
  post.log_normalizer = max_log + std::log(total.value());

  post.marginals.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t idx = 0; idx < paths; ++idx) {
    post.log_prob[idx] -= post.log_normalizer;
    const double p = std::exp(post.log_prob[idx]);
    std::size_t rest = idx;
    for (int k = n - 1; k >= 0; --k) {
      post.marginals[k][rest % m] += p;
      rest /= m;
    }
  }
  return post;
}

PathPosterior brute_force_posterior(const PsiState& psi, const Trajectory& traj) {
  psi.validate();
  return brute_force_posterior(emission_model(psi), psi.a_hat, psi.init_hat, traj);
}

TransitionCounts transition_counts(const std::vector<int>& x, int m) {
  if (x.size() < 2) throw ConfigError("transition counts need at least two labels");
  for (int label : x)
    if (label < 0 || label >= m) throw ConfigError("regime label outside {1..m}");
  TransitionCounts tc;
  tc.counts.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t k = 1; k < x.size(); ++k) tc.counts[x[k - 1]][x[k]] += 1.0;
  tc.row_normalized = tc.counts;
  tc.over_n = tc.counts;
  const double n = static_cast<double>(x.size());
  for (int i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) row_sum += tc.counts[i][j];
    for (int j = 0; j < m; ++j) {
      tc.over_n[i][j] /= n;
      // states never visited fall back to the uniform row, keeping the
      // restoration kernel irreducible
      tc.row_normalized[i][j] = row_sum > 0.0 ? tc.counts[i][j] / row_sum : 1.0 / m;
    }
  }
  return tc;
}

std::string filter_posterior_to_csv(const FilterPosterior& fp) {
  std::ostringstream out;
  const int m = fp.filtered.empty() ? 0 : static_cast<int>(fp.filtered[0].size());
  out << "k";
  for (int i = 0; i < m; ++i) out << ",filtered_" << i + 1;
  for (int i = 0; i < m; ++i) out << ",smoothed_" << i + 1;
  out << '\n';
  for (std::size_t k = 0; k < fp.filtered.size(); ++k) {
    out << k + 1;
    for (int i = 0; i < m; ++i) out << ',' << format_double(fp.filtered[k][i]);
    for (int i = 0; i < m; ++i)
      out << ',' << format_double(fp.smoothed.empty() ? 0.0 : fp.smoothed[k][i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace msnar
