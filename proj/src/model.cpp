#include "msnar/model.hpp"

#include <cmath>
#include <limits>

#include "msnar/common.hpp"

namespace msnar {

void ModelSpec::validate() const {
  const int m = transition.size();
  if (static_cast<int>(regimes.size()) != m)
    throw ConfigError("model has " + std::to_string(regimes.size()) + " regimes, transition matrix expects " +
                      std::to_string(m));
  if (static_cast<int>(noise_std.size()) != m)
    throw ConfigError("noise_std length must equal the regime count");
  if (static_cast<int>(initial_distribution.size()) != m)
    throw ConfigError("initial_distribution length must equal the regime count");
  for (double s : noise_std)
    if (!(s > 0.0)) throw ConfigError("noise_std entries must be positive");
  double sum = 0.0;
  for (double p : initial_distribution) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("initial_distribution entries must lie in [0,1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kRowSumTolerance)
    throw ConfigError("initial_distribution sums to " + format_double(sum) + ", expected 1");
}

ModelSpec ModelSpec::relabeled(const std::vector<int>& perm) const {
  ModelSpec out{transition.relabeled(perm), {}, {}, {}};
  const int m = transition.size();
  out.regimes.reserve(m);
  out.noise_std.resize(m);
  out.initial_distribution.resize(m);
  for (int i = 0; i < m; ++i) {
    out.regimes.push_back(regimes[perm[i]]);
    out.noise_std[i] = noise_std[perm[i]];
    out.initial_distribution[i] = initial_distribution[perm[i]];
  }
  return out;
}

namespace {

nlohmann::json form_to_json(const RegressionForm& form) {
  return std::visit(
      [](const auto& f) -> nlohmann::json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearForm>) {
          return {{"type", "linear"}, {"slope", f.slope}, {"intercept", f.intercept}};
        } else if constexpr (std::is_same_v<T, BumpForm>) {
          return {{"type", "bump"}, {"a", f.a}, {"b", f.b}, {"c", f.c}};
        } else if constexpr (std::is_same_v<T, LogisticForm>) {
          return {{"type", "logistic"}, {"a", f.a}, {"c", f.c}, {"d", f.d}};
        } else {
          return {{"type", "tabulated"}, {"knots", f.knots}, {"values", f.values}};
        }
      },
      form);
}

RegressionForm form_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") return LinearForm{j.at("slope").get<double>(), j.at("intercept").get<double>()};
  if (type == "bump")
    return BumpForm{j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
  if (type == "logistic")
    return LogisticForm{j.at("a").get<double>(), j.at("c").get<double>(), j.at("d").get<double>()};
  if (type == "tabulated")
    return TabulatedForm{j.at("knots").get<std::vector<double>>(),
                         j.at("values").get<std::vector<double>>()};
  throw ConfigError("unknown regression type '" + type + "'");
}

}  // namespace

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : regimes) {
    nlohmann::json f = form_to_json(r.form());
    f["envelope"] = {{"rho", r.envelope().rho}, {"b", r.envelope().b}};
    regs.push_back(std::move(f));
  }
  return {{"transition", transition.rows()},
          {"regimes", regs},
          {"noise_std", noise_std},
          {"initial_distribution", initial_distribution}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  TransitionMatrix a(j.at("transition").get<std::vector<std::vector<double>>>());
  std::vector<RegressionFunction> regimes;
  for (const auto& f : j.at("regimes")) {
    RegressionForm form = form_from_json(f);
    if (f.contains("envelope")) {
      SublinearEnvelope env{f["envelope"].at("rho").get<double>(), f["envelope"].at("b").get<double>()};
      regimes.emplace_back(std::move(form), env);
    } else {
      regimes.emplace_back(std::move(form));
    }
  }
  ModelSpec model{std::move(a), std::move(regimes), j.at("noise_std").get<std::vector<double>>(),
                  j.at("initial_distribution").get<std::vector<double>>()};
  model.validate();
  return model;
}

std::uint64_t ModelSpec::hash() const { return fnv1a64(to_json().dump()); }

nlohmann::json StabilityReport::to_json() const {
  return {{"stationary_distribution", stationary_distribution},
          {"log_condition_value", std::isinf(log_condition_value) ? nlohmann::json("-inf")
                                                                  : nlohmann::json(log_condition_value)},
          {"spectral_radius_qs", spectral_radius_qs},
          {"moment_order_s", moment_order_s},
          {"e4_holds", e4_holds},
          {"moment_condition_holds", moment_condition_holds},
          {"stable", stable}};
}

double spectral_radius(const std::vector<std::vector<double>>& matrix) {
  const int m = static_cast<int>(matrix.size());
  for (const auto& row : matrix)
    if (static_cast<int>(row.size()) != m) throw ConfigError("spectral_radius requires a square matrix");

  auto inf_norm = [m](const std::vector<double>& flat) {
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < m; ++j) row += std::fabs(flat[static_cast<std::size_t>(i) * m + j]);
      best = std::max(best, row);
    }
    return best;
  };

  std::vector<double> b(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b[static_cast<std::size_t>(i) * m + j] = matrix[i][j];

  double norm = inf_norm(b);
  if (norm == 0.0) return 0.0;
  for (double& v : b) v /= norm;
  // Invariant: Q^p = B * exp(e) with ||B||_inf = 1.
  double log_scale = std::log(norm);
  double power = 1.0;
  std::vector<double> sq(static_cast<std::size_t>(m) * m);
  for (int iter = 0; iter < 60; ++iter) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k)
          acc += b[static_cast<std::size_t>(i) * m + k] * b[static_cast<std::size_t>(k) * m + j];
        sq[static_cast<std::size_t>(i) * m + j] = acc;
      }
    const double s = inf_norm(sq);
    if (s == 0.0) return 0.0;  // nilpotent
    for (std::size_t idx = 0; idx < sq.size(); ++idx) b[idx] = sq[idx] / s;
    log_scale = 2.0 * log_scale + std::log(s);
    power *= 2.0;
  }
  return std::exp(log_scale / power);
}

StabilityReport check_stability(const ModelSpec& model, double s) {
  model.validate();
  if (!(s >= 1.0)) throw ConfigError("moment order s must be at least 1");
  const int m = model.regime_count();
  for (const auto& r : model.regimes) {
    if (r.envelope().rho < 0.0 || r.envelope().b < 0.0)
      throw ConfigError("sublinear envelope constants must be nonnegative");
  }

  StabilityReport report;
  report.moment_order_s = s;
  report.stationary_distribution = stationary_distribution(model.transition);

  // log 0 = -inf satisfies E4 whenever any weight sits on a bounded regime.
  double log_cond = 0.0;
  for (int i = 0; i < m; ++i) {
    const double rho = model.regimes[i].envelope().rho;
    const double mu = report.stationary_distribution[i];
    if (mu == 0.0) continue;
    if (rho == 0.0) {
      log_cond = -std::numeric_limits<double>::infinity();
      break;
    }
    log_cond += mu * std::log(rho);
  }
  report.log_condition_value = log_cond;
  report.e4_holds = log_cond < 0.0;

  std::vector<std::vector<double>> qs(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      qs[i][j] = std::pow(model.regimes[j].envelope().rho, s) * model.transition(i, j);
  report.spectral_radius_qs = spectral_radius(qs);
  report.moment_condition_holds = report.spectral_radius_qs < 1.0;
  report.stable = report.e4_holds && report.moment_condition_holds;
  return report;
}

}  // namespace msnar
