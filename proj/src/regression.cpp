#include "msnar/regression.hpp"

#include <algorithm>
#include <cmath>

#include "msnar/common.hpp"

namespace msnar {

namespace {

double eval_form(const RegressionForm& form, double y) {
  return std::visit(
      [y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearForm>) {
          return f.slope * y + f.intercept;
        } else if constexpr (std::is_same_v<T, BumpForm>) {
          return f.a * y + f.b * std::exp(-f.c * y * y);
        } else if constexpr (std::is_same_v<T, LogisticForm>) {
          return f.a / (1.0 + std::exp(f.c * y)) + f.d;
        } else {
          return piecewise_linear_eval(f.knots, f.values, y);
        }
      },
      form);
}

void validate_form(const RegressionForm& form) {
  if (const auto* tab = std::get_if<TabulatedForm>(&form)) {
    if (tab->knots.empty()) throw ConfigError("tabulated regression needs at least one knot");
    if (tab->knots.size() != tab->values.size())
      throw ConfigError("tabulated regression knots/values length mismatch");
    for (std::size_t i = 1; i < tab->knots.size(); ++i)
      if (!(tab->knots[i] > tab->knots[i - 1]))
        throw ConfigError("tabulated regression knots must be strictly increasing");
  }
}

}  // namespace

double piecewise_linear_eval(std::span<const double> xs, std::span<const double> vs, double x) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return vs[0];
  std::size_t hi;
  if (x <= xs.front()) {
    hi = 1;
  } else if (x >= xs.back()) {
    hi = xs.size() - 1;
  } else {
    hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  }
  const std::size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return vs[lo] + t * (vs[hi] - vs[lo]);
}

SublinearEnvelope default_envelope(const RegressionForm& form) {
  return std::visit(
      [](const auto& f) -> SublinearEnvelope {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearForm>) {
          return {std::fabs(f.slope), std::fabs(f.intercept)};
        } else if constexpr (std::is_same_v<T, BumpForm>) {
          return {std::fabs(f.a), std::fabs(f.b)};
        } else if constexpr (std::is_same_v<T, LogisticForm>) {
          // a/(1+e^{cy}) stays between 0 and a.
          return {0.0, std::max(std::fabs(f.d), std::fabs(f.a + f.d))};
        } else {
          double rho = 0.0;
          if (f.knots.size() >= 2) {
            const std::size_t last = f.knots.size() - 1;
            const double s_lo = (f.values[1] - f.values[0]) / (f.knots[1] - f.knots[0]);
            const double s_hi =
                (f.values[last] - f.values[last - 1]) / (f.knots[last] - f.knots[last - 1]);
            rho = std::max(std::fabs(s_lo), std::fabs(s_hi));
          }
          double vmax = 0.0;
          for (double v : f.values) vmax = std::max(vmax, std::fabs(v));
          const double kmax = f.knots.empty()
                                  ? 0.0
                                  : std::max(std::fabs(f.knots.front()), std::fabs(f.knots.back()));
          return {rho, vmax + rho * kmax};
        }
      },
      form);
}

RegressionFunction::RegressionFunction(RegressionForm form, SublinearEnvelope envelope)
    : form_(std::move(form)), envelope_(envelope) {
  validate_form(form_);
  if (envelope_.rho < 0.0 || envelope_.b < 0.0)
    throw ConfigError("sublinear envelope constants must be nonnegative");
  // Probe the declared bound on a dense grid; the paper assumes the envelope
  // given, we only verify the declaration.
  constexpr int kProbes = 2001;
  for (int k = 0; k < kProbes; ++k) {
    const double y = -50.0 + 100.0 * k / (kProbes - 1);
    const double r = eval_form(form_, y);
    if (std::fabs(r) > envelope_.rho * std::fabs(y) + envelope_.b + 1e-9)
      throw ConfigError("declared envelope violated at y=" + format_double(y) +
                        ": |r(y)|=" + format_double(std::fabs(r)));
  }
}

double eval_regression(const RegressionFunction& f, double y) { return eval_form(f.form(), y); }

}  // namespace msnar
