#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace msnar {

// a*y + b
struct LinearForm {
  double slope = 0.0;
  double intercept = 0.0;
};

// a*y + b*exp(-c*y^2)
struct BumpForm {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
};

// a/(1+exp(c*y)) + d
struct LogisticForm {
  double a = 0.0;
  double c = 0.0;
  double d = 0.0;
};

// Piecewise-linear through (knots, values); linear extrapolation from the
// boundary pair outside the knot range.
struct TabulatedForm {
  std::vector<double> knots;
  std::vector<double> values;
};

using RegressionForm = std::variant<LinearForm, BumpForm, LogisticForm, TabulatedForm>;

// Constants (rho, b) with |r(y)| <= rho*|y| + b.
struct SublinearEnvelope {
  double rho = 0.0;
  double b = 0.0;
};

SublinearEnvelope default_envelope(const RegressionForm& form);

class RegressionFunction {
 public:
  // Envelope is verified by probing |r| <= rho|y| + b on a dense grid over
  // [-50, 50]; violations raise ConfigError.
  RegressionFunction(RegressionForm form, SublinearEnvelope envelope);
  explicit RegressionFunction(RegressionForm form)
      : RegressionFunction(form, default_envelope(form)) {}

  const RegressionForm& form() const { return form_; }
  const SublinearEnvelope& envelope() const { return envelope_; }

 private:
  RegressionForm form_;
  SublinearEnvelope envelope_;
};

double eval_regression(const RegressionFunction& f, double y);

// Shared piecewise-linear evaluation (Tabulated forms, theta-field rows).
// xs must be strictly increasing; boundary extrapolation is linear from the
// outermost pair, a single point evaluates as a constant, empty as zero.
double piecewise_linear_eval(std::span<const double> xs, std::span<const double> vs, double x);

}  // namespace msnar
