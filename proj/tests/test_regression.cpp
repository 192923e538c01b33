#include <doctest.h>

#include <cmath>

#include "msnar/common.hpp"
#include "msnar/regression.hpp"

using namespace msnar;

TEST_CASE("closed forms evaluate exactly") {
  RegressionFunction bump(BumpForm{0.7, 2.0, 10.0});
  CHECK(eval_regression(bump, 0.0) == doctest::Approx(2.0).epsilon(1e-15));

  RegressionFunction logistic(LogisticForm{2.0, 10.0, -1.0});
  CHECK(eval_regression(logistic, 0.0) == doctest::Approx(0.0).epsilon(1e-15));

  RegressionFunction linear(LinearForm{0.7, 0.5});
  CHECK(eval_regression(linear, 2.0) == doctest::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("tabulated interpolation and boundary extrapolation") {
  RegressionFunction tab(TabulatedForm{{0.0, 1.0, 2.0}, {0.0, 2.0, 2.0}});
  CHECK(eval_regression(tab, 0.5) == doctest::Approx(1.0));
  CHECK(eval_regression(tab, 1.5) == doctest::Approx(2.0));
  // outside the knots: linear from the boundary pair
  CHECK(eval_regression(tab, -1.0) == doctest::Approx(-2.0));
  CHECK(eval_regression(tab, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("tabulated knots must strictly increase") {
  CHECK_THROWS_AS(RegressionFunction(TabulatedForm{{0.0, 0.0}, {1.0, 2.0}}), ConfigError);
  CHECK_THROWS_AS(RegressionFunction(TabulatedForm{{1.0, 0.5}, {1.0, 2.0}}), ConfigError);
}

TEST_CASE("tabulated sampling of a smooth curve stays within the curvature bound") {
  // |f''| <= 40 for the bump part, so the piecewise-linear error is bounded
  // by max|f''| delta^2 / 8 inside the knot range.
  const double delta = 0.01;
  TabulatedForm form;
  RegressionFunction bump(BumpForm{0.7, 2.0, 10.0});
  for (double y = -2.0; y <= 2.0 + 1e-12; y += delta) {
    form.knots.push_back(y);
    form.values.push_back(eval_regression(bump, y));
  }
  RegressionFunction tab(std::move(form));
  const double bound = 40.0 * delta * delta / 8.0;
  for (double y = -1.99; y <= 1.99; y += 0.00317) {
    CHECK(std::fabs(eval_regression(tab, y) - eval_regression(bump, y)) <= bound + 1e-12);
  }

  // same check for the logistic regime, |f''| <= 50 * 2/(3 sqrt 3)
  TabulatedForm lform;
  RegressionFunction logistic(LogisticForm{2.0, 10.0, -1.0});
  for (double y = -2.0; y <= 2.0 + 1e-12; y += delta) {
    lform.knots.push_back(y);
    lform.values.push_back(eval_regression(logistic, y));
  }
  RegressionFunction ltab(std::move(lform));
  const double lbound = 19.245008972987525 * delta * delta / 8.0;
  for (double y = -1.99; y <= 1.99; y += 0.00317) {
    CHECK(std::fabs(eval_regression(ltab, y) - eval_regression(logistic, y)) <= lbound + 1e-12);
  }
}

TEST_CASE("declared envelopes are probed") {
  // rho too small for the bump slope
  CHECK_THROWS_WITH_AS(RegressionFunction(BumpForm{0.7, 2.0, 10.0}, SublinearEnvelope{0.1, 2.0}),
                       doctest::Contains("envelope"), ConfigError);
  CHECK_THROWS_AS(RegressionFunction(BumpForm{0.7, 2.0, 10.0}, SublinearEnvelope{-0.1, 2.0}),
                  ConfigError);
  CHECK_NOTHROW(RegressionFunction(BumpForm{0.7, 2.0, 10.0}, SublinearEnvelope{0.7, 2.0}));
}

TEST_CASE("default envelopes match the closed forms") {
  const SublinearEnvelope bump = default_envelope(BumpForm{0.7, 2.0, 10.0});
  CHECK(bump.rho == doctest::Approx(0.7));
  CHECK(bump.b == doctest::Approx(2.0));
  const SublinearEnvelope logi = default_envelope(LogisticForm{2.0, 10.0, -1.0});
  CHECK(logi.rho == 0.0);
  CHECK(logi.b == doctest::Approx(1.0));
}
