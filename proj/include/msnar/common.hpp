#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace msnar {

// Invalid inputs: malformed matrices, bad configs, contract violations.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown during an otherwise valid computation (underflow in a
// filter step, non-finite update, ...).  The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Denominators at or below this value are treated as the estimator's exact
// zero-denominator case.
inline constexpr double kDenominatorFloor = 1e-12;

inline constexpr double kRowSumTolerance = 1e-12;

// Compensated (Kahan) accumulator for cancellation-prone kernel sums.
class KahanAccumulator {
 public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Full-precision decimal rendering; 17 significant digits round-trip doubles.
inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of empty set");
  std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
  return 0.5 * (values[mid - 1] + hi);
}

inline bool approx_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

}  // namespace msnar
