#pragma once

#include <string>
#include <vector>

namespace msnar {

// Per-regime regression estimates tabulated on an evaluation grid, together
// with the kernel denominator behind each value.  Wherever the denominator is
// at or below the zero floor the estimate is 0 by the ratio convention.
struct ThetaField {
  std::vector<double> grid;
  std::vector<std::vector<double>> theta;  // [regime][grid point]
  std::vector<std::vector<double>> f_hat;  // [regime][grid point]

  int regimes() const { return static_cast<int>(theta.size()); }
  int points() const { return static_cast<int>(grid.size()); }
  void validate() const;

  static ThetaField zeros(std::vector<double> grid, int m);
  ThetaField permuted_rows(const std::vector<int>& perm) const;
};

// Piecewise-linear read-out of one theta row.  Grid points whose denominator
// sits at the zero floor are bridged by interpolating between the nearest
// supported neighbours; outside the supported range extrapolation is linear
// from the boundary pair.
class RowInterpolator {
 public:
  RowInterpolator(const ThetaField& field, int regime, double denominator_floor);
  double operator()(double y) const;
  int supported_points() const { return static_cast<int>(xs_.size()); }

 private:
  std::vector<double> xs_;
  std::vector<double> vs_;
};

// Columns y, then theta_i and f_hat_i per regime.
std::string theta_field_to_csv(const ThetaField& field);

}  // namespace msnar
