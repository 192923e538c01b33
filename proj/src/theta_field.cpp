#include "msnar/theta_field.hpp"

#include <cmath>
#include <sstream>

#include "msnar/common.hpp"
#include "msnar/regression.hpp"

namespace msnar {

void ThetaField::validate() const {
  if (grid.empty()) throw ConfigError("theta field has an empty grid");
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (!(grid[g] > grid[g - 1])) throw ConfigError("theta field grid must be strictly increasing");
  if (theta.size() != f_hat.size()) throw ConfigError("theta/f_hat regime counts differ");
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i].size() != grid.size() || f_hat[i].size() != grid.size())
      throw ConfigError("theta field row " + std::to_string(i + 1) + " has wrong length");
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!std::isfinite(theta[i][g])) throw ConfigError("theta field contains a non-finite value");
    }
  }
  // The ratio convention (theta = 0 wherever the denominator sits at the zero
  // floor) holds for estimator outputs by construction; running fields may
  // instead keep values frozen at initialization across unsupported points.
}

ThetaField ThetaField::zeros(std::vector<double> grid, int m) {
  ThetaField field;
  field.theta.assign(m, std::vector<double>(grid.size(), 0.0));
  field.f_hat.assign(m, std::vector<double>(grid.size(), 0.0));
  field.grid = std::move(grid);
  return field;
}

ThetaField ThetaField::permuted_rows(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != regimes()) throw ConfigError("permutation has wrong length");
  ThetaField out;
  out.grid = grid;
  for (int i = 0; i < regimes(); ++i) {
    out.theta.push_back(theta[perm[i]]);
    out.f_hat.push_back(f_hat[perm[i]]);
  }
  return out;
}

RowInterpolator::RowInterpolator(const ThetaField& field, int regime, double denominator_floor) {
  for (int g = 0; g < field.points(); ++g) {
    if (field.f_hat[regime][g] > denominator_floor) {
      xs_.push_back(field.grid[g]);
      vs_.push_back(field.theta[regime][g]);
    }
  }
}

double RowInterpolator::operator()(double y) const { return piecewise_linear_eval(xs_, vs_, y); }

std::string theta_field_to_csv(const ThetaField& field) {
  std::ostringstream out;
  out << "y";
  for (int i = 0; i < field.regimes(); ++i) out << ",theta_" << i + 1 << ",f_hat_" << i + 1;
  out << '\n';
  for (int g = 0; g < field.points(); ++g) {
    out << format_double(field.grid[g]);
    for (int i = 0; i < field.regimes(); ++i)
      out << ',' << format_double(field.theta[i][g]) << ',' << format_double(field.f_hat[i][g]);
    out << '\n';
  }
  return out.str();
}

}  // namespace msnar
