#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msnar {

// Observed path y_0..y_n plus, when available, the regime labels that drove
// each transition.  x[k] is the regime generating y[k+1] from y[k], stored
// 0-based; the CSV format serializes labels 1-based per the domain
// convention.
struct Trajectory {
  std::vector<double> y;
  std::vector<int> x;  // empty when the regime path is hidden
  std::uint64_t seed = 0;
  int burn_in = 0;

  int steps() const { return static_cast<int>(y.size()) - 1; }
  bool x_observed() const { return !x.empty(); }
  void validate(int m) const;

  Trajectory without_regimes() const {
    Trajectory t = *this;
    t.x.clear();
    return t;
  }
};

// CSV columns k,y,x with x blank for k=0 and for hidden paths; '#' header
// lines carry the model hash and seed for replay bookkeeping.
std::string trajectory_to_csv(const Trajectory& traj, std::uint64_t model_hash);
Trajectory trajectory_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace msnar
