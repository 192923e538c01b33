#pragma once

#include <vector>

namespace msnar {

// Row-stochastic transition matrix of the hidden regime chain.  Entries are
// validated at construction: each in [0,1], each row summing to 1 within
// 1e-12.  Immutable after construction.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::vector<std::vector<double>> rows);

  static TransitionMatrix identity(int m);

  int size() const { return m_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * m_ + j]; }
  const std::vector<double>& flat() const { return a_; }
  std::vector<std::vector<double>> rows() const;

  bool is_irreducible() const;
  // Period of the chain (gcd of cycle lengths on the transition graph).
  // Requires irreducibility.
  int period() const;

  // New regime k corresponds to old regime perm[k].
  TransitionMatrix relabeled(const std::vector<int>& perm) const;

 private:
  int m_;
  std::vector<double> a_;
};

// Solves mu A = mu, sum mu = 1 by direct elimination.  Throws ConfigError
// naming the violating structure for reducible or periodic chains.
std::vector<double> stationary_distribution(const TransitionMatrix& a);

// Stationary law with a uniform fallback; estimation loops use this for
// count-based matrices that may transiently be reducible or periodic.
std::vector<double> stationary_or_uniform(const TransitionMatrix& a);

}  // namespace msnar
