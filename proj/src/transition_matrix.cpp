#include "msnar/transition_matrix.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "msnar/common.hpp"

namespace msnar {

TransitionMatrix::TransitionMatrix(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw ConfigError("transition matrix must have at least one regime");
  m_ = static_cast<int>(rows.size());
  a_.reserve(static_cast<std::size_t>(m_) * m_);
  for (int i = 0; i < m_; ++i) {
    if (static_cast<int>(rows[i].size()) != m_)
      throw ConfigError("transition matrix row " + std::to_string(i + 1) + " has wrong length");
    double sum = 0.0;
    for (double v : rows[i]) {
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError("transition probability outside [0,1] in row " + std::to_string(i + 1));
      sum += v;
      a_.push_back(v);
    }
    if (std::fabs(sum - 1.0) > kRowSumTolerance)
      throw ConfigError("transition matrix row " + std::to_string(i + 1) +
                        " sums to " + format_double(sum) + ", expected 1");
  }
}

TransitionMatrix TransitionMatrix::identity(int m) {
  std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) rows[i][i] = 1.0;
  return TransitionMatrix(std::move(rows));
}

std::vector<std::vector<double>> TransitionMatrix::rows() const {
  std::vector<std::vector<double>> out(m_, std::vector<double>(m_));
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

bool TransitionMatrix::is_irreducible() const {
  // Warshall closure on the positive-entry graph; m is tiny.
  std::vector<char> reach(static_cast<std::size_t>(m_) * m_, 0);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) reach[static_cast<std::size_t>(i) * m_ + j] = (*this)(i, j) > 0.0;
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        if (reach[static_cast<std::size_t>(i) * m_ + k] && reach[static_cast<std::size_t>(k) * m_ + j])
          reach[static_cast<std::size_t>(i) * m_ + j] = 1;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      if (!reach[static_cast<std::size_t>(i) * m_ + j]) return false;
  return true;
}

int TransitionMatrix::period() const {
  // BFS levels from state 0; the period is gcd(level[u] + 1 - level[v]) over
  // edges u -> v.  Valid for irreducible chains.
  std::vector<int> level(m_, -1);
  std::queue<int> queue;
  level[0] = 0;
  queue.push(0);
  int g = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop();
    for (int v = 0; v < m_; ++v) {
      if ((*this)(u, v) <= 0.0) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push(v);
      } else {
        g = std::gcd(g, level[u] + 1 - level[v]);
      }
    }
  }
  return g == 0 ? 0 : std::abs(g);
}

TransitionMatrix TransitionMatrix::relabeled(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != m_) throw ConfigError("permutation has wrong length");
  std::vector<std::vector<double>> out(m_, std::vector<double>(m_));
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) out[i][j] = (*this)(perm[i], perm[j]);
  return TransitionMatrix(std::move(out));
}

std::vector<double> stationary_distribution(const TransitionMatrix& a) {
  const int m = a.size();
  if (!a.is_irreducible()) {
    // Name one unreachable pair for the diagnostic.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::vector<char> seen(m, 0);
        std::queue<int> queue;
        seen[i] = 1;
        queue.push(i);
        while (!queue.empty()) {
          int u = queue.front();
          queue.pop();
          for (int v = 0; v < m; ++v)
            if (a(u, v) > 0.0 && !seen[v]) {
              seen[v] = 1;
              queue.push(v);
            }
        }
        if (!seen[j])
          throw ConfigError("chain is reducible: state " + std::to_string(j + 1) +
                            " is unreachable from state " + std::to_string(i + 1));
      }
    throw ConfigError("chain is reducible");
  }
  const int p = a.period();
  if (p != 1)
    throw ConfigError("chain is periodic with period " + std::to_string(p));

  // (A^T - I) mu = 0 with the last equation replaced by sum(mu) = 1.
  std::vector<std::vector<double>> mat(m, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) mat[i][j] = a(j, i) - (i == j ? 1.0 : 0.0);
    mat[i][m] = 0.0;
  }
  for (int j = 0; j < m; ++j) mat[m - 1][j] = 1.0;
  mat[m - 1][m] = 1.0;

  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (std::fabs(mat[r][col]) > std::fabs(mat[pivot][col])) pivot = r;
    if (std::fabs(mat[pivot][col]) < 1e-14)
      throw NumericError("stationary distribution solve is singular");
    std::swap(mat[col], mat[pivot]);
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double factor = mat[r][col] / mat[col][col];
      for (int c = col; c <= m; ++c) mat[r][c] -= factor * mat[col][c];
    }
  }
  std::vector<double> mu(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    mu[i] = mat[i][m] / mat[i][i];
    if (mu[i] < 0.0 && mu[i] > -1e-13) mu[i] = 0.0;
    sum += mu[i];
  }
  for (double& v : mu) v /= sum;

  for (int j = 0; j < m; ++j) {
    double dot = 0.0;
    for (int i = 0; i < m; ++i) dot += mu[i] * a(i, j);
    if (std::fabs(dot - mu[j]) > 1e-10)
      throw NumericError("stationary distribution residual exceeds 1e-10");
  }
  return mu;
}

std::vector<double> stationary_or_uniform(const TransitionMatrix& a) {
  try {
    return stationary_distribution(a);
  } catch (const std::exception&) {
    return std::vector<double>(a.size(), 1.0 / a.size());
  }
}

}  // namespace msnar
