#include "kcsr/dp_oracle.hpp"

#include <limits>
#include <string>

#include "kcsr/errors.hpp"

namespace kcsr {

ScatterTable::ScatterTable(const Eigen::MatrixXd& K) : n_(static_cast<int>(K.rows())) {
  if (K.rows() != K.cols() || n_ < 1) throw InputError("ScatterTable: kernel must be square");
  diag_prefix_.resize(n_ + 1);
  diag_prefix_(0) = 0.0;
  for (int j = 1; j <= n_; ++j) diag_prefix_(j) = diag_prefix_(j - 1) + K(j - 1, j - 1);

  // Inclusive 2D prefix of kernel entries, 1-based with a zero border.
  block_prefix_ = Eigen::MatrixXd::Zero(n_ + 1, n_ + 1);
  for (int i = 1; i <= n_; ++i) {
    for (int j = 1; j <= n_; ++j) {
      block_prefix_(i, j) = K(i - 1, j - 1) + block_prefix_(i - 1, j) + block_prefix_(i, j - 1) -
                            block_prefix_(i - 1, j - 1);
    }
  }
}

double ScatterTable::scatter(int s, int e) const {
  if (s < 1 || e > n_ || s > e) {
    throw InputError("scatter: invalid range [" + std::to_string(s) + "," + std::to_string(e) +
                     "] for n = " + std::to_string(n_));
  }
  const double diag = diag_prefix_(e) - diag_prefix_(s - 1);
  const double block = block_prefix_(e, e) - block_prefix_(s - 1, e) - block_prefix_(e, s - 1) +
                       block_prefix_(s - 1, s - 1);
  const double len = static_cast<double>(e - s + 1);
  return diag - block / len;
}

double segment_scatter(const KernelMatrix& K, int s, int e) {
  return ScatterTable(K.values).scatter(s, e);
}

DPSolution dp_segment(const KernelMatrix& K, int k, int n_cap) {
  const int n = K.size();
  if (n > n_cap) {
    throw InputError("dp_segment: n = " + std::to_string(n) + " exceeds the oracle cap " +
                     std::to_string(n_cap));
  }
  if (k < 1 || k > n) throw InputError("dp_segment: k must be in [1,n]");

  const ScatterTable table(K.values);
  const double inf = std::numeric_limits<double>::infinity();

  // cost(i,e): best scatter of samples 1..e split into i segments; arg(i,e)
  // stores the last boundary (end of segment i-1).
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(k, n, inf);
  Eigen::MatrixXi arg = Eigen::MatrixXi::Constant(k, n, -1);
  for (int e = 1; e <= n; ++e) cost(0, e - 1) = table.scatter(1, e);
  for (int i = 2; i <= k; ++i) {
    for (int e = i; e <= n; ++e) {
      double best = inf;
      int best_b = -1;
      for (int b = i - 1; b <= e - 1; ++b) {
        const double c = cost(i - 2, b - 1) + table.scatter(b + 1, e);
        if (c < best) {  // strict: ties keep the smallest boundary
          best = c;
          best_b = b;
        }
      }
      cost(i - 1, e - 1) = best;
      arg(i - 1, e - 1) = best_b;
    }
  }

  DPSolution sol;
  sol.optimal_cost = cost(k - 1, n - 1);
  sol.cost_table = cost;
  sol.boundaries.resize(k - 1);
  int e = n;
  for (int i = k; i >= 2; --i) {
    const int b = arg(i - 1, e - 1);
    sol.boundaries[i - 2] = b;
    e = b;
  }
  return sol;
}

}  // namespace kcsr
