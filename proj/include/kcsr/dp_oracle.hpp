#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kcsr/kernels.hpp"

namespace kcsr {

struct DPSolution {
  std::vector<int> boundaries;  // k-1 last-sample indices, strictly increasing
  double optimal_cost = 0.0;
  Eigen::MatrixXd cost_table;   // k x n partial optima (inf where undefined)
};

// O(1) within-segment scatter queries backed by prefix sums of the kernel
// diagonal and the 2D prefix of the kernel block sums.
class ScatterTable {
 public:
  explicit ScatterTable(const Eigen::MatrixXd& K);

  // Kernelized intra-segment variance of samples s..e (1-based, inclusive):
  // sum_j K(j,j) - (1/len) * sum_{j,j'} K(j,j').
  double scatter(int s, int e) const;
  int size() const { return n_; }

 private:
  int n_;
  Eigen::VectorXd diag_prefix_;
  Eigen::MatrixXd block_prefix_;
};

double segment_scatter(const KernelMatrix& K, int s, int e);

// Exact k-segmentation minimizing total within-segment scatter via the
// standard O(k n^2) recursion; ties broken toward the smallest boundary.
DPSolution dp_segment(const KernelMatrix& K, int k, int n_cap = 2000);

}  // namespace kcsr
