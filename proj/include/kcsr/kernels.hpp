#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "kcsr/types.hpp"

namespace kcsr {

enum class KernelKind { rbf, linear };

struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  double sigma = 1.0;  // bandwidth, used by rbf only; must be > 0

  void validate() const;
};

// Symmetric Gram matrix, either over the whole sequence or restricted to a
// sorted subset of sample positions (1-based, recorded in source_indices).
struct KernelMatrix {
  Eigen::MatrixXd values;
  std::vector<int> source_indices;  // empty for a full matrix

  bool is_partial() const { return !source_indices.empty(); }
  int size() const { return static_cast<int>(values.rows()); }
};

double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma);
double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

KernelMatrix build_kernel_matrix(const DataSequence& X, const KernelSpec& spec);

// Gram matrix restricted to the listed sample positions (distinct, ascending,
// in [1,n]). Entry (a,c) equals the full-matrix entry at (indices[a], indices[c]).
KernelMatrix build_partial_kernel(const DataSequence& X, const std::vector<int>& indices,
                                  const KernelSpec& spec);

// Rectangular kernel block K[rows, cols] for tiled evaluations.
Eigen::MatrixXd kernel_cross_block(const DataSequence& X, const std::vector<int>& rows,
                                   const std::vector<int>& cols, const KernelSpec& spec);

// Sum of the full kernel diagonal, computed without materializing the matrix.
double kernel_trace(const DataSequence& X, const KernelSpec& spec);

// Median of pairwise Euclidean distances over min(n, sample_cap) evenly
// spaced samples; falls back to 1.0 when all sampled points coincide.
double median_heuristic_sigma(const DataSequence& X, int sample_cap = 1000);

// Peak-allocation bookkeeping backing the O(b^2) memory contract: every kernel
// matrix construction reports its entry count here.
namespace kernel_alloc {
void reset_peak();
std::size_t peak_entries();
}  // namespace kernel_alloc

}  // namespace kcsr
