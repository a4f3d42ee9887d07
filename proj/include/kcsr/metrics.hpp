#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kcsr {

// Maximum-profit assignment (Kuhn-Munkres). Rectangular input is padded with
// zeros to square; the result maps each row to a column (0-based). Among
// equal-profit optima the lexicographically smallest assignment is returned.
std::vector<int> hungarian(const Eigen::MatrixXd& profit);

// Joint label counts; entry (i-1, j-1) counts samples with pred i, truth j.
Eigen::MatrixXi contingency(const std::vector<int>& pred, const std::vector<int>& truth);

// Permutation-matched accuracy: best Hungarian relabeling of pred vs truth.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

// Mutual information (base-2) normalized by the larger marginal entropy.
// Two single-cluster partitions score 1; one single-cluster side scores 0.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

}  // namespace kcsr
