#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kcsr/errors.hpp"

namespace kcsr {

// A time-ordered sequence of d-dimensional samples. Column j of `samples`
// is sample x_j; sample positions are 1-based throughout the public API.
struct DataSequence {
  Eigen::MatrixXd samples;        // d x n
  std::vector<int> truth_labels;  // empty, or length n with entries in [1,k]
  std::string name;

  int dim() const { return static_cast<int>(samples.rows()); }
  int length() const { return static_cast<int>(samples.cols()); }
  bool has_labels() const { return !truth_labels.empty(); }
};

// Ordered list of sequences for multi-sequence segmentation.
struct MultiSequence {
  std::vector<DataSequence> blocks;
  std::vector<int> lengths;   // n_1..n_m
  bool labels_dropped = false;  // set when label presence was mixed across blocks

  int block_count() const { return static_cast<int>(blocks.size()); }
  int total_length() const;
  // Order-preserving concatenation; carries labels only if every block had them.
  DataSequence concatenated() const;
};

}  // namespace kcsr
