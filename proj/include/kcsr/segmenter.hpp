#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kcsr/kernels.hpp"
#include "kcsr/optimizers.hpp"
#include "kcsr/types.hpp"

namespace kcsr {

enum class Method { kcsr, skcsr, mkcsr };

std::string method_name(Method m);

struct SegmentationRequest {
  int k = 2;
  KernelKind kernel_kind = KernelKind::rbf;
  std::optional<double> sigma;    // nullopt: median heuristic (rbf)
  double alpha = 10.0;
  std::optional<double> lambda;   // nullopt: 1e-2 * tr(K) * k / n^2
  Method method = Method::kcsr;
  std::variant<GDConfig, SGDConfig> opt = GDConfig{};
  std::size_t mem_cap_bytes = std::size_t{2} << 30;  // full-kernel refusal cap
};

struct SegmentationResult {
  std::string method;
  int k = 1;
  double alpha = 10.0;
  double lambda = 0.0;
  KernelSpec kernel;
  Eigen::VectorXd betas;
  Eigen::VectorXd tau;
  std::vector<int> labels;      // in [1,k], length n
  std::vector<int> boundaries;  // last sample of each segment (1-based)
  std::vector<std::pair<int, double>> objective_trace;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> block_lengths;
  bool converged = false;
  int iterations_used = 0;
  std::vector<std::string> warnings;  // e.g. empty decoded segments
};

// Hard decoding: label_j = clamp(round(tau_j), 1, k) with half-integer ties
// resolved downward; boundaries are the last index of each label run, with
// empty segments collapsing onto the previous boundary.
std::pair<std::vector<int>, std::vector<int>> labels_from_tau(const Eigen::VectorXd& tau, int k);

// Full-kernel gradient descent segmentation (Algorithm 1 end to end).
SegmentationResult kcsr_segment(const DataSequence& X, const SegmentationRequest& request);

// Stochastic variant: per-iteration b x b partial kernels only; the full
// Gram matrix is never materialized.
SegmentationResult skcsr_segment(const DataSequence& X, const SegmentationRequest& request);

struct MkcsrResult {
  std::vector<SegmentationResult> per_sequence;  // local coordinates per block
  SegmentationResult global;                     // concatenated coordinates
};

// Joint segmentation of m >= 2 sequences with the cut-off parametrization;
// segment c carries the same class across all sequences. SGD only.
MkcsrResult mkcsr_segment(const std::vector<DataSequence>& sequences,
                          const SegmentationRequest& request);

}  // namespace kcsr
