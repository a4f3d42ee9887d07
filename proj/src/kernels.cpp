#include "kcsr/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#include "kcsr/errors.hpp"

namespace kcsr {

namespace kernel_alloc {
namespace {
std::atomic<std::size_t> g_peak_entries{0};

void record(std::size_t entries) {
  std::size_t prev = g_peak_entries.load(std::memory_order_relaxed);
  while (prev < entries &&
         !g_peak_entries.compare_exchange_weak(prev, entries, std::memory_order_relaxed)) {
  }
}
}  // namespace

void reset_peak() { g_peak_entries.store(0, std::memory_order_relaxed); }
std::size_t peak_entries() { return g_peak_entries.load(std::memory_order_relaxed); }
}  // namespace kernel_alloc

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(sigma > 0.0)) {
    throw InputError("rbf kernel requires sigma > 0");
  }
}

double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma) {
  if (x.size() != y.size()) {
    throw InputError("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (!(sigma > 0.0)) throw InputError("rbf_kernel: sigma must be positive");
  const double d2 = (x - y).squaredNorm();
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  spec.validate();
  if (x.size() != y.size()) throw InputError("kernel_value: dimension mismatch");
  if (spec.kind == KernelKind::rbf) return rbf_kernel(x, y, spec.sigma);
  return x.dot(y);
}

namespace {

// Single entry with a fixed arithmetic path so full and partial matrices
// agree bit for bit.
inline double entry(const Eigen::MatrixXd& S, int a, int b, const KernelSpec& spec) {
  if (spec.kind == KernelKind::rbf) {
    if (a == b) return 1.0;
    const double d2 = (S.col(a) - S.col(b)).squaredNorm();
    return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
  }
  return S.col(a).dot(S.col(b));
}

void check_indices(const std::vector<int>& indices, int n) {
  if (indices.empty()) throw InputError("index list is empty");
  int prev = 0;
  for (int idx : indices) {
    if (idx < 1 || idx > n) {
      throw InputError("sample index " + std::to_string(idx) + " out of range [1," +
                       std::to_string(n) + "]");
    }
    if (idx <= prev) {
      throw InputError("sample indices must be distinct and strictly increasing");
    }
    prev = idx;
  }
}

}  // namespace

KernelMatrix build_kernel_matrix(const DataSequence& X, const KernelSpec& spec) {
  spec.validate();
  const int n = X.length();
  if (n < 1) throw InputError("build_kernel_matrix: empty sequence");
  kernel_alloc::record(static_cast<std::size_t>(n) * n);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = entry(X.samples, i, i, spec);
    for (int j = i + 1; j < n; ++j) {
      const double v = entry(X.samples, i, j, spec);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return KernelMatrix{std::move(K), {}};
}

KernelMatrix build_partial_kernel(const DataSequence& X, const std::vector<int>& indices,
                                  const KernelSpec& spec) {
  spec.validate();
  check_indices(indices, X.length());
  const int b = static_cast<int>(indices.size());
  kernel_alloc::record(static_cast<std::size_t>(b) * b);
  Eigen::MatrixXd K(b, b);
  for (int a = 0; a < b; ++a) {
    K(a, a) = entry(X.samples, indices[a] - 1, indices[a] - 1, spec);
    for (int c = a + 1; c < b; ++c) {
      const double v = entry(X.samples, indices[a] - 1, indices[c] - 1, spec);
      K(a, c) = v;
      K(c, a) = v;
    }
  }
  return KernelMatrix{std::move(K), indices};
}

Eigen::MatrixXd kernel_cross_block(const DataSequence& X, const std::vector<int>& rows,
                                   const std::vector<int>& cols, const KernelSpec& spec) {
  spec.validate();
  check_indices(rows, X.length());
  check_indices(cols, X.length());
  kernel_alloc::record(rows.size() * cols.size());
  Eigen::MatrixXd K(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      K(a, c) = entry(X.samples, rows[a] - 1, cols[c] - 1, spec);
    }
  }
  return K;
}

double kernel_trace(const DataSequence& X, const KernelSpec& spec) {
  spec.validate();
  const int n = X.length();
  if (spec.kind == KernelKind::rbf) return static_cast<double>(n);
  double t = 0.0;
  for (int j = 0; j < n; ++j) t += X.samples.col(j).squaredNorm();
  return t;
}

double median_heuristic_sigma(const DataSequence& X, int sample_cap) {
  const int n = X.length();
  if (n < 2) throw InputError("median_heuristic_sigma: need at least 2 samples");
  if (sample_cap < 2) throw InputError("median_heuristic_sigma: sample_cap must be >= 2");

  // Evenly spaced subsample (all samples when n <= cap).
  const int m = std::min(n, sample_cap);
  std::vector<int> picks(m);
  for (int t = 0; t < m; ++t) {
    picks[t] = static_cast<int>(std::llround(static_cast<double>(t) * (n - 1) / (m - 1)));
  }

  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      dists.push_back((X.samples.col(picks[a]) - X.samples.col(picks[b])).norm());
    }
  }
  std::sort(dists.begin(), dists.end());
  const std::size_t half = dists.size() / 2;
  double med = (dists.size() % 2 == 1) ? dists[half] : 0.5 * (dists[half - 1] + dists[half]);
  if (!(med > 0.0)) med = 1.0;  // all sampled points identical
  return med;
}

}  // namespace kcsr
