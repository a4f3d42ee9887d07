#include "kcsr/sigmoid_param.hpp"

#include <cmath>
#include <numeric>

#include "kcsr/errors.hpp"

namespace kcsr {

double sigmoid(double x, double alpha, double beta) {
  const double z = alpha * (x - beta);
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

struct SoftmaxBlock {
  Eigen::VectorXd w;       // shifted exponentials
  Eigen::VectorXd cumsum;  // running sums of w
  double total = 0.0;
};

SoftmaxBlock softmax_block(const Eigen::Ref<const Eigen::VectorXd>& gamma) {
  SoftmaxBlock blk;
  const double shift = gamma.maxCoeff();
  blk.w = (gamma.array() - shift).exp();
  blk.cumsum.resize(gamma.size());
  double run = 0.0;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    run += blk.w(i);
    blk.cumsum(i) = run;
  }
  blk.total = run;
  return blk;
}

// Midpoints interpolating [lo, hi] through the block's cumulative softmax.
void block_betas(const Eigen::Ref<const Eigen::VectorXd>& gamma, double lo, double hi,
                 Eigen::Ref<Eigen::VectorXd> out) {
  const SoftmaxBlock blk = softmax_block(gamma);
  const int k = static_cast<int>(gamma.size());
  for (int i = 0; i < k - 1; ++i) {
    const double r = blk.cumsum(i) / blk.total;
    out(i) = lo * (1.0 - r) + hi * r;
  }
}

void block_jacobian(const Eigen::Ref<const Eigen::VectorXd>& gamma, double span,
                    Eigen::Ref<Eigen::MatrixXd> out) {
  const SoftmaxBlock blk = softmax_block(gamma);
  const int k = static_cast<int>(gamma.size());
  for (int i = 0; i < k - 1; ++i) {
    const double r = blk.cumsum(i) / blk.total;
    for (int c = 0; c < k; ++c) {
      const double wc = blk.w(c) / blk.total;
      out(i, c) = (c <= i) ? span * wc * (1.0 - r) : -span * wc * r;
    }
  }
}

void check_lengths(const std::vector<int>& lengths) {
  if (lengths.empty()) throw InputError("block lengths must be non-empty");
  for (int np : lengths) {
    if (np < 1) throw InputError("block lengths must be positive");
  }
}

int infer_block_k(Eigen::Index gamma_len, std::size_t m) {
  if (m == 0 || gamma_len % static_cast<Eigen::Index>(m) != 0) {
    throw InputError("gamma length " + std::to_string(gamma_len) +
                     " is not a multiple of the block count " + std::to_string(m));
  }
  return static_cast<int>(gamma_len / static_cast<Eigen::Index>(m));
}

}  // namespace

Eigen::VectorXd betas_from_gamma(const Eigen::VectorXd& gamma, int n) {
  const int k = static_cast<int>(gamma.size());
  if (k < 1) throw InputError("betas_from_gamma: gamma must be non-empty");
  if (n < 1) throw InputError("betas_from_gamma: n must be >= 1");
  Eigen::VectorXd betas(k - 1);
  if (k == 1) return betas;  // single segment, no midpoints
  block_betas(gamma, 1.0, static_cast<double>(n), betas);
  return betas;
}

Eigen::VectorXd tau_from_betas(const Eigen::VectorXd& betas, double alpha, int n) {
  if (!(alpha > 0.0)) throw InputError("tau_from_betas: alpha must be positive");
  Eigen::VectorXd tau(n);
  for (int j = 1; j <= n; ++j) {
    double t = 1.0;
    for (Eigen::Index i = 0; i < betas.size(); ++i) {
      t += sigmoid(static_cast<double>(j), alpha, betas(i));
    }
    tau(j - 1) = t;
  }
  return tau;
}

Eigen::VectorXd tau_at_positions(const Eigen::VectorXd& betas, double alpha,
                                 const std::vector<int>& positions) {
  if (!(alpha > 0.0)) throw InputError("tau_at_positions: alpha must be positive");
  Eigen::VectorXd tau(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    double t = 1.0;
    for (Eigen::Index i = 0; i < betas.size(); ++i) {
      t += sigmoid(static_cast<double>(positions[j]), alpha, betas(i));
    }
    tau(j) = t;
  }
  return tau;
}

Eigen::MatrixXd indicator_from_tau(const Eigen::VectorXd& tau, int k) {
  if (k < 1) throw InputError("indicator_from_tau: k must be >= 1");
  constexpr double kTol = 1e-9;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, tau.size());
  for (Eigen::Index j = 0; j < tau.size(); ++j) {
    double t = tau(j);
    if (t < 1.0 - kTol || t > static_cast<double>(k) + kTol) {
      throw InternalError("indicator_from_tau: tau(" + std::to_string(j + 1) + ") = " +
                          std::to_string(t) + " lies outside [1," + std::to_string(k) + "]");
    }
    t = std::min(std::max(t, 1.0), static_cast<double>(k));
    for (int i = 1; i <= k; ++i) {
      const double v = 1.0 - std::abs(t - static_cast<double>(i));
      if (v > 0.0) G(i - 1, j) = v;
    }
  }
  return G;
}

Eigen::VectorXd betas_from_gamma_multi(const Eigen::VectorXd& gamma,
                                       const std::vector<int>& lengths) {
  check_lengths(lengths);
  const int m = static_cast<int>(lengths.size());
  const int k = infer_block_k(gamma.size(), lengths.size());
  if (k < 1) throw InputError("betas_from_gamma_multi: k must be >= 1");
  Eigen::VectorXd betas(static_cast<Eigen::Index>(m) * (k - 1));
  if (k == 1) return betas;
  long offset = 0;
  for (int p = 0; p < m; ++p) {
    const double lo = 1.0 + static_cast<double>(offset);
    const double hi = static_cast<double>(offset + lengths[p]);
    block_betas(gamma.segment(static_cast<Eigen::Index>(p) * k, k), lo, hi,
                betas.segment(static_cast<Eigen::Index>(p) * (k - 1), k - 1));
    offset += lengths[p];
  }
  return betas;
}

namespace {

double cutoff_tau_value(double j, const Eigen::VectorXd& betas, double alpha,
                        const std::vector<int>& junctions, int k) {
  double t = 1.0;
  for (Eigen::Index i = 0; i < betas.size(); ++i) t += sigmoid(j, alpha, betas(i));
  for (int cum : junctions) {
    t += (1.0 - static_cast<double>(k)) * sigmoid(j, alpha, static_cast<double>(cum) + 0.5);
  }
  return t;
}

std::vector<int> junction_points(const std::vector<int>& lengths) {
  std::vector<int> cums;
  int run = 0;
  for (std::size_t p = 0; p + 1 < lengths.size(); ++p) {
    run += lengths[p];
    cums.push_back(run);
  }
  return cums;
}

}  // namespace

Eigen::VectorXd cutoff_tau(const Eigen::VectorXd& betas, double alpha,
                           const std::vector<int>& lengths, int k) {
  check_lengths(lengths);
  if (!(alpha > 0.0)) throw InputError("cutoff_tau: alpha must be positive");
  const int n = std::accumulate(lengths.begin(), lengths.end(), 0);
  const std::vector<int> junctions = junction_points(lengths);
  Eigen::VectorXd tau(n);
  for (int j = 1; j <= n; ++j) {
    tau(j - 1) = cutoff_tau_value(static_cast<double>(j), betas, alpha, junctions, k);
  }
  return tau;
}

Eigen::VectorXd cutoff_tau_at_positions(const Eigen::VectorXd& betas, double alpha,
                                        const std::vector<int>& lengths, int k,
                                        const std::vector<int>& positions) {
  check_lengths(lengths);
  if (!(alpha > 0.0)) throw InputError("cutoff_tau_at_positions: alpha must be positive");
  const std::vector<int> junctions = junction_points(lengths);
  Eigen::VectorXd tau(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    tau(j) = cutoff_tau_value(static_cast<double>(positions[j]), betas, alpha, junctions, k);
  }
  return tau;
}

Eigen::MatrixXd beta_gamma_jacobian(const Eigen::VectorXd& gamma, int n) {
  const int k = static_cast<int>(gamma.size());
  if (k < 1) throw InputError("beta_gamma_jacobian: gamma must be non-empty");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k - 1, k);
  if (k == 1) return J;
  block_jacobian(gamma, static_cast<double>(n) - 1.0, J);
  return J;
}

Eigen::MatrixXd beta_gamma_jacobian_multi(const Eigen::VectorXd& gamma,
                                          const std::vector<int>& lengths) {
  check_lengths(lengths);
  const int m = static_cast<int>(lengths.size());
  const int k = infer_block_k(gamma.size(), lengths.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * (k - 1),
                                            static_cast<Eigen::Index>(m) * k);
  if (k == 1) return J;
  for (int p = 0; p < m; ++p) {
    block_jacobian(gamma.segment(static_cast<Eigen::Index>(p) * k, k),
                   static_cast<double>(lengths[p]) - 1.0,
                   J.block(static_cast<Eigen::Index>(p) * (k - 1),
                           static_cast<Eigen::Index>(p) * k, k - 1, k));
  }
  return J;
}

}  // namespace kcsr
