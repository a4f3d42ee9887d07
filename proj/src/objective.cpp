#include "kcsr/objective.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numeric>
#include <string>

#include "kcsr/errors.hpp"
#include "kcsr/sigmoid_param.hpp"

namespace kcsr {

double resolve_ridge(const std::optional<double>& ridge, const Eigen::MatrixXd& G) {
  if (ridge.has_value()) {
    if (*ridge < 0.0) throw InputError("ridge must be non-negative");
    return *ridge;
  }
  const double tr = G.array().square().sum();  // tr(GG^T)
  return 1e-8 * tr / static_cast<double>(G.rows());
}

namespace {

struct Factorization {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};

Factorization factor_gram(const Eigen::MatrixXd& G, double ridge) {
  Eigen::MatrixXd M = G * G.transpose();
  M.diagonal().array() += ridge;
  Factorization f{Eigen::LDLT<Eigen::MatrixXd>(M)};
  const Eigen::VectorXd d = f.ldlt.vectorD();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (f.ldlt.info() != Eigen::Success || !(dmin > dmax * 1e-14) || !(dmax > 0.0)) {
    // name the emptiest soft segment in the diagnostic
    Eigen::Index worst = 0;
    G.rowwise().sum().minCoeff(&worst);
    throw NumericalError("GG^T is singular (ridge = " + std::to_string(ridge) +
                         "); segment row " + std::to_string(worst + 1) +
                         " is nearly empty");
  }
  return f;
}

}  // namespace

namespace {

void check_shapes(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K, const char* who) {
  if (G.cols() != K.rows() || K.rows() != K.cols()) {
    throw InputError(std::string(who) + ": G is " + std::to_string(G.rows()) + "x" +
                     std::to_string(G.cols()) + " against a " + std::to_string(K.rows()) + "x" +
                     std::to_string(K.cols()) + " kernel");
  }
}

// One factorization serves both the value and the indicator gradient; the
// gradient path reuses A and B instead of recomputing them.
struct ValueAndIndicatorGrad {
  double value = 0.0;
  Eigen::MatrixXd grad;
};

ValueAndIndicatorGrad fused_objective(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                                      double lambda, double ridge, bool want_grad) {
  const Factorization f = factor_gram(G, ridge);
  const Eigen::MatrixXd A = f.ldlt.solve(G);  // M^{-1} G
  const Eigen::MatrixXd B = A * K;            // M^{-1} G K
  const Eigen::VectorXd rowsums = G.rowwise().sum();

  ValueAndIndicatorGrad out;
  out.value = K.trace() - (B.cwiseProduct(G)).sum() + lambda * rowsums.squaredNorm();
  if (want_grad) {
    const Eigen::MatrixXd C = B * G.transpose();  // M^{-1} G K G^T
    out.grad = 2.0 * (C * A) - 2.0 * B;
    out.grad.colwise() += 2.0 * lambda * rowsums;
  }
  return out;
}

}  // namespace

double evaluate_objective(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                          double lambda, double ridge) {
  check_shapes(G, K, "evaluate_objective");
  return fused_objective(G, K, lambda, ridge, false).value;
}

Eigen::MatrixXd grad_wrt_indicator(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                                   double lambda, double ridge) {
  check_shapes(G, K, "grad_wrt_indicator");
  return fused_objective(G, K, lambda, ridge, true).grad;
}

double indicator_tau_derivative(int i, double tau) {
  const double fi = static_cast<double>(i);
  if (tau >= fi && tau <= fi + 1.0) return -1.0;
  if (tau >= fi - 1.0 && tau < fi) return 1.0;
  return 0.0;
}

namespace {

// Shared plumbing between the value and gradient paths: positions, betas,
// tau, and the soft indicator, for both the single-sequence and cut-off
// parametrizations.
struct Chain {
  std::vector<int> positions;
  Eigen::VectorXd betas;
  Eigen::VectorXd tau;
  Eigen::MatrixXd G;
};

std::vector<int> resolve_positions(const std::vector<int>& indices, int n) {
  if (!indices.empty()) return indices;
  std::vector<int> full(n);
  std::iota(full.begin(), full.end(), 1);
  return full;
}

void check_chain_inputs(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                        const std::vector<int>& indices, const ObjectiveParams& params) {
  if (params.k < 1) throw InputError("objective: k must be >= 1");
  if (params.n < 1) throw InputError("objective: n must be >= 1");
  if (!(params.alpha > 0.0)) throw InputError("objective: alpha must be positive");
  if (params.lambda < 0.0) throw InputError("objective: lambda must be non-negative");
  if (!params.block_lengths.empty()) {
    const int total = std::accumulate(params.block_lengths.begin(), params.block_lengths.end(), 0);
    if (total != params.n) throw InputError("objective: block lengths do not sum to n");
    const auto m = static_cast<Eigen::Index>(params.block_lengths.size());
    if (gamma.size() != m * params.k) {
      throw InputError("objective: gamma length must be m*k for the multi-sequence chain");
    }
  } else if (gamma.size() != params.k) {
    throw InputError("objective: gamma length " + std::to_string(gamma.size()) +
                     " does not match k = " + std::to_string(params.k));
  }
  int prev = 0;
  for (int idx : indices) {
    if (idx <= prev) throw InputError("objective: indices must be strictly increasing");
    if (idx > params.n) throw InputError("objective: index exceeds sequence length");
    prev = idx;
  }
  const std::size_t p = indices.empty() ? static_cast<std::size_t>(params.n) : indices.size();
  if (static_cast<std::size_t>(K.size()) != p) {
    throw InputError("objective: kernel size " + std::to_string(K.size()) +
                     " does not match " + std::to_string(p) + " positions");
  }
}

Chain build_chain(const Eigen::VectorXd& gamma, const std::vector<int>& indices,
                  const ObjectiveParams& params) {
  Chain ch;
  ch.positions = resolve_positions(indices, params.n);
  if (params.block_lengths.empty()) {
    ch.betas = betas_from_gamma(gamma, params.n);
    ch.tau = tau_at_positions(ch.betas, params.alpha, ch.positions);
  } else {
    ch.betas = betas_from_gamma_multi(gamma, params.block_lengths);
    ch.tau = cutoff_tau_at_positions(ch.betas, params.alpha, params.block_lengths, params.k,
                                     ch.positions);
  }
  ch.G = indicator_from_tau(ch.tau, params.k);
  return ch;
}

}  // namespace

double objective_of_gamma(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                          const std::vector<int>& indices, const ObjectiveParams& params) {
  check_chain_inputs(gamma, K, indices, params);
  const Chain ch = build_chain(gamma, indices, params);
  const double ridge = resolve_ridge(params.ridge, ch.G);
  return evaluate_objective(ch.G, K.values, params.lambda, ridge);
}

GradientReport grad_wrt_gamma(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                              const std::vector<int>& indices, const ObjectiveParams& params) {
  check_chain_inputs(gamma, K, indices, params);
  const Chain ch = build_chain(gamma, indices, params);
  const double ridge = resolve_ridge(params.ridge, ch.G);

  check_shapes(ch.G, K.values, "grad_wrt_gamma");
  const ValueAndIndicatorGrad fused = fused_objective(ch.G, K.values, params.lambda, ridge, true);
  GradientReport report;
  report.value = fused.value;
  const Eigen::MatrixXd& dJdG = fused.grad;

  // dJ/dtau_j = sum_i dJ/dG(i,j) * dG(i,j)/dtau_j (at most two live rows).
  const auto p = static_cast<Eigen::Index>(ch.positions.size());
  Eigen::VectorXd dJdTau(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double acc = 0.0;
    for (int i = 1; i <= params.k; ++i) {
      const double d = indicator_tau_derivative(i, ch.tau(j));
      if (d != 0.0) acc += dJdG(i - 1, j) * d;
    }
    dJdTau(j) = acc;
  }

  // dJ/dbeta_i = sum_j dJ/dtau_j * (-alpha s (1-s)).
  Eigen::VectorXd dJdBeta(ch.betas.size());
  for (Eigen::Index i = 0; i < ch.betas.size(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double s = sigmoid(static_cast<double>(ch.positions[j]), params.alpha, ch.betas(i));
      acc += dJdTau(j) * (-params.alpha * s * (1.0 - s));
    }
    dJdBeta(i) = acc;
  }

  const Eigen::MatrixXd jac = params.block_lengths.empty()
                                  ? beta_gamma_jacobian(gamma, params.n)
                                  : beta_gamma_jacobian_multi(gamma, params.block_lengths);
  report.grad_gamma = jac.transpose() * dJdBeta;
  return report;
}

Eigen::VectorXd finite_diff_grad(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                                 const ObjectiveParams& params, double h) {
  if (!(h > 0.0)) throw InputError("finite_diff_grad: h must be positive");
  Eigen::VectorXd grad(gamma.size());
  Eigen::VectorXd probe = gamma;
  for (Eigen::Index c = 0; c < gamma.size(); ++c) {
    probe(c) = gamma(c) + h;
    const double plus = objective_of_gamma(probe, K, {}, params);
    probe(c) = gamma(c) - h;
    const double minus = objective_of_gamma(probe, K, {}, params);
    probe(c) = gamma(c);
    grad(c) = (plus - minus) / (2.0 * h);
  }
  return grad;
}

}  // namespace kcsr
