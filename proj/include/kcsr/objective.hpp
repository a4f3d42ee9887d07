#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "kcsr/kernels.hpp"

namespace kcsr {

struct ObjectiveParams {
  double lambda = 0.0;  // balanced-regularization weight, >= 0
  double alpha = 10.0;  // sigmoid steepness, > 0
  int k = 2;            // number of segments
  int n = 0;            // full-sequence length
  // Absolute diagonal regularizer for GG^T. nullopt selects the default
  // policy 1e-8 * tr(GG^T)/k, which keeps the solve alive when a soft
  // segment row is numerically empty.
  std::optional<double> ridge;
  // Non-empty switches to the multi-sequence (cut-off) parametrization;
  // gamma then has lengths.size()*k entries and n = sum of lengths.
  std::vector<int> block_lengths;
};

struct GradientReport {
  double value = 0.0;
  Eigen::VectorXd grad_gamma;
};

double resolve_ridge(const std::optional<double>& ridge, const Eigen::MatrixXd& G);

// J = Tr(LK) + lambda * ||G*1||^2 with L = I - G^T (GG^T + ridge I)^{-1} G.
// G is k x p against a p x p kernel (full batch or minibatch restriction).
double evaluate_objective(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                          double lambda, double ridge);

// dJ/dG = 2 M^{-1} G K G^T M^{-1} G - 2 M^{-1} G K + 2 lambda (G*1) 1^T
// with M = GG^T + ridge I; the balance term differentiates to twice the
// row-sum outer product.
Eigen::MatrixXd grad_wrt_indicator(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                                   double lambda, double ridge);

// End-to-end objective of the unconstrained parameters: gamma -> beta -> tau
// (at the original positions in `indices`) -> G -> J. Empty `indices` means
// the full range 1..n with a full kernel.
double objective_of_gamma(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                          const std::vector<int>& indices, const ObjectiveParams& params);

// Analytic gradient via the chain rule dJ/dG * dG/dtau * dtau/dbeta * dbeta/dgamma.
GradientReport grad_wrt_gamma(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                              const std::vector<int>& indices, const ObjectiveParams& params);

// Central-difference oracle over objective_of_gamma (full batch).
Eigen::VectorXd finite_diff_grad(const Eigen::VectorXd& gamma, const KernelMatrix& K,
                                 const ObjectiveParams& params, double h);

// dG(i,j)/dtau_j for 1-based row i, implemented with the literal case split
// (the descending branch wins at exact integers).
double indicator_tau_derivative(int i, double tau);

}  // namespace kcsr
