#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kcsr {

// Logistic sigmoid with midpoint beta and steepness alpha, evaluated with the
// two-branch form that never overflows exp().
double sigmoid(double x, double alpha, double beta);

// Midpoints from unconstrained parameters: beta_i = 1 + (n-1) * r_i with r_i
// the cumulative softmax of gamma. Returns k-1 strictly increasing midpoints
// in [1, n]; empty for k = 1.
Eigen::VectorXd betas_from_gamma(const Eigen::VectorXd& gamma, int n);

// tau_j = 1 + sum_i sigmoid(j, alpha, beta_i) for j = 1..n. Non-decreasing.
Eigen::VectorXd tau_from_betas(const Eigen::VectorXd& betas, double alpha, int n);

// Same staircase evaluated only at the given 1-based sample positions.
Eigen::VectorXd tau_at_positions(const Eigen::VectorXd& betas, double alpha,
                                 const std::vector<int>& positions);

// Soft k x n indicator: G(i,j) = max(0, 1 - |tau_j - i|). tau entries may sit
// outside [1,k] by at most 1e-9 (clamped); farther out signals a broken
// parametrization and throws InternalError.
Eigen::MatrixXd indicator_from_tau(const Eigen::VectorXd& tau, int k);

// Multi-sequence midpoints: gamma has m*k entries, one k-block per sequence;
// block p interpolates between 1+sum_{q<p} n_q and sum_{q<=p} n_q via the
// block's cumulative softmax. Returns m*(k-1) midpoints.
Eigen::VectorXd betas_from_gamma_multi(const Eigen::VectorXd& gamma,
                                       const std::vector<int>& lengths);

// Cut-off staircase for concatenated sequences: the trainable sigmoid sum
// plus (1-k)-weighted fixed sigmoids at the junction midpoints, so the label
// resets from k to 1 between consecutive sequences.
Eigen::VectorXd cutoff_tau(const Eigen::VectorXd& betas, double alpha,
                           const std::vector<int>& lengths, int k);
Eigen::VectorXd cutoff_tau_at_positions(const Eigen::VectorXd& betas, double alpha,
                                        const std::vector<int>& lengths, int k,
                                        const std::vector<int>& positions);

// Jacobian d(beta)/d(gamma), shape (k-1) x k. Row i, column c:
//   (n-1) * w_c/S * (1 - C_i/S)   for c <= i
//   -(n-1) * w_c/S * C_i/S        for c >  i
// with w the shifted exponentials, S their sum, C_i the cumulative sum.
Eigen::MatrixXd beta_gamma_jacobian(const Eigen::VectorXd& gamma, int n);

// Block-diagonal multi-sequence Jacobian, shape m(k-1) x mk; block p uses the
// factor (n_p - 1). Junction sigmoids carry no trainable parameters.
Eigen::MatrixXd beta_gamma_jacobian_multi(const Eigen::VectorXd& gamma,
                                          const std::vector<int>& lengths);

}  // namespace kcsr
