#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "kcsr/objective.hpp"

namespace kcsr {

struct GDConfig {
  double epsilon = 1e-6;      // |dJ| convergence tolerance
  double armijo_c = 1e-4;     // sufficient-decrease constant, in (0,1)
  double backtrack = 0.5;     // step shrink factor, in (0,1)
  double initial_step = 1.0;
  int max_iters = 500;
};

struct SGDConfig {
  int iterations_T = 0;       // use default_sgd_iters for the 50-pass default
  int batch_b = 256;
  double eta0 = 1.0;
  double rho = 0.999;         // geometric step decay, in (0,1]
  double momentum_mu = 0.9;   // in [0,1)
  std::uint64_t seed = 0;
};

struct OptResult {
  Eigen::VectorXd gamma_star;
  std::vector<std::pair<int, double>> objective_trace;       // (iteration, J)
  std::vector<std::pair<int, double>> full_objective_trace;  // SGD full-batch checkpoints
  bool converged = false;
  int iterations_used = 0;
};

// Full-batch problem: objective value, and value+gradient, at a point.
struct GradProblem {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<GradientReport(const Eigen::VectorXd&)> value_and_grad;
};

// Stochastic problem: minibatch value+gradient given sorted 1-based sample
// positions. full_value is optional and only used for trace checkpoints.
struct StochasticProblem {
  std::function<GradientReport(const Eigen::VectorXd&, const std::vector<int>&)> minibatch_grad;
  std::function<double(const Eigen::VectorXd&)> full_value;
};

// Smallest T with T*b >= 50n: at least 50 passes through the sequence.
int default_sgd_iters(int n, int b);

// Backtracking search for the largest eta in {initial_step * backtrack^m}
// with J(gamma - eta*grad) <= J(gamma) - c*eta*||grad||^2; returns the
// smallest trial step after 60 shrinks without success.
double armijo_line_search(const std::function<double(const Eigen::VectorXd&)>& value,
                          const Eigen::VectorXd& gamma, const Eigen::VectorXd& grad,
                          const GDConfig& config);

OptResult run_gd(const GradProblem& problem, const Eigen::VectorXd& gamma0,
                 const GDConfig& config);

OptResult run_sgd(const StochasticProblem& problem, const Eigen::VectorXd& gamma0,
                  int n, const SGDConfig& config);

// b distinct positions drawn uniformly from 1..n, ascending. Selection
// sampling with an unbiased bounded-uniform draw, so a fixed seed gives the
// same batch on every standard library.
std::vector<int> sample_sorted_indices(std::mt19937_64& rng, int n, int b);

}  // namespace kcsr
