#include "kcsr/optimizers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kcsr/errors.hpp"

namespace kcsr {

int default_sgd_iters(int n, int b) {
  if (n < 1 || b < 1) throw InputError("default_sgd_iters: n and b must be positive");
  return static_cast<int>((50LL * n + b - 1) / b);
}

namespace {

void check_gd_config(const GDConfig& c) {
  if (!(c.epsilon > 0.0)) throw InputError("GDConfig: epsilon must be positive");
  if (!(c.armijo_c > 0.0 && c.armijo_c < 1.0)) throw InputError("GDConfig: armijo_c in (0,1)");
  if (!(c.backtrack > 0.0 && c.backtrack < 1.0)) throw InputError("GDConfig: backtrack in (0,1)");
  if (!(c.initial_step > 0.0)) throw InputError("GDConfig: initial_step must be positive");
  if (c.max_iters < 1) throw InputError("GDConfig: max_iters must be positive");
}

void check_sgd_config(const SGDConfig& c, int n) {
  if (c.iterations_T < 1) throw InputError("SGDConfig: iterations_T must be positive");
  if (c.batch_b < 1 || c.batch_b > n) throw InputError("SGDConfig: batch_b must be in [1,n]");
  if (!(c.eta0 > 0.0)) throw InputError("SGDConfig: eta0 must be positive");
  if (!(c.rho > 0.0 && c.rho <= 1.0)) throw InputError("SGDConfig: rho in (0,1]");
  if (!(c.momentum_mu >= 0.0 && c.momentum_mu < 1.0)) {
    throw InputError("SGDConfig: momentum_mu in [0,1)");
  }
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t m) {
  // Unbiased bounded draw via rejection; avoids distribution objects whose
  // output differs across standard libraries.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % m;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % m;
}

}  // namespace

std::vector<int> sample_sorted_indices(std::mt19937_64& rng, int n, int b) {
  if (b < 1 || b > n) throw InputError("sample_sorted_indices: b must be in [1,n]");
  std::vector<int> out;
  out.reserve(b);
  int need = b;
  for (int j = 1; j <= n && need > 0; ++j) {
    const auto remaining = static_cast<std::uint64_t>(n - j + 1);
    if (uniform_below(rng, remaining) < static_cast<std::uint64_t>(need)) {
      out.push_back(j);
      --need;
    }
  }
  return out;
}

double armijo_line_search(const std::function<double(const Eigen::VectorXd&)>& value,
                          const Eigen::VectorXd& gamma, const Eigen::VectorXd& grad,
                          const GDConfig& config) {
  check_gd_config(config);
  const double j0 = value(gamma);
  const double slope = grad.squaredNorm();
  double eta = config.initial_step;
  for (int m = 0; m <= 60; ++m) {
    const double trial = value(gamma - eta * grad);
    if (trial <= j0 - config.armijo_c * eta * slope) return eta;
    if (m < 60) eta *= config.backtrack;
  }
  return eta;  // floor step after 60 shrinks
}

OptResult run_gd(const GradProblem& problem, const Eigen::VectorXd& gamma0,
                 const GDConfig& config) {
  check_gd_config(config);
  if (!gamma0.allFinite()) throw InputError("run_gd: gamma0 must be finite");

  OptResult result;
  Eigen::VectorXd gamma = gamma0;
  GradientReport rep = problem.value_and_grad(gamma);
  if (!std::isfinite(rep.value) || !rep.grad_gamma.allFinite()) {
    throw NumericalError("run_gd: non-finite objective or gradient at the initial point");
  }
  result.objective_trace.emplace_back(0, rep.value);

  for (int t = 1; t <= config.max_iters; ++t) {
    result.iterations_used = t;
    if (rep.grad_gamma.norm() == 0.0) {  // stationary point
      result.converged = true;
      break;
    }
    const double eta = armijo_line_search(problem.value, gamma, rep.grad_gamma, config);
    const Eigen::VectorXd candidate = gamma - eta * rep.grad_gamma;
    const GradientReport next = problem.value_and_grad(candidate);
    if (!std::isfinite(next.value) || !next.grad_gamma.allFinite()) {
      throw NumericalError("run_gd: non-finite state at iteration " + std::to_string(t) +
                           " (last valid J = " + std::to_string(rep.value) + ")");
    }
    if (next.value > rep.value) {
      // Even the floor step could not decrease J; stay at the last iterate.
      result.converged = true;
      break;
    }
    const double delta = rep.value - next.value;
    gamma = candidate;
    rep = next;
    result.objective_trace.emplace_back(t, rep.value);
    if (delta <= config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.gamma_star = gamma;
  return result;
}

OptResult run_sgd(const StochasticProblem& problem, const Eigen::VectorXd& gamma0,
                  int n, const SGDConfig& config) {
  check_sgd_config(config, n);
  if (!gamma0.allFinite()) throw InputError("run_sgd: gamma0 must be finite");

  OptResult result;
  Eigen::VectorXd gamma = gamma0;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(gamma.size());
  std::mt19937_64 rng(config.seed);

  const int T = config.iterations_T;
  const int full_every = (T + 19) / 20;
  const bool track_full = static_cast<bool>(problem.full_value) && n <= 5000;

  double eta = config.eta0;
  for (int t = 1; t <= T; ++t) {
    eta *= config.rho;  // eta0 * rho^t
    const std::vector<int> batch = sample_sorted_indices(rng, n, config.batch_b);
    const GradientReport rep = problem.minibatch_grad(gamma, batch);
    if (!std::isfinite(rep.value) || !rep.grad_gamma.allFinite()) {
      throw NumericalError("run_sgd: non-finite update at t = " + std::to_string(t) +
                           ", eta = " + std::to_string(eta) +
                           ", |grad| = " + std::to_string(rep.grad_gamma.norm()));
    }
    delta = config.momentum_mu * delta - eta * rep.grad_gamma;
    gamma += delta;
    if (!gamma.allFinite()) {
      throw NumericalError("run_sgd: non-finite iterate at t = " + std::to_string(t) +
                           ", eta = " + std::to_string(eta) +
                           ", |grad| = " + std::to_string(rep.grad_gamma.norm()));
    }
    result.objective_trace.emplace_back(t, rep.value);
    if (track_full && (t % full_every == 0 || t == T)) {
      result.full_objective_trace.emplace_back(t, problem.full_value(gamma));
    }
  }
  result.gamma_star = gamma;
  result.converged = true;
  result.iterations_used = T;
  return result;
}

}  // namespace kcsr
