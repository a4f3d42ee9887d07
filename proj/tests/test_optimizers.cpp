#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "kcsr/data_io.hpp"
#include "kcsr/dp_oracle.hpp"
#include "kcsr/errors.hpp"
#include "kcsr/objective.hpp"
#include "kcsr/optimizers.hpp"
#include "kcsr/sigmoid_param.hpp"
#include "test_support.hpp"

using namespace kcsr;
using test_support::random_gamma;

namespace {

// Full-batch KCSR problem over a prebuilt kernel.
GradProblem kcsr_problem(const KernelMatrix& K, const ObjectiveParams& params) {
  GradProblem p;
  p.value = [&K, &params](const Eigen::VectorXd& g) { return objective_of_gamma(g, K, {}, params); };
  p.value_and_grad = [&K, &params](const Eigen::VectorXd& g) {
    return grad_wrt_gamma(g, K, {}, params);
  };
  return p;
}

}  // namespace

TEST_CASE("default_sgd_iters covers fifty passes") {
  for (int n : {100, 801, 70000}) {
    for (int b : {64, 256, 512}) {
      if (b > n) continue;
      const int T = default_sgd_iters(n, b);
      CHECK(static_cast<long long>(T) * b >= 50LL * n);
      CHECK(static_cast<long long>(T - 1) * b < 50LL * n);
    }
  }
}

TEST_CASE("armijo accepts the unit step on a quadratic") {
  GDConfig cfg;
  const auto value = [](const Eigen::VectorXd& g) { return 0.5 * g.squaredNorm(); };
  Eigen::VectorXd gamma(2);
  gamma << 3.0, -4.0;
  const double eta = armijo_line_search(value, gamma, gamma, cfg);
  CHECK(eta == 1.0);
}

TEST_CASE("armijo backtracks to the floor on a constant objective") {
  GDConfig cfg;
  const auto value = [](const Eigen::VectorXd&) { return 1.0; };
  Eigen::VectorXd gamma = Eigen::VectorXd::Ones(3);
  const double eta = armijo_line_search(value, gamma, gamma, cfg);
  CHECK(eta == doctest::Approx(std::pow(0.5, 60)).epsilon(1e-12));
}

TEST_CASE("armijo step satisfies the sufficient-decrease inequality post hoc") {
  const int n = 50, k = 3;
  const DataSequence X = test_support::random_sequence(n, 2, 41);
  const KernelMatrix K = build_kernel_matrix(X, {KernelKind::rbf, 1.0});
  ObjectiveParams params;
  params.lambda = 0.01;
  params.k = k;
  params.n = n;
  const GradProblem problem = kcsr_problem(K, params);
  GDConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::VectorXd gamma = random_gamma(k, 900 + seed, 1.0);
    const GradientReport rep = problem.value_and_grad(gamma);
    const double eta = armijo_line_search(problem.value, gamma, rep.grad_gamma, cfg);
    const double lhs = problem.value(gamma - eta * rep.grad_gamma);
    CHECK(lhs <= rep.value - cfg.armijo_c * eta * rep.grad_gamma.squaredNorm() + 1e-12);
  }
}

TEST_CASE("gd terminates immediately at a stationary point") {
  GradProblem flat;
  flat.value = [](const Eigen::VectorXd&) { return 2.0; };
  flat.value_and_grad = [](const Eigen::VectorXd& g) {
    return GradientReport{2.0, Eigen::VectorXd::Zero(g.size())};
  };
  const OptResult res = run_gd(flat, Eigen::VectorXd::Ones(3), GDConfig{});
  CHECK(res.converged);
  CHECK(res.iterations_used == 1);
  CHECK(res.objective_trace.size() == 1);
}

TEST_CASE("gd recovers the boundary of a two-blob toy within one sample") {
  // Two well-separated level segments; truth boundary after sample 20.
  const int n = 40, k = 2;
  const DataSequence X = generate_gaussian_segments({20, 20}, 5.0, 0.3, 7, 1);
  const KernelMatrix K = build_kernel_matrix(X, {KernelKind::rbf, 1.0});
  ObjectiveParams params;
  params.lambda = 1e-4;
  params.k = k;
  params.n = n;
  const GradProblem problem = kcsr_problem(K, params);
  GDConfig cfg;
  cfg.max_iters = 400;
  const OptResult res = run_gd(problem, Eigen::VectorXd::Zero(k), cfg);
  const Eigen::VectorXd beta = betas_from_gamma(res.gamma_star, n);
  REQUIRE(beta.size() == 1);
  CHECK(std::abs(beta(0) - 20.5) <= 1.0);

  const DPSolution dp = dp_segment(K, k);
  CHECK(std::abs(dp.boundaries[0] - 20) <= 1);  // oracle agrees on 20/21
}

TEST_CASE("gd trace is non-increasing and epsilon-terminated") {
  const int n = 60, k = 3;
  const DataSequence X = generate_gaussian_segments({15, 25, 20}, 4.0, 0.5, 11, 1);
  const KernelMatrix K = build_kernel_matrix(X, {KernelKind::rbf, 2.0});
  ObjectiveParams params;
  params.lambda = 0.001;
  params.k = k;
  params.n = n;
  GDConfig cfg;
  cfg.max_iters = 300;
  const OptResult res = run_gd(kcsr_problem(K, params), Eigen::VectorXd::Zero(k), cfg);
  REQUIRE(res.objective_trace.size() >= 2);
  for (std::size_t t = 1; t < res.objective_trace.size(); ++t) {
    CHECK(res.objective_trace[t].second <= res.objective_trace[t - 1].second);
  }
  if (res.converged && res.iterations_used < cfg.max_iters) {
    const auto last = res.objective_trace.size() - 1;
    const double dj = res.objective_trace[last - 1].second - res.objective_trace[last].second;
    CHECK(dj <= cfg.epsilon + 1e-15);
  }
}

TEST_CASE("gd surfaces non-finite state as a numerical error") {
  GradProblem bad;
  bad.value = [](const Eigen::VectorXd&) { return std::nan(""); };
  bad.value_and_grad = [](const Eigen::VectorXd& g) {
    return GradientReport{std::nan(""), Eigen::VectorXd::Zero(g.size())};
  };
  CHECK_THROWS_AS(run_gd(bad, Eigen::VectorXd::Zero(2), GDConfig{}), NumericalError);
}

TEST_CASE("sample_sorted_indices draws distinct ascending positions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> idx = sample_sorted_indices(rng, 100, 17);
    REQUIRE(idx.size() == 17);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      CHECK(idx[i] >= 1);
      CHECK(idx[i] <= 100);
      if (i) CHECK(idx[i] > idx[i - 1]);
    }
  }
  const std::vector<int> all = sample_sorted_indices(rng, 12, 12);
  std::vector<int> expect(12);
  std::iota(expect.begin(), expect.end(), 1);
  CHECK(all == expect);
  CHECK_THROWS_AS(sample_sorted_indices(rng, 5, 6), InputError);
}

TEST_CASE("sgd with b = n, mu = 0, rho = 1 equals fixed-step gradient descent") {
  const int n = 30, k = 3;
  const DataSequence X = test_support::random_sequence(n, 2, 19);
  const KernelSpec spec{KernelKind::rbf, 1.0};
  const KernelMatrix K = build_kernel_matrix(X, spec);
  ObjectiveParams params;
  params.lambda = 0.01;
  params.k = k;
  params.n = n;

  StochasticProblem sp;
  sp.minibatch_grad = [&X, &spec, &params](const Eigen::VectorXd& g,
                                           const std::vector<int>& batch) {
    const KernelMatrix Kb = build_partial_kernel(X, batch, spec);
    return grad_wrt_gamma(g, Kb, batch, params);
  };

  SGDConfig cfg;
  cfg.iterations_T = 4;
  cfg.batch_b = n;
  cfg.eta0 = 0.05;
  cfg.rho = 1.0;
  cfg.momentum_mu = 0.0;
  cfg.seed = 1;
  const OptResult res = run_sgd(sp, Eigen::VectorXd::Zero(k), n, cfg);

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(k);
  for (int t = 0; t < 4; ++t) {
    const GradientReport rep = grad_wrt_gamma(gamma, K, {}, params);
    gamma -= cfg.eta0 * rep.grad_gamma;
  }
  CHECK((res.gamma_star - gamma).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sgd is bit-reproducible for a fixed seed") {
  const int n = 120, k = 3;
  const DataSequence X = generate_gaussian_segments({40, 40, 40}, 4.0, 0.5, 23, 1);
  const KernelSpec spec{KernelKind::rbf, 1.5};
  ObjectiveParams params;
  params.lambda = 1e-3;
  params.k = k;
  params.n = n;

  StochasticProblem sp;
  sp.minibatch_grad = [&X, &spec, &params](const Eigen::VectorXd& g,
                                           const std::vector<int>& batch) {
    const KernelMatrix Kb = build_partial_kernel(X, batch, spec);
    return grad_wrt_gamma(g, Kb, batch, params);
  };

  SGDConfig cfg;
  cfg.iterations_T = 60;
  cfg.batch_b = 32;
  cfg.seed = 99;
  const OptResult a = run_sgd(sp, Eigen::VectorXd::Zero(k), n, cfg);
  const OptResult b = run_sgd(sp, Eigen::VectorXd::Zero(k), n, cfg);
  CHECK((a.gamma_star - b.gamma_star).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  for (std::size_t t = 0; t < a.objective_trace.size(); ++t) {
    CHECK(a.objective_trace[t].second == b.objective_trace[t].second);
  }

  SGDConfig other = cfg;
  other.seed = 100;
  const OptResult c = run_sgd(sp, Eigen::VectorXd::Zero(k), n, other);
  CHECK((a.gamma_star - c.gamma_star).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sgd records full-objective checkpoints on small runs") {
  const int n = 90, k = 2;
  const DataSequence X = generate_gaussian_segments({45, 45}, 4.0, 0.5, 31, 1);
  const KernelSpec spec{KernelKind::rbf, 1.0};
  ObjectiveParams params;
  params.lambda = 1e-3;
  params.k = k;
  params.n = n;

  StochasticProblem sp;
  sp.minibatch_grad = [&X, &spec, &params](const Eigen::VectorXd& g,
                                           const std::vector<int>& batch) {
    const KernelMatrix Kb = build_partial_kernel(X, batch, spec);
    return grad_wrt_gamma(g, Kb, batch, params);
  };
  const KernelMatrix K = build_kernel_matrix(X, spec);
  sp.full_value = [&K, &params](const Eigen::VectorXd& g) {
    return objective_of_gamma(g, K, {}, params);
  };

  SGDConfig cfg;
  cfg.iterations_T = 55;
  cfg.batch_b = 30;
  cfg.seed = 3;
  const OptResult res = run_sgd(sp, Eigen::VectorXd::Zero(k), n, cfg);
  CHECK(res.objective_trace.size() == 55);
  // every ceil(T/20) = 3 iterations, plus the final one
  CHECK(res.full_objective_trace.size() == 19);
  CHECK(res.full_objective_trace.back().first == 55);
}

TEST_CASE("averaged minibatch gradients align with the full gradient") {
  // Desk-scale circles; fixed gamma, 500 sampled minibatch gradients.
  const DataSequence X = generate_circles({200, 200, 200, 200}, {1, 2, 3, 4}, 0.1, 3);
  const int n = X.length();
  const int k = 4;
  const double sigma = median_heuristic_sigma(X);
  const KernelSpec spec{KernelKind::rbf, sigma};
  const KernelMatrix K = build_kernel_matrix(X, spec);
  ObjectiveParams params;
  params.lambda = 1e-2 * kernel_trace(X, spec) * k / (static_cast<double>(n) * n);
  params.k = k;
  params.n = n;

  const Eigen::VectorXd gamma = random_gamma(k, 17, 0.5);
  const Eigen::VectorXd full = grad_wrt_gamma(gamma, K, {}, params).grad_gamma;

  std::mt19937_64 rng(2024);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<int> batch = sample_sorted_indices(rng, n, 256);
    const KernelMatrix Kb = build_partial_kernel(X, batch, spec);
    mean += grad_wrt_gamma(gamma, Kb, batch, params).grad_gamma;
  }
  mean /= 500.0;
  const double cosine = mean.dot(full) / (mean.norm() * full.norm());
  CHECK(cosine > 0.9);
}
