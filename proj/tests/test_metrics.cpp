#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "kcsr/errors.hpp"
#include "kcsr/metrics.hpp"

using namespace kcsr;

namespace {

// Lexicographically-first maximizing permutation by exhaustive search.
std::vector<int> brute_force_assignment(const Eigen::MatrixXd& profit) {
  const int s = static_cast<int>(profit.rows());
  std::vector<int> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_total = -1e300;
  do {
    double total = 0.0;
    for (int r = 0; r < s; ++r) total += profit(r, perm[r]);
    if (total > best_total + 1e-12) {  // strict: first visit wins ties
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> random_labels(int n, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, k);
  std::vector<int> out(n);
  for (int& l : out) l = pick(rng);
  return out;
}

std::vector<int> permute_labels(const std::vector<int>& labels, std::uint64_t seed) {
  const int k = *std::max_element(labels.begin(), labels.end());
  std::vector<int> map(k);
  std::iota(map.begin(), map.end(), 1);
  std::mt19937_64 rng(seed);
  std::shuffle(map.begin(), map.end(), rng);
  std::vector<int> out(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) out[j] = map[labels[j] - 1];
  return out;
}

}  // namespace

TEST_CASE("hungarian on simple profits") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK(hungarian(id) == std::vector<int>{0, 1, 2});

  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(hungarian(swap) == std::vector<int>{1, 0});
}

TEST_CASE("hungarian ties break lexicographically") {
  // All-equal profit: every permutation is optimal, identity is smallest.
  Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(4, 4);
  CHECK(hungarian(flat) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("hungarian pads rectangular input with zeros") {
  Eigen::MatrixXd profit(2, 3);
  profit << 0, 5, 1,
            0, 0, 4;
  const std::vector<int> a = hungarian(profit);
  REQUIRE(a.size() == 3);  // padded square
  CHECK(a[0] == 1);
  CHECK(a[1] == 2);
  CHECK(a[2] == 0);  // padded row takes the leftover column
}

TEST_CASE("hungarian equals brute force on random matrices") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 7.0);
  for (int k = 2; k <= 7; ++k) {
    for (int trial = 0; trial < (k == 6 ? 20 : 8); ++trial) {
      Eigen::MatrixXd profit(k, k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) profit(i, j) = u(rng);
      }
      CHECK(hungarian(profit) == brute_force_assignment(profit));
    }
  }
}

TEST_CASE("hungarian equals brute force on tie-heavy integer matrices") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd profit(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) profit(i, j) = u(rng);
    }
    CHECK(hungarian(profit) == brute_force_assignment(profit));
  }
}

TEST_CASE("accuracy worked examples") {
  CHECK(accuracy({1, 2, 3, 1}, {1, 2, 3, 1}) == 1.0);
  CHECK(accuracy({2, 2, 1, 1}, {1, 1, 2, 2}) == 1.0);  // pure relabeling
  CHECK(accuracy({1, 2, 1, 2}, {1, 1, 2, 2}) == 0.5);
}

TEST_CASE("accuracy validates input") {
  CHECK_THROWS_AS(accuracy({1, 2}, {1, 2, 3}), InputError);
  CHECK_THROWS_AS(accuracy({0, 1}, {1, 1}), InputError);
  CHECK_THROWS_AS(accuracy({}, {}), InputError);
}

TEST_CASE("nmi worked examples") {
  CHECK(nmi({1, 2, 1, 2}, {1, 2, 1, 2}) == doctest::Approx(1.0));
  CHECK(nmi({2, 1, 2, 1}, {1, 2, 1, 2}) == doctest::Approx(1.0));  // relabeled
  CHECK(nmi({1, 2, 1, 2}, {1, 1, 2, 2}) == doctest::Approx(0.0));  // independent
}

TEST_CASE("nmi single-cluster conventions") {
  CHECK(nmi({1, 1, 1}, {1, 1, 1}) == 1.0);      // 0/0 by convention
  CHECK(nmi({1, 1, 1}, {1, 2, 1}) == 0.0);      // one trivial side
  CHECK(nmi({2, 1, 2}, {1, 1, 1}) == 0.0);
}

TEST_CASE("metrics are invariant under label permutations") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<int> pred = random_labels(60, 4, 10 + seed);
    const std::vector<int> truth = random_labels(60, 4, 200 + seed);
    const double acc = accuracy(pred, truth);
    const double mi = nmi(pred, truth);
    const std::vector<int> pred_p = permute_labels(pred, 300 + seed);
    const std::vector<int> truth_p = permute_labels(truth, 400 + seed);
    CHECK(accuracy(pred_p, truth) == doctest::Approx(acc).epsilon(1e-12));
    CHECK(accuracy(pred, truth_p) == doctest::Approx(acc).epsilon(1e-12));
    CHECK(nmi(pred_p, truth) == doctest::Approx(mi).epsilon(1e-12));
    CHECK(nmi(pred, truth_p) == doctest::Approx(mi).epsilon(1e-12));
  }
}

TEST_CASE("accuracy beats uniform and nmi stays in range") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int k = 2 + static_cast<int>(seed % 5);
    const std::vector<int> pred = random_labels(50, k, 500 + seed);
    const std::vector<int> truth = random_labels(50, k, 600 + seed);
    CHECK(accuracy(pred, truth) >= 1.0 / k - 1e-12);
    const double mi = nmi(pred, truth);
    CHECK(mi >= 0.0);
    CHECK(mi <= 1.0 + 1e-12);
  }
}

TEST_CASE("contingency counts total n") {
  const std::vector<int> pred{1, 2, 2, 3};
  const std::vector<int> truth{1, 1, 2, 2};
  const Eigen::MatrixXi C = contingency(pred, truth);
  CHECK(C.rows() == 3);
  CHECK(C.cols() == 2);
  CHECK(C.sum() == 4);
  CHECK(C(0, 0) == 1);
  CHECK(C(1, 0) == 1);
  CHECK(C(1, 1) == 1);
  CHECK(C(2, 1) == 1);
}
