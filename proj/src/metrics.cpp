#include "kcsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "kcsr/errors.hpp"

namespace kcsr {

namespace {

// Shortest-augmenting-path min-cost assignment on a square matrix.
double min_assignment_cost(const Eigen::MatrixXd& cost) {
  const int s = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
  std::vector<int> p(s + 1, 0), way(s + 1, 0);
  for (int i = 1; i <= s; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(s + 1, inf);
    std::vector<char> used(s + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= s; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= s; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= s; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

double max_assignment_value(const Eigen::MatrixXd& profit) {
  if (profit.size() == 0) return 0.0;
  return -min_assignment_cost(-profit);
}

void check_labels(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.empty() || truth.empty()) throw InputError("label vectors must be non-empty");
  if (pred.size() != truth.size()) {
    throw InputError("label length mismatch: " + std::to_string(pred.size()) + " vs " +
                     std::to_string(truth.size()));
  }
  for (int l : pred) {
    if (l < 1) throw InputError("labels must be >= 1");
  }
  for (int l : truth) {
    if (l < 1) throw InputError("labels must be >= 1");
  }
}

}  // namespace

std::vector<int> hungarian(const Eigen::MatrixXd& profit) {
  if (profit.size() == 0) throw InputError("hungarian: empty profit matrix");
  const int s = static_cast<int>(std::max(profit.rows(), profit.cols()));
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(s, s);
  P.topLeftCorner(profit.rows(), profit.cols()) = profit;

  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale * s;
  const double best = max_assignment_value(P);

  // Fix rows in order to the smallest column that still attains the optimum;
  // this pins a unique lexicographic representative among ties.
  std::vector<int> result(s, -1);
  std::vector<int> free_cols(s);
  std::iota(free_cols.begin(), free_cols.end(), 0);
  double fixed = 0.0;
  for (int r = 0; r < s; ++r) {
    const int rows_left = s - r;
    for (std::size_t ci = 0; ci < free_cols.size(); ++ci) {
      const int col = free_cols[ci];
      Eigen::MatrixXd rest(rows_left - 1, rows_left - 1);
      for (int rr = 0; rr < rows_left - 1; ++rr) {
        int cc = 0;
        for (std::size_t cj = 0; cj < free_cols.size(); ++cj) {
          if (cj == ci) continue;
          rest(rr, cc++) = P(r + 1 + rr, free_cols[cj]);
        }
      }
      const double attained = fixed + P(r, col) + max_assignment_value(rest);
      if (attained >= best - tol) {
        result[r] = col;
        fixed += P(r, col);
        free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(ci));
        break;
      }
    }
  }
  return result;
}

Eigen::MatrixXi contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_labels(pred, truth);
  const int kp = *std::max_element(pred.begin(), pred.end());
  const int kt = *std::max_element(truth.begin(), truth.end());
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(kp, kt);
  for (std::size_t j = 0; j < pred.size(); ++j) counts(pred[j] - 1, truth[j] - 1) += 1;
  return counts;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Eigen::MatrixXi counts = contingency(pred, truth);
  const std::vector<int> perm = hungarian(counts.cast<double>());
  long matched = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    if (perm[pred[j] - 1] + 1 == truth[j]) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Eigen::MatrixXi counts = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Eigen::VectorXd rows = counts.cast<double>().rowwise().sum();
  const Eigen::VectorXd cols = counts.cast<double>().colwise().sum();

  double mi = 0.0;
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      const double c = counts(i, j);
      if (c <= 0.0) continue;
      const double pij = c / n;
      mi += pij * std::log2(pij * n * n / (rows(i) * cols(j)));
    }
  }

  auto entropy = [n](const Eigen::VectorXd& marginal) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < marginal.size(); ++i) {
      if (marginal(i) > 0.0) {
        const double pi = marginal(i) / n;
        h -= pi * std::log2(pi);
      }
    }
    return h;
  };
  const double hmax = std::max(entropy(rows), entropy(cols));
  if (hmax == 0.0) return 1.0;  // both partitions trivial
  return std::max(0.0, mi / hmax);
}

}  // namespace kcsr
