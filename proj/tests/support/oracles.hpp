#pragma once

// Independent oracles for the test suites. Linear solves go through Eigen
// (a different code path from the library's hand-rolled Cholesky); counting
// oracles are deliberately naive brute force.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "burst/rng.hpp"
#include "burst/types.hpp"

namespace oracle {

inline Eigen::MatrixXd to_eigen(const burst::Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    }
  }
  return out;
}

// General-purpose dense solve (partial-pivot LU), independent of the
// library's SPD path.
inline std::vector<double> lu_solve(const burst::Matrix& a, const std::vector<double>& b) {
  Eigen::MatrixXd ea = to_eigen(a);
  Eigen::VectorXd eb = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = ea.partialPivLu().solve(eb);
  return {x.data(), x.data() + x.size()};
}

// Primal ridge route: F = argmin ||X F - 1||^2 + lambda ||F||^2, solved as
// the d x d normal equations with Eigen.
inline std::vector<double> ridge_primal(const burst::Matrix& x, double lambda) {
  Eigen::MatrixXd ex = to_eigen(x);
  Eigen::MatrixXd lhs =
      ex.transpose() * ex +
      lambda * Eigen::MatrixXd::Identity(ex.cols(), ex.cols());
  Eigen::VectorXd rhs = ex.transpose() * Eigen::VectorXd::Ones(ex.rows());
  Eigen::VectorXd f = lhs.ldlt().solve(rhs);
  return {f.data(), f.data() + f.size()};
}

// Exact TAR/FAR at a threshold by full recount with >= semantics.
struct TarFar {
  double tar = 0.0;
  double far = 0.0;
};

inline TarFar count_at_threshold(const std::vector<std::pair<double, bool>>& scores,
                                 double threshold) {
  std::size_t tp = 0, fp = 0, pos = 0, neg = 0;
  for (const auto& [score, positive] : scores) {
    if (positive) {
      ++pos;
      if (score >= threshold) ++tp;
    } else {
      ++neg;
      if (score >= threshold) ++fp;
    }
  }
  return {static_cast<double>(tp) / static_cast<double>(pos),
          static_cast<double>(fp) / static_cast<double>(neg)};
}

// Best TAR subject to FAR <= target by scanning every candidate threshold.
inline double tar_at_far_scan(const std::vector<std::pair<double, bool>>& scores,
                              double far_target) {
  double best = 0.0;
  for (const auto& [threshold, positive] : scores) {
    (void)positive;
    TarFar tf = count_at_threshold(scores, threshold);
    if (tf.far <= far_target) best = std::max(best, tf.tar);
  }
  return best;
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<std::uint32_t>& a,
                                  const std::vector<std::uint32_t>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> cells;
  std::map<std::uint32_t, std::size_t> row_sums, col_sums;
  for (std::size_t i = 0; i < n; ++i) {
    ++cells[{a[i], b[i]}];
    ++row_sums[a[i]];
    ++col_sums[b[i]];
  }
  auto choose2 = [](std::size_t m) {
    return static_cast<double>(m) * static_cast<double>(m > 0 ? m - 1 : 0) / 2.0;
  };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : cells) sum_cells += choose2(count);
  for (const auto& [key, count] : row_sums) sum_rows += choose2(count);
  for (const auto& [key, count] : col_sums) sum_cols += choose2(count);
  double total = choose2(n);
  double expected = sum_rows * sum_cols / total;
  double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both labelings trivial
  return (sum_cells - expected) / (max_index - expected);
}

// Spearman rank correlation (average ranks for ties).
inline double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  std::vector<double> ra = ranks(a), rb = ranks(b);
  double mean_a = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  double mean_b = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean_a) * (rb[i] - mean_b);
    var_a += (ra[i] - mean_a) * (ra[i] - mean_a);
    var_b += (rb[i] - mean_b) * (rb[i] - mean_b);
  }
  return cov / std::sqrt(var_a * var_b);
}

// Random unit-row feature set for property tests.
inline burst::FeatureSet random_unit_set(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  burst::FeatureSet set;
  set.features = burst::Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = set.features.row(i);
    double sumsq = 0.0;
    do {
      burst::gaussian_fill(rng, row, d);
      sumsq = 0.0;
      for (std::size_t j = 0; j < d; ++j) sumsq += row[j] * row[j];
    } while (sumsq < 1e-12);
    double inv = 1.0 / std::sqrt(sumsq);
    for (std::size_t j = 0; j < d; ++j) row[j] *= inv;
  }
  return set;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace oracle
