#include "burst/burstkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burst/kernels.hpp"

namespace burst {

namespace {

void require_unit_rows(const FeatureSet& set) {
  std::vector<double> norms = kernels::row_norms(set.features);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (std::abs(norms[i] - 1.0) > 1e-6) {
      throw Error(ErrorCode::Contract,
                  "row " + std::to_string(i) + " has norm " + std::to_string(norms[i]) +
                      "; normalize the set first");
    }
  }
}

std::vector<double> unit_normalized(std::vector<double> v, const char* what) {
  double sumsq = 0.0;
  for (double x : v) sumsq += x * x;
  double norm = std::sqrt(sumsq);
  if (norm < 1e-300) {
    throw Error(ErrorCode::Degenerate, std::string(what) + " aggregated to a zero vector");
  }
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

void validate(const GramMatrix& k) {
  const std::size_t n = k.size();
  if (k.values.cols() != n) throw Error(ErrorCode::Contract, "gram matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(k.values(i, i) - 1.0) > 1e-9) {
      throw Error(ErrorCode::Contract,
                  "gram diagonal off unit at " + std::to_string(i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(k.values(i, j) - k.values(j, i)) > 1e-12) {
        throw Error(ErrorCode::Contract, "gram matrix asymmetric at (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
      }
    }
  }
}

GramMatrix gram(const FeatureSet& set) {
  require_unit_rows(set);
  return GramMatrix{kernels::gram(set.features)};
}

WeightVector self_similarity(const GramMatrix& k) {
  const std::size_t n = k.size();
  WeightVector s;
  s.kind = WeightKind::self_sim;
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += k.values(i, j);
    // clamp the last-bit excursions so downstream (1 - S) transforms stay in range
    s.values[i] = std::clamp(acc / static_cast<double>(n), -1.0, 1.0);
  }
  return s;
}

namespace detail {

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  Matrix l = a;
  for (std::size_t j = 0; j < n; ++j) {
    double diag = l(j, j);
    for (std::size_t p = 0; p < j; ++p) diag -= l(j, p) * l(j, p);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw Error(ErrorCode::Numeric,
                  "Cholesky factorization failed at pivot " + std::to_string(j) +
                      ": matrix is not positive definite");
    }
    double root = std::sqrt(diag);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = l(i, j);
      for (std::size_t p = 0; p < j; ++p) acc -= l(i, p) * l(j, p);
      l(i, j) = acc / root;
    }
  }
  auto substitute = [&](std::span<const double> rhs) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = rhs[i];
      for (std::size_t p = 0; p < i; ++p) acc -= l(i, p) * y[p];
      y[i] = acc / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
      double acc = y[ii];
      for (std::size_t p = ii + 1; p < n; ++p) acc -= l(p, ii) * x[p];
      x[ii] = acc / l(ii, ii);
    }
    return x;
  };
  std::vector<double> x = substitute(b);
  // one refinement pass keeps the residual at rounding level even for the
  // smallest admissible ridge
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    for (std::size_t j = 0; j < n; ++j) acc -= a(i, j) * x[j];
    residual[i] = acc;
  }
  std::vector<double> correction = substitute(residual);
  for (std::size_t i = 0; i < n; ++i) x[i] += correction[i];
  double max_residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    for (std::size_t j = 0; j < n; ++j) acc -= a(i, j) * x[j];
    max_residual = std::max(max_residual, std::abs(acc));
  }
  if (!(max_residual < 1e-8)) {
    throw Error(ErrorCode::Numeric,
                "solve residual " + std::to_string(max_residual) + " exceeds 1e-8");
  }
  return x;
}

}  // namespace detail

WeightVector gmp_weights(const GramMatrix& k, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::Param, "lambda must be > 0, got " + std::to_string(lambda));
  }
  const std::size_t n = k.size();
  Matrix a = k.values;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += lambda;
  std::vector<double> ones(n, 1.0);
  WeightVector alpha;
  alpha.kind = WeightKind::gmp;
  alpha.values = detail::solve_spd(a, ones);
  return alpha;
}

SetRepresentation gmp_representation(const FeatureSet& set, const WeightVector& alpha) {
  if (alpha.size() != set.size()) {
    throw Error(ErrorCode::Contract, "weight length " + std::to_string(alpha.size()) +
                                         " does not match set size " +
                                         std::to_string(set.size()));
  }
  std::vector<double> f(set.dim(), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double* row = set.features.row(i);
    for (std::size_t j = 0; j < set.dim(); ++j) f[j] += alpha.values[i] * row[j];
  }
  SetRepresentation rep;
  rep.set_id = set.set_id;
  rep.vector = unit_normalized(std::move(f), "gmp representation");
  rep.method = to_string(alpha.kind);
  return rep;
}

WeightVector qagmp_weights(const GramMatrix& k, double lambda, double lambda4,
                           const WeightVector& attention) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::Param, "lambda must be > 0, got " + std::to_string(lambda));
  }
  if (lambda4 < 0.0) {
    throw Error(ErrorCode::Param, "lambda4 must be >= 0, got " + std::to_string(lambda4));
  }
  const std::size_t n = k.size();
  if (attention.size() != n) {
    throw Error(ErrorCode::Contract,
                "attention length " + std::to_string(attention.size()) +
                    " does not match gram size " + std::to_string(n));
  }
  if (attention.kind != WeightKind::attention) {
    throw Error(ErrorCode::Contract, "qagmp requires attention-kind weights");
  }
  validate(attention);
  Matrix a = k.values;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += lambda;
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = 1.0 + lambda4 * attention.values[i];
  WeightVector alpha;
  alpha.kind = WeightKind::qagmp;
  alpha.values = detail::solve_spd(a, rhs);
  return alpha;
}

double burst_degree(const GramMatrix& k) {
  const std::size_t n = k.size();
  double acc = 0.0;
  for (double v : k.values.data()) acc += v;
  return acc / (static_cast<double>(n) * static_cast<double>(n));
}

std::vector<double> power_normalize(std::span<const double> v, double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw Error(ErrorCode::Param, "power must be in (0,1], got " + std::to_string(p));
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::copysign(std::pow(std::abs(v[i]), p), v[i]);
  }
  return unit_normalized(std::move(out), "power normalization");
}

}  // namespace burst
