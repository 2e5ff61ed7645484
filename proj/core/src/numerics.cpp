#include "cbcc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cbcc/errors.hpp"

namespace cbcc {

SpdMatrix::SpdMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(values_.rows()),
                            static_cast<std::size_t>(values_.cols()),
                            "SpdMatrix must be square");
  }
  if (values_.rows() == 0) {
    throw InvalidParameter("SpdMatrix must have dim >= 1");
  }
  const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
  const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTolerance * scale)) {
    throw InvalidParameter("SpdMatrix is not symmetric (max asymmetry " +
                           std::to_string(asym) + ")");
  }
}

SpdMatrix SpdMatrix::identity(std::size_t dim) {
  if (dim == 0) throw InvalidParameter("SpdMatrix must have dim >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  return SpdMatrix(Matrix::Identity(n, n), Unchecked{});
}

CholeskyFactor CholeskyFactor::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return CholeskyFactor(Matrix::Identity(n, n));
}

CholeskyFactor CholeskyFactor::from_lower(Matrix lower) {
  if (lower.rows() != lower.cols()) {
    throw DimensionMismatch(static_cast<std::size_t>(lower.rows()),
                            static_cast<std::size_t>(lower.cols()),
                            "Cholesky factor must be square");
  }
  for (Eigen::Index j = 0; j < lower.cols(); ++j) {
    if (!(lower(j, j) > 0.0)) {
      throw InvalidParameter("Cholesky factor needs a strictly positive diagonal");
    }
    for (Eigen::Index i = 0; i < j; ++i) {
      if (lower(i, j) != 0.0) {
        throw InvalidParameter("Cholesky factor must be lower triangular");
      }
    }
  }
  return CholeskyFactor(std::move(lower));
}

void CholeskyFactor::rank_one_update(const Vector& c) {
  const Eigen::Index n = lower_.rows();
  if (c.size() != n) {
    throw DimensionMismatch(static_cast<std::size_t>(n), static_cast<std::size_t>(c.size()));
  }
  Vector x = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (x(k) == 0.0) continue;
    const double diag = lower_(k, k);
    const double r = std::hypot(diag, x(k));
    const double cos = r / diag;
    const double sin = x(k) / diag;
    lower_(k, k) = r;
    const Eigen::Index m = n - k - 1;
    if (m > 0) {
      auto col = lower_.col(k).tail(m);
      auto rest = x.tail(m);
      col = (col + sin * rest) / cos;
      rest = cos * rest - sin * col;
    }
  }
}

CholeskyFactor cholesky(const SpdMatrix& a) {
  const Matrix& m = a.matrix();
  const Eigen::Index n = m.rows();
  Matrix lower = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    if (j > 0) pivot -= lower.row(j).head(j).squaredNorm();
    if (!(pivot > kPivotTolerance)) {
      throw NotPositiveDefinite(static_cast<std::size_t>(j), pivot);
    }
    const double ljj = std::sqrt(pivot);
    lower(j, j) = ljj;
    const Eigen::Index below = n - j - 1;
    if (below > 0) {
      Vector col = m.col(j).tail(below);
      if (j > 0) {
        col.noalias() -= lower.bottomLeftCorner(below, j) * lower.row(j).head(j).transpose();
      }
      lower.col(j).tail(below) = col / ljj;
    }
  }
  return CholeskyFactor(std::move(lower));
}

Matrix inverse_from_factor(const CholeskyFactor& factor) {
  const auto n = static_cast<Eigen::Index>(factor.dim());
  Matrix inv = Matrix::Identity(n, n);
  const auto lower = factor.lower().triangularView<Eigen::Lower>();
  lower.solveInPlace(inv);
  lower.transpose().solveInPlace(inv);
  // Exact symmetry; the two solves leave rounding-level asymmetry.
  return 0.5 * (inv + inv.transpose());
}

double sample_standard_normal(RngStream& rng) {
  // Marsaglia polar method; the second variate of each pair is discarded so
  // the stream position depends only on the number of calls.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw InvalidParameter("gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double boosted = sample_gamma(shape + 1.0, rng);
    return boosted * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double s, double f, RngStream& rng) {
  if (!(s > 0.0) || !(f > 0.0) || !std::isfinite(s) || !std::isfinite(f)) {
    throw InvalidParameter("Beta parameters must be positive and finite");
  }
  const double x = sample_gamma(s, rng);
  const double y = sample_gamma(f, rng);
  double ratio = (x + y > 0.0) ? x / (x + y) : 0.5;
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(ratio, lo, hi);
}

namespace {

Vector standard_normals(Eigen::Index n, RngStream& rng) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = sample_standard_normal(rng);
  return z;
}

void check_sampling_args(const Vector& mean, double scale, const CholeskyFactor& factor) {
  if (static_cast<std::size_t>(mean.size()) != factor.dim()) {
    throw DimensionMismatch(factor.dim(), static_cast<std::size_t>(mean.size()),
                            "mean and factor dimensions differ");
  }
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidParameter("sampling scale must be finite and >= 0");
  }
}

}  // namespace

Vector sample_mvn(const Vector& mean, double scale, const CholeskyFactor& covariance_factor,
                  RngStream& rng) {
  check_sampling_args(mean, scale, covariance_factor);
  const Vector z = standard_normals(mean.size(), rng);
  if (scale == 0.0) return mean;
  Vector lz = covariance_factor.lower().triangularView<Eigen::Lower>() * z;
  return mean + scale * lz;
}

Vector sample_mvn_precision(const Vector& mean, double scale,
                            const CholeskyFactor& precision_factor, RngStream& rng) {
  check_sampling_args(mean, scale, precision_factor);
  Vector z = standard_normals(mean.size(), rng);
  if (scale == 0.0) return mean;
  precision_factor.lower().transpose().triangularView<Eigen::Upper>().solveInPlace(z);
  return mean + scale * z;
}

void sherman_morrison_update_in_place(Matrix& b_inv, const Vector& c) {
  if (b_inv.rows() != c.size() || b_inv.cols() != c.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(b_inv.rows()),
                            static_cast<std::size_t>(c.size()));
  }
  const Vector u = b_inv * c;
  const double denom = 1.0 + c.dot(u);
  symmetric_rank_one_downdate(b_inv, u, denom);
}

void symmetric_rank_one_downdate(Matrix& m, const Vector& u, double denom) {
  // w_i * w_j is bitwise equal to w_j * w_i, so m stays exactly symmetric.
  const Vector w = u / std::sqrt(denom);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (w(j) != 0.0) m.col(j) -= w * w(j);
  }
}

SpdMatrix sherman_morrison_update(const SpdMatrix& b_inv, const Vector& c) {
  Matrix out = b_inv.matrix();
  sherman_morrison_update_in_place(out, c);
  return SpdMatrix(std::move(out), SpdMatrix::Unchecked{});
}

}  // namespace cbcc
