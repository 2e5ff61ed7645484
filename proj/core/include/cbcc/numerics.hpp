#pragma once

// Small dense linear-algebra kernel and the random variates every policy
// draws from. Matrices are Eigen dense types; all sampling goes through
// RngStream so results are reproducible from a seed.

#include <cstddef>

#include <Eigen/Dense>

#include "cbcc/rng.hpp"

namespace cbcc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Pivots at or below this value make cholesky() fail.
inline constexpr double kPivotTolerance = 1e-12;
// Relative tolerance used when checking symmetry on construction.
inline constexpr double kSymmetryTolerance = 1e-10;

// A symmetric matrix that is expected to be positive definite. Symmetry is
// checked on construction; positive definiteness is established by cholesky().
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix values);

  static SpdMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const Matrix& matrix() const noexcept { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

 private:
  struct Unchecked {};
  SpdMatrix(Matrix values, Unchecked) : values_(std::move(values)) {}
  friend SpdMatrix sherman_morrison_update(const SpdMatrix&, const Vector&);

  Matrix values_;
};

// Lower-triangular L with L * L^T equal to the factored matrix.
class CholeskyFactor {
 public:
  static CholeskyFactor identity(std::size_t dim);
  // Wraps an existing factor. Throws InvalidParameter unless `lower` is
  // square, lower triangular and has a strictly positive diagonal.
  static CholeskyFactor from_lower(Matrix lower);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.rows()); }
  const Matrix& lower() const noexcept { return lower_; }
  Matrix reconstruct() const { return lower_ * lower_.transpose(); }

  // In-place factor of (L L^T + c c^T), O(d^2).
  void rank_one_update(const Vector& c);

 private:
  explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {}
  friend CholeskyFactor cholesky(const SpdMatrix&);

  Matrix lower_;
};

// Throws NotPositiveDefinite if any pivot is <= kPivotTolerance.
CholeskyFactor cholesky(const SpdMatrix& a);

// Inverse of the factored matrix, from two triangular solves.
Matrix inverse_from_factor(const CholeskyFactor& factor);

double sample_standard_normal(RngStream& rng);
// Marsaglia-Tsang; shape < 1 is boosted through Gamma(shape + 1) * U^(1/shape).
double sample_gamma(double shape, RngStream& rng);
// Two-Gamma construction. Result lies strictly inside (0, 1).
double sample_beta(double s, double f, RngStream& rng);

// mean + scale * L * z, z ~ N(0, I), where L L^T is the covariance.
// The d normals are drawn in coordinate order.
Vector sample_mvn(const Vector& mean, double scale, const CholeskyFactor& covariance_factor,
                  RngStream& rng);

// Same distribution family parameterized by the precision matrix P = L L^T:
// returns mean + scale * L^{-T} z, whose covariance is scale^2 * P^{-1}.
Vector sample_mvn_precision(const Vector& mean, double scale,
                            const CholeskyFactor& precision_factor, RngStream& rng);

// (B + c c^T)^{-1} from B^{-1}.
SpdMatrix sherman_morrison_update(const SpdMatrix& b_inv, const Vector& c);
void sherman_morrison_update_in_place(Matrix& b_inv, const Vector& c);

// m -= u u^T / denom (denom > 0), keeping m exactly symmetric.
void symmetric_rank_one_downdate(Matrix& m, const Vector& u, double denom);

}  // namespace cbcc
