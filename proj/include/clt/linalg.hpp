#pragma once

#include <Eigen/Dense>

#include "clt/errors.hpp"

namespace clt {

// Dense double-precision matrices/vectors used across the project. Problem
// sizes are small (d <= ~16 state dimensions, S <= ~hundreds of states), so
// everything is computed with dense direct methods.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

// Eigenvalues with real part in (-tol_hurwitz, 0] count as unstable so that
// marginal matrices fail loudly instead of producing garbage Lyapunov solves.
inline constexpr double kHurwitzTol = 1e-10;

/// True iff every eigenvalue of the square matrix A has real part < -kHurwitzTol.
bool is_hurwitz(const Matrix& a);

/// Solves sigma * A^T + A * sigma + Q = 0 for symmetric sigma via Kronecker
/// vectorization: (I (x) A + A (x) I) vec(sigma) = -vec(Q). A must be Hurwitz,
/// Q symmetric PSD of the same dimension.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// Symmetric PSD square root of a symmetric matrix M. Eigenvalues in
/// [-1e-12 * ||M||_op, 0) are clipped to zero; anything more negative throws.
Matrix sqrt_psd(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const Matrix& m);

/// Max |entry| that M deviates from its transpose, as a symmetry check.
double asymmetry(const Matrix& m);

/// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace linalg
}  // namespace clt
