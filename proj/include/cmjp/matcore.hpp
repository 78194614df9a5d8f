#pragma once

#include <Eigen/Dense>

namespace cmjp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Generator test: nonpositive diagonal, nonnegative off-diagonal, rows summing
// to zero within tol * max(1, |q_xx|).
bool is_generator(const Matrix& q, double tol = 1e-12);

// Transition matrix e^{Qt} of a generator. Entries are clamped to [0, 1] and
// rows renormalised, so the result is a stochastic matrix to rounding.
Matrix mat_exp(const Matrix& generator, double t);

// Exponential of an arbitrary finite square matrix (no stochastic clean-up).
Matrix expm(const Matrix& a);

// Integral of e^{Qu} over [0, horizon], read off the upper-right block of
// exp([[Q, I], [0, 0]] * horizon). Q may be any finite square matrix.
Matrix van_loan_integral(const Matrix& q, double horizon);

// Principal square root of a diagonalizable matrix whose eigenvalues are real
// and strictly positive. Throws DomainError otherwise.
Matrix principal_sqrt(const Matrix& a);

// Inverse via full-pivot LU. Throws SingularMatrixError when the smallest
// pivot falls below 1e-12 of the largest.
Matrix invert(const Matrix& a);

}  // namespace cmjp
