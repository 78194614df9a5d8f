#include "cmjp/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "cmjp/errors.hpp"

namespace cmjp {
namespace {

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidArgument(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_time(double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidArgument(std::string(what) + ": time must be finite and nonnegative");
  }
}

}  // namespace

bool is_generator(const Matrix& q, double tol) {
  if (q.rows() != q.cols() || q.rows() == 0 || !q.allFinite()) return false;
  for (Eigen::Index x = 0; x < q.rows(); ++x) {
    if (q(x, x) > 0.0) return false;
    double sum = 0.0;
    for (Eigen::Index y = 0; y < q.cols(); ++y) {
      if (y != x && q(x, y) < 0.0) return false;
      sum += q(x, y);
    }
    if (std::abs(sum) > tol * std::max(1.0, std::abs(q(x, x)))) return false;
  }
  return true;
}

Matrix expm(const Matrix& a) {
  require_square_finite(a, "expm");
  return a.exp();
}

Matrix mat_exp(const Matrix& generator, double t) {
  require_square_finite(generator, "mat_exp");
  require_time(t, "mat_exp");
  if (!is_generator(generator, 1e-9)) {
    throw InvalidArgument("mat_exp: argument is not a generator matrix");
  }
  const Eigen::Index p = generator.rows();
  if (t == 0.0) return Matrix::Identity(p, p);

  Matrix result = (generator * t).exp();
  for (Eigen::Index x = 0; x < p; ++x) {
    double sum = 0.0;
    for (Eigen::Index y = 0; y < p; ++y) {
      result(x, y) = std::clamp(result(x, y), 0.0, 1.0);
      sum += result(x, y);
    }
    result.row(x) /= sum;
  }
  return result;
}

Matrix van_loan_integral(const Matrix& q, double horizon) {
  require_square_finite(q, "van_loan_integral");
  require_time(horizon, "van_loan_integral");
  const Eigen::Index p = q.rows();
  Matrix block = Matrix::Zero(2 * p, 2 * p);
  block.topLeftCorner(p, p) = q;
  block.topRightCorner(p, p) = Matrix::Identity(p, p);
  const Matrix e = (block * horizon).exp();
  return e.topRightCorner(p, p);
}

Matrix principal_sqrt(const Matrix& a) {
  require_square_finite(a, "principal_sqrt");
  Eigen::EigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw DomainError("principal_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i].imag()) > 1e-10 * scale) {
      throw DomainError("principal_sqrt: complex eigenvalue");
    }
    if (lambda[i].real() <= 0.0) {
      throw DomainError("principal_sqrt: eigenvalue with nonpositive real part");
    }
  }
  const Eigen::MatrixXcd vecs = solver.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
  const auto sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-10 * sv[0]) {
    throw DomainError("principal_sqrt: matrix is not diagonalizable within tolerance");
  }
  Eigen::VectorXcd root(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) root[i] = std::sqrt(lambda[i].real());
  const Eigen::MatrixXcd s = vecs * root.asDiagonal() * vecs.inverse();
  return s.real();
}

Matrix invert(const Matrix& a) {
  require_square_finite(a, "invert");
  Eigen::FullPivLU<Matrix> lu(a);
  const double max_pivot = lu.maxPivot();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (max_pivot == 0.0 || min_pivot < 1e-12 * max_pivot) {
    throw SingularMatrixError("invert: matrix is numerically singular");
  }
  return lu.inverse();
}

}  // namespace cmjp
