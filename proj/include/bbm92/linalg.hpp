// Copyright 2026 The BBM92 Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense real linear algebra shared by the operator and attack code.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bbm92/error.hpp"

namespace bbm92 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real symmetric matrix. Symmetry is checked on construction and the
// stored entries are exactly symmetrized.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(Matrix entries) {
    detail::require(entries.rows() == entries.cols(), "operator must be square");
    detail::require((entries - entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
                    "operator is not symmetric");
    entries_ = 0.5 * (entries + entries.transpose());
  }

  static HermitianOperator zero(Eigen::Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
  }
  static HermitianOperator identity(Eigen::Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

  double expectation(const Vector& psi) const { return psi.dot(entries_ * psi); }
  double expectation_density(const Matrix& rho) const {
    return (entries_.cwiseProduct(rho.transpose())).sum();
  }
  double trace() const { return entries_.trace(); }

  friend HermitianOperator operator+(const HermitianOperator& a,
                                     const HermitianOperator& b) {
    return HermitianOperator(a.entries_ + b.entries_);
  }
  friend HermitianOperator operator-(const HermitianOperator& a,
                                     const HermitianOperator& b) {
    return HermitianOperator(a.entries_ - b.entries_);
  }
  friend HermitianOperator operator*(double s, const HermitianOperator& a) {
    return HermitianOperator(s * a.entries_);
  }

 private:
  Matrix entries_;
};

inline Matrix outer(const Vector& v) { return v * v.transpose(); }

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

// Dense symmetric eigen-decomposition of (A + A^T) / 2. Every eigenpair must
// satisfy |A v - lambda v| <= 1e-10 |A|.
inline SymmetricEigen eigh(const Matrix& a) {
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigen-decomposition did not converge");
  }
  SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
  const double scale = std::max(out.values.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index k = 0; k < out.values.size(); ++k) {
    const double residual =
        (sym * out.vectors.col(k) - out.values(k) * out.vectors.col(k)).norm();
    if (residual > 1e-10 * scale) {
      throw NumericalError("eigen residual " + std::to_string(residual) +
                           " exceeds tolerance");
    }
  }
  return out;
}

inline double max_eigenvalue(const HermitianOperator& op) {
  return eigh(op.matrix()).values.maxCoeff();
}

// Orthonormal basis of the column span of `vectors`, obtained from the Gram
// matrix so that the same coefficients can be reused on a second set with
// identical Gram matrix. Returns the coefficient matrix C with
// (vectors * C) orthonormal.
inline Matrix span_coefficients(const Matrix& vectors, double tol = 1e-10) {
  const Matrix gram = vectors.transpose() * vectors;
  const SymmetricEigen eig = eigh(gram);
  const double top = std::max(eig.values.maxCoeff(), 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) > tol * top) ++rank;
  }
  Matrix coeff(vectors.cols(), rank);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) > tol * top) {
      coeff.col(col++) = eig.vectors.col(k) / std::sqrt(eig.values(k));
    }
  }
  return coeff;
}

// Extends an orthonormal set of columns to a full orthonormal basis of
// R^dim. Completion vectors come from Gram-Schmidt on the unit vectors.
inline Matrix complete_basis(const Matrix& q) {
  const Eigen::Index dim = q.rows();
  Matrix basis(dim, dim);
  basis.leftCols(q.cols()) = q;
  Eigen::Index filled = q.cols();
  for (Eigen::Index e = 0; e < dim && filled < dim; ++e) {
    Vector v = Vector::Unit(dim, e);
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
    }
    const double norm = v.norm();
    if (norm > 1e-8) basis.col(filled++) = v / norm;
  }
  if (filled != dim) throw NumericalError("basis completion failed");
  return basis;
}

// Orthogonal W with W * source = target, given that the two column sets have
// equal Gram matrices. When both sets span the same subspace, W acts as the
// identity on its orthogonal complement; otherwise the complements are
// paired by basis completion.
inline Matrix gram_match(const Matrix& source, const Matrix& target,
                         double tol = 1e-10) {
  detail::require(source.rows() == target.rows() && source.cols() == target.cols(),
                  "source and target sets must have the same shape");
  const Matrix gram_s = source.transpose() * source;
  const Matrix gram_t = target.transpose() * target;
  const double mismatch = (gram_s - gram_t).cwiseAbs().maxCoeff();
  if (mismatch > tol) {
    throw NumericalError("Gram matrices differ by " + std::to_string(mismatch));
  }
  const Matrix coeff = span_coefficients(source, tol);
  const Matrix qs = source * coeff;
  const Matrix qt = target * coeff;
  const Eigen::Index dim = source.rows();
  const Matrix id = Matrix::Identity(dim, dim);
  const double span_gap = ((id - qt * qt.transpose()) * qs).cwiseAbs().maxCoeff();
  if (span_gap <= 1e-10) {
    return qt * qs.transpose() + (id - qs * qs.transpose());
  }
  const Matrix full_s = complete_basis(qs);
  const Matrix full_t = complete_basis(qt);
  return full_t * full_s.transpose();
}

}  // namespace bbm92
