// Copyright 2026 The qmarkov developers
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

#include "qmarkov/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qmarkov {

double hermiticity_deviation(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("hermiticity check needs a square matrix");
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

EigenDecomposition hermitian_eigs(const LabeledOperator& op, double tol) {
  const double dev = hermiticity_deviation(op.matrix());
  if (dev > tol)
    throw Error("operator is not Hermitian (deviation " + std::to_string(dev) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix());
  if (solver.info() != Eigen::Success)
    throw Error("eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const LabeledOperator& op) {
  return hermitian_eigs(op).values.minCoeff();
}

bool is_positive_semidefinite(const LabeledOperator& op, double tol) {
  if (hermiticity_deviation(op.matrix()) > kTolHermitian) return false;
  return min_eigenvalue(op) >= -tol;
}

double von_neumann_entropy(const LabeledOperator& op, double log_base) {
  if (log_base <= 0 || log_base == 1.0)
    throw Error("entropy log base must be positive and not 1");
  const EigenDecomposition eig = hermitian_eigs(op);
  if (eig.values.minCoeff() < -kTolPsd)
    throw Error("entropy requires a positive semidefinite operator");
  const double tr = eig.values.sum();
  if (std::abs(tr - 1.0) > kTolTrace)
    throw Error("entropy requires unit trace, got " + std::to_string(tr));
  double h = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values[i];
    if (lambda > kEigFloor) h -= lambda * std::log(lambda);
  }
  return h / std::log(log_base);
}

double trace_norm(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const LabeledOperator& a, const LabeledOperator& b) {
  const LabeledOperator* rhs = &b;
  LabeledOperator aligned;
  if (a.factors() != b.factors()) {
    aligned = permute_factors(b, a.factor_names());
    rhs = &aligned;
  }
  return 0.5 * trace_norm(a.matrix() - rhs->matrix());
}

}  // namespace qmarkov
