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

#ifndef QMARKOV_SPECTRAL_HPP
#define QMARKOV_SPECTRAL_HPP

#include "qmarkov/labeled_operator.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns
};

// Max absolute entry of (m - m^dagger).
double hermiticity_deviation(const Matrix& m);

// Eigendecomposition of a Hermitian operator; throws Error when the
// Hermiticity deviation exceeds `tol`.
EigenDecomposition hermitian_eigs(const LabeledOperator& op,
                                  double tol = kTolHermitian);

double min_eigenvalue(const LabeledOperator& op);

bool is_positive_semidefinite(const LabeledOperator& op, double tol = kTolPsd);

// Von Neumann entropy of a density operator in the given logarithm base.
// Requires Hermitian, PSD within kTolPsd, and unit trace within kTolTrace;
// eigenvalues at or below kEigFloor contribute zero.
double von_neumann_entropy(const LabeledOperator& op, double log_base = 2.0);

// Trace distance (half the trace norm of the difference). The operators must
// share the same factor set; differing factor order is aligned automatically.
double trace_distance(const LabeledOperator& a, const LabeledOperator& b);

// Trace norm (sum of singular values).
double trace_norm(const Matrix& m);

}  // namespace qmarkov

#endif  // QMARKOV_SPECTRAL_HPP
