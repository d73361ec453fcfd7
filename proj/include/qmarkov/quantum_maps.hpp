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

#ifndef QMARKOV_QUANTUM_MAPS_HPP
#define QMARKOV_QUANTUM_MAPS_HPP

#include <string>
#include <utility>
#include <vector>

#include "qmarkov/labeled_operator.hpp"
#include "qmarkov/spectral.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

// Factor names used by map Choi operators before they are bound to a step.
inline constexpr const char* kMapOut = "out";
inline constexpr const char* kMapIn = "in";

// A completely positive map stored as its Choi operator on factors
// (out, in), output factor first. With K acting on row-major vectorizations,
// the Choi operator is sum_k vec(K_k) vec(K_k)^dagger, so a trace-preserving
// map satisfies tr_out C = 1_in. Maps that end in a measurement carry a
// 1-dimensional output factor and their Choi operator is the transposed
// effect.
struct CpMap {
  std::string outcome;  // empty for deterministic (single-element) maps
  LabeledOperator choi;

  Eigen::Index out_dim() const { return choi.factors().at(0).dim; }
  Eigen::Index in_dim() const { return choi.factors().at(1).dim; }
};

CpMap choi_from_kraus(const std::vector<Matrix>& kraus, std::string outcome = "");
CpMap identity_map(Eigen::Index dim);
// Measure the POVM effect and discard the system (1-dimensional output).
CpMap effect_map(const Matrix& effect, std::string outcome = "");
// Measure the POVM effect, then prepare the given state.
CpMap measure_prepare_map(const Matrix& effect, const Matrix& preparation,
                          std::string outcome = "");

// Action on a density matrix: rho_out = tr_in[(1_out (x) rho^T) C].
Matrix apply_map(const CpMap& map, const Matrix& density);

// Applies the map to one named factor of a multipartite operator; the factor
// takes the map's output dimension, other factors are untouched.
LabeledOperator apply_map_to_factor(const LabeledOperator& op,
                                    std::string_view factor, const CpMap& map);

// A quantum instrument: CP elements summing to a trace-preserving map.
struct Instrument {
  std::vector<CpMap> elements;
};

struct InstrumentReport {
  double max_hermiticity_deviation = 0.0;
  double min_element_eigenvalue = 0.0;
  // Trace-norm distance of tr_out[sum of elements] from the input identity.
  double completeness_deviation = 0.0;

  bool ok(double tol = kTolPsd) const {
    return max_hermiticity_deviation <= tol &&
           min_element_eigenvalue >= -tol && completeness_deviation <= tol;
  }
};

InstrumentReport validate_instrument(const Instrument& instrument);

// Projective measurement in the computational basis that feeds the observed
// basis state back out (elements |x><x| (x) |x><x|^T).
Instrument sharp_classical_instrument(Eigen::Index dim);

// Projective computational-basis measurement that discards the system.
Instrument computational_measurement(Eigen::Index dim);

// Measure-and-discard instrument from arbitrary POVM effects.
Instrument povm_instrument(const std::vector<Matrix>& effects);

// Symmetric informationally complete qubit POVM built from the four
// tetrahedral Bloch directions (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1)
// scaled by 1/sqrt(3); effects are (1 + a.sigma)/4 with outcomes "0".."3".
std::vector<Matrix> tetrahedral_effects();
Instrument tetrahedral_measurement();

// Replaces each measure-and-discard element with measure-then-prepare using
// the fixed preparation state.
Instrument with_preparation(const Instrument& instrument, const Matrix& preparation);

// Classically post-processes outcomes: element z of the result is
// sum_x coefficients(x, z) * element x. Rows must be probability vectors
// (non-negative, summing to 1), so the mixed elements again form an
// instrument. Mixed outcomes are labeled "m0", "m1", ...
Instrument mix_instrument(const Instrument& instrument,
                          const Eigen::MatrixXd& coefficients);

// True when `coefficients` merely permutes outcomes.
bool is_permutation_matrix(const Eigen::MatrixXd& coefficients, double tol = 1e-12);

// Dual basis of a linearly independent set of Hermitian operators under the
// Hilbert-Schmidt inner product: tr(basis[x] dual[y]) = delta_xy. Computed by
// explicit inversion of the Gram matrix; throws Error when the Gram matrix
// condition number exceeds kGramConditionLimit.
struct DualBasis {
  std::vector<Matrix> basis;
  std::vector<Matrix> duals;
  double gram_condition = 0.0;
};

DualBasis dual_basis(const std::vector<Matrix>& basis);

}  // namespace qmarkov

#endif  // QMARKOV_QUANTUM_MAPS_HPP
