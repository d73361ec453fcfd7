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

#ifndef QMARKOV_TOLERANCES_HPP
#define QMARKOV_TOLERANCES_HPP

namespace qmarkov {

// Default numerical thresholds. Routines that analyze data take an explicit
// tolerance parameter; these are the library-wide defaults.

// Hermiticity: max absolute entry of (A - A^dagger).
inline constexpr double kTolHermitian = 1e-9;

// Positivity: smallest eigenvalue may dip this far below zero.
inline constexpr double kTolPsd = 1e-9;

// Trace normalization checks.
inline constexpr double kTolTrace = 1e-9;

// Factorization distances and causality-hierarchy deviations.
inline constexpr double kTolFactor = 1e-9;

// Eigenvalues at or below this are treated as exact zeros in entropies.
inline constexpr double kEigFloor = 1e-12;

// Outcomes with probability below this are skipped, not conditioned on.
inline constexpr double kProbFloor = 1e-12;

// Biorthogonality defect allowed for computed dual bases.
inline constexpr double kTolDual = 1e-12;

// Conditional-independence checks on classical probability tables.
inline constexpr double kTolClassical = 1e-10;

// A dual basis is refused when the Gram matrix is conditioned worse than this.
inline constexpr double kGramConditionLimit = 1e12;

}  // namespace qmarkov

#endif  // QMARKOV_TOLERANCES_HPP
