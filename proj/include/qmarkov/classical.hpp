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

#ifndef QMARKOV_CLASSICAL_HPP
#define QMARKOV_CLASSICAL_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "qmarkov/labeled_operator.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

// Joint probability table over a sequence of time steps. The table is stored
// row-major with the first step as the most significant digit: for alphabet
// sizes (d_0, ..., d_{n-1}) the outcome (x_0, ..., x_{n-1}) sits at index
// ((x_0 d_1 + x_1) d_2 + ...) etc.
class JointDistribution {
 public:
  JointDistribution(std::vector<int> alphabet_sizes, std::vector<double> table);

  int steps() const { return static_cast<int>(alphabet_sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }

  std::size_t index_of(const std::vector<int>& outcome) const;
  std::vector<int> outcome_of(std::size_t index) const;
  double at(const std::vector<int>& outcome) const;

 private:
  std::vector<int> alphabet_sizes_;
  std::vector<double> table_;
};

// Past / memory / future split of an ordered step list. Blocks are ascending
// and contiguous; history and memory may be empty, the future may not.
struct BlockPartition {
  std::vector<int> history;
  std::vector<int> memory;
  std::vector<int> future;

  // Checks that history+memory+future equals `steps` in order.
  void validate_cover(const std::vector<int>& steps) const;
};

// Partition of `steps` with the future starting at position `cut` and a
// memory of at most `ell` steps before it; earlier steps form the history.
BlockPartition partition_at_cut(const std::vector<int>& steps, std::size_t cut,
                                std::size_t ell);

// Keeps the listed steps (ascending subset) and sums over the rest. Step
// indices are renumbered 0..k-1 in the result.
JointDistribution marginal(const JointDistribution& dist,
                           const std::vector<int>& keep);

// Fixes the outcome of some steps and renormalizes over the remaining ones.
// Throws ZeroProbabilityError when the fixed event has mass below kProbFloor.
JointDistribution conditioned(const JointDistribution& dist,
                              const std::vector<std::pair<int, int>>& fixed);

double shannon_entropy(const JointDistribution& dist, double log_base = 2.0);

// I(F : H | M) in the given logarithm base.
double classical_cmi(const JointDistribution& dist, const BlockPartition& blocks,
                     double log_base = 2.0);

// max over conditioning events (m, h) with mass above kProbFloor of
// max_f |P(f|m,h) - P(f|m)|.
double conditional_independence_deviation(const JointDistribution& dist,
                                          const BlockPartition& blocks);

// Conditional independence of the future from the history given `ell` memory
// steps, at the cut where the future starts at step `cut`.
bool markov_order_holds_at_cut(const JointDistribution& dist, std::size_t ell,
                               std::size_t cut, double tol = kTolClassical);

// Smallest ell such that the condition holds at every cut.
int minimal_markov_order(const JointDistribution& dist,
                         double tol = kTolClassical);

// Transition kernel P(f | m) estimated from the distribution; reapplied to a
// history+memory marginal it reconstructs a full joint table.
struct RecoveryMap {
  std::vector<int> memory_sizes;
  std::vector<int> future_sizes;
  // kernel[m * F_total + f] = P(f | m); uniform where the memory event has no
  // mass.
  std::vector<double> kernel;
};

RecoveryMap recovery_map(const JointDistribution& dist,
                         const BlockPartition& blocks);

// `hm` must be the joint table over history+memory (in that order); the
// result spans history+memory+future.
JointDistribution apply_recovery(const RecoveryMap& map,
                                 const JointDistribution& hm);

// Total-variation distance between the distribution and its reconstruction
// through the recovery map.
double recovery_residual(const JointDistribution& dist,
                         const BlockPartition& blocks);

}  // namespace qmarkov

#endif  // QMARKOV_CLASSICAL_HPP
