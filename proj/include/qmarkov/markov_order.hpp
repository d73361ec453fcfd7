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

#ifndef QMARKOV_MARKOV_ORDER_HPP
#define QMARKOV_MARKOV_ORDER_HPP

#include <string>
#include <utility>
#include <vector>

#include "qmarkov/process_tensor.hpp"

namespace qmarkov {

// Outcome of conditioning a process on one memory-block event: the joint
// future+history operator, its marginals, and how far the joint is from
// their product.
struct ConditionalTriple {
  std::string outcome;
  double probability = 0.0;
  bool skipped = false;  // probability below kProbFloor; no operators stored
  LabeledOperator joint;    // future+history, trace = product of their output dims
  LabeledOperator future;   // trace = product of future output dims
  LabeledOperator history;  // trace = product of history output dims
  double factorization_distance = 0.0;
};

// Applies each element of `memory_sequence` to the memory block and splits
// the remainder. Elements must cover exactly the memory-step factors. The
// history block may be empty, in which case every distance is trivially 0.
std::vector<ConditionalTriple> conditional_decomposition(
    const ProcessTensor& process, const BlockPartition& blocks,
    const InstrumentSequence& memory_sequence);

struct OutcomeVerdict {
  std::string outcome;
  double probability = 0.0;
  double distance = 0.0;
  bool skipped = false;
};

struct MarkovOrderVerdict {
  bool holds = false;
  double max_distance = 0.0;  // over outcomes that were not skipped
  double tolerance = 0.0;
  std::vector<OutcomeVerdict> outcomes;
};

// The process has Markov order w.r.t. the partition and probing strategy when
// every conditional future+history operator factorizes within `tol`.
MarkovOrderVerdict has_markov_order(const ProcessTensor& process,
                                    const BlockPartition& blocks,
                                    const InstrumentSequence& memory_sequence,
                                    double tol = kTolFactor);

// Builds the memory-block probing strategy from one instrument per memory
// step. Measure-and-discard instruments on steps that feed back into the
// dynamics are completed with a maximally mixed preparation.
InstrumentSequence memory_sequence(const ProcessTensor& process,
                                   const BlockPartition& blocks,
                                   const std::vector<Instrument>& per_step);

// I(F : H | M) of a normalized multipartite operator, blocks given as factor
// name lists.
double quantum_cmi(const LabeledOperator& op, const std::vector<std::string>& future,
                   const std::vector<std::string>& memory,
                   const std::vector<std::string>& history, double log_base = 2.0);

// Same, with the blocks expanded to the process factors of the partition.
double quantum_cmi(const ProcessTensor& process, const BlockPartition& blocks,
                   double log_base = 2.0);

// Three-step example process whose middle step carries exactly the
// information revealed by the tetrahedral measurement: conditioning on that
// measurement leaves product future/history states, while sharp measurements
// do not. Steps 0 and 1 have feedback wires; the operator is 32x32 with
// trace 4.
ProcessTensor tetrahedral_process();
// The underlying three-system state on the input factors (8x8, trace 1).
LabeledOperator tetrahedral_state();
// The post-measurement system states (3/8) 1 + (1/2) effect, outcomes "0".."3".
std::vector<Matrix> tetrahedral_conditional_states();

// Result of probing the same partition with an instrument and with a
// classically mixed version of it. A gap between the two verdicts shows that
// Markov order depends on the probing instrument, not the process alone.
struct WitnessReport {
  MarkovOrderVerdict base;
  MarkovOrderVerdict mixed;
  bool coefficients_trivial = false;  // permutation matrices only relabel
  double threshold = 0.0;

  bool demonstrates() const {
    return base.holds && !coefficients_trivial &&
           mixed.max_distance > threshold;
  }
};

// `blocks.memory` must be a single step; `instrument` probes it, then the
// mixed instrument built from `coefficients` probes it again.
WitnessReport mixing_witness(const ProcessTensor& process,
                             const BlockPartition& blocks,
                             const Instrument& instrument,
                             const Eigen::MatrixXd& coefficients,
                             double tol = kTolFactor, double threshold = 1e-3);

// Conditional mutual information of the process state after different
// deterministic maps act on the memory input factor, next to the untouched
// value (row "bare"). Demonstrates that the value moves with the choice of
// intervention.
struct CmiTableRow {
  std::string label;
  double cmi = 0.0;
};

std::vector<CmiTableRow> cmi_instrument_table(
    const ProcessTensor& process, const BlockPartition& blocks,
    const std::vector<std::pair<std::string, Instrument>>& instruments,
    double log_base = 2.0);

}  // namespace qmarkov

#endif  // QMARKOV_MARKOV_ORDER_HPP
