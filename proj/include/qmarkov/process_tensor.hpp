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

#ifndef QMARKOV_PROCESS_TENSOR_HPP
#define QMARKOV_PROCESS_TENSOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "qmarkov/classical.hpp"
#include "qmarkov/quantum_maps.hpp"

namespace qmarkov {

// Factor naming scheme for multi-time operators. Step j contributes the
// factor "s<j>:i" carrying the state the process hands to the probing
// instrument at step j, and optionally "s<j>:o" carrying what the instrument
// feeds back into the dynamics.
std::string step_input_name(int step);
std::string step_output_name(int step);

// Parses "s<j>:i" / "s<j>:o"; returns (step, is_output) or nullopt.
std::optional<std::pair<int, bool>> parse_step_factor(std::string_view name);

// A multi-time process stored as its many-body representation: one positive
// operator whose factors are ordered by step, latest first, with each step's
// output factor before its input factor. The trace of a physical process
// equals the product of its output dimensions.
//
// Steps need not start at 0 or be contiguous (conditioning produces windows),
// but every present step must contribute an input factor.
class ProcessTensor {
 public:
  explicit ProcessTensor(LabeledOperator op);

  const LabeledOperator& op() const { return op_; }
  // Present step indices, ascending.
  const std::vector<int>& step_indices() const { return steps_; }
  int step_count() const { return static_cast<int>(steps_.size()); }
  int last_step() const { return steps_.back(); }

  bool has_output(int step) const;
  Eigen::Index input_dim(int step) const;
  // 1 when the step has no output factor.
  Eigen::Index output_dim(int step) const;
  // Product of output dimensions; the trace of a valid process.
  double expected_trace() const;
  // Factor names belonging to the given steps (outputs then inputs, as laid
  // out in the operator).
  std::vector<std::string> factors_of_steps(const std::vector<int>& steps) const;

 private:
  LabeledOperator op_;
  std::vector<int> steps_;
};

struct CausalityLevel {
  std::string label;
  double deviation;
};

struct ProcessReport {
  double hermiticity_deviation = 0.0;
  double min_eigenvalue = 0.0;
  double trace_deviation = 0.0;
  std::vector<CausalityLevel> causality;

  double max_causality_deviation() const;
  bool ok(double tol = kTolFactor) const;
};

// Checks the containment hierarchy a physical process obeys: a discarded
// final output factors out as identity; tracing each step's input reveals the
// identity on the previous step's output tensored with the marginal process
// on the earlier steps; the earliest marginal has unit trace.
ProcessReport validate_process(const ProcessTensor& process);

// One probing event over some steps: outcome label plus the operator that is
// contracted against the process (tensor product of bound instrument
// elements).
struct SequenceElement {
  std::string outcome;
  LabeledOperator op;
};

// All outcomes of a multi-step probing strategy.
struct InstrumentSequence {
  std::vector<SequenceElement> elements;
};

// Binds a map to a step: "out" -> "s<j>:o", "in" -> "s<j>:i".
CpMap on_step(const CpMap& map, int step);

// Independent instruments applied at consecutive steps starting at
// `first_step`; outcomes are joined with commas in step order.
InstrumentSequence product_sequence(const std::vector<Instrument>& per_step,
                                    int first_step = 0);

struct SequenceReport {
  double max_hermiticity_deviation = 0.0;
  double min_element_eigenvalue = 0.0;
  std::vector<CausalityLevel> normalization;

  double max_normalization_deviation() const;
  bool ok(double tol = kTolFactor) const;
};

// Checks that the elements sum to a deterministic strategy: at each step,
// from the latest down, the summed operator factors as the identity on that
// step's input wire after its preparation slot is traced out, ending in the
// scalar 1.
SequenceReport validate_sequence(const InstrumentSequence& sequence);

// Probability of one probing event; the element must cover every factor of
// the process.
double born_probability(const ProcessTensor& process, const LabeledOperator& element);
double born_probability(const ProcessTensor& process, const SequenceElement& element);

struct OutcomeProbability {
  std::string outcome;
  double probability;
};

std::vector<OutcomeProbability> born_probabilities(
    const ProcessTensor& process, const InstrumentSequence& sequence);

// Process on the steps not covered by `element`, conditioned on that event.
struct ConditionalOutcome {
  std::string outcome;
  double probability = 0.0;
  LabeledOperator op;  // normalized: trace = product of remaining output dims
};

ConditionalOutcome condition(const ProcessTensor& process,
                             const SequenceElement& element);

// Process built from an initial state and a chain of maps, where
// `channels[k]` maps the step-k feedback wire to the step-(k+1) system. The
// resulting operator factorizes step by step, which is the defining property
// of memoryless dynamics.
ProcessTensor markovian_process(const Matrix& initial_state,
                                const std::vector<CpMap>& channels);

// Embeds a joint probability table as a diagonal process on input factors
// only; probing it with computational-basis measurements reproduces the table
// exactly.
ProcessTensor embed_classical(const JointDistribution& dist);

// Reads the table back out of a diagonal embedded process.
JointDistribution extract_classical(const ProcessTensor& process);

}  // namespace qmarkov

#endif  // QMARKOV_PROCESS_TENSOR_HPP
