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

#include "qmarkov/markov_order.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmarkov {

namespace {

// Output-dimension product of the given steps.
double output_weight(const ProcessTensor& process, const std::vector<int>& steps) {
  double d = 1.0;
  for (int s : steps) d *= static_cast<double>(process.output_dim(s));
  return d;
}

std::set<std::string> name_set(const std::vector<std::string>& names) {
  return {names.begin(), names.end()};
}

}  // namespace

std::vector<ConditionalTriple> conditional_decomposition(
    const ProcessTensor& process, const BlockPartition& blocks,
    const InstrumentSequence& sequence) {
  blocks.validate_cover(process.step_indices());

  const LabeledOperator target = squeeze(process.op());
  const std::set<std::string> memory_names =
      name_set(process.factors_of_steps(blocks.memory));

  // Factor names of the remaining blocks, in the operator's layout.
  std::vector<std::string> future_names, history_names;
  for (const auto& f : target.factors()) {
    const int step = parse_step_factor(f.name)->first;
    if (std::find(blocks.future.begin(), blocks.future.end(), step) !=
        blocks.future.end())
      future_names.push_back(f.name);
    else if (std::find(blocks.history.begin(), blocks.history.end(), step) !=
             blocks.history.end())
      history_names.push_back(f.name);
  }

  const double d_of = output_weight(process, blocks.future);
  const double d_oh = output_weight(process, blocks.history);

  std::vector<ConditionalTriple> out;
  for (const auto& element : sequence.elements) {
    LabeledOperator el = squeeze(element.op);
    {
      // Preparations into feedback wires the process does not carry are
      // traced out, mirroring born_probability.
      std::vector<std::string> dangling;
      for (const auto& f : el.factors())
        if (!target.has_factor(f.name)) {
          const auto parsed = parse_step_factor(f.name);
          if (!parsed || !parsed->second)
            throw Error("element factor '" + f.name + "' is not part of the process");
          dangling.push_back(f.name);
        }
      if (!dangling.empty()) el = squeeze(partial_trace(el, dangling));
    }
    if (name_set(el.factor_names()) != memory_names)
      throw Error("element of outcome '" + element.outcome +
                  "' does not cover exactly the memory block");

    ConditionalTriple triple;
    triple.outcome = element.outcome;

    LabeledOperator w = contract(target, el);
    const double alpha = w.trace().real();
    triple.probability = alpha / (d_of * d_oh);
    if (triple.probability < kProbFloor) {
      triple.skipped = true;
      out.push_back(std::move(triple));
      continue;
    }

    w *= Complex(d_of * d_oh / alpha, 0.0);  // joint, trace d_of * d_oh
    LabeledOperator future = history_names.empty()
                                 ? w
                                 : partial_trace(w, history_names);
    future *= Complex(1.0 / d_oh, 0.0);
    LabeledOperator history = future_names.empty()
                                  ? w
                                  : partial_trace(w, future_names);
    history *= Complex(1.0 / d_of, 0.0);

    if (history_names.empty()) {
      // Nothing to correlate with; the condition is vacuous.
      triple.factorization_distance = 0.0;
    } else {
      triple.factorization_distance = trace_distance(w, kron(future, history));
    }
    triple.joint = std::move(w);
    triple.future = std::move(future);
    triple.history = std::move(history);
    out.push_back(std::move(triple));
  }
  return out;
}

MarkovOrderVerdict has_markov_order(const ProcessTensor& process,
                                    const BlockPartition& blocks,
                                    const InstrumentSequence& sequence,
                                    double tol) {
  MarkovOrderVerdict verdict;
  verdict.tolerance = tol;
  const auto triples = conditional_decomposition(process, blocks, sequence);
  for (const auto& t : triples) {
    verdict.outcomes.push_back(
        {t.outcome, t.probability, t.factorization_distance, t.skipped});
    if (!t.skipped)
      verdict.max_distance = std::max(verdict.max_distance, t.factorization_distance);
  }
  verdict.holds = verdict.max_distance <= tol;
  return verdict;
}

InstrumentSequence memory_sequence(const ProcessTensor& process,
                                   const BlockPartition& blocks,
                                   const std::vector<Instrument>& per_step) {
  blocks.validate_cover(process.step_indices());
  if (per_step.size() != blocks.memory.size())
    throw Error("need exactly one instrument per memory step");
  if (blocks.memory.empty()) throw Error("memory block is empty");

  std::vector<Instrument> bound;
  for (std::size_t i = 0; i < per_step.size(); ++i) {
    const int step = blocks.memory[i];
    const Instrument& instr = per_step[i];
    bool discard_only = true;
    for (const auto& el : instr.elements)
      if (el.out_dim() != 1) discard_only = false;
    if (discard_only && process.has_output(step) && process.output_dim(step) > 1) {
      const Eigen::Index d = process.output_dim(step);
      const Matrix mixed = Matrix::Identity(d, d) / static_cast<double>(d);
      bound.push_back(with_preparation(instr, mixed));
    } else {
      bound.push_back(instr);
    }
  }
  return product_sequence(bound, blocks.memory.front());
}

double quantum_cmi(const LabeledOperator& op, const std::vector<std::string>& future,
                   const std::vector<std::string>& memory,
                   const std::vector<std::string>& history, double log_base) {
  std::set<std::string> all;
  for (const auto& list : {future, memory, history})
    for (const auto& n : list)
      if (!all.insert(n).second)
        throw Error("factor '" + n + "' listed twice in the partition");
  if (all != name_set(op.factor_names()))
    throw Error("partition must cover every factor of the operator");
  if (future.empty())
    throw Error("future block must not be empty");

  const double tr = op.trace().real();
  if (tr <= 0.0) throw Error("operator trace must be positive");
  LabeledOperator sigma = op;
  sigma *= Complex(1.0 / tr, 0.0);

  const auto entropy_without = [&](const std::vector<std::string>& traced) {
    if (traced.empty()) return von_neumann_entropy(sigma, log_base);
    return von_neumann_entropy(partial_trace(sigma, traced), log_base);
  };

  std::vector<std::string> fh = future;
  fh.insert(fh.end(), history.begin(), history.end());

  // S(FM) + S(MH) - S(M) - S(FMH); tracing every factor leaves the scalar
  // state with entropy 0, which covers empty blocks.
  return entropy_without(history) + entropy_without(future) -
         entropy_without(fh) - entropy_without({});
}

double quantum_cmi(const ProcessTensor& process, const BlockPartition& blocks,
                   double log_base) {
  blocks.validate_cover(process.step_indices());
  return quantum_cmi(process.op(), process.factors_of_steps(blocks.future),
                     process.factors_of_steps(blocks.memory),
                     process.factors_of_steps(blocks.history), log_base);
}

LabeledOperator tetrahedral_state() {
  const std::vector<Matrix> effects = tetrahedral_effects();
  const Matrix one = Matrix::Identity(2, 2);
  Matrix state = Matrix::Zero(8, 8);
  std::vector<Matrix> conditionals = tetrahedral_conditional_states();
  for (std::size_t b = 0; b < 4; ++b) {
    // Middle system carries the dual operator 6 E_b - 1, which responds only
    // to the matching measurement outcome.
    const Matrix middle = 6.0 * effects[b] - one;
    const Matrix tail = Eigen::kroneckerProduct(middle, conditionals[b]).eval();
    state += 0.25 * Eigen::kroneckerProduct(conditionals[b], tail).eval();
  }
  return LabeledOperator({{step_input_name(2), 2},
                          {step_input_name(1), 2},
                          {step_input_name(0), 2}},
                         state);
}

std::vector<Matrix> tetrahedral_conditional_states() {
  const Matrix one = Matrix::Identity(2, 2);
  std::vector<Matrix> out;
  for (const auto& e : tetrahedral_effects()) out.push_back(0.375 * one + 0.5 * e);
  return out;
}

ProcessTensor tetrahedral_process() {
  const LabeledOperator state = tetrahedral_state();
  const LabeledOperator feedback_1 =
      LabeledOperator::identity({{step_output_name(1), 2}});
  const LabeledOperator feedback_0 =
      LabeledOperator::identity({{step_output_name(0), 2}});
  LabeledOperator op = kron(kron(state, feedback_1), feedback_0);
  ProcessTensor process{op};  // canonical factor order
  const double tr = process.op().trace().real();
  LabeledOperator scaled = process.op();
  scaled *= Complex(process.expected_trace() / tr, 0.0);
  return ProcessTensor(std::move(scaled));
}

WitnessReport mixing_witness(const ProcessTensor& process,
                             const BlockPartition& blocks,
                             const Instrument& instrument,
                             const Eigen::MatrixXd& coefficients, double tol,
                             double threshold) {
  WitnessReport report;
  report.threshold = threshold;
  report.coefficients_trivial = is_permutation_matrix(coefficients);

  const InstrumentSequence base = memory_sequence(process, blocks, {instrument});
  report.base = has_markov_order(process, blocks, base, tol);

  const Instrument mixed = mix_instrument(instrument, coefficients);
  const InstrumentSequence mixed_seq = memory_sequence(process, blocks, {mixed});
  report.mixed = has_markov_order(process, blocks, mixed_seq, tol);
  return report;
}

std::vector<CmiTableRow> cmi_instrument_table(
    const ProcessTensor& process, const BlockPartition& blocks,
    const std::vector<std::pair<std::string, Instrument>>& instruments,
    double log_base) {
  blocks.validate_cover(process.step_indices());
  if (blocks.memory.size() != 1)
    throw Error("cmi_instrument_table expects a single memory step");
  const std::string memory_input = step_input_name(blocks.memory.front());

  const std::vector<std::string> future = process.factors_of_steps(blocks.future);
  const std::vector<std::string> memory = process.factors_of_steps(blocks.memory);
  const std::vector<std::string> history = process.factors_of_steps(blocks.history);

  std::vector<CmiTableRow> rows;
  rows.push_back(
      {"bare", quantum_cmi(process.op(), future, memory, history, log_base)});
  for (const auto& [label, instrument] : instruments) {
    bool first = true;
    LabeledOperator post;
    for (const auto& el : instrument.elements) {
      LabeledOperator term = apply_map_to_factor(process.op(), memory_input, el);
      if (first) {
        post = std::move(term);
        first = false;
      } else {
        post += term;
      }
    }
    rows.push_back({label, quantum_cmi(post, future, memory, history, log_base)});
  }
  return rows;
}

}  // namespace qmarkov
