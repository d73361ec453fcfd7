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

#include "qmarkov/process_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace qmarkov {

std::string step_input_name(int step) { return "s" + std::to_string(step) + ":i"; }
std::string step_output_name(int step) { return "s" + std::to_string(step) + ":o"; }

std::optional<std::pair<int, bool>> parse_step_factor(std::string_view name) {
  if (name.size() < 4 || name.front() != 's') return std::nullopt;
  const std::size_t colon = name.find(':');
  if (colon == std::string_view::npos || colon + 2 != name.size()) return std::nullopt;
  const char wire = name[colon + 1];
  if (wire != 'i' && wire != 'o') return std::nullopt;
  int step = 0;
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = name[i];
    if (c < '0' || c > '9') return std::nullopt;
    step = step * 10 + (c - '0');
  }
  if (colon == 1) return std::nullopt;
  return std::make_pair(step, wire == 'o');
}

namespace {

// Canonical layout: steps descending, each step's output factor before its
// input factor.
bool canonical_before(const std::string& a, const std::string& b) {
  const auto pa = parse_step_factor(a);
  const auto pb = parse_step_factor(b);
  if (pa->first != pb->first) return pa->first > pb->first;
  return pa->second && !pb->second;
}

std::vector<std::string> canonical_order(std::vector<std::string> names) {
  for (const auto& n : names)
    if (!parse_step_factor(n))
      throw Error("factor '" + n + "' is not a step factor (s<j>:i or s<j>:o)");
  std::sort(names.begin(), names.end(), canonical_before);
  return names;
}

LabeledOperator canonicalize(const LabeledOperator& op) {
  const auto order = canonical_order(op.factor_names());
  if (order == op.factor_names()) return op;
  return permute_factors(op, order);
}

// Drops element factors that name output wires absent from the target
// operator (the prepared state goes nowhere, so it is traced out); errors on
// absent input wires.
LabeledOperator drop_missing_outputs(const LabeledOperator& target,
                                     const LabeledOperator& element) {
  std::vector<std::string> missing;
  for (const auto& f : element.factors()) {
    if (target.has_factor(f.name)) continue;
    const auto parsed = parse_step_factor(f.name);
    if (!parsed || !parsed->second)
      throw Error("element factor '" + f.name + "' is not part of the process");
    missing.push_back(f.name);
  }
  if (missing.empty()) return element;
  return partial_trace(element, missing);
}

}  // namespace

ProcessTensor::ProcessTensor(LabeledOperator op) : op_(canonicalize(op)) {
  std::set<int> with_input;
  std::set<int> seen;
  for (const auto& f : op_.factors()) {
    const auto parsed = parse_step_factor(f.name);
    seen.insert(parsed->first);
    if (!parsed->second) with_input.insert(parsed->first);
  }
  if (seen.empty()) throw Error("a process needs at least one step");
  for (int s : seen)
    if (!with_input.count(s))
      throw Error("step " + std::to_string(s) + " has no input factor");
  steps_.assign(seen.begin(), seen.end());
}

bool ProcessTensor::has_output(int step) const {
  return op_.has_factor(step_output_name(step));
}

Eigen::Index ProcessTensor::input_dim(int step) const {
  return op_.factor_dim(step_input_name(step));
}

Eigen::Index ProcessTensor::output_dim(int step) const {
  const std::string name = step_output_name(step);
  return op_.has_factor(name) ? op_.factor_dim(name) : 1;
}

double ProcessTensor::expected_trace() const {
  double d = 1.0;
  for (int s : steps_) d *= static_cast<double>(output_dim(s));
  return d;
}

std::vector<std::string> ProcessTensor::factors_of_steps(
    const std::vector<int>& steps) const {
  std::vector<std::string> names;
  for (const auto& f : op_.factors()) {
    const auto parsed = parse_step_factor(f.name);
    if (std::find(steps.begin(), steps.end(), parsed->first) != steps.end())
      names.push_back(f.name);
  }
  return names;
}

double ProcessReport::max_causality_deviation() const {
  double m = 0.0;
  for (const auto& level : causality) m = std::max(m, level.deviation);
  return m;
}

bool ProcessReport::ok(double tol) const {
  return hermiticity_deviation <= tol && min_eigenvalue >= -tol &&
         trace_deviation <= tol && max_causality_deviation() <= tol;
}

ProcessReport validate_process(const ProcessTensor& process) {
  ProcessReport report;
  const LabeledOperator& op = process.op();
  report.hermiticity_deviation = hermiticity_deviation(op.matrix());
  {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        (op.matrix() + op.matrix().adjoint()) / 2.0);
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
  }
  report.trace_deviation =
      std::abs(op.trace() - Complex(process.expected_trace(), 0.0));

  const std::vector<int>& steps = process.step_indices();
  LabeledOperator cur = op;

  // A discarded final feedback wire must factor out as the identity.
  const int top = steps.back();
  if (process.has_output(top)) {
    const std::string o_top = step_output_name(top);
    LabeledOperator rest = partial_trace(cur, {o_top});
    rest *= Complex(1.0 / static_cast<double>(process.output_dim(top)), 0.0);
    const LabeledOperator model =
        kron(LabeledOperator::identity({{o_top, process.output_dim(top)}}), rest);
    report.causality.push_back(
        {"discard " + o_top, trace_norm(cur.matrix() - model.matrix())});
    cur = std::move(rest);
  }

  // Tracing a step's input exposes the identity on the previous step's output
  // tensored with the marginal process on the earlier steps.
  for (std::size_t i = steps.size(); i-- > 1;) {
    const int step = steps[i];
    const int prev = steps[i - 1];
    LabeledOperator traced = partial_trace(cur, {step_input_name(step)});
    if (process.has_output(prev)) {
      const std::string o_prev = step_output_name(prev);
      LabeledOperator rest = partial_trace(traced, {o_prev});
      rest *= Complex(1.0 / static_cast<double>(process.output_dim(prev)), 0.0);
      const LabeledOperator model = kron(
          LabeledOperator::identity({{o_prev, process.output_dim(prev)}}), rest);
      report.causality.push_back(
          {"marginal after step " + std::to_string(step),
           trace_norm(traced.matrix() - model.matrix())});
      cur = std::move(rest);
    } else {
      report.causality.push_back(
          {"marginal after step " + std::to_string(step), 0.0});
      cur = std::move(traced);
    }
  }

  // What remains is the state handed over at the earliest step.
  report.causality.push_back(
      {"initial trace", std::abs(cur.trace() - Complex(1.0, 0.0))});
  return report;
}

CpMap on_step(const CpMap& map, int step) {
  LabeledOperator op = relabel_factor(map.choi, kMapOut, step_output_name(step));
  op = relabel_factor(op, kMapIn, step_input_name(step));
  return {map.outcome, std::move(op)};
}

InstrumentSequence product_sequence(const std::vector<Instrument>& per_step,
                                    int first_step) {
  if (per_step.empty()) throw Error("product_sequence needs at least one step");
  InstrumentSequence seq;
  seq.elements.push_back({"", LabeledOperator()});
  for (std::size_t j = 0; j < per_step.size(); ++j) {
    const int step = first_step + static_cast<int>(j);
    std::vector<SequenceElement> next;
    for (const auto& partial : seq.elements) {
      for (const auto& el : per_step[j].elements) {
        const CpMap bound = on_step(el, step);
        std::string outcome = partial.outcome.empty()
                                  ? el.outcome
                                  : partial.outcome + "," + el.outcome;
        // Later steps are more significant, so the new factor goes in front.
        next.push_back({std::move(outcome), kron(bound.choi, partial.op)});
      }
    }
    seq.elements = std::move(next);
  }
  return seq;
}

double SequenceReport::max_normalization_deviation() const {
  double m = 0.0;
  for (const auto& level : normalization) m = std::max(m, level.deviation);
  return m;
}

bool SequenceReport::ok(double tol) const {
  return max_hermiticity_deviation <= tol && min_element_eigenvalue >= -tol &&
         max_normalization_deviation() <= tol;
}

SequenceReport validate_sequence(const InstrumentSequence& sequence) {
  if (sequence.elements.empty()) throw Error("sequence has no elements");
  SequenceReport report;
  report.min_element_eigenvalue = std::numeric_limits<double>::infinity();

  LabeledOperator sum;
  bool first = true;
  for (const auto& el : sequence.elements) {
    const LabeledOperator op = canonicalize(el.op);
    report.max_hermiticity_deviation = std::max(
        report.max_hermiticity_deviation, hermiticity_deviation(op.matrix()));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        (op.matrix() + op.matrix().adjoint()) / 2.0);
    report.min_element_eigenvalue =
        std::min(report.min_element_eigenvalue, solver.eigenvalues().minCoeff());
    if (first) {
      sum = op;
      first = false;
    } else {
      if (sum.factors() != op.factors())
        throw Error("sequence elements must share one factor layout");
      sum += op;
    }
  }

  // Present steps, descending.
  std::vector<int> steps;
  for (const auto& f : sum.factors()) {
    const int s = parse_step_factor(f.name)->first;
    if (std::find(steps.begin(), steps.end(), s) == steps.end()) steps.push_back(s);
  }
  std::sort(steps.rbegin(), steps.rend());

  LabeledOperator cur = squeeze(sum);
  for (const int step : steps) {
    const std::string o_name = step_output_name(step);
    const std::string i_name = step_input_name(step);
    if (cur.has_factor(o_name)) cur = partial_trace(cur, {o_name});
    if (!cur.has_factor(i_name)) {
      if (sum.has_factor(i_name)) continue;  // dimension-1 input, squeezed away
      throw Error("sequence misses the input factor of step " + std::to_string(step));
    }
    const Eigen::Index d = cur.factor_dim(i_name);
    LabeledOperator rest = partial_trace(cur, {i_name});
    rest *= Complex(1.0 / static_cast<double>(d), 0.0);
    const LabeledOperator model = kron(LabeledOperator::identity({{i_name, d}}), rest);
    report.normalization.push_back(
        {"step " + std::to_string(step), trace_norm(cur.matrix() - model.matrix())});
    cur = std::move(rest);
  }
  report.normalization.push_back(
      {"total weight", std::abs(cur.matrix()(0, 0) - Complex(1.0, 0.0))});
  return report;
}

namespace {

// Shared by born_probability and condition: contraction of the process with
// one probing element, with the element squeezed and its dangling preparation
// factors traced out.
LabeledOperator contract_element(const ProcessTensor& process,
                                 const LabeledOperator& element) {
  const LabeledOperator target = squeeze(process.op());
  LabeledOperator el = squeeze(element);
  el = drop_missing_outputs(target, el);
  return contract(target, el);
}

}  // namespace

double born_probability(const ProcessTensor& process, const LabeledOperator& element) {
  const LabeledOperator value = contract_element(process, element);
  if (!value.factors().empty())
    throw Error("probing element does not cover the whole process");
  const Complex v = value.matrix()(0, 0);
  if (std::abs(v.imag()) > 1e-9)
    throw Error("probability has a non-real value; inputs are not Hermitian");
  return v.real();
}

double born_probability(const ProcessTensor& process, const SequenceElement& element) {
  return born_probability(process, element.op);
}

std::vector<OutcomeProbability> born_probabilities(
    const ProcessTensor& process, const InstrumentSequence& sequence) {
  std::vector<OutcomeProbability> out;
  out.reserve(sequence.elements.size());
  for (const auto& el : sequence.elements)
    out.push_back({el.outcome, born_probability(process, el.op)});
  return out;
}

ConditionalOutcome condition(const ProcessTensor& process,
                             const SequenceElement& element) {
  LabeledOperator w = contract_element(process, element.op);
  if (w.factors().empty())
    throw Error("conditioning element covers every step; use born_probability");

  double remaining_outputs = 1.0;
  for (const auto& f : w.factors()) {
    const auto parsed = parse_step_factor(f.name);
    if (parsed->second) remaining_outputs *= static_cast<double>(f.dim);
  }
  const double alpha = w.trace().real();
  const double probability = alpha / remaining_outputs;
  if (probability < kProbFloor)
    throw ZeroProbabilityError("outcome '" + element.outcome +
                               "' has probability " + std::to_string(probability));
  w *= Complex(remaining_outputs / alpha, 0.0);
  return {element.outcome, probability, std::move(w)};
}

ProcessTensor markovian_process(const Matrix& initial_state,
                                const std::vector<CpMap>& channels) {
  if (initial_state.rows() != initial_state.cols())
    throw Error("initial state must be square");
  if (hermiticity_deviation(initial_state) > kTolHermitian)
    throw Error("initial state must be Hermitian");
  if (std::abs(initial_state.trace() - Complex(1.0, 0.0)) > kTolTrace)
    throw Error("initial state must have unit trace");

  std::vector<LabeledOperator> parts;
  for (std::size_t k = channels.size(); k-- > 0;) {
    const CpMap& ch = channels[k];
    const Matrix reduced = partial_trace(ch.choi, {kMapOut}).matrix();
    if (trace_norm(reduced - Matrix::Identity(reduced.rows(), reduced.cols())) >
        kTolTrace)
      throw Error("channel " + std::to_string(k) + " is not trace preserving");
    LabeledOperator op = relabel_factor(ch.choi, kMapOut,
                                        step_input_name(static_cast<int>(k) + 1));
    op = relabel_factor(op, kMapIn, step_output_name(static_cast<int>(k)));
    parts.push_back(std::move(op));
  }
  parts.emplace_back(
      std::vector<FactorLabel>{{step_input_name(0), initial_state.rows()}},
      initial_state);
  return ProcessTensor(kron(parts));
}

ProcessTensor embed_classical(const JointDistribution& dist) {
  const int n = dist.steps();
  std::vector<FactorLabel> factors;
  for (int j = n; j-- > 0;)
    factors.push_back({step_input_name(j),
                       dist.alphabet_sizes()[static_cast<std::size_t>(j)]});

  // Strides of each step in the process layout (later steps more significant).
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(n), 1);
  for (int j = 1; j < n; ++j)
    stride[static_cast<std::size_t>(j)] =
        stride[static_cast<std::size_t>(j - 1)] *
        dist.alphabet_sizes()[static_cast<std::size_t>(j - 1)];

  Eigen::Index total = 1;
  for (const auto& f : factors) total *= f.dim;
  Matrix m = Matrix::Zero(total, total);
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const std::vector<int> outcome = dist.outcome_of(idx);
    Eigen::Index pidx = 0;
    for (int j = 0; j < n; ++j)
      pidx += outcome[static_cast<std::size_t>(j)] * stride[static_cast<std::size_t>(j)];
    m(pidx, pidx) = dist.table()[idx];
  }
  return ProcessTensor(LabeledOperator(std::move(factors), std::move(m)));
}

JointDistribution extract_classical(const ProcessTensor& process) {
  const LabeledOperator& op = process.op();
  for (const auto& f : op.factors())
    if (parse_step_factor(f.name)->second)
      throw Error("extract_classical expects a process without output factors");

  const Matrix& m = op.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (r != c && std::abs(m(r, c)) > kTolDual)
        throw Error("extract_classical expects a diagonal operator");

  const std::vector<int>& steps = process.step_indices();
  const int n = static_cast<int>(steps.size());
  std::vector<int> sizes;
  for (int s : steps) sizes.push_back(static_cast<int>(process.input_dim(s)));

  // Process factor strides per step (ascending step order).
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(n), 1);
  for (int j = 1; j < n; ++j)
    stride[static_cast<std::size_t>(j)] =
        stride[static_cast<std::size_t>(j - 1)] * sizes[static_cast<std::size_t>(j - 1)];

  std::size_t total = 1;
  for (int d : sizes) total *= static_cast<std::size_t>(d);
  std::vector<double> table(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    // Decompose the table index (first step most significant).
    std::size_t rem = idx;
    Eigen::Index pidx = 0;
    for (int j = n; j-- > 0;) {
      const auto d = static_cast<std::size_t>(sizes[static_cast<std::size_t>(j)]);
      pidx += static_cast<Eigen::Index>(rem % d) * stride[static_cast<std::size_t>(j)];
      rem /= d;
    }
    table[idx] = m(pidx, pidx).real();
  }
  return JointDistribution(std::move(sizes), std::move(table));
}

}  // namespace qmarkov
