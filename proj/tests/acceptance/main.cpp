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

// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero when any of them fail. Tolerances are
// pinned here on purpose: loosening them is an API break, not a test fix.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qmarkov/io.hpp"
#include "qmarkov/markov_order.hpp"
#include "../support/test_helpers.hpp"

using namespace qmarkov;
using Clock = std::chrono::steady_clock;

namespace {

Eigen::Index g_max_dim = 0;

void note_dim(Eigen::Index dim) {
  if (dim > g_max_dim) g_max_dim = dim;
}

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& on_fail) {
    if (!ok) {
      pass = false;
      if (!detail.str().empty()) detail << "; ";
      detail << on_fail;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

BlockPartition middle_blocks(const ProcessTensor& process) {
  return partition_at_cut(process.step_indices(), 2, 1);
}

InstrumentSequence probe_middle(const ProcessTensor& process,
                                const Instrument& instrument) {
  return memory_sequence(process, middle_blocks(process), {instrument});
}

std::vector<int> parse_outcome(const std::string& label) {
  std::vector<int> out;
  std::stringstream ss(label);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

Instrument kraus_instrument(test::Rng& rng, Eigen::Index d_out,
                            Eigen::Index d_in, int n) {
  Instrument instrument;
  int k = 0;
  for (const Matrix& kraus : test::random_kraus(rng, d_out, d_in, n))
    instrument.elements.push_back(
        choi_from_kraus({kraus}, std::to_string(k++)));
  return instrument;
}

Instrument noisy_mixed_instrument() {
  Eigen::MatrixXd noise(2, 2);
  noise << 0.7, 0.3, 0.3, 0.7;
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  return with_preparation(mix_instrument(computational_measurement(2), noise),
                          ground);
}

InstrumentSequence bell_tester(int low_step, const Matrix& prep_low,
                               const Matrix& prep_high) {
  const int high_step = low_step + 1;
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<std::vector<double>> amps = {
      {r, 0, 0, r}, {r, 0, 0, -r}, {0, r, r, 0}, {0, r, -r, 0}};
  InstrumentSequence seq;
  int k = 0;
  for (const auto& a : amps) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v(i) = a[static_cast<std::size_t>(i)];
    const Matrix proj = (v * v.adjoint()).transpose();
    const LabeledOperator op =
        kron(kron(LabeledOperator({{step_output_name(high_step), 2}}, prep_high),
                  LabeledOperator({{step_input_name(high_step), 2},
                                   {step_input_name(low_step), 2}},
                                  proj)),
             LabeledOperator({{step_output_name(low_step), 2}}, prep_low));
    seq.elements.push_back({"bell" + std::to_string(k++), op});
  }
  return seq;
}

// --------------------------------------------------------------------------
// Criterion 1: the three-step example process has conditional mutual
// information matching the reference value 0.059 in exactly one log base.

Check criterion_1() {
  Check c;
  const auto start = Clock::now();
  const ProcessTensor process = tetrahedral_process();
  note_dim(process.op().dim());
  const BlockPartition blocks = middle_blocks(process);
  const double bits = quantum_cmi(process, blocks, 2.0);
  const double nats = quantum_cmi(process, blocks, std::exp(1.0));
  const double elapsed = ms_since(start);

  const bool bits_match = std::abs(bits - 0.059) <= 0.002;
  const bool nats_match = std::abs(nats - 0.059) <= 0.002;
  c.require(bits_match, "base-2 value " + fmt(bits) + " misses 0.059 +- 0.002");
  c.require(!nats_match, "natural-log value also matches; base is ambiguous");
  c.require(std::abs(nats - 0.040986406162503) <= 1e-9,
            "natural-log anchor drifted to " + fmt(nats));
  c.require(elapsed < 1000.0, "took " + fmt(elapsed) + " ms");
  if (c.pass)
    c.detail << "base 2: " << fmt(bits) << " bits (anchor " << fmt(nats)
             << " nats) in " << fmt(elapsed) << " ms";
  return c;
}

// --------------------------------------------------------------------------
// Criterion 2: probing the middle step with the tetrahedral measurement
// leaves conditional product operators matching the closed forms.

Check criterion_2() {
  Check c;
  const ProcessTensor process = tetrahedral_process();
  const BlockPartition blocks = middle_blocks(process);
  const InstrumentSequence seq =
      probe_middle(process, tetrahedral_measurement());
  const MarkovOrderVerdict verdict =
      has_markov_order(process, blocks, seq, 1e-9);
  c.require(verdict.holds, "factorization fails under the matched instrument");

  const auto triples = conditional_decomposition(process, blocks, seq);
  const auto conds = tetrahedral_conditional_states();
  double max_distance = 0.0;
  double max_state_gap = 0.0;
  for (std::size_t b = 0; b < triples.size(); ++b) {
    const auto& t = triples[b];
    c.require(!t.skipped, "outcome " + t.outcome + " skipped");
    if (t.skipped) continue;
    max_distance = std::max(max_distance, t.factorization_distance);
    // Expected conditional: future (x) untouched feedback wire (x) history,
    // with the same post-measurement state on both end steps.
    const LabeledOperator expected =
        kron(kron(LabeledOperator({{"s2:i", 2}}, conds[b]),
                  LabeledOperator::identity({{"s0:o", 2}}) * Complex(0.5, 0.0)),
             LabeledOperator({{"s0:i", 2}}, conds[b]));
    const LabeledOperator normalized = t.joint * Complex(0.5, 0.0);
    max_state_gap =
        std::max(max_state_gap, trace_distance(normalized, expected));
  }
  c.require(triples.size() == 4, "expected 4 outcomes");
  c.require(max_distance <= 1e-9,
            "factorization distance " + fmt(max_distance) + " > 1e-9");
  c.require(max_state_gap <= 1e-9,
            "conditional state gap " + fmt(max_state_gap) + " > 1e-9");
  if (c.pass)
    c.detail << "4 outcomes, max factorization distance " << fmt(max_distance)
             << ", max closed-form gap " << fmt(max_state_gap);
  return c;
}

// --------------------------------------------------------------------------
// Criterion 3: the sharp computational-basis instrument on the same step
// breaks the factorization by a frozen, macroscopic margin.

Check criterion_3() {
  Check c;
  const ProcessTensor process = tetrahedral_process();
  const MarkovOrderVerdict verdict =
      has_markov_order(process, middle_blocks(process),
                       probe_middle(process, computational_measurement(2)));
  c.require(!verdict.holds, "sharp probing unexpectedly factorizes");
  c.require(verdict.max_distance > 0.01,
            "max distance " + fmt(verdict.max_distance) + " <= 0.01");
  // Regression value frozen from a high-precision reference computation.
  const double frozen = 0.056917725157684944;
  for (const auto& o : verdict.outcomes)
    c.require(std::abs(o.distance - frozen) <= 1e-9,
              "outcome " + o.outcome + " distance " + fmt(o.distance) +
                  " drifted from " + fmt(frozen));
  if (c.pass)
    c.detail << "both outcomes at distance " << fmt(verdict.max_distance)
             << " > 0.01";
  return c;
}

// --------------------------------------------------------------------------
// Criterion 4: embedded classical distributions behave classically: sharp
// probing reproduces the table, and the two Markov-order notions agree.

JointDistribution random_iid(test::Rng& rng, const std::vector<int>& sizes) {
  std::vector<std::vector<double>> marginals;
  for (int d : sizes)
    marginals.push_back(test::random_table(rng, static_cast<std::size_t>(d)));
  std::size_t total = 1;
  for (int d : sizes) total *= static_cast<std::size_t>(d);
  std::vector<double> table(total);
  JointDistribution shape(sizes, std::vector<double>(total, 1.0 / double(total)));
  for (std::size_t i = 0; i < total; ++i) {
    const auto outcome = shape.outcome_of(i);
    double p = 1.0;
    for (std::size_t k = 0; k < outcome.size(); ++k)
      p *= marginals[k][static_cast<std::size_t>(outcome[k])];
    table[i] = p;
  }
  return JointDistribution(sizes, table);
}

JointDistribution random_order1_chain(test::Rng& rng,
                                      const std::vector<int>& sizes) {
  const std::vector<double> initial =
      test::random_table(rng, static_cast<std::size_t>(sizes[0]));
  // One random column-stochastic transition table per link.
  std::vector<std::vector<double>> links;
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    std::vector<double> t;
    for (int from = 0; from < sizes[k - 1]; ++from) {
      const auto row = test::random_table(rng, static_cast<std::size_t>(sizes[k]));
      t.insert(t.end(), row.begin(), row.end());
    }
    links.push_back(std::move(t));
  }
  std::size_t total = 1;
  for (int d : sizes) total *= static_cast<std::size_t>(d);
  JointDistribution shape(sizes, std::vector<double>(total, 1.0 / double(total)));
  std::vector<double> table(total);
  for (std::size_t i = 0; i < total; ++i) {
    const auto outcome = shape.outcome_of(i);
    double p = initial[static_cast<std::size_t>(outcome[0])];
    for (std::size_t k = 1; k < outcome.size(); ++k)
      p *= links[k - 1][static_cast<std::size_t>(
          outcome[k - 1] * sizes[k] + outcome[k])];
    table[i] = p;
  }
  return JointDistribution(sizes, table);
}

Check criterion_4() {
  Check c;
  test::Rng rng(404);
  std::uniform_int_distribution<int> step_count(2, 4);
  std::uniform_int_distribution<int> alphabet(2, 3);
  std::uniform_int_distribution<int> family(0, 2);

  int checked = 0;
  double worst_probability_gap = 0.0;
  int verdict_disagreements = 0;
  for (int rep = 0; rep < 102; ++rep) {
    std::vector<int> sizes(static_cast<std::size_t>(step_count(rng)));
    for (auto& d : sizes) d = alphabet(rng);
    JointDistribution dist = [&] {
      switch (family(rng)) {
        case 0: return random_iid(rng, sizes);
        case 1: return random_order1_chain(rng, sizes);
        default:
          return JointDistribution(sizes, test::random_table(rng, [&] {
                                     std::size_t t = 1;
                                     for (int d : sizes)
                                       t *= static_cast<std::size_t>(d);
                                     return t;
                                   }()));
      }
    }();

    const ProcessTensor process = embed_classical(dist);
    note_dim(process.op().dim());
    const auto steps = process.step_indices();

    // Sharp probing of every step reproduces the table entry for entry.
    std::vector<Instrument> sharp;
    for (int s : steps)
      sharp.push_back(computational_measurement(process.input_dim(s)));
    for (const auto& p :
         born_probabilities(process, product_sequence(sharp, steps.front()))) {
      const double expected = dist.at(parse_outcome(p.outcome));
      worst_probability_gap =
          std::max(worst_probability_gap, std::abs(p.probability - expected));
    }

    // Verdict agreement at every cut and memory length.
    for (std::size_t cut = 1; cut + 1 <= steps.size(); ++cut) {
      for (std::size_t ell = 1; ell <= cut; ++ell) {
        const BlockPartition blocks = partition_at_cut(steps, cut, ell);
        const bool classical =
            markov_order_holds_at_cut(dist, ell, cut, kTolClassical);
        std::vector<Instrument> probe;
        for (int s : blocks.memory)
          probe.push_back(computational_measurement(process.input_dim(s)));
        const bool quantum =
            has_markov_order(process, blocks,
                             memory_sequence(process, blocks, probe), 1e-9)
                .holds;
        if (classical != quantum) ++verdict_disagreements;
      }
    }
    ++checked;
  }
  c.require(checked >= 100, "only " + std::to_string(checked) + " cases ran");
  c.require(worst_probability_gap <= 1e-12,
            "probability mismatch " + fmt(worst_probability_gap) + " > 1e-12");
  c.require(verdict_disagreements == 0,
            std::to_string(verdict_disagreements) +
                " cut/length combinations disagreed");
  if (c.pass)
    c.detail << checked << " distributions, worst probability gap "
             << fmt(worst_probability_gap) << ", verdicts agree at every cut";
  return c;
}

// --------------------------------------------------------------------------
// Criterion 5: classically mixing the matched instrument destroys the
// factorization, so Markov order is a property of the probing, not the
// process alone.

Check criterion_5() {
  Check c;
  const ProcessTensor process = tetrahedral_process();
  Eigen::MatrixXd lump = Eigen::MatrixXd::Zero(4, 2);
  for (int x = 0; x < 4; ++x) lump(x, x / 2) = 1.0;
  const WitnessReport report = mixing_witness(
      process, middle_blocks(process), tetrahedral_measurement(), lump);
  c.require(report.base.holds, "matched instrument does not factorize");
  c.require(!report.coefficients_trivial, "mixing judged a relabeling");
  c.require(report.mixed.max_distance > 1e-3,
            "mixed distance " + fmt(report.mixed.max_distance) + " <= 1e-3");
  // Frozen reference value for the two-outcome lumping: 1/24.
  c.require(std::abs(report.mixed.max_distance - 1.0 / 24.0) <= 1e-9,
            "mixed distance drifted to " + fmt(report.mixed.max_distance));
  c.require(report.demonstrates(), "witness does not demonstrate dependence");
  if (c.pass)
    c.detail << "base max distance " << fmt(report.base.max_distance)
             << ", mixed " << fmt(report.mixed.max_distance) << " > 1e-3";
  return c;
}

// --------------------------------------------------------------------------
// Criterion 6: memoryless processes stay factorized under every probing
// strategy in the library.

Check criterion_6() {
  Check c;
  test::Rng rng(606);
  double worst_validation = 0.0;
  double worst_distance = 0.0;

  for (int rep = 0; rep < 5 && c.pass; ++rep) {
    const ProcessTensor chain = markovian_process(
        test::random_density(rng, 2),
        {test::random_channel(rng, 2, 2), test::random_channel(rng, 2, 2)});
    note_dim(chain.op().dim());
    const ProcessReport report = validate_process(chain);
    worst_validation = std::max(
        {worst_validation, report.hermiticity_deviation,
         std::max(0.0, -report.min_eigenvalue), report.trace_deviation,
         report.max_causality_deviation()});
    c.require(report.ok(1e-10), "chain fails validation at 1e-10");

    const BlockPartition blocks = middle_blocks(chain);
    const std::vector<Instrument> library = {
        sharp_classical_instrument(2), tetrahedral_measurement(),
        noisy_mixed_instrument()};
    for (const auto& instrument : library) {
      const MarkovOrderVerdict verdict = has_markov_order(
          chain, blocks, memory_sequence(chain, blocks, {instrument}));
      c.require(verdict.holds, "single-step probing breaks a memoryless chain");
      worst_distance = std::max(worst_distance, verdict.max_distance);
    }
  }

  // Entangled tester across a two-step memory block of a longer chain.
  for (int rep = 0; rep < 3 && c.pass; ++rep) {
    const ProcessTensor chain = markovian_process(
        test::random_density(rng, 2),
        {test::random_channel(rng, 2, 2), test::random_channel(rng, 2, 2),
         test::random_channel(rng, 2, 2)});
    note_dim(chain.op().dim());
    c.require(validate_process(chain).ok(1e-10),
              "4-step chain fails validation at 1e-10");
    const BlockPartition blocks =
        partition_at_cut(chain.step_indices(), 3, 2);
    const InstrumentSequence bell = bell_tester(
        1, test::random_density(rng, 2), test::random_density(rng, 2));
    const MarkovOrderVerdict verdict = has_markov_order(chain, blocks, bell);
    c.require(verdict.holds, "entangled probing breaks a memoryless chain");
    worst_distance = std::max(worst_distance, verdict.max_distance);
  }

  if (c.pass)
    c.detail << "worst validation deviation " << fmt(worst_validation)
             << ", worst factorization distance " << fmt(worst_distance);
  return c;
}

// --------------------------------------------------------------------------
// Criterion 7: property suites over randomized inputs.

Check criterion_7() {
  Check c;
  test::Rng rng(707);
  std::uniform_int_distribution<int> dim(2, 3);
  std::uniform_int_distribution<int> element_count(2, 3);

  // (a) Born-rule completeness over 1000 process/instrument pairs.
  double worst_total_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int steps = 2 + (rep % 2);
    std::vector<Eigen::Index> in_dims, out_dims;
    for (int k = 0; k < steps; ++k) in_dims.push_back(dim(rng));
    for (int k = 0; k + 1 < steps; ++k) out_dims.push_back(dim(rng));

    std::vector<CpMap> channels;
    for (int k = 0; k + 1 < steps; ++k)
      channels.push_back(test::random_channel(
          rng, in_dims[static_cast<std::size_t>(k + 1)],
          out_dims[static_cast<std::size_t>(k)]));
    const ProcessTensor process = markovian_process(
        test::random_density(rng, in_dims[0]), channels);
    note_dim(process.op().dim());

    std::vector<Instrument> per_step;
    for (int k = 0; k + 1 < steps; ++k)
      per_step.push_back(kraus_instrument(
          rng, out_dims[static_cast<std::size_t>(k)],
          in_dims[static_cast<std::size_t>(k)], element_count(rng)));
    per_step.push_back(povm_instrument(test::random_povm(
        rng, in_dims[static_cast<std::size_t>(steps - 1)],
        element_count(rng))));

    double total = 0.0;
    for (const auto& p :
         born_probabilities(process, product_sequence(per_step, 0)))
      total += p.probability;
    worst_total_gap = std::max(worst_total_gap, std::abs(total - 1.0));
  }
  c.require(worst_total_gap <= 1e-10,
            "probability totals off by " + fmt(worst_total_gap));

  // (b) Conditional mutual information is never meaningfully negative.
  double min_cmi = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    const LabeledOperator state({{"f", 2}, {"m", 2}, {"h", 2}},
                                test::random_density(rng, 8));
    min_cmi = std::min(min_cmi, quantum_cmi(state, {"f"}, {"m"}, {"h"}));
  }
  for (int rep = 0; rep < 20; ++rep) {
    const ProcessTensor chain = markovian_process(
        test::random_density(rng, 2),
        {test::random_channel(rng, 2, 2), test::random_channel(rng, 2, 2)});
    min_cmi = std::min(min_cmi, quantum_cmi(chain, middle_blocks(chain)));
  }
  c.require(min_cmi >= -1e-9, "CMI dropped to " + fmt(min_cmi));

  // (c) The tetrahedral dual set is biorthogonal to machine precision.
  const DualBasis dual = dual_basis(tetrahedral_effects());
  double worst_dual = 0.0;
  for (std::size_t x = 0; x < dual.basis.size(); ++x)
    for (std::size_t y = 0; y < dual.duals.size(); ++y) {
      const double expected = x == y ? 1.0 : 0.0;
      worst_dual = std::max(
          worst_dual,
          std::abs((dual.basis[x] * dual.duals[y]).trace().real() - expected));
    }
  c.require(worst_dual <= 1e-12, "biorthogonality off by " + fmt(worst_dual));

  // (d) Classical CMI vanishes exactly where conditional independence holds,
  // across every cut and memory length of each distribution.
  int cmi_disagreements = 0;
  int combos = 0;
  std::uniform_int_distribution<int> alphabet(2, 3);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<int> sizes(static_cast<std::size_t>(3 + rep % 2));
    for (auto& d : sizes) d = alphabet(rng);
    std::vector<JointDistribution> cases;
    cases.push_back(random_iid(rng, sizes));
    cases.push_back(random_order1_chain(rng, sizes));
    {
      std::size_t total = 1;
      for (int d : sizes) total *= static_cast<std::size_t>(d);
      cases.push_back(JointDistribution(sizes, test::random_table(rng, total)));
    }
    for (const auto& dist : cases) {
      const auto steps = [&] {
        std::vector<int> s(sizes.size());
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = static_cast<int>(k);
        return s;
      }();
      for (std::size_t cut = 1; cut + 1 <= sizes.size(); ++cut)
        for (std::size_t ell = 0; ell <= cut; ++ell) {
          const BlockPartition blocks = partition_at_cut(steps, cut, ell);
          const bool cmi_zero = classical_cmi(dist, blocks) <= 1e-9;
          const bool independent =
              conditional_independence_deviation(dist, blocks) <= 1e-9;
          if (cmi_zero != independent) ++cmi_disagreements;
          ++combos;
        }
    }
  }
  c.require(cmi_disagreements == 0,
            std::to_string(cmi_disagreements) + " of " +
                std::to_string(combos) + " combos disagreed");

  if (c.pass)
    c.detail << "1000 Born totals within " << fmt(worst_total_gap)
             << ", min CMI " << fmt(min_cmi) << ", dual gap "
             << fmt(worst_dual) << ", " << combos
             << " CMI/independence combos agree";
  return c;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::vector<std::function<Check()>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4,
      criterion_5, criterion_6, criterion_7};

  bool all_pass = true;
  int id = 1;
  for (const auto& run : criteria) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail.str(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s - %s\n", id++, c.pass ? "PASS" : "FAIL",
                c.detail.str().c_str());
    all_pass = all_pass && c.pass;
  }

  const double elapsed_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  const bool perf = elapsed_s < 60.0 && g_max_dim <= 256;
  std::printf("criterion 8: %s - total %.2f s, largest operator %lldx%lld\n",
              perf ? "PASS" : "FAIL", elapsed_s,
              static_cast<long long>(g_max_dim),
              static_cast<long long>(g_max_dim));
  all_pass = all_pass && perf;
  return all_pass ? 0 : 1;
}
