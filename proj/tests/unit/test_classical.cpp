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

#include <cmath>
#include <map>
#include <vector>

#include <doctest.h>

#include "qmarkov/classical.hpp"
#include "../support/test_helpers.hpp"

using namespace qmarkov;

namespace {

// Binary chain: uniform start, each step flips the previous bit with
// probability q. Markov order 1 by construction.
JointDistribution flip_chain(int steps, double q) {
  const std::size_t size = std::size_t{1} << steps;
  std::vector<double> table(size, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    double p = 0.5;
    for (int k = 1; k < steps; ++k) {
      const int prev = static_cast<int>(idx >> (steps - k)) & 1;
      const int cur = static_cast<int>(idx >> (steps - 1 - k)) & 1;
      p *= (cur == prev) ? (1.0 - q) : q;
    }
    table[idx] = p;
  }
  return JointDistribution(std::vector<int>(static_cast<std::size_t>(steps), 2),
                           std::move(table));
}

// X0, X1 uniform; every later bit is the XOR of the two before it. Needs two
// steps of memory.
JointDistribution parity_chain(int steps) {
  const std::size_t size = std::size_t{1} << steps;
  std::vector<double> table(size, 0.0);
  for (int x0 = 0; x0 < 2; ++x0)
    for (int x1 = 0; x1 < 2; ++x1) {
      std::vector<int> x = {x0, x1};
      while (static_cast<int>(x.size()) < steps)
        x.push_back(x[x.size() - 2] ^ x[x.size() - 1]);
      std::size_t idx = 0;
      for (int b : x) idx = idx * 2 + static_cast<std::size_t>(b);
      table[idx] = 0.25;
    }
  return JointDistribution(std::vector<int>(static_cast<std::size_t>(steps), 2),
                           std::move(table));
}

JointDistribution iid_uniform(int steps, int alphabet) {
  std::size_t size = 1;
  for (int k = 0; k < steps; ++k) size *= static_cast<std::size_t>(alphabet);
  return JointDistribution(
      std::vector<int>(static_cast<std::size_t>(steps), alphabet),
      std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

// Raw-loop re-derivation of the conditional-independence check, using its own
// indexing so library bugs cannot cancel.
bool oracle_holds(const std::vector<double>& table,
                  const std::vector<int>& sizes, std::size_t cut,
                  std::size_t ell, double tol) {
  const std::size_t n = sizes.size();
  const std::size_t mem_lo = cut >= ell ? cut - ell : 0;
  std::map<std::vector<int>, double> p_hm, p_m, p_mf, p_hmf;
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    std::vector<int> x(n);
    std::size_t rem = idx;
    for (std::size_t k = n; k-- > 0;) {
      x[k] = static_cast<int>(rem % static_cast<std::size_t>(sizes[k]));
      rem /= static_cast<std::size_t>(sizes[k]);
    }
    std::vector<int> h(x.begin(), x.begin() + static_cast<long>(mem_lo));
    std::vector<int> m(x.begin() + static_cast<long>(mem_lo),
                       x.begin() + static_cast<long>(cut));
    std::vector<int> f(x.begin() + static_cast<long>(cut), x.end());
    std::vector<int> hm = h;
    hm.insert(hm.end(), m.begin(), m.end());
    std::vector<int> mf = m;
    mf.insert(mf.end(), f.begin(), f.end());
    p_hm[hm] += table[idx];
    p_m[m] += table[idx];
    p_mf[mf] += table[idx];
    p_hmf[x] += table[idx];
  }
  double worst = 0.0;
  for (const auto& [x, p] : p_hmf) {
    std::vector<int> h(x.begin(), x.begin() + static_cast<long>(mem_lo));
    std::vector<int> m(x.begin() + static_cast<long>(mem_lo),
                       x.begin() + static_cast<long>(cut));
    std::vector<int> f(x.begin() + static_cast<long>(cut), x.end());
    std::vector<int> hm = h;
    hm.insert(hm.end(), m.begin(), m.end());
    std::vector<int> mf = m;
    mf.insert(mf.end(), f.begin(), f.end());
    if (p_hm[hm] <= 1e-12 || p_m[m] <= 1e-12) continue;
    worst = std::max(worst, std::abs(p / p_hm[hm] - p_mf[mf] / p_m[m]));
  }
  return worst <= tol;
}

}  // namespace

TEST_CASE("joint tables index and validate") {
  const JointDistribution dist({2, 3}, {0.1, 0.2, 0.3, 0.15, 0.15, 0.1});
  CHECK(dist.steps() == 2);
  CHECK(dist.size() == 6);
  CHECK(dist.index_of({1, 2}) == 5);
  CHECK(dist.index_of({0, 2}) == 2);
  CHECK(dist.outcome_of(4) == std::vector<int>{1, 1});
  CHECK(dist.at({1, 0}) == 0.15);
  for (std::size_t i = 0; i < dist.size(); ++i)
    CHECK(dist.index_of(dist.outcome_of(i)) == i);

  CHECK_THROWS_AS(JointDistribution({2}, {0.5, 0.4}), Error);
  CHECK_THROWS_AS(JointDistribution({2}, {1.5, -0.5}), Error);
  CHECK_THROWS_AS(JointDistribution({2, 2}, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(JointDistribution({0}, {1.0}), Error);
}

TEST_CASE("marginals sum out steps and renumber") {
  test::Rng rng(51);
  const JointDistribution dist({2, 3, 2}, test::random_table(rng, 12));
  const JointDistribution m02 = marginal(dist, {0, 2});
  CHECK(m02.alphabet_sizes() == std::vector<int>{2, 2});
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) {
      double expect = 0.0;
      for (int b = 0; b < 3; ++b) expect += dist.at({a, b, c});
      CHECK(std::abs(m02.at({a, c}) - expect) < 1e-15);
    }
  const JointDistribution all = marginal(dist, {0, 1, 2});
  for (std::size_t i = 0; i < dist.size(); ++i)
    CHECK(all.table()[i] == dist.table()[i]);
  CHECK_THROWS_AS(marginal(dist, {}), Error);
  CHECK_THROWS_AS(marginal(dist, {2, 0}), Error);
  CHECK_THROWS_AS(marginal(dist, {0, 3}), Error);
}

TEST_CASE("conditioning fixes events and renormalizes") {
  const JointDistribution dist({2, 2}, {0.1, 0.3, 0.2, 0.4});
  const JointDistribution given0 = conditioned(dist, {{0, 0}});
  CHECK(given0.steps() == 1);
  CHECK(std::abs(given0.at({0}) - 0.25) < 1e-15);
  CHECK(std::abs(given0.at({1}) - 0.75) < 1e-15);

  const JointDistribution impossible({2, 2}, {0.5, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(conditioned(impossible, {{0, 1}}), ZeroProbabilityError);
}

TEST_CASE("entropies match closed forms") {
  const JointDistribution uniform4({2, 2}, {0.25, 0.25, 0.25, 0.25});
  CHECK(std::abs(shannon_entropy(uniform4) - 2.0) < 1e-14);
  CHECK(std::abs(shannon_entropy(uniform4, std::exp(1.0)) -
                 2.0 * std::log(2.0)) < 1e-14);
  const JointDistribution point({3}, {0.0, 1.0, 0.0});
  CHECK(shannon_entropy(point) == 0.0);
  const JointDistribution skew({2}, {0.375, 0.625});
  CHECK(std::abs(shannon_entropy(skew) - 0.95443400292496363) < 1e-14);
}

TEST_CASE("conditional mutual information matches hand-computed values") {
  // Three perfectly copied bits.
  std::vector<double> copy(8, 0.0);
  copy[0] = 0.5;
  copy[7] = 0.5;
  const JointDistribution copied({2, 2, 2}, copy);

  // Knowing the middle bit makes the ends conditionally independent.
  CHECK(std::abs(classical_cmi(copied, {{0}, {1}, {2}})) < 1e-14);
  // Without the middle bit the ends share one full bit.
  CHECK(std::abs(classical_cmi(copied, {{0}, {}, {1, 2}}) - 1.0) < 1e-14);
  CHECK(std::abs(classical_cmi(copied, {{0}, {}, {1, 2}}, std::exp(1.0)) -
                 std::log(2.0)) < 1e-14);

  // Parity: the history bit is revealed only when conditioning on the middle.
  const JointDistribution parity = parity_chain(3);
  CHECK(std::abs(classical_cmi(parity, {{0}, {1}, {2}}) - 1.0) < 1e-14);
  CHECK(std::abs(classical_cmi(parity, {{0}, {}, {1, 2}}) - 1.0) < 1e-14);

  const JointDistribution iid = iid_uniform(3, 2);
  CHECK(std::abs(classical_cmi(iid, {{0}, {1}, {2}})) < 1e-14);
  CHECK(std::abs(classical_cmi(iid, {{}, {0, 1}, {2}})) < 1e-14);

  CHECK_THROWS_AS(classical_cmi(iid, {{0}, {2}, {1}}), Error);
  CHECK_THROWS_AS(classical_cmi(iid, {{0}, {1, 2}, {}}), Error);
}

TEST_CASE("conditional mutual information is non-negative and shrinks with memory") {
  test::Rng rng(52);
  for (int rep = 0; rep < 10; ++rep) {
    const JointDistribution dist({2, 2, 2, 2}, test::random_table(rng, 16));
    double prev = 1e300;
    for (std::size_t ell = 0; ell <= 3; ++ell) {
      const double cmi = classical_cmi(dist, partition_at_cut({0, 1, 2, 3}, 3, ell));
      CHECK(cmi > -1e-12);
      CHECK(cmi <= prev + 1e-12);
      prev = cmi;
    }
  }
}

TEST_CASE("cut partitions split steps as documented") {
  const std::vector<int> steps = {0, 1, 2, 3};
  BlockPartition p = partition_at_cut(steps, 2, 1);
  CHECK(p.history == std::vector<int>{0});
  CHECK(p.memory == std::vector<int>{1});
  CHECK(p.future == std::vector<int>{2, 3});
  p = partition_at_cut(steps, 2, 5);
  CHECK(p.history.empty());
  CHECK(p.memory == std::vector<int>{0, 1});
  p = partition_at_cut(steps, 1, 0);
  CHECK(p.history == std::vector<int>{0});
  CHECK(p.memory.empty());
  CHECK(p.future == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(partition_at_cut(steps, 0, 1), Error);
  CHECK_THROWS_AS(partition_at_cut(steps, 4, 1), Error);

  BlockPartition bad{{1}, {0}, {2, 3}};
  CHECK_THROWS_AS(bad.validate_cover(steps), Error);
}

TEST_CASE("order checks agree with a raw-loop oracle") {
  test::Rng rng(53);
  std::vector<JointDistribution> cases;
  cases.push_back(flip_chain(4, 0.2));
  cases.push_back(parity_chain(4));
  cases.push_back(iid_uniform(3, 3));
  cases.emplace_back(std::vector<int>{2, 3, 2}, test::random_table(rng, 12));
  cases.emplace_back(std::vector<int>{2, 2, 2, 2}, test::random_table(rng, 16));

  for (const auto& dist : cases) {
    const std::size_t n = static_cast<std::size_t>(dist.steps());
    for (std::size_t cut = 1; cut < n; ++cut)
      for (std::size_t ell = 0; ell < n; ++ell) {
        const bool got = markov_order_holds_at_cut(dist, ell, cut);
        const bool expect = oracle_holds(dist.table(), dist.alphabet_sizes(),
                                         cut, ell, kTolClassical);
        CHECK(got == expect);
      }
  }
}

TEST_CASE("minimal order identifies chains, iid, and parity processes") {
  CHECK(minimal_markov_order(iid_uniform(3, 2)) == 0);
  CHECK(minimal_markov_order(iid_uniform(4, 3)) == 0);
  CHECK(minimal_markov_order(flip_chain(4, 0.1)) == 1);
  CHECK(minimal_markov_order(flip_chain(5, 0.35)) == 1);
  CHECK(minimal_markov_order(parity_chain(4)) == 2);
  CHECK(minimal_markov_order(parity_chain(5)) == 2);

  test::Rng rng(54);
  const JointDistribution noise({2, 2, 2}, test::random_table(rng, 8));
  CHECK(minimal_markov_order(noise) == 2);
}

TEST_CASE("deviation and information measures agree on independence") {
  const JointDistribution chain = flip_chain(4, 0.25);
  for (std::size_t cut = 1; cut < 4; ++cut) {
    const BlockPartition good = partition_at_cut({0, 1, 2, 3}, cut, 1);
    CHECK(conditional_independence_deviation(chain, good) < 1e-14);
    CHECK(classical_cmi(chain, good) < 1e-14);
  }
  const BlockPartition bare = partition_at_cut({0, 1, 2, 3}, 2, 0);
  CHECK(conditional_independence_deviation(chain, bare) > 0.01);
  CHECK(classical_cmi(chain, bare) > 0.01);
}

TEST_CASE("recovery through the memory reconstructs Markovian tables") {
  const JointDistribution chain = flip_chain(4, 0.2);
  const BlockPartition blocks = partition_at_cut({0, 1, 2, 3}, 2, 1);
  CHECK(recovery_residual(chain, blocks) < 1e-14);

  const RecoveryMap map = recovery_map(chain, blocks);
  CHECK(map.memory_sizes == std::vector<int>{2});
  CHECK(map.future_sizes == std::vector<int>{2, 2});
  // Kernel rows are conditional distributions.
  for (std::size_t m = 0; m < 2; ++m) {
    double row = 0.0;
    for (std::size_t f = 0; f < 4; ++f) row += map.kernel[m * 4 + f];
    CHECK(std::abs(row - 1.0) < 1e-12);
  }

  const JointDistribution hm = marginal(chain, {0, 1});
  const JointDistribution rebuilt = apply_recovery(map, hm);
  REQUIRE(rebuilt.size() == chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i)
    CHECK(std::abs(rebuilt.table()[i] - chain.table()[i]) < 1e-14);
}

TEST_CASE("recovery fails exactly when the memory is too short") {
  // Copied bits with no memory kept: reconstruction is the independent
  // product, half the mass ends up misplaced.
  std::vector<double> copy(8, 0.0);
  copy[0] = 0.5;
  copy[7] = 0.5;
  const JointDistribution copied({2, 2, 2}, copy);
  const double residual = recovery_residual(copied, {{0}, {}, {1, 2}});
  CHECK(std::abs(residual - 0.5) < 1e-14);

  const JointDistribution parity = parity_chain(4);
  CHECK(recovery_residual(parity, partition_at_cut({0, 1, 2, 3}, 2, 1)) > 0.1);
  CHECK(recovery_residual(parity, partition_at_cut({0, 1, 2, 3}, 2, 2)) < 1e-14);

  test::Rng rng(55);
  for (int rep = 0; rep < 5; ++rep) {
    const JointDistribution dist({2, 2, 2}, test::random_table(rng, 8));
    for (std::size_t cut = 1; cut < 3; ++cut)
      for (std::size_t ell = 0; ell <= 2; ++ell) {
        const BlockPartition blocks = partition_at_cut({0, 1, 2}, cut, ell);
        const bool holds = markov_order_holds_at_cut(dist, ell, cut);
        const double residual = recovery_residual(dist, blocks);
        if (holds) CHECK(residual < 1e-9);
        if (!holds) CHECK(residual > 1e-12);
      }
  }
}

TEST_CASE("zero-mass memory events get a uniform kernel") {
  const JointDistribution gap({2, 2}, {0.5, 0.5, 0.0, 0.0});
  const BlockPartition blocks{{}, {0}, {1}};
  const RecoveryMap map = recovery_map(gap, blocks);
  CHECK(std::abs(map.kernel[2] - 0.5) < 1e-15);
  CHECK(std::abs(map.kernel[3] - 0.5) < 1e-15);
  CHECK(recovery_residual(gap, blocks) < 1e-14);
}
