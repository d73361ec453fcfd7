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

#include "qmarkov/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmarkov {

namespace {

std::size_t block_size(const JointDistribution& dist, const std::vector<int>& steps) {
  std::size_t total = 1;
  for (int s : steps) {
    if (s < 0 || s >= dist.steps()) throw Error("step index out of range");
    total *= static_cast<std::size_t>(dist.alphabet_sizes()[static_cast<std::size_t>(s)]);
  }
  return total;
}

// Entropy of a raw table with 0 log 0 = 0, natural log.
double entropy_nat(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<int> alphabet_sizes,
                                     std::vector<double> table)
    : alphabet_sizes_(std::move(alphabet_sizes)), table_(std::move(table)) {
  if (alphabet_sizes_.empty()) throw Error("distribution needs at least one step");
  std::size_t total = 1;
  for (int d : alphabet_sizes_) {
    if (d < 1) throw Error("alphabet sizes must be positive");
    total *= static_cast<std::size_t>(d);
  }
  if (table_.size() != total)
    throw Error("table has " + std::to_string(table_.size()) +
                " entries but the alphabet sizes give " + std::to_string(total));
  double sum = 0.0;
  for (double v : table_) {
    if (v < -1e-12) throw Error("table entries must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kTolTrace)
    throw Error("table must sum to 1, got " + std::to_string(sum));
}

std::size_t JointDistribution::index_of(const std::vector<int>& outcome) const {
  if (outcome.size() != alphabet_sizes_.size())
    throw Error("outcome length does not match the step count");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    const int d = alphabet_sizes_[i];
    if (outcome[i] < 0 || outcome[i] >= d) throw Error("outcome symbol out of range");
    idx = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(outcome[i]);
  }
  return idx;
}

std::vector<int> JointDistribution::outcome_of(std::size_t index) const {
  std::vector<int> outcome(alphabet_sizes_.size());
  for (std::size_t i = alphabet_sizes_.size(); i-- > 0;) {
    const auto d = static_cast<std::size_t>(alphabet_sizes_[i]);
    outcome[i] = static_cast<int>(index % d);
    index /= d;
  }
  return outcome;
}

double JointDistribution::at(const std::vector<int>& outcome) const {
  return table_[index_of(outcome)];
}

void BlockPartition::validate_cover(const std::vector<int>& steps) const {
  std::vector<int> all;
  all.insert(all.end(), history.begin(), history.end());
  all.insert(all.end(), memory.begin(), memory.end());
  all.insert(all.end(), future.begin(), future.end());
  if (future.empty()) throw Error("partition needs a non-empty future block");
  if (all != steps)
    throw Error("partition blocks must cover the steps in order");
}

BlockPartition partition_at_cut(const std::vector<int>& steps, std::size_t cut,
                                std::size_t ell) {
  if (cut < 1 || cut >= steps.size())
    throw Error("cut must leave at least one step on each side");
  BlockPartition blocks;
  const std::size_t mem_start = cut > ell ? cut - ell : 0;
  blocks.history.assign(steps.begin(), steps.begin() + static_cast<long>(mem_start));
  blocks.memory.assign(steps.begin() + static_cast<long>(mem_start),
                       steps.begin() + static_cast<long>(cut));
  blocks.future.assign(steps.begin() + static_cast<long>(cut), steps.end());
  return blocks;
}

JointDistribution marginal(const JointDistribution& dist,
                           const std::vector<int>& keep) {
  if (!std::is_sorted(keep.begin(), keep.end()) ||
      std::adjacent_find(keep.begin(), keep.end()) != keep.end())
    throw Error("marginal: kept steps must be strictly ascending");
  if (keep.empty()) throw Error("marginal: must keep at least one step");

  std::vector<int> sizes;
  for (int s : keep) {
    if (s < 0 || s >= dist.steps()) throw Error("marginal: step index out of range");
    sizes.push_back(dist.alphabet_sizes()[static_cast<std::size_t>(s)]);
  }
  std::size_t total = 1;
  for (int d : sizes) total *= static_cast<std::size_t>(d);

  std::vector<double> table(total, 0.0);
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const std::vector<int> outcome = dist.outcome_of(idx);
    std::size_t out_idx = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      out_idx = out_idx * static_cast<std::size_t>(sizes[i]) +
                static_cast<std::size_t>(outcome[static_cast<std::size_t>(keep[i])]);
    table[out_idx] += dist.table()[idx];
  }
  return JointDistribution(std::move(sizes), std::move(table));
}

JointDistribution conditioned(const JointDistribution& dist,
                              const std::vector<std::pair<int, int>>& fixed) {
  std::vector<int> remaining;
  for (int s = 0; s < dist.steps(); ++s) {
    const bool is_fixed =
        std::any_of(fixed.begin(), fixed.end(),
                    [&](const auto& p) { return p.first == s; });
    if (!is_fixed) remaining.push_back(s);
  }
  if (remaining.empty()) throw Error("conditioned: no free steps remain");

  std::vector<int> sizes;
  for (int s : remaining)
    sizes.push_back(dist.alphabet_sizes()[static_cast<std::size_t>(s)]);
  std::size_t total = 1;
  for (int d : sizes) total *= static_cast<std::size_t>(d);

  std::vector<double> table(total, 0.0);
  double mass = 0.0;
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const std::vector<int> outcome = dist.outcome_of(idx);
    bool match = true;
    for (const auto& [step, symbol] : fixed) {
      if (step < 0 || step >= dist.steps())
        throw Error("conditioned: step index out of range");
      if (outcome[static_cast<std::size_t>(step)] != symbol) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    std::size_t out_idx = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i)
      out_idx =
          out_idx * static_cast<std::size_t>(sizes[i]) +
          static_cast<std::size_t>(outcome[static_cast<std::size_t>(remaining[i])]);
    table[out_idx] += dist.table()[idx];
    mass += dist.table()[idx];
  }
  if (mass < kProbFloor)
    throw ZeroProbabilityError("conditioning event has probability " +
                               std::to_string(mass));
  for (double& v : table) v /= mass;
  return JointDistribution(std::move(sizes), std::move(table));
}

double shannon_entropy(const JointDistribution& dist, double log_base) {
  if (log_base <= 0 || log_base == 1.0)
    throw Error("entropy log base must be positive and not 1");
  return entropy_nat(dist.table()) / std::log(log_base);
}

double classical_cmi(const JointDistribution& dist, const BlockPartition& blocks,
                     double log_base) {
  if (log_base <= 0 || log_base == 1.0)
    throw Error("entropy log base must be positive and not 1");
  std::vector<int> steps(static_cast<std::size_t>(dist.steps()));
  std::iota(steps.begin(), steps.end(), 0);
  blocks.validate_cover(steps);

  std::vector<int> fm = blocks.memory;
  fm.insert(fm.end(), blocks.future.begin(), blocks.future.end());
  std::sort(fm.begin(), fm.end());
  std::vector<int> mh = blocks.history;
  mh.insert(mh.end(), blocks.memory.begin(), blocks.memory.end());
  std::sort(mh.begin(), mh.end());

  double value = entropy_nat(marginal(dist, fm).table()) - entropy_nat(dist.table());
  if (!mh.empty()) value += entropy_nat(marginal(dist, mh).table());
  if (!blocks.memory.empty()) {
    std::vector<int> m = blocks.memory;
    std::sort(m.begin(), m.end());
    value -= entropy_nat(marginal(dist, m).table());
  }
  return value / std::log(log_base);
}

double conditional_independence_deviation(const JointDistribution& dist,
                                          const BlockPartition& blocks) {
  std::vector<int> steps(static_cast<std::size_t>(dist.steps()));
  std::iota(steps.begin(), steps.end(), 0);
  blocks.validate_cover(steps);

  const std::size_t nh = block_size(dist, blocks.history);
  const std::size_t nm = block_size(dist, blocks.memory);
  const std::size_t nf = block_size(dist, blocks.future);

  // With the blocks contiguous and ascending, the table index splits as
  // ((h * nm) + m) * nf + f.
  const auto& p = dist.table();
  double worst = 0.0;
  for (std::size_t m = 0; m < nm; ++m) {
    // P(f | m)
    double pm = 0.0;
    std::vector<double> pfm(nf, 0.0);
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t f = 0; f < nf; ++f) {
        const double v = p[(h * nm + m) * nf + f];
        pm += v;
        pfm[f] += v;
      }
    if (pm < kProbFloor) continue;
    for (double& v : pfm) v /= pm;

    for (std::size_t h = 0; h < nh; ++h) {
      double pmh = 0.0;
      for (std::size_t f = 0; f < nf; ++f) pmh += p[(h * nm + m) * nf + f];
      if (pmh < kProbFloor) continue;
      for (std::size_t f = 0; f < nf; ++f) {
        const double cond = p[(h * nm + m) * nf + f] / pmh;
        worst = std::max(worst, std::abs(cond - pfm[f]));
      }
    }
  }
  return worst;
}

bool markov_order_holds_at_cut(const JointDistribution& dist, std::size_t ell,
                               std::size_t cut, double tol) {
  std::vector<int> steps(static_cast<std::size_t>(dist.steps()));
  std::iota(steps.begin(), steps.end(), 0);
  const BlockPartition blocks = partition_at_cut(steps, cut, ell);
  return conditional_independence_deviation(dist, blocks) <= tol;
}

int minimal_markov_order(const JointDistribution& dist, double tol) {
  const auto n = static_cast<std::size_t>(dist.steps());
  for (std::size_t ell = 0; ell < n; ++ell) {
    bool all = true;
    for (std::size_t cut = 1; cut < n; ++cut) {
      if (!markov_order_holds_at_cut(dist, ell, cut, tol)) {
        all = false;
        break;
      }
    }
    if (all) return static_cast<int>(ell);
  }
  return static_cast<int>(n) - 1;
}

RecoveryMap recovery_map(const JointDistribution& dist,
                         const BlockPartition& blocks) {
  std::vector<int> steps(static_cast<std::size_t>(dist.steps()));
  std::iota(steps.begin(), steps.end(), 0);
  blocks.validate_cover(steps);

  const std::size_t nh = block_size(dist, blocks.history);
  const std::size_t nm = block_size(dist, blocks.memory);
  const std::size_t nf = block_size(dist, blocks.future);

  RecoveryMap map;
  for (int s : blocks.memory)
    map.memory_sizes.push_back(dist.alphabet_sizes()[static_cast<std::size_t>(s)]);
  for (int s : blocks.future)
    map.future_sizes.push_back(dist.alphabet_sizes()[static_cast<std::size_t>(s)]);
  map.kernel.assign(nm * nf, 0.0);

  const auto& p = dist.table();
  for (std::size_t m = 0; m < nm; ++m) {
    double pm = 0.0;
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t f = 0; f < nf; ++f) {
        const double v = p[(h * nm + m) * nf + f];
        pm += v;
        map.kernel[m * nf + f] += v;
      }
    if (pm < kProbFloor) {
      for (std::size_t f = 0; f < nf; ++f)
        map.kernel[m * nf + f] = 1.0 / static_cast<double>(nf);
    } else {
      for (std::size_t f = 0; f < nf; ++f) map.kernel[m * nf + f] /= pm;
    }
  }
  return map;
}

JointDistribution apply_recovery(const RecoveryMap& map,
                                 const JointDistribution& hm) {
  std::size_t nm = 1;
  for (int d : map.memory_sizes) nm *= static_cast<std::size_t>(d);
  std::size_t nf = 1;
  for (int d : map.future_sizes) nf *= static_cast<std::size_t>(d);
  if (hm.size() % nm != 0)
    throw Error("apply_recovery: marginal does not end with the memory block");
  const std::size_t nh = hm.size() / nm;

  std::vector<int> sizes = hm.alphabet_sizes();
  sizes.insert(sizes.end(), map.future_sizes.begin(), map.future_sizes.end());
  std::vector<double> table(nh * nm * nf, 0.0);
  for (std::size_t h = 0; h < nh; ++h)
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t f = 0; f < nf; ++f)
        table[(h * nm + m) * nf + f] =
            hm.table()[h * nm + m] * map.kernel[m * nf + f];
  return JointDistribution(std::move(sizes), std::move(table));
}

double recovery_residual(const JointDistribution& dist,
                         const BlockPartition& blocks) {
  const RecoveryMap map = recovery_map(dist, blocks);
  std::vector<int> hm = blocks.history;
  hm.insert(hm.end(), blocks.memory.begin(), blocks.memory.end());
  std::sort(hm.begin(), hm.end());
  const JointDistribution rebuilt = apply_recovery(map, marginal(dist, hm));
  double l1 = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    l1 += std::abs(rebuilt.table()[i] - dist.table()[i]);
  return 0.5 * l1;
}

}  // namespace qmarkov
