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

#include "qmarkov/labeled_operator.hpp"

#include <algorithm>
#include <unordered_set>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmarkov {

namespace {

Eigen::Index product_dim(const std::vector<FactorLabel>& factors) {
  Eigen::Index d = 1;
  for (const auto& f : factors) d *= f.dim;
  return d;
}

void check_factors(const std::vector<FactorLabel>& factors) {
  std::unordered_set<std::string> seen;
  for (const auto& f : factors) {
    if (f.name.empty()) throw Error("factor name must not be empty");
    if (f.dim < 1) throw Error("factor '" + f.name + "' has non-positive dimension");
    if (!seen.insert(f.name).second)
      throw Error("duplicate factor name '" + f.name + "'");
  }
}

// Strides for the row-major composite index; first factor most significant.
std::vector<Eigen::Index> strides_of(const std::vector<FactorLabel>& factors) {
  std::vector<Eigen::Index> s(factors.size(), 1);
  for (std::size_t i = factors.size(); i-- > 1;)
    s[i - 1] = s[i] * factors[i].dim;
  return s;
}

// Composite-index offsets of every assignment of the factors at `positions`
// (in the given order, first position most significant), all other digits 0.
std::vector<Eigen::Index> pack_offsets(const std::vector<FactorLabel>& factors,
                                       const std::vector<std::size_t>& positions) {
  const auto strides = strides_of(factors);
  Eigen::Index total = 1;
  for (auto p : positions) total *= factors[p].dim;
  std::vector<Eigen::Index> offsets(static_cast<std::size_t>(total), 0);
  for (Eigen::Index v = 0; v < total; ++v) {
    Eigen::Index rem = v;
    Eigen::Index off = 0;
    for (std::size_t i = positions.size(); i-- > 0;) {
      const Eigen::Index d = factors[positions[i]].dim;
      off += (rem % d) * strides[positions[i]];
      rem /= d;
    }
    offsets[static_cast<std::size_t>(v)] = off;
  }
  return offsets;
}

}  // namespace

LabeledOperator::LabeledOperator() : matrix_(Matrix::Ones(1, 1)) {}

LabeledOperator::LabeledOperator(std::vector<FactorLabel> factors, Matrix matrix)
    : factors_(std::move(factors)), matrix_(std::move(matrix)) {
  check_factors(factors_);
  const Eigen::Index d = product_dim(factors_);
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw Error("matrix is " + std::to_string(matrix_.rows()) + "x" +
                std::to_string(matrix_.cols()) + " but factors give dimension " +
                std::to_string(d));
}

LabeledOperator LabeledOperator::identity(std::vector<FactorLabel> factors) {
  check_factors(factors);
  const Eigen::Index d = product_dim(factors);
  return LabeledOperator(std::move(factors), Matrix::Identity(d, d));
}

bool LabeledOperator::has_factor(std::string_view name) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const FactorLabel& f) { return f.name == name; });
}

std::size_t LabeledOperator::factor_index(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name == name) return i;
  throw Error("no factor named '" + std::string(name) + "'");
}

Eigen::Index LabeledOperator::factor_dim(std::string_view name) const {
  return factors_[factor_index(name)].dim;
}

std::vector<std::string> LabeledOperator::factor_names() const {
  std::vector<std::string> names;
  names.reserve(factors_.size());
  for (const auto& f : factors_) names.push_back(f.name);
  return names;
}

LabeledOperator LabeledOperator::adjoint() const {
  return LabeledOperator(factors_, matrix_.adjoint());
}

LabeledOperator& LabeledOperator::operator+=(const LabeledOperator& other) {
  if (factors_ != other.factors_)
    throw Error("operator sum requires identical factor lists");
  matrix_ += other.matrix_;
  return *this;
}

LabeledOperator& LabeledOperator::operator-=(const LabeledOperator& other) {
  if (factors_ != other.factors_)
    throw Error("operator difference requires identical factor lists");
  matrix_ -= other.matrix_;
  return *this;
}

LabeledOperator& LabeledOperator::operator*=(Complex scale) {
  matrix_ *= scale;
  return *this;
}

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<FactorLabel> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return LabeledOperator(std::move(factors), std::move(m));
}

LabeledOperator kron(const std::vector<LabeledOperator>& ops) {
  LabeledOperator out;  // scalar identity
  for (const auto& op : ops) out = kron(out, op);
  return out;
}

LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& over) {
  std::vector<std::size_t> traced;
  traced.reserve(over.size());
  for (const auto& name : over) traced.push_back(a.factor_index(name));
  std::sort(traced.begin(), traced.end());
  if (std::adjacent_find(traced.begin(), traced.end()) != traced.end())
    throw Error("partial_trace: repeated factor name");

  std::vector<std::size_t> kept;
  std::vector<FactorLabel> kept_factors;
  for (std::size_t i = 0; i < a.factors().size(); ++i) {
    if (!std::binary_search(traced.begin(), traced.end(), i)) {
      kept.push_back(i);
      kept_factors.push_back(a.factors()[i]);
    }
  }

  const auto t_off = pack_offsets(a.factors(), traced);
  const auto k_off = pack_offsets(a.factors(), kept);
  const Eigen::Index dk = static_cast<Eigen::Index>(k_off.size());

  Matrix out = Matrix::Zero(dk, dk);
  for (const auto t : t_off)
    for (Eigen::Index r = 0; r < dk; ++r)
      for (Eigen::Index c = 0; c < dk; ++c)
        out(r, c) += a.matrix()(t + k_off[r], t + k_off[c]);
  return LabeledOperator(std::move(kept_factors), std::move(out));
}

LabeledOperator permute_factors(const LabeledOperator& a,
                                const std::vector<std::string>& order) {
  if (order.size() != a.factors().size())
    throw Error("permute_factors: order must list every factor exactly once");
  std::vector<FactorLabel> new_factors;
  std::vector<std::size_t> old_pos;  // old position of each new factor
  new_factors.reserve(order.size());
  for (const auto& name : order) {
    const std::size_t p = a.factor_index(name);
    if (std::find(old_pos.begin(), old_pos.end(), p) != old_pos.end())
      throw Error("permute_factors: repeated factor name '" + name + "'");
    old_pos.push_back(p);
    new_factors.push_back(a.factors()[p]);
  }

  const auto new_strides = strides_of(new_factors);
  // new_stride_at_old[i]: stride in the new layout of the factor that sits at
  // old position i.
  std::vector<Eigen::Index> new_stride_at_old(old_pos.size());
  for (std::size_t n = 0; n < old_pos.size(); ++n)
    new_stride_at_old[old_pos[n]] = new_strides[n];

  const Eigen::Index d = a.dim();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(d));
  for (Eigen::Index v = 0; v < d; ++v) {
    Eigen::Index rem = v;
    Eigen::Index nv = 0;
    for (std::size_t i = a.factors().size(); i-- > 0;) {
      const Eigen::Index dim = a.factors()[i].dim;
      nv += (rem % dim) * new_stride_at_old[i];
      rem /= dim;
    }
    map[static_cast<std::size_t>(v)] = nv;
  }

  Matrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      out(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]) =
          a.matrix()(r, c);
  return LabeledOperator(std::move(new_factors), std::move(out));
}

LabeledOperator relabel_factor(const LabeledOperator& a, std::string_view from,
                               std::string_view to) {
  const std::size_t p = a.factor_index(from);
  if (from != to && a.has_factor(to))
    throw Error("relabel_factor: name '" + std::string(to) + "' already in use");
  std::vector<FactorLabel> factors = a.factors();
  factors[p].name = std::string(to);
  return LabeledOperator(std::move(factors), a.matrix());
}

LabeledOperator squeeze(const LabeledOperator& a) {
  std::vector<FactorLabel> factors;
  for (const auto& f : a.factors())
    if (f.dim > 1) factors.push_back(f);
  return LabeledOperator(std::move(factors), a.matrix());
}

LabeledOperator contract(const LabeledOperator& a, const LabeledOperator& element) {
  const LabeledOperator el = squeeze(element);

  // Locate element factors inside `a` and order them as they appear there.
  std::vector<std::size_t> sub;
  for (const auto& f : el.factors()) {
    const std::size_t p = a.factor_index(f.name);
    if (a.factors()[p].dim != f.dim)
      throw Error("contract: factor '" + f.name + "' has dimension " +
                  std::to_string(f.dim) + " in element but " +
                  std::to_string(a.factors()[p].dim) + " in operator");
    sub.push_back(p);
  }
  std::vector<std::size_t> sorted_sub = sub;
  std::sort(sorted_sub.begin(), sorted_sub.end());
  LabeledOperator el_aligned = el;
  if (sub != sorted_sub) {
    std::vector<std::string> order;
    for (auto p : sorted_sub) order.push_back(a.factors()[p].name);
    el_aligned = permute_factors(el, order);
  }

  std::vector<std::size_t> rest;
  std::vector<FactorLabel> rest_factors;
  for (std::size_t i = 0; i < a.factors().size(); ++i) {
    if (!std::binary_search(sorted_sub.begin(), sorted_sub.end(), i)) {
      rest.push_back(i);
      rest_factors.push_back(a.factors()[i]);
    }
  }

  const auto s_off = pack_offsets(a.factors(), sorted_sub);
  const auto r_off = pack_offsets(a.factors(), rest);
  const Eigen::Index ds = static_cast<Eigen::Index>(s_off.size());
  const Eigen::Index dr = static_cast<Eigen::Index>(r_off.size());

  Matrix out = Matrix::Zero(dr, dr);
  for (Eigen::Index sr = 0; sr < ds; ++sr) {
    for (Eigen::Index sc = 0; sc < ds; ++sc) {
      const Complex w = el_aligned.matrix()(sr, sc);
      if (w == Complex(0, 0)) continue;
      for (Eigen::Index r = 0; r < dr; ++r)
        for (Eigen::Index c = 0; c < dr; ++c)
          out(r, c) += w * a.matrix()(s_off[sr] + r_off[r], s_off[sc] + r_off[c]);
    }
  }
  return LabeledOperator(std::move(rest_factors), std::move(out));
}

}  // namespace qmarkov
