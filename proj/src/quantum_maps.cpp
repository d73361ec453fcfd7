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

#include "qmarkov/quantum_maps.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace qmarkov {

namespace {

LabeledOperator choi_operator(Eigen::Index out_dim, Eigen::Index in_dim, Matrix m) {
  return LabeledOperator({{kMapOut, out_dim}, {kMapIn, in_dim}}, std::move(m));
}

void check_effect(const Matrix& effect) {
  if (effect.rows() != effect.cols()) throw Error("POVM effect must be square");
  if (hermiticity_deviation(effect) > kTolHermitian)
    throw Error("POVM effect must be Hermitian");
}

}  // namespace

CpMap choi_from_kraus(const std::vector<Matrix>& kraus, std::string outcome) {
  if (kraus.empty()) throw Error("choi_from_kraus needs at least one operator");
  const Eigen::Index out = kraus.front().rows();
  const Eigen::Index in = kraus.front().cols();
  Matrix c = Matrix::Zero(out * in, out * in);
  for (const auto& k : kraus) {
    if (k.rows() != out || k.cols() != in)
      throw Error("Kraus operators must share one shape");
    Eigen::VectorXcd v(out * in);  // row-major vectorization
    for (Eigen::Index a = 0; a < out; ++a)
      for (Eigen::Index b = 0; b < in; ++b) v(a * in + b) = k(a, b);
    c.noalias() += v * v.adjoint();
  }
  return {std::move(outcome), choi_operator(out, in, std::move(c))};
}

CpMap identity_map(Eigen::Index dim) {
  return choi_from_kraus({Matrix::Identity(dim, dim)});
}

CpMap effect_map(const Matrix& effect, std::string outcome) {
  check_effect(effect);
  return {std::move(outcome), choi_operator(1, effect.rows(), effect.transpose())};
}

CpMap measure_prepare_map(const Matrix& effect, const Matrix& preparation,
                          std::string outcome) {
  check_effect(effect);
  if (preparation.rows() != preparation.cols())
    throw Error("preparation state must be square");
  const LabeledOperator prep({{kMapOut, preparation.rows()}}, preparation);
  const LabeledOperator eff({{kMapIn, effect.rows()}}, effect.transpose());
  return {std::move(outcome), kron(prep, eff)};
}

Matrix apply_map(const CpMap& map, const Matrix& density) {
  const Eigen::Index in = map.in_dim();
  const Eigen::Index out = map.out_dim();
  if (density.rows() != in || density.cols() != in)
    throw Error("density dimension does not match the map input");
  Matrix result = Matrix::Zero(out, out);
  const Matrix& c = map.choi.matrix();
  for (Eigen::Index a = 0; a < out; ++a)
    for (Eigen::Index a2 = 0; a2 < out; ++a2)
      for (Eigen::Index b = 0; b < in; ++b)
        for (Eigen::Index b2 = 0; b2 < in; ++b2)
          result(a, a2) += c(a * in + b, a2 * in + b2) * density(b, b2);
  return result;
}

LabeledOperator apply_map_to_factor(const LabeledOperator& op,
                                    std::string_view factor, const CpMap& map) {
  const std::size_t pos = op.factor_index(factor);
  const Eigen::Index in = op.factors()[pos].dim;
  if (map.in_dim() != in)
    throw Error("apply_map_to_factor: map input dimension mismatch");
  const Eigen::Index out = map.out_dim();

  // Split the composite index as (left, factor, right).
  Eigen::Index left = 1, right = 1;
  for (std::size_t i = 0; i < pos; ++i) left *= op.factors()[i].dim;
  for (std::size_t i = pos + 1; i < op.factors().size(); ++i)
    right *= op.factors()[i].dim;

  std::vector<FactorLabel> factors = op.factors();
  factors[pos].dim = out;
  Matrix result = Matrix::Zero(left * out * right, left * out * right);
  const Matrix& c = map.choi.matrix();
  const Matrix& m = op.matrix();
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index l2 = 0; l2 < left; ++l2)
      for (Eigen::Index a = 0; a < out; ++a)
        for (Eigen::Index a2 = 0; a2 < out; ++a2)
          for (Eigen::Index b = 0; b < in; ++b)
            for (Eigen::Index b2 = 0; b2 < in; ++b2) {
              const Complex w = c(a * in + b, a2 * in + b2);
              if (w == Complex(0, 0)) continue;
              for (Eigen::Index r = 0; r < right; ++r)
                for (Eigen::Index r2 = 0; r2 < right; ++r2)
                  result((l * out + a) * right + r, (l2 * out + a2) * right + r2) +=
                      w * m((l * in + b) * right + r, (l2 * in + b2) * right + r2);
            }
  return LabeledOperator(std::move(factors), std::move(result));
}

InstrumentReport validate_instrument(const Instrument& instrument) {
  if (instrument.elements.empty()) throw Error("instrument has no elements");
  const Eigen::Index in = instrument.elements.front().in_dim();
  InstrumentReport report;
  report.min_element_eigenvalue = std::numeric_limits<double>::infinity();
  Matrix sum_reduced = Matrix::Zero(in, in);
  for (const auto& el : instrument.elements) {
    if (el.in_dim() != in)
      throw Error("instrument elements must share the input dimension");
    report.max_hermiticity_deviation =
        std::max(report.max_hermiticity_deviation,
                 hermiticity_deviation(el.choi.matrix()));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        (el.choi.matrix() + el.choi.matrix().adjoint()) / 2.0);
    report.min_element_eigenvalue =
        std::min(report.min_element_eigenvalue, solver.eigenvalues().minCoeff());
    sum_reduced += partial_trace(el.choi, {kMapOut}).matrix();
  }
  report.completeness_deviation =
      trace_norm(sum_reduced - Matrix::Identity(in, in));
  return report;
}

Instrument sharp_classical_instrument(Eigen::Index dim) {
  Instrument instr;
  for (Eigen::Index x = 0; x < dim; ++x) {
    Matrix proj = Matrix::Zero(dim, dim);
    proj(x, x) = 1.0;
    instr.elements.push_back(
        measure_prepare_map(proj, proj, std::to_string(x)));
  }
  return instr;
}

Instrument computational_measurement(Eigen::Index dim) {
  Instrument instr;
  for (Eigen::Index x = 0; x < dim; ++x) {
    Matrix proj = Matrix::Zero(dim, dim);
    proj(x, x) = 1.0;
    instr.elements.push_back(effect_map(proj, std::to_string(x)));
  }
  return instr;
}

Instrument povm_instrument(const std::vector<Matrix>& effects) {
  Instrument instr;
  for (std::size_t x = 0; x < effects.size(); ++x)
    instr.elements.push_back(effect_map(effects[x], std::to_string(x)));
  return instr;
}

std::vector<Matrix> tetrahedral_effects() {
  const double s = 1.0 / std::sqrt(3.0);
  const std::vector<std::array<double, 3>> axes = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<Matrix> effects;
  for (const auto& a : axes) {
    Matrix e(2, 2);
    e(0, 0) = Complex(1.0 + a[2], 0.0);
    e(0, 1) = Complex(a[0], -a[1]);
    e(1, 0) = Complex(a[0], a[1]);
    e(1, 1) = Complex(1.0 - a[2], 0.0);
    effects.push_back(e / 4.0);
  }
  return effects;
}

Instrument tetrahedral_measurement() { return povm_instrument(tetrahedral_effects()); }

Instrument with_preparation(const Instrument& instrument, const Matrix& preparation) {
  Instrument out;
  for (const auto& el : instrument.elements) {
    if (el.out_dim() != 1)
      throw Error("with_preparation expects measure-and-discard elements");
    // The stored operator of a discard element is the transposed effect.
    out.elements.push_back(measure_prepare_map(
        el.choi.matrix().transpose(), preparation, el.outcome));
  }
  return out;
}

Instrument mix_instrument(const Instrument& instrument,
                          const Eigen::MatrixXd& coefficients) {
  const Eigen::Index n = static_cast<Eigen::Index>(instrument.elements.size());
  if (coefficients.rows() != n)
    throw Error("mixing matrix must have one row per instrument element");
  if (coefficients.cols() < 1) throw Error("mixing matrix has no columns");
  if (coefficients.minCoeff() < 0.0)
    throw Error("mixing coefficients must be non-negative");
  for (Eigen::Index x = 0; x < n; ++x)
    if (std::abs(coefficients.row(x).sum() - 1.0) > 1e-12)
      throw Error("each mixing row must sum to 1");

  Instrument out;
  for (Eigen::Index z = 0; z < coefficients.cols(); ++z) {
    LabeledOperator acc = instrument.elements.front().choi;
    acc *= Complex(0, 0);
    bool shape_ok = true;
    for (Eigen::Index x = 0; x < n; ++x) {
      const auto& el = instrument.elements[static_cast<std::size_t>(x)].choi;
      if (el.factors() != acc.factors()) shape_ok = false;
      if (!shape_ok) break;
      acc += Complex(coefficients(x, z), 0) * el;
    }
    if (!shape_ok)
      throw Error("mix_instrument requires elements with identical shapes");
    out.elements.push_back({"m" + std::to_string(z), std::move(acc)});
  }
  return out;
}

bool is_permutation_matrix(const Eigen::MatrixXd& coefficients, double tol) {
  if (coefficients.rows() != coefficients.cols()) return false;
  for (Eigen::Index r = 0; r < coefficients.rows(); ++r) {
    int ones = 0;
    for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
      const double v = coefficients(r, c);
      if (std::abs(v - 1.0) <= tol)
        ++ones;
      else if (std::abs(v) > tol)
        return false;
    }
    if (ones != 1) return false;
  }
  for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
    if (std::abs(coefficients.col(c).sum() - 1.0) > tol) return false;
  }
  return true;
}

DualBasis dual_basis(const std::vector<Matrix>& basis) {
  if (basis.empty()) throw Error("dual_basis needs a non-empty basis");
  const Eigen::Index d = basis.front().rows();
  const std::size_t n = basis.size();
  for (const auto& b : basis) {
    if (b.rows() != d || b.cols() != d)
      throw Error("basis operators must share one dimension");
    if (hermiticity_deviation(b) > kTolHermitian)
      throw Error("dual_basis requires Hermitian operators");
  }

  Eigen::MatrixXd gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (basis[i].adjoint() * basis[j]).trace().real();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const double lo = solver.eigenvalues().cwiseAbs().minCoeff();
  const double hi = solver.eigenvalues().cwiseAbs().maxCoeff();
  const double condition = (lo <= 0.0) ? std::numeric_limits<double>::infinity()
                                       : hi / lo;
  if (condition > kGramConditionLimit)
    throw Error("dual_basis: basis is numerically dependent (Gram condition " +
                std::to_string(condition) + ")");

  const Eigen::MatrixXd inv = gram.inverse();
  DualBasis out;
  out.basis = basis;
  out.gram_condition = condition;
  for (std::size_t y = 0; y < n; ++y) {
    Matrix dual = Matrix::Zero(d, d);
    for (std::size_t x = 0; x < n; ++x)
      dual += Complex(inv(static_cast<Eigen::Index>(x),
                          static_cast<Eigen::Index>(y)),
                      0) *
              basis[x];
    out.duals.push_back(std::move(dual));
  }
  return out;
}

}  // namespace qmarkov
