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

#ifndef QMARKOV_LABELED_OPERATOR_HPP
#define QMARKOV_LABELED_OPERATOR_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qmarkov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Errors raised for malformed inputs: bad dimensions, unknown factor names,
// unreadable files, violated preconditions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when conditioning on an outcome whose probability is below the
// probability floor.
class ZeroProbabilityError : public Error {
 public:
  explicit ZeroProbabilityError(const std::string& what) : Error(what) {}
};

// One tensor factor of a multipartite operator: a unique name and a dimension.
// Dimension-1 factors are legal and act as trivial slots.
struct FactorLabel {
  std::string name;
  Eigen::Index dim = 0;

  friend bool operator==(const FactorLabel&, const FactorLabel&) = default;
};

// A square operator on an ordered tensor product of named factors.
//
// Index convention: the first factor is the most significant digit. For
// factors (a, b) the row index of entry (r_a, r_b) is r_a * dim_b + r_b,
// and likewise for columns. An empty factor list is the 1x1 scalar operator.
class LabeledOperator {
 public:
  LabeledOperator();
  LabeledOperator(std::vector<FactorLabel> factors, Matrix matrix);

  static LabeledOperator identity(std::vector<FactorLabel> factors);

  const std::vector<FactorLabel>& factors() const { return factors_; }
  const Matrix& matrix() const { return matrix_; }

  // Total dimension (product of factor dimensions).
  Eigen::Index dim() const { return matrix_.rows(); }

  bool has_factor(std::string_view name) const;
  // Position of the named factor; throws Error when absent.
  std::size_t factor_index(std::string_view name) const;
  Eigen::Index factor_dim(std::string_view name) const;
  std::vector<std::string> factor_names() const;

  Complex trace() const { return matrix_.trace(); }
  LabeledOperator adjoint() const;

  LabeledOperator& operator+=(const LabeledOperator& other);
  LabeledOperator& operator-=(const LabeledOperator& other);
  LabeledOperator& operator*=(Complex scale);

  friend LabeledOperator operator+(LabeledOperator a, const LabeledOperator& b) {
    a += b;
    return a;
  }
  friend LabeledOperator operator-(LabeledOperator a, const LabeledOperator& b) {
    a -= b;
    return a;
  }
  friend LabeledOperator operator*(Complex scale, LabeledOperator a) {
    a *= scale;
    return a;
  }
  friend LabeledOperator operator*(LabeledOperator a, Complex scale) {
    a *= scale;
    return a;
  }

 private:
  std::vector<FactorLabel> factors_;
  Matrix matrix_;
};

// Tensor product; factor lists are concatenated and must not share names.
LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator kron(const std::vector<LabeledOperator>& ops);

// Traces out the named factors; remaining factors keep their order.
LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& over);

// Reorders factors to the given permutation of the current names.
LabeledOperator permute_factors(const LabeledOperator& a,
                                const std::vector<std::string>& order);

// Renames a single factor; the new name must not collide.
LabeledOperator relabel_factor(const LabeledOperator& a, std::string_view from,
                               std::string_view to);

// Drops all dimension-1 factors; the matrix is unchanged.
LabeledOperator squeeze(const LabeledOperator& a);

// Contracts `element` against the matching factors of `a`:
//
//   result[r, r'] = sum_{s, s'} element[s, s'] * a[(s, r), (s', r')]
//
// where s runs over the factors shared with `element` (after squeezing) and
// r over the rest. Element factors must appear in `a` with equal dimensions;
// their relative order may differ. The result keeps a's remaining factors in
// order; contracting all factors yields the scalar operator.
LabeledOperator contract(const LabeledOperator& a, const LabeledOperator& element);

}  // namespace qmarkov

#endif  // QMARKOV_LABELED_OPERATOR_HPP
