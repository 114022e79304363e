// Copyright 2026 The sbm-gft Authors.
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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "sbmgft/errors.hpp"

namespace sbmgft {

/// Element of a finite Abelian group written as a product of cyclic factors.
/// Coordinates are residues, one per factor.
struct GroupElement {
  std::vector<int> coords;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.coords == b.coords;
  }
};

/// Character of a finite Abelian group, identified by its exponent tuple:
/// chi(g) = exp(2*pi*i * sum_t exponents[t]*coords[t]/order[t]).
struct Character {
  std::vector<int> exponents;

  friend bool operator==(const Character& a, const Character& b) {
    return a.exponents == b.exponents;
  }
};

/// Finite Abelian group as a product of cyclic factors Z_{m_1} x ... x Z_{m_r}.
///
/// Elements and characters are both enumerated lexicographically on their
/// residue tuples; index 0 is the identity element / trivial character. The
/// enumeration order is the contract everything downstream relies on: Cayley
/// matrices, eigenvalue lists and the character unitary all use it.
class AbelianGroup {
 public:
  explicit AbelianGroup(std::vector<int> factor_orders)
      : factors_(std::move(factor_orders)) {
    order_ = 1;
    for (int m : factors_) {
      if (m < 2) throw validation_error("group factor orders must be >= 2");
      order_ *= m;
    }
  }

  const std::vector<int>& factor_orders() const { return factors_; }
  int order() const { return order_; }
  int rank() const { return static_cast<int>(factors_.size()); }

  GroupElement identity() const {
    return GroupElement{std::vector<int>(factors_.size(), 0)};
  }

  /// Element at position `index` in the lexicographic enumeration.
  GroupElement element(int index) const {
    check_index(index);
    return GroupElement{unrank(index)};
  }

  int index_of(const GroupElement& g) const {
    check_shape(g.coords);
    return rank_of(g.coords);
  }

  std::vector<GroupElement> elements() const {
    std::vector<GroupElement> out;
    out.reserve(order_);
    for (int i = 0; i < order_; ++i) out.push_back(element(i));
    return out;
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
    check_shape(a.coords);
    check_shape(b.coords);
    GroupElement out{a.coords};
    for (std::size_t t = 0; t < factors_.size(); ++t)
      out.coords[t] = (a.coords[t] + b.coords[t]) % factors_[t];
    return out;
  }

  GroupElement inverse(const GroupElement& g) const {
    check_shape(g.coords);
    GroupElement out{g.coords};
    for (std::size_t t = 0; t < factors_.size(); ++t)
      out.coords[t] = (factors_[t] - g.coords[t]) % factors_[t];
    return out;
  }

  /// Character at position `index`; index 0 is the trivial character.
  Character character(int index) const {
    check_index(index);
    return Character{unrank(index)};
  }

  /// Index identifier: position of chi in the fixed enumeration.
  int index_of(const Character& chi) const {
    check_shape(chi.exponents);
    return rank_of(chi.exponents);
  }

  Character character_product(const Character& a, const Character& b) const {
    check_shape(a.exponents);
    check_shape(b.exponents);
    Character out{a.exponents};
    for (std::size_t t = 0; t < factors_.size(); ++t)
      out.exponents[t] = (a.exponents[t] + b.exponents[t]) % factors_[t];
    return out;
  }

  Character character_inverse(const Character& chi) const {
    check_shape(chi.exponents);
    Character out{chi.exponents};
    for (std::size_t t = 0; t < factors_.size(); ++t)
      out.exponents[t] = (factors_[t] - chi.exponents[t]) % factors_[t];
    return out;
  }

  Character conjugate(const Character& chi) const {
    // conj(chi) = chi^{-1} on the unit circle.
    return character_inverse(chi);
  }

  int conjugate_index(int char_index) const {
    return index_of(conjugate(character(char_index)));
  }

  /// chi = conj(chi) iff 2*exponents == 0 componentwise; structural check.
  bool self_conjugate(const Character& chi) const {
    check_shape(chi.exponents);
    for (std::size_t t = 0; t < factors_.size(); ++t)
      if ((2 * chi.exponents[t]) % factors_[t] != 0) return false;
    return true;
  }

  std::complex<double> character_value(const Character& chi,
                                       const GroupElement& g) const {
    check_shape(chi.exponents);
    check_shape(g.coords);
    // Reduce each term mod its factor before dividing to keep the phase in
    // [0, rank), avoiding large-angle trig error.
    double phase = 0.0;
    for (std::size_t t = 0; t < factors_.size(); ++t) {
      const long prod = static_cast<long>(chi.exponents[t]) * g.coords[t];
      phase += static_cast<double>(prod % factors_[t]) / factors_[t];
    }
    return std::polar(1.0, 2.0 * 3.14159265358979323846264338327950288 * phase);
  }

 private:
  void check_index(int index) const {
    if (index < 0 || index >= order_)
      throw validation_error("group index out of range");
  }

  void check_shape(const std::vector<int>& tuple) const {
    if (tuple.size() != factors_.size())
      throw validation_error("tuple shape does not match group factors");
    for (std::size_t t = 0; t < factors_.size(); ++t)
      if (tuple[t] < 0 || tuple[t] >= factors_[t])
        throw validation_error("tuple entry outside factor range");
  }

  std::vector<int> unrank(int index) const {
    std::vector<int> tuple(factors_.size(), 0);
    for (std::size_t t = factors_.size(); t-- > 0;) {
      tuple[t] = index % factors_[t];
      index /= factors_[t];
    }
    return tuple;
  }

  int rank_of(const std::vector<int>& tuple) const {
    int index = 0;
    for (std::size_t t = 0; t < factors_.size(); ++t)
      index = index * factors_[t] + tuple[t];
    return index;
  }

  std::vector<int> factors_;
  int order_;
};

/// Inverse-invariant map from group elements to edge probabilities in [0,1].
/// Values are stored in element-enumeration order. Inverse-invariance is a
/// type invariant: it is what makes every Cayley matrix built from the
/// function symmetric.
class ConnectionFunction {
 public:
  ConnectionFunction(const AbelianGroup& group, std::vector<double> values)
      : values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != group.order())
      throw validation_error("connection function size != group order");
    for (double v : values_)
      if (!(v >= 0.0 && v <= 1.0))
        throw validation_error("connection function values must lie in [0,1]");
    for (int i = 0; i < group.order(); ++i) {
      const int inv = group.index_of(group.inverse(group.element(i)));
      if (values_[i] != values_[inv])
        throw validation_error(
            "connection function is not inverse-invariant: f(x) != f(x^-1)");
    }
  }

  double operator()(int element_index) const { return values_[element_index]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Cayley matrix A with a_ij = f(g_i^{-1} g_j). Symmetric because f is
/// inverse-invariant; constant along group-translation orbits.
inline Eigen::MatrixXd cayley_matrix(const AbelianGroup& group,
                                     const ConnectionFunction& f) {
  const int n = group.order();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    const GroupElement gi_inv = group.inverse(group.element(i));
    for (int j = 0; j < n; ++j) {
      const int x = group.index_of(group.multiply(gi_inv, group.element(j)));
      a(i, j) = f(x);
    }
  }
  return a;
}

/// Unitary of normalized characters: U(i, j) = chi_j(g_i) / sqrt(n).
/// Columns diagonalize every Cayley matrix on the group.
inline Eigen::MatrixXcd character_matrix(const AbelianGroup& group) {
  const int n = group.order();
  Eigen::MatrixXcd u(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    const Character chi = group.character(j);
    for (int i = 0; i < n; ++i)
      u(i, j) = scale * group.character_value(chi, group.element(i));
  }
  return u;
}

/// Raw character column (unnormalized): entry i is chi(g_i).
inline Eigen::VectorXcd character_vector(const AbelianGroup& group,
                                         const Character& chi) {
  const int n = group.order();
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = group.character_value(chi, group.element(i));
  return v;
}

namespace detail {
constexpr double kRealEigenvalueImagTol = 1e-12;
}

/// Eigenvalue of the Cayley matrix attached to one character:
/// lambda(chi) = sum_x f(x) * conj(chi(x)). Real for inverse-invariant f.
inline double cayley_eigenvalue(const AbelianGroup& group,
                                const ConnectionFunction& f,
                                const Character& chi) {
  std::complex<double> acc(0.0, 0.0);
  for (int x = 0; x < group.order(); ++x)
    acc += f(x) * std::conj(group.character_value(chi, group.element(x)));
  if (std::abs(acc.imag()) > detail::kRealEigenvalueImagTol * group.order())
    throw validation_error("cayley eigenvalue has non-negligible imaginary part");
  return acc.real();
}

/// All Cayley eigenvalues in character-enumeration order.
inline Eigen::VectorXd cayley_eigenvalues(const AbelianGroup& group,
                                          const ConnectionFunction& f) {
  Eigen::VectorXd lams(group.order());
  for (int j = 0; j < group.order(); ++j)
    lams(j) = cayley_eigenvalue(group, f, group.character(j));
  return lams;
}

/// One distinct Cayley eigenvalue together with the characters carrying it.
struct CayleyEigenGroup {
  double eigenvalue = 0.0;
  std::vector<int> character_indices;
  int multiplicity() const { return static_cast<int>(character_indices.size()); }
};

/// Clusters the character eigenvalues into distinct-value groups, ordered by
/// descending |eigenvalue| (ties: larger eigenvalue first, then smallest
/// character index). Conjugate characters always land in the same group.
inline std::vector<CayleyEigenGroup> cayley_eigen_groups(
    const AbelianGroup& group, const ConnectionFunction& f,
    double tol = 1e-10) {
  const Eigen::VectorXd lams = cayley_eigenvalues(group, f);
  const int n = group.order();
  const double scale = std::max(1.0, lams.cwiseAbs().maxCoeff());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (lams(a) != lams(b)) return lams(a) > lams(b);
    return a < b;
  });

  // Transitive clustering along the sorted values.
  std::vector<CayleyEigenGroup> groups;
  for (int pos = 0; pos < n; ++pos) {
    const int j = order[pos];
    if (!groups.empty() &&
        std::abs(groups.back().eigenvalue - lams(j)) <= tol * scale) {
      groups.back().character_indices.push_back(j);
    } else {
      groups.push_back({lams(j), {j}});
    }
  }
  for (auto& g : groups) {
    double mean = 0.0;
    for (int j : g.character_indices) mean += lams(j);
    g.eigenvalue = mean / g.multiplicity();
    std::sort(g.character_indices.begin(), g.character_indices.end());
  }
  std::sort(groups.begin(), groups.end(),
            [](const CayleyEigenGroup& a, const CayleyEigenGroup& b) {
              const double ma = std::abs(a.eigenvalue);
              const double mb = std::abs(b.eigenvalue);
              if (ma != mb) return ma > mb;
              if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
              return a.character_indices.front() < b.character_indices.front();
            });
  return groups;
}

/// Real orthonormal eigenbasis of a Cayley matrix, built from characters.
///
/// Self-conjugate characters are real and kept as-is (normalized); each
/// conjugate pair {chi, conj(chi)} contributes the normalized real and
/// imaginary parts, which span the same two-dimensional eigenspace.
/// Columns are ordered group by group (descending |eigenvalue|).
struct RealCharacterBasis {
  Eigen::MatrixXd vectors;     // n x n, orthonormal columns
  Eigen::VectorXd eigenvalues; // Cayley eigenvalue per column
  /// Column indices per distinct eigenvalue, same order as cayley_eigen_groups.
  std::vector<std::vector<int>> group_columns;
  /// Source character indices per column ({i,i} for a self-conjugate column).
  std::vector<std::array<int, 2>> column_characters;
};

inline RealCharacterBasis real_eigenpair_basis(const AbelianGroup& group,
                                               const ConnectionFunction& f) {
  const int n = group.order();
  const auto groups = cayley_eigen_groups(group, f);

  RealCharacterBasis basis;
  basis.vectors.resize(n, n);
  basis.eigenvalues.resize(n);

  int col = 0;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double inv_sqrt_2n = 1.0 / std::sqrt(2.0 * n);
  for (const auto& g : groups) {
    std::vector<int> cols;
    std::vector<bool> used(g.character_indices.size(), false);
    for (std::size_t a = 0; a < g.character_indices.size(); ++a) {
      if (used[a]) continue;
      const int ja = g.character_indices[a];
      const Character chi = group.character(ja);
      if (group.self_conjugate(chi)) {
        used[a] = true;
        basis.vectors.col(col) =
            character_vector(group, chi).real() * inv_sqrt_n;
        basis.eigenvalues(col) = g.eigenvalue;
        basis.column_characters.push_back({ja, ja});
        cols.push_back(col++);
        continue;
      }
      const int jb = group.conjugate_index(ja);
      auto it = std::find(g.character_indices.begin(),
                          g.character_indices.end(), jb);
      if (it == g.character_indices.end())
        throw validation_error(
            "conjugate character fell outside its eigenvalue group");
      used[a] = true;
      used[static_cast<std::size_t>(it - g.character_indices.begin())] = true;
      const Eigen::VectorXcd chi_vec = character_vector(group, chi);
      // (chi + conj(chi)) and i(chi - conj(chi)) rescaled: Re and Im parts.
      basis.vectors.col(col) = 2.0 * chi_vec.real() * inv_sqrt_2n;
      basis.eigenvalues(col) = g.eigenvalue;
      basis.column_characters.push_back({std::min(ja, jb), std::max(ja, jb)});
      cols.push_back(col++);
      basis.vectors.col(col) = 2.0 * chi_vec.imag() * inv_sqrt_2n;
      basis.eigenvalues(col) = g.eigenvalue;
      basis.column_characters.push_back({std::min(ja, jb), std::max(ja, jb)});
      cols.push_back(col++);
    }
    basis.group_columns.push_back(std::move(cols));
  }
  return basis;
}

}  // namespace sbmgft
