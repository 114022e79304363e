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
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "sbmgft/errors.hpp"
#include "sbmgft/rng.hpp"

namespace sbmgft {

/// Absolute tolerances for spectral post-processing. Defaults scale with the
/// operator norm of the matrix being decomposed.
struct Tolerances {
  double zero = 0.0;      // |lambda| <= zero counts as a kernel direction
  double group = 0.0;     // transitive clustering width for eigenvalue groups
  double residual = 0.0;  // accepted ||Sv - lambda v||

  static Tolerances defaults_for(double op_norm, int dim) {
    const double eps = std::numeric_limits<double>::epsilon();
    Tolerances t;
    t.zero = dim * eps * op_norm;
    t.group = 1e-8 * op_norm;
    t.residual = 1e-8 * op_norm;
    return t;
  }
};

/// Full spectrum of a real symmetric matrix, eigenvalues descending,
/// eigenvectors sign-canonicalized (largest-magnitude entry positive,
/// lowest index on ties).
struct Spectrum {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd vectors;      // orthonormal columns, matching order
  double op_norm = 0.0;         // max |eigenvalue|
  double zero_tol = 0.0;
  int n_plus = 0;   // eigenvalues > zero_tol
  int n_minus = 0;  // eigenvalues < -zero_tol

  int dim() const { return static_cast<int>(eigenvalues.size()); }

  /// Position of the signed index: +i is the i-th largest positive
  /// eigenvalue, -i the i-th most negative (i >= 1). Zero-group eigenvalues
  /// carry no signed index.
  int position_of_signed(int signed_index) const {
    if (signed_index > 0 && signed_index <= n_plus) return signed_index - 1;
    if (signed_index < 0 && -signed_index <= n_minus)
      return dim() + signed_index;
    throw validation_error("signed eigenvalue index out of range");
  }
};

namespace detail {

inline void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best) {
      best = m;
      pivot = i;
    }
  }
  if (v(pivot) < 0.0) v = -v;
}

}  // namespace detail

/// Dense symmetric eigendecomposition with deterministic ordering and signs.
inline Spectrum symmetric_eigendecomposition(
    const Eigen::MatrixXd& s, std::optional<double> zero_tol = std::nullopt) {
  if (s.rows() != s.cols())
    throw validation_error("symmetric_eigendecomposition: matrix not square");
  const double scale =
      std::max(s.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw validation_error(
        "symmetric_eigendecomposition: matrix not symmetric within 1e-12");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (s + s.transpose()));
  if (solver.info() != Eigen::Success)
    throw convergence_error("dense eigensolver failed", 0.0, 0);

  const int m = static_cast<int>(s.rows());
  Spectrum spec;
  spec.eigenvalues.resize(m);
  spec.vectors.resize(m, m);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < m; ++i) {
    spec.eigenvalues(i) = solver.eigenvalues()(m - 1 - i);
    spec.vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
    detail::canonicalize_sign(spec.vectors.col(i));
  }
  spec.op_norm = spec.eigenvalues.cwiseAbs().maxCoeff();
  spec.zero_tol = zero_tol.value_or(
      Tolerances::defaults_for(spec.op_norm, m).zero);
  for (int i = 0; i < m; ++i) {
    if (spec.eigenvalues(i) > spec.zero_tol) ++spec.n_plus;
    if (spec.eigenvalues(i) < -spec.zero_tol) ++spec.n_minus;
  }
  return spec;
}

/// Transitive clustering of a descending value sequence: consecutive values
/// within tol of each other share a cluster. Returns index lists in order.
inline std::vector<std::vector<int>> cluster_descending(
    const Eigen::VectorXd& values, double tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < values.size(); ++i) {
    if (!clusters.empty() &&
        std::abs(values(clusters.back().back()) - values(i)) <= tol)
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }
  return clusters;
}

/// One cluster of numerically equal eigenvalues with its orthonormal basis.
struct EigenGroup {
  double eigenvalue = 0.0;     // cluster mean
  std::vector<int> positions;  // positions in the source spectrum/basis
  Eigen::MatrixXd basis;       // columns
  double gap = std::numeric_limits<double>::infinity();

  int multiplicity() const { return static_cast<int>(positions.size()); }
};

/// Clusters the nonzero eigenpairs of a spectrum into distinct-eigenvalue
/// groups (transitive clustering at group_tol, eigenvalues descending) and
/// computes the gap between group representatives. A single nonzero group
/// keeps the +infinity gap sentinel.
inline std::vector<EigenGroup> group_eigenvalues(const Spectrum& spec,
                                                 double group_tol,
                                                 std::optional<double>
                                                     zero_tol = std::nullopt) {
  const double ztol = zero_tol.value_or(spec.zero_tol);
  std::vector<EigenGroup> groups;
  for (int i = 0; i < spec.dim(); ++i) {
    if (std::abs(spec.eigenvalues(i)) <= ztol) continue;
    // Eigenvalues arrive descending, so chaining on the previous member
    // realizes transitive clustering.
    if (!groups.empty() &&
        std::abs(spec.eigenvalues(groups.back().positions.back()) -
                 spec.eigenvalues(i)) <= group_tol) {
      groups.back().positions.push_back(i);
    } else {
      EigenGroup g;
      g.eigenvalue = spec.eigenvalues(i);
      g.positions.push_back(i);
      groups.push_back(std::move(g));
    }
  }
  for (auto& g : groups) {
    double mean = 0.0;
    for (int p : g.positions) mean += spec.eigenvalues(p);
    g.eigenvalue = mean / g.multiplicity();
    g.basis.resize(spec.vectors.rows(), g.multiplicity());
    for (int c = 0; c < g.multiplicity(); ++c)
      g.basis.col(c) = spec.vectors.col(g.positions[c]);
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < groups.size(); ++j)
      if (j != i)
        gap = std::min(gap,
                       std::abs(groups[i].eigenvalue - groups[j].eigenvalue));
    groups[i].gap = gap;
  }
  return groups;
}

/// gamma(lambda): distance from the group holding lambda to the nearest
/// other distinct nonzero eigenvalue.
inline double spectral_gap(const std::vector<EigenGroup>& groups,
                           double lambda) {
  const EigenGroup* owner = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : groups) {
    const double d = std::abs(g.eigenvalue - lambda);
    if (d < best) {
      best = d;
      owner = &g;
    }
  }
  if (owner == nullptr) throw validation_error("spectral_gap: no groups");
  return owner->gap;
}

/// Orthogonal projection of x onto the group's eigenspace.
template <typename Derived>
auto spectral_projection(const EigenGroup& group,
                         const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != group.basis.rows())
    throw validation_error("spectral_projection: dimension mismatch");
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs =
      group.basis.transpose().cast<Scalar>() * x;
  return (group.basis.cast<Scalar>() * coeffs).eval();
}

/// Distance between equal-dimensional subspaces given orthonormal bases:
/// Frobenius norm of P_A - P_B (= sqrt(2) * Frobenius norm of sin(principal
/// angles)) plus the operator-norm variant (sine of the largest angle).
struct SubspaceDistance {
  double frobenius = 0.0;
  double operator_norm = 0.0;
};

inline SubspaceDistance projection_distance(const Eigen::MatrixXd& basis_a,
                                            const Eigen::MatrixXd& basis_b) {
  if (basis_a.rows() != basis_b.rows())
    throw validation_error("projection_distance: ambient dimensions differ");
  if (basis_a.cols() != basis_b.cols())
    throw validation_error("projection_distance: subspace dimensions differ");
  const Eigen::Index d = basis_a.cols();
  const double ortho_tol = 1e-8;
  if ((basis_a.transpose() * basis_a - Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() > ortho_tol ||
      (basis_b.transpose() * basis_b - Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() > ortho_tol)
    throw validation_error("projection_distance: bases are not orthonormal");

  const Eigen::MatrixXd overlap = basis_a.transpose() * basis_b;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap);
  double sum_sin_sq = 0.0;
  double min_cos = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double c = std::min(1.0, svd.singularValues()(i));
    sum_sin_sq += 1.0 - c * c;
    min_cos = std::min(min_cos, c);
  }
  SubspaceDistance out;
  out.frobenius = std::sqrt(2.0 * sum_sin_sq);
  out.operator_norm = std::sqrt(std::max(0.0, 1.0 - min_cos * min_cos));
  return out;
}

/// Type-erased symmetric operator for matrix-free eigenvalue iteration.
/// The wrapped matrix/object is captured by reference and must outlive the
/// operator.
struct LinearOperator {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;

  static LinearOperator from_matrix(const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd* m = &s;
    return {static_cast<int>(s.rows()),
            [m](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *m * x; }};
  }

  template <typename T>
  static LinearOperator from(const T& object) {
    const T* obj = &object;
    return {object.dim(),
            [obj](const Eigen::VectorXd& x) { return obj->apply(x); }};
  }
};

struct PartialEigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  bool converged = false;
};

struct PartialEigenResult {
  std::vector<PartialEigenPair> pairs;  // by descending |value|
  long matvecs = 0;

  bool all_converged() const {
    return std::all_of(pairs.begin(), pairs.end(),
                       [](const PartialEigenPair& p) { return p.converged; });
  }
  double worst_residual() const {
    double w = 0.0;
    for (const auto& p : pairs) w = std::max(w, p.residual);
    return w;
  }
};

struct PartialEigenOptions {
  long max_matvecs = 10000;
  std::uint64_t seed = 0x853c49e6748fea9bULL;
  int sweep_steps = 250;  // Lanczos steps per deflation sweep
  /// Throw convergence_error instead of returning unconverged estimates.
  bool throw_on_nonconvergence = false;
};

/// Extreme (largest-magnitude) eigenpairs of a symmetric operator via Lanczos
/// with full reorthogonalization. Converged Ritz pairs are locked and
/// deflated, then the iteration restarts against the remaining subspace, so
/// repeated extreme eigenvalues are recovered one copy per sweep.
///
/// If the matvec budget runs out, the result still carries p pairs; the
/// unconverged ones report their achieved residual with converged=false.
inline PartialEigenResult top_bottom_eigenpairs(
    const LinearOperator& op, int p, double tol,
    const PartialEigenOptions& options = {}) {
  if (p < 1 || p > 32)
    throw validation_error("top_bottom_eigenpairs: p must be in [1, 32]");
  if (p > op.dim)
    throw validation_error("top_bottom_eigenpairs: p exceeds dimension");
  const int n = op.dim;

  PartialEigenResult result;
  Eigen::MatrixXd locked(n, 0);
  std::vector<PartialEigenPair> locked_pairs;
  SplitMix64 rng(options.seed);

  auto reorthogonalize = [&](Eigen::VectorXd& w, const Eigen::MatrixXd& basis,
                             int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0)
        w.noalias() -= locked * (locked.transpose() * w);
      if (cols > 0)
        w.noalias() -=
            basis.leftCols(cols) * (basis.leftCols(cols).transpose() * w);
    }
  };

  int sweep_steps = std::min(options.sweep_steps, n);
  bool budget_exhausted = false;
  while (static_cast<int>(locked_pairs.size()) < p && !budget_exhausted) {
    const int m_max = std::min(sweep_steps, n - static_cast<int>(locked.cols()));
    if (m_max <= 0) break;

    Eigen::MatrixXd basis(n, m_max);
    Eigen::VectorXd alpha(m_max), beta(m_max);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
    reorthogonalize(v, basis, 0);
    if (v.norm() < 1e-12) continue;  // start vector fell into locked span
    v.normalize();
    basis.col(0) = v;

    int m = 0;
    double beta_last = 0.0;
    for (int j = 0; j < m_max; ++j) {
      if (result.matvecs >= options.max_matvecs) {
        budget_exhausted = true;
        break;
      }
      Eigen::VectorXd w = op.apply(basis.col(j));
      ++result.matvecs;
      alpha(j) = basis.col(j).dot(w);
      w.noalias() -= alpha(j) * basis.col(j);
      if (j > 0) w.noalias() -= beta(j - 1) * basis.col(j - 1);
      reorthogonalize(w, basis, j + 1);
      m = j + 1;
      beta_last = w.norm();
      if (j + 1 < m_max) {
        beta(j) = beta_last;
        if (beta(j) < 1e-13 * std::max(1.0, std::abs(alpha(j)))) break;
        basis.col(j + 1) = w / beta(j);
      }
    }
    if (m == 0) break;

    // Ritz pairs of the tridiagonal section.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      t(j, j) = alpha(j);
      if (j + 1 < m) {
        t(j, j + 1) = beta(j);
        t(j + 1, j) = beta(j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolver(t);
    std::vector<int> ritz_order(m);
    std::iota(ritz_order.begin(), ritz_order.end(), 0);
    std::sort(ritz_order.begin(), ritz_order.end(), [&](int a, int b) {
      return std::abs(tsolver.eigenvalues()(a)) >
             std::abs(tsolver.eigenvalues()(b));
    });

    const int wanted = p - static_cast<int>(locked_pairs.size());
    int newly_locked = 0;
    std::vector<PartialEigenPair> sweep_best;
    for (int r = 0; r < m && r < wanted; ++r) {
      const int idx = ritz_order[r];
      PartialEigenPair pair;
      pair.value = tsolver.eigenvalues()(idx);
      pair.vector = basis.leftCols(m) * tsolver.eigenvectors().col(idx);
      pair.vector.normalize();
      if (result.matvecs >= options.max_matvecs) {
        budget_exhausted = true;
        // no budget for the explicit check: report the Lanczos estimate
        pair.residual =
            std::abs(beta_last * tsolver.eigenvectors()(m - 1, idx));
      } else {
        const Eigen::VectorXd image = op.apply(pair.vector);
        ++result.matvecs;
        pair.value = pair.vector.dot(image);
        pair.residual = (image - pair.value * pair.vector).norm();
        pair.converged = pair.residual <= tol;
      }
      if (pair.converged) {
        locked.conservativeResize(n, locked.cols() + 1);
        locked.col(locked.cols() - 1) = pair.vector;
        locked_pairs.push_back(std::move(pair));
        ++newly_locked;
      } else {
        sweep_best.push_back(std::move(pair));
      }
    }

    if (budget_exhausted ||
        (newly_locked == 0 && sweep_steps >= n - int(locked.cols()))) {
      // Out of budget or out of subspace: report best estimates.
      for (auto& pair : sweep_best) {
        if (static_cast<int>(locked_pairs.size()) >= p) break;
        locked_pairs.push_back(std::move(pair));
      }
      break;
    }
    if (newly_locked == 0) sweep_steps = std::min(2 * sweep_steps, n);
  }

  std::sort(locked_pairs.begin(), locked_pairs.end(),
            [](const PartialEigenPair& a, const PartialEigenPair& b) {
              return std::abs(a.value) > std::abs(b.value);
            });
  if (static_cast<int>(locked_pairs.size()) > p) locked_pairs.resize(p);
  result.pairs = std::move(locked_pairs);

  if (options.throw_on_nonconvergence && !result.all_converged())
    throw convergence_error(
        "partial eigensolver did not reach the requested residual",
        result.worst_residual(), result.matvecs);
  return result;
}

}  // namespace sbmgft
