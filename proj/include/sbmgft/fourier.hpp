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
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "sbmgft/errors.hpp"
#include "sbmgft/group.hpp"
#include "sbmgft/sbm.hpp"
#include "sbmgft/spectral.hpp"

namespace sbmgft {

/// Instance-independent Fourier basis for a block model: the nonzero
/// eigenvalues of the weighted probability matrix together with their
/// eigenvectors lifted isometrically to the graph dimension. The lifted
/// columns are orthonormal eigenvectors of the model matrix with eigenvalues
/// N * eigenvalues(i).
struct SBMFourierBasis {
  Eigen::MatrixXd probability;  // n x n
  Eigen::VectorXd measure;      // block measure used for the weighting
  int n_vertices = 0;
  BlockSizes k;

  Eigen::VectorXd eigenvalues;  // nonzero, descending, weighted-matrix scale
  Eigen::MatrixXd u0;           // n x r eigenvectors (kernel columns removed)
  Eigen::MatrixXd lifted;       // N x r, lifted eigenvectors
  std::vector<EigenGroup> groups;  // basis = lifted columns per distinct value
  Tolerances tolerances;

  int rank() const { return static_cast<int>(eigenvalues.size()); }
  int dim() const { return static_cast<int>(lifted.rows()); }

  Eigen::VectorXd w_eigenvalues() const { return eigenvalues * n_vertices; }

  /// Column order by descending |eigenvalue| (the convention used when
  /// pairing against instance eigenvectors), ties broken by position.
  std::vector<int> magnitude_order() const {
    std::vector<int> order(rank());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(eigenvalues(a)) > std::abs(eigenvalues(b));
    });
    return order;
  }

  /// Slot clusters over the magnitude order: contiguous slots whose columns
  /// belong to the same eigenvalue group.
  std::vector<std::vector<int>> magnitude_slot_clusters() const {
    std::vector<int> group_of(rank());
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (int pos : groups[g].positions) group_of[pos] = static_cast<int>(g);
    const auto order = magnitude_order();
    std::vector<std::vector<int>> clusters;
    for (std::size_t s = 0; s < order.size(); ++s) {
      if (!clusters.empty() &&
          group_of[order[clusters.back().back()]] == group_of[order[s]])
        clusters.back().push_back(static_cast<int>(s));
      else
        clusters.push_back({static_cast<int>(s)});
    }
    return clusters;
  }
};

namespace detail {

inline std::vector<EigenGroup> build_groups(const Eigen::VectorXd& values,
                                            const Eigen::MatrixXd& vectors,
                                            double group_tol) {
  const auto clusters = cluster_descending(values, group_tol);
  std::vector<EigenGroup> groups;
  groups.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    EigenGroup g;
    double mean = 0.0;
    for (int c : cluster) mean += values(c);
    g.eigenvalue = mean / cluster.size();
    g.positions = cluster;
    g.basis.resize(vectors.rows(), cluster.size());
    for (std::size_t c = 0; c < cluster.size(); ++c)
      g.basis.col(c) = vectors.col(cluster[c]);
    groups.push_back(std::move(g));
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

}  // namespace detail

/// Computes the block-model Fourier basis: decompose the weighted probability
/// matrix, drop kernel columns, lift the remaining eigenvectors through the
/// block isometry, and cluster the eigenvalues.
inline SBMFourierBasis sbm_fourier_basis(
    const SBMSpec& spec, std::optional<Tolerances> tolerances = std::nullopt) {
  const Eigen::MatrixXd a_mu = weighted_probability_matrix(spec.a, spec.mu);
  const Spectrum full = symmetric_eigendecomposition(a_mu);
  const Tolerances tol = tolerances.value_or(
      Tolerances::defaults_for(full.op_norm, full.dim()));

  std::vector<int> keep;
  for (int i = 0; i < full.dim(); ++i)
    if (std::abs(full.eigenvalues(i)) > tol.zero) keep.push_back(i);

  SBMFourierBasis basis;
  basis.probability = spec.a;
  basis.measure = spec.mu;
  basis.n_vertices = spec.n_vertices;
  basis.k = block_sizes(spec.mu, spec.n_vertices);
  basis.tolerances = tol;

  const int r = static_cast<int>(keep.size());
  basis.eigenvalues.resize(r);
  basis.u0.resize(full.dim(), r);
  for (int c = 0; c < r; ++c) {
    basis.eigenvalues(c) = full.eigenvalues(keep[c]);
    basis.u0.col(c) = full.vectors.col(keep[c]);
  }
  basis.lifted.resize(spec.n_vertices, r);
  for (int c = 0; c < r; ++c)
    basis.lifted.col(c) = lift_isometric(basis.k, basis.u0.col(c));
  basis.groups = detail::build_groups(basis.eigenvalues, basis.lifted, tol.group);
  return basis;
}

/// Fourier data of one signal: a projection per distinct nonzero eigenvalue,
/// the kernel component, and (when every nonzero eigenvalue is simple) the
/// scalar coefficient view.
struct FourierResult {
  Eigen::VectorXd lambdas;  // distinct eigenvalues, weighted-matrix scale
  std::vector<Eigen::VectorXcd> projections;
  Eigen::VectorXcd zero_component;
  std::optional<Eigen::VectorXcd> coefficients;  // per basis column
};

inline FourierResult sbm_fourier_transform(const SBMFourierBasis& basis,
                                           const Eigen::VectorXcd& x) {
  if (x.size() != basis.dim())
    throw validation_error("sbm_fourier_transform: dimension mismatch");

  FourierResult result;
  result.lambdas.resize(basis.groups.size());
  result.projections.reserve(basis.groups.size());
  Eigen::VectorXcd accumulated = Eigen::VectorXcd::Zero(x.size());
  for (std::size_t g = 0; g < basis.groups.size(); ++g) {
    result.lambdas(g) = basis.groups[g].eigenvalue;
    Eigen::VectorXcd proj = spectral_projection(basis.groups[g], x);
    accumulated += proj;
    result.projections.push_back(std::move(proj));
  }
  result.zero_component = x - accumulated;

  const bool all_simple =
      std::all_of(basis.groups.begin(), basis.groups.end(),
                  [](const EigenGroup& g) { return g.multiplicity() == 1; });
  if (all_simple)
    result.coefficients =
        basis.lifted.transpose().cast<std::complex<double>>() * x;
  return result;
}

inline FourierResult sbm_fourier_transform(const SBMFourierBasis& basis,
                                           const Eigen::VectorXd& x) {
  return sbm_fourier_transform(
      basis, Eigen::VectorXcd(x.cast<std::complex<double>>()));
}

/// Sum of all projections including the kernel component.
inline Eigen::VectorXcd inverse_transform(const FourierResult& result) {
  Eigen::VectorXcd x = result.zero_component;
  for (const auto& proj : result.projections) x += proj;
  return x;
}

/// Instance graph Fourier transform from a full spectrum: coefficient i is
/// the inner product of the signal with eigenvector i.
inline Eigen::VectorXcd graph_fourier_transform(const Spectrum& spectrum,
                                                const Eigen::VectorXcd& x) {
  if (x.size() != spectrum.vectors.rows())
    throw validation_error("graph_fourier_transform: dimension mismatch");
  return spectrum.vectors.transpose().cast<std::complex<double>>() * x;
}

/// Instance GFT coefficients from a partial spectrum (magnitude-extreme
/// pairs). Asking for more coefficients than computed pairs is an error.
inline Eigen::VectorXcd graph_fourier_transform(
    const PartialEigenResult& partial, const Eigen::VectorXcd& x,
    int n_coefficients) {
  if (n_coefficients < 0 ||
      n_coefficients > static_cast<int>(partial.pairs.size()))
    throw validation_error(
        "graph_fourier_transform: index beyond the computed partial spectrum");
  Eigen::VectorXcd coeffs(n_coefficients);
  for (int i = 0; i < n_coefficients; ++i) {
    if (x.size() != partial.pairs[i].vector.size())
      throw validation_error("graph_fourier_transform: dimension mismatch");
    coeffs(i) = partial.pairs[i].vector.cast<std::complex<double>>().dot(x);
  }
  return coeffs;
}

// ---------------------------------------------------------------------------
// Step-function embedding of graph signals.
// ---------------------------------------------------------------------------

/// Piecewise-constant unit-interval function with N equal pieces. Stores the
/// function values (already sqrt(N)-scaled), so that the L2 norm of the
/// function equals the Euclidean norm of the originating signal.
struct StepSignal {
  int resolution = 0;
  Eigen::VectorXcd values;
};

inline StepSignal step_embed(const Eigen::VectorXcd& x) {
  if (x.size() == 0) throw validation_error("step_embed: empty signal");
  StepSignal f;
  f.resolution = static_cast<int>(x.size());
  f.values = x * std::sqrt(static_cast<double>(x.size()));
  return f;
}

inline StepSignal step_embed(const Eigen::VectorXd& x) {
  return step_embed(Eigen::VectorXcd(x.cast<std::complex<double>>()));
}

/// L2 inner product over the common refinement of the two partitions.
/// Interval lengths are exact rationals with denominator N*M; only the
/// function values live in floating point.
inline std::complex<double> step_inner_product(const StepSignal& f,
                                               const StepSignal& g) {
  if (f.resolution < 1 || g.resolution < 1)
    throw validation_error("step_inner_product: invalid resolution");
  const std::int64_t nf = f.resolution;
  const std::int64_t ng = g.resolution;
  const double denom = static_cast<double>(nf * ng);
  std::complex<double> acc(0.0, 0.0);
  std::int64_t pos = 0;  // current breakpoint, in units of 1/(nf*ng)
  std::int64_t i = 0, j = 0;
  while (i < nf && j < ng) {
    const std::int64_t next_f = (i + 1) * ng;  // right end of piece i of f
    const std::int64_t next_g = (j + 1) * nf;
    const std::int64_t next = std::min(next_f, next_g);
    const double length = static_cast<double>(next - pos) / denom;
    acc += f.values(i) * std::conj(g.values(j)) * length;
    pos = next;
    if (next == next_f) ++i;
    if (next == next_g) ++j;
  }
  return acc;
}

inline double step_norm(const StepSignal& f) {
  return std::sqrt(std::abs(step_inner_product(f, f)));
}

// ---------------------------------------------------------------------------
// Cayley-structured bases.
// ---------------------------------------------------------------------------

/// Fourier basis for a Cayley block model with uniform measure, built from
/// characters alone: the lifted real character basis is an orthonormal
/// eigenbasis of the model matrix, with the eigenvalue of chi equal to
/// (N/n) * sum_x f(x) conj(chi(x)). Requires n | N.
inline SBMFourierBasis cayley_uniform_basis(
    const AbelianGroup& group, const ConnectionFunction& f, int n_vertices,
    std::optional<Tolerances> tolerances = std::nullopt) {
  const int n = group.order();
  if (n_vertices % n != 0)
    throw validation_error(
        "cayley_uniform_basis: N must be divisible by the group order");

  const RealCharacterBasis real_basis = real_eigenpair_basis(group, f);
  const Eigen::VectorXd a_mu_values = real_basis.eigenvalues / n;
  const double op_norm = a_mu_values.cwiseAbs().maxCoeff();
  const Tolerances tol =
      tolerances.value_or(Tolerances::defaults_for(op_norm, n));

  // Keep nonzero eigenvalues, reordered to descending eigenvalue.
  std::vector<int> keep;
  for (int c = 0; c < n; ++c)
    if (std::abs(a_mu_values(c)) > tol.zero) keep.push_back(c);
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
    return a_mu_values(a) > a_mu_values(b);
  });

  SBMFourierBasis basis;
  basis.probability = cayley_matrix(group, f);
  basis.measure = Eigen::VectorXd::Constant(n, 1.0 / n);
  basis.n_vertices = n_vertices;
  basis.k = BlockSizes{std::vector<int>(n, n_vertices / n)};
  basis.tolerances = tol;

  const int r = static_cast<int>(keep.size());
  basis.eigenvalues.resize(r);
  basis.u0.resize(n, r);
  for (int c = 0; c < r; ++c) {
    basis.eigenvalues(c) = a_mu_values(keep[c]);
    basis.u0.col(c) = real_basis.vectors.col(keep[c]);
  }
  basis.lifted.resize(n_vertices, r);
  for (int c = 0; c < r; ++c)
    basis.lifted.col(c) = lift_isometric(basis.k, basis.u0.col(c));
  basis.groups =
      detail::build_groups(basis.eigenvalues, basis.lifted, tol.group);
  return basis;
}

/// The character-coordinate system of a weighted Cayley model: the Gram-type
/// matrix M~ = U* M U (computable by direct summation over the group), the
/// diagonal of Cayley eigenvalues, and their product.
struct MTildeSystem {
  Eigen::MatrixXcd m_tilde;  // n x n Hermitian PSD
  Eigen::VectorXd gamma;     // Cayley eigenvalues, character order

  Eigen::MatrixXcd product() const {
    return m_tilde * gamma.asDiagonal().toDenseMatrix().cast<std::complex<double>>();
  }
};

/// Builds M~ entrywise: M~(k,l) = (1/n) sum_j mu_j (chi_k^{-1} chi_l)(g_j).
inline MTildeSystem mtilde_system(const AbelianGroup& group,
                                  const ConnectionFunction& f,
                                  const Eigen::VectorXd& mu) {
  const int n = group.order();
  if (mu.size() != n)
    throw validation_error("mtilde_system: measure size != group order");
  validate_block_measure(mu);

  MTildeSystem sys;
  sys.m_tilde.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const Character chik_inv = group.character_inverse(group.character(k));
    for (int l = 0; l < n; ++l) {
      const Character prod =
          group.character_product(chik_inv, group.character(l));
      std::complex<double> acc(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        acc += mu(j) * group.character_value(prod, group.element(j));
      sys.m_tilde(k, l) = acc / static_cast<double>(n);
    }
  }
  sys.gamma = cayley_eigenvalues(group, f);
  return sys;
}

/// Factored form of the product M~ Gamma: entry (k,l) is
/// (1/n) * (F f)(chi_l) * <chi_l, chi_k>_mu, where F is the group Fourier
/// transform of the connection function and the inner product is weighted by
/// the measure. Used as a cross-check of mtilde_system.
inline Eigen::MatrixXcd weighted_character_product(
    const AbelianGroup& group, const ConnectionFunction& f,
    const Eigen::VectorXd& mu) {
  const int n = group.order();
  if (mu.size() != n)
    throw validation_error("weighted_character_product: size mismatch");
  const Eigen::VectorXd fourier_f = cayley_eigenvalues(group, f);
  Eigen::MatrixXcd out(n, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXcd chik = character_vector(group, group.character(k));
    for (int l = 0; l < n; ++l) {
      const Eigen::VectorXcd chil = character_vector(group, group.character(l));
      std::complex<double> weighted(0.0, 0.0);
      for (int j = 0; j < n; ++j)
        weighted += chil(j) * std::conj(chik(j)) * mu(j);
      out(k, l) = fourier_f(l) * weighted / static_cast<double>(n);
    }
  }
  return out;
}

/// Fourier basis of a weighted Cayley model along with the character
/// coordinates z_i = (1/sqrt(N)) U* D^T y_i of every basis vector, verified
/// to be eigenvectors of M~ Gamma with matching eigenvalues.
struct GeneralCayleyBasis {
  SBMFourierBasis basis;
  Eigen::MatrixXcd character_coordinates;  // n x r, column per basis vector
  MTildeSystem system;
};

inline GeneralCayleyBasis general_cayley_basis(
    const AbelianGroup& group, const ConnectionFunction& f,
    const Eigen::VectorXd& mu, int n_vertices,
    std::optional<Tolerances> tolerances = std::nullopt,
    double consistency_tol = 1e-8) {
  GeneralCayleyBasis out;
  const SBMSpec spec(cayley_matrix(group, f), mu, n_vertices);
  out.basis = sbm_fourier_basis(spec, tolerances);
  out.system = mtilde_system(group, f, mu);

  const int n = group.order();
  const Eigen::MatrixXcd u = character_matrix(group);
  const Eigen::MatrixXcd product = out.system.product();
  const double inv_sqrt_nv = 1.0 / std::sqrt(double(n_vertices));

  out.character_coordinates.resize(n, out.basis.rank());
  for (int c = 0; c < out.basis.rank(); ++c) {
    // D^T y: per-block sums, then rotate into character coordinates.
    Eigen::VectorXcd block_sums(n);
    const auto off = out.basis.k.offsets();
    for (int b = 0; b < n; ++b)
      block_sums(b) =
          out.basis.lifted.col(c).segment(off[b], out.basis.k.k[b]).sum();
    const Eigen::VectorXcd z = inv_sqrt_nv * (u.adjoint() * block_sums);
    const double lambda = out.basis.eigenvalues(c);
    const double residual = (product * z - lambda * z).norm();
    if (residual > consistency_tol)
      throw validation_error(
          "general_cayley_basis: character-coordinate eigenvector residual "
          "exceeds tolerance; tolerances are misconfigured");
    out.character_coordinates.col(c) = z;
  }
  return out;
}

/// Measure with one dominant block on the identity element: tau on every
/// non-identity element, 1 - (n-1) tau on the identity.
inline Eigen::VectorXd one_large_block_measure(int n, double tau) {
  if (n < 2) throw validation_error("one_large_block_measure: need n >= 2");
  if (!(tau > 0.0 && tau < 1.0 / n))
    throw validation_error("one_large_block_measure: tau must lie in (0, 1/n)");
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, tau);
  mu(0) = 1.0 - (n - 1) * tau;
  return mu;
}

/// Closed-form eigenvectors of the model matrix for a one-large-block Cayley
/// model: from a repeated Cayley eigenvalue gamma with character eigenbasis
/// {chi_a1, ..., chi_am}, the lifted zero-sum combinations
/// V((i-1) chi_ai - sum_{j<i} chi_aj), 1 < i <= m, are orthogonal
/// eigenvectors of the model matrix with eigenvalue N tau gamma.
struct OneLargeBlockVectors {
  std::vector<Eigen::VectorXcd> vectors;  // normalized, pairwise orthogonal
  double w_eigenvalue = 0.0;              // N tau gamma
};

inline OneLargeBlockVectors one_large_block_eigenvectors(
    const AbelianGroup& group, const ConnectionFunction& f, double tau,
    int n_vertices, const CayleyEigenGroup& eigen_group) {
  const int n = group.order();
  const int m = eigen_group.multiplicity();
  if (m < 2)
    throw validation_error(
        "one_large_block_eigenvectors: eigenvalue multiplicity must exceed 1");
  if (!(tau > 0.0 && tau < 1.0 / n))
    throw validation_error(
        "one_large_block_eigenvectors: tau must lie in (0, 1/n)");
  const double tau_n = tau * n_vertices;
  if (std::abs(tau_n - std::round(tau_n)) > 1e-6)
    throw validation_error(
        "one_large_block_eigenvectors: tau * N must be an integer");

  const Eigen::VectorXd mu = one_large_block_measure(n, tau);
  const BlockSizes k = block_sizes(mu, n_vertices);

  OneLargeBlockVectors out;
  out.w_eigenvalue = n_vertices * tau * eigen_group.eigenvalue;
  for (int i = 1; i < m; ++i) {
    Eigen::VectorXcd combo =
        double(i) *
        character_vector(group, group.character(eigen_group.character_indices[i]));
    for (int j = 0; j < i; ++j)
      combo -= character_vector(
          group, group.character(eigen_group.character_indices[j]));
    Eigen::VectorXcd lifted = lift_isometric(k, combo);
    lifted /= lifted.norm();
    out.vectors.push_back(std::move(lifted));
  }
  return out;
}

/// Isometric lift of the real character eigenbasis under a (generally
/// non-uniform) measure. Orthonormal, but an eigenbasis of the model matrix
/// only when the measure is uniform.
struct TransferredBasis {
  Eigen::MatrixXd vectors;  // N x n
  RealCharacterBasis source;
  BlockSizes k;
};

inline TransferredBasis transferred_character_basis(const AbelianGroup& group,
                                                    const ConnectionFunction& f,
                                                    const Eigen::VectorXd& mu,
                                                    int n_vertices) {
  if (mu.size() != group.order())
    throw validation_error(
        "transferred_character_basis: measure size != group order");
  TransferredBasis out;
  out.source = real_eigenpair_basis(group, f);
  out.k = block_sizes(mu, n_vertices);
  out.vectors.resize(n_vertices, group.order());
  for (int c = 0; c < group.order(); ++c)
    out.vectors.col(c) = lift_isometric(out.k, out.source.vectors.col(c));
  return out;
}

}  // namespace sbmgft
