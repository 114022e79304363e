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
#include <numeric>
#include <vector>

#include "sbmgft/errors.hpp"
#include "sbmgft/rng.hpp"

namespace sbmgft {

inline void validate_block_measure(const Eigen::VectorXd& mu) {
  if (mu.size() == 0) throw validation_error("block measure is empty");
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (!(mu(i) > 0.0))
      throw validation_error("block measure entries must be positive");
  if (std::abs(mu.sum() - 1.0) > 1e-12)
    throw validation_error("block measure must sum to 1 within 1e-12");
}

inline void validate_probability_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw validation_error("probability matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw validation_error("probability matrix must be symmetric");
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!(a(i, j) >= 0.0 && a(i, j) <= 1.0))
        throw validation_error("probability matrix entries must lie in [0,1]");
}

/// Integer block sizes, summing to the graph size.
struct BlockSizes {
  std::vector<int> k;

  int blocks() const { return static_cast<int>(k.size()); }
  int total() const { return std::accumulate(k.begin(), k.end(), 0); }

  /// First vertex of each block; size blocks()+1, last entry = total().
  std::vector<int> offsets() const {
    std::vector<int> off(k.size() + 1, 0);
    for (std::size_t i = 0; i < k.size(); ++i) off[i + 1] = off[i] + k[i];
    return off;
  }

  Eigen::VectorXd measure() const {
    const double n_total = total();
    Eigen::VectorXd mu(blocks());
    for (int i = 0; i < blocks(); ++i) mu(i) = k[i] / n_total;
    return mu;
  }
};

/// Block-model specification: probability matrix, block measure, graph size.
struct SBMSpec {
  Eigen::MatrixXd a;   // n x n symmetric, entries in [0,1]
  Eigen::VectorXd mu;  // positive, sums to 1
  int n_vertices = 0;

  SBMSpec(Eigen::MatrixXd a_in, Eigen::VectorXd mu_in, int n_in)
      : a(std::move(a_in)), mu(std::move(mu_in)), n_vertices(n_in) {
    validate_probability_matrix(a);
    validate_block_measure(mu);
    if (a.rows() != mu.size())
      throw validation_error("probability matrix and measure sizes differ");
    if (n_vertices < mu.size())
      throw validation_error("graph size must be at least the block count");
  }

  int blocks() const { return static_cast<int>(mu.size()); }

  /// Spec with the exact measure k_i / N of explicit block sizes.
  static SBMSpec from_block_sizes(Eigen::MatrixXd a_in, const BlockSizes& k) {
    return SBMSpec(std::move(a_in), k.measure(), k.total());
  }
};

/// Largest-remainder rounding of mu_i * N, so that |k_i - mu_i N| < 1 and
/// sum k_i = N. Ties go to the lowest index. Near-integer targets (within
/// 1e-9 relative) are snapped so that exact products stay exact.
inline BlockSizes block_sizes(const Eigen::VectorXd& mu, int n_vertices) {
  validate_block_measure(mu);
  const int n = static_cast<int>(mu.size());
  if (n_vertices < n)
    throw validation_error("graph size must be at least the block count");

  std::vector<int> k(n);
  std::vector<double> remainder(n);
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double target = mu(i) * n_vertices;
    const double snapped = std::round(target);
    if (std::abs(target - snapped) <= 1e-9 * std::max(1.0, snapped)) {
      k[i] = static_cast<int>(snapped);
      remainder[i] = 0.0;
    } else {
      k[i] = static_cast<int>(std::floor(target));
      remainder[i] = target - k[i];
    }
    assigned += k[i];
  }
  int leftover = n_vertices - assigned;
  if (leftover < 0 || leftover > n)
    throw validation_error("block size rounding failed");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int t = 0; t < leftover; ++t) ++k[order[t]];

  for (int i = 0; i < n; ++i)
    if (k[i] == 0)
      throw validation_error("a block rounded to size zero; increase N");
  return BlockSizes{std::move(k)};
}

/// Diagonal of the weight matrix M = diag(mu).
inline Eigen::VectorXd weight_matrix(const Eigen::VectorXd& mu) {
  validate_block_measure(mu);
  return mu;
}

/// Weighted probability matrix: (A_mu)_ij = sqrt(mu_i mu_j) a_ij.
inline Eigen::MatrixXd weighted_probability_matrix(const Eigen::MatrixXd& a,
                                                   const Eigen::VectorXd& mu) {
  validate_probability_matrix(a);
  validate_block_measure(mu);
  if (a.rows() != mu.size())
    throw validation_error("probability matrix and measure sizes differ");
  const Eigen::VectorXd s = mu.cwiseSqrt();
  return s.asDiagonal() * a * s.asDiagonal();
}

/// Lift matrix D: N x n block indicator, column j is 1 on block j.
inline Eigen::MatrixXd lift_matrix(const BlockSizes& k) {
  const auto off = k.offsets();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k.total(), k.blocks());
  for (int j = 0; j < k.blocks(); ++j)
    d.block(off[j], j, k.k[j], 1).setOnes();
  return d;
}

/// Isometry V: column j is 1/sqrt(k_j) on block j, zero elsewhere. V^T V = I.
inline Eigen::MatrixXd isometry(const BlockSizes& k) {
  const auto off = k.offsets();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(k.total(), k.blocks());
  for (int j = 0; j < k.blocks(); ++j)
    v.block(off[j], j, k.k[j], 1).setConstant(1.0 / std::sqrt(double(k.k[j])));
  return v;
}

/// Blow-up D x: repeats x_i exactly k_i times.
template <typename Derived>
auto lift_vector(const BlockSizes& k, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != k.blocks())
    throw validation_error("lift_vector: dimension mismatch");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y(k.total());
  const auto off = k.offsets();
  for (int j = 0; j < k.blocks(); ++j)
    y.segment(off[j], k.k[j]).setConstant(x(j));
  return y;
}

/// V x: block-constant unit-normalized lift.
template <typename Derived>
auto lift_isometric(const BlockSizes& k, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != k.blocks())
    throw validation_error("lift_isometric: dimension mismatch");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> y(k.total());
  const auto off = k.offsets();
  for (int j = 0; j < k.blocks(); ++j)
    y.segment(off[j], k.k[j])
        .setConstant(x(j) / std::sqrt(static_cast<double>(k.k[j])));
  return y;
}

/// V^T y: block sums scaled by 1/sqrt(k_j). Left inverse of lift_isometric.
template <typename Derived>
auto compress_vector(const BlockSizes& k, const Eigen::MatrixBase<Derived>& y) {
  if (y.size() != k.total())
    throw validation_error("compress_vector: dimension mismatch");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> x(k.blocks());
  const auto off = k.offsets();
  for (int j = 0; j < k.blocks(); ++j)
    x(j) = y.segment(off[j], k.k[j]).sum() /
           std::sqrt(static_cast<double>(k.k[j]));
  return x;
}

constexpr int kDefaultModelMatrixCap = 8000;

/// Dense model matrix W = D A D^T, with W_uv = a_{block(u), block(v)}.
/// Refuses to materialize above `cap` vertices; use ModelOperator instead.
inline Eigen::MatrixXd model_matrix_dense(const Eigen::MatrixXd& a,
                                          const BlockSizes& k,
                                          int cap = kDefaultModelMatrixCap) {
  if (a.rows() != k.blocks())
    throw validation_error("model_matrix_dense: dimension mismatch");
  if (k.total() > cap)
    throw validation_error(
        "model matrix materialization refused above the size cap; "
        "use the operator form");
  const auto off = k.offsets();
  Eigen::MatrixXd w(k.total(), k.total());
  for (int i = 0; i < k.blocks(); ++i)
    for (int j = 0; j < k.blocks(); ++j)
      w.block(off[i], off[j], k.k[i], k.k[j]).setConstant(a(i, j));
  return w;
}

/// Matrix-free model matrix: y -> D A (D^T y) in O(N + n^2) per apply.
class ModelOperator {
 public:
  ModelOperator(Eigen::MatrixXd a, BlockSizes k)
      : a_(std::move(a)), k_(std::move(k)) {
    if (a_.rows() != k_.blocks())
      throw validation_error("ModelOperator: dimension mismatch");
  }

  int dim() const { return k_.total(); }
  const BlockSizes& block_sizes() const { return k_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const {
    if (y.size() != dim())
      throw validation_error("ModelOperator::apply: dimension mismatch");
    const auto off = k_.offsets();
    Eigen::VectorXd sums(k_.blocks());
    for (int j = 0; j < k_.blocks(); ++j)
      sums(j) = y.segment(off[j], k_.k[j]).sum();
    const Eigen::VectorXd mixed = a_ * sums;
    Eigen::VectorXd out(dim());
    for (int j = 0; j < k_.blocks(); ++j)
      out.segment(off[j], k_.k[j]).setConstant(mixed(j));
    return out;
  }

 private:
  Eigen::MatrixXd a_;
  BlockSizes k_;
};

/// Simple graph sampled from a block model. Adjacency is stored in CSR form;
/// rebuilding with the same seed is bit-identical regardless of evaluation
/// order, because every vertex pair has its own counter-based stream.
struct SampledGraph {
  int n_vertices = 0;
  BlockSizes k;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> row_offsets;  // size N+1
  std::vector<std::uint32_t> neighbors;    // sorted within each row
  Eigen::MatrixXd block_pair_edges;        // edge counts per block pair

  std::size_t edge_count() const { return neighbors.size() / 2; }
  int dim() const { return n_vertices; }

  int block_of(int u) const {
    const auto off = k.offsets();
    const auto it = std::upper_bound(off.begin(), off.end(), u);
    return static_cast<int>(it - off.begin()) - 1;
  }

  bool has_edge(int u, int v) const {
    const auto first = neighbors.begin() + row_offsets[u];
    const auto last = neighbors.begin() + row_offsets[u + 1];
    return std::binary_search(first, last, static_cast<std::uint32_t>(v));
  }

  /// Empirical edge density between blocks i and j (i != j) or within
  /// block i (i == j), for comparison against a_ij.
  double block_density(int i, int j) const {
    const double ki = k.k[i];
    const double kj = k.k[j];
    const double pairs = (i == j) ? ki * (ki - 1) / 2.0 : ki * kj;
    return block_pair_edges(i, j) / pairs;
  }

  /// Adjacency mat-vec.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (x.size() != n_vertices)
      throw validation_error("SampledGraph::apply: dimension mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_vertices);
    for (int u = 0; u < n_vertices; ++u) {
      double acc = 0.0;
      for (std::uint32_t t = row_offsets[u]; t < row_offsets[u + 1]; ++t)
        acc += x(neighbors[t]);
      y(u) = acc;
    }
    return y;
  }
};

/// Samples a simple graph: for each u < v an edge is present with probability
/// a_{block(u), block(v)}, drawn from the (seed, u, v) stream. No self-loops.
inline SampledGraph sample_graph(const SBMSpec& spec, std::uint64_t seed) {
  const BlockSizes k = block_sizes(spec.mu, spec.n_vertices);
  const int n_v = k.total();
  const auto off = k.offsets();
  const int nb = k.blocks();

  std::vector<int> block_of(n_v);
  for (int b = 0; b < nb; ++b)
    std::fill(block_of.begin() + off[b], block_of.begin() + off[b + 1], b);

  SampledGraph g;
  g.n_vertices = n_v;
  g.k = k;
  g.seed = seed;
  g.block_pair_edges = Eigen::MatrixXd::Zero(nb, nb);
  g.row_offsets.assign(n_v + 1, 0);

  // Two passes over the upper triangle: count degrees, then fill CSR.
  std::vector<std::uint32_t> degree(n_v, 0);
  for (int u = 0; u < n_v; ++u) {
    for (int v = u + 1; v < n_v; ++v) {
      const double p = spec.a(block_of[u], block_of[v]);
      if (pair_uniform(seed, u, v) < p) {
        ++degree[u];
        ++degree[v];
        g.block_pair_edges(block_of[u], block_of[v]) += 1.0;
        if (block_of[u] != block_of[v])
          g.block_pair_edges(block_of[v], block_of[u]) += 1.0;
      }
    }
  }
  for (int u = 0; u < n_v; ++u)
    g.row_offsets[u + 1] = g.row_offsets[u] + degree[u];
  g.neighbors.resize(g.row_offsets[n_v]);
  std::vector<std::uint32_t> cursor(g.row_offsets.begin(),
                                    g.row_offsets.end() - 1);
  for (int u = 0; u < n_v; ++u) {
    for (int v = u + 1; v < n_v; ++v) {
      const double p = spec.a(block_of[u], block_of[v]);
      if (pair_uniform(seed, u, v) < p) {
        g.neighbors[cursor[u]++] = static_cast<std::uint32_t>(v);
        g.neighbors[cursor[v]++] = static_cast<std::uint32_t>(u);
      }
    }
  }
  return g;
}

}  // namespace sbmgft
