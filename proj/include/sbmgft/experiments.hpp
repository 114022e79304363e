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

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "sbmgft/errors.hpp"
#include "sbmgft/fourier.hpp"
#include "sbmgft/group.hpp"
#include "sbmgft/perturbation.hpp"
#include "sbmgft/sbm.hpp"
#include "sbmgft/spectral.hpp"

namespace sbmgft {

// ---------------------------------------------------------------------------
// The cyclic-group reference model used throughout the experiment suite:
// Z_5 with connection 0.8 on the generators +-1 and 0.2 elsewhere.
// ---------------------------------------------------------------------------

inline AbelianGroup z5_group() { return AbelianGroup({5}); }

inline ConnectionFunction z5_connection(const AbelianGroup& group) {
  return ConnectionFunction(group, {0.2, 0.8, 0.2, 0.2, 0.8});
}

/// Measure (1/3, 1/6, 1/6, 1/6, 1/6): one block twice the size of the rest.
inline Eigen::VectorXd z5_measure() {
  Eigen::VectorXd mu(5);
  mu << 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0;
  return mu;
}

inline SBMSpec z5_spec(int n_vertices) {
  const AbelianGroup group = z5_group();
  return SBMSpec(cayley_matrix(group, z5_connection(group)), z5_measure(),
                 n_vertices);
}

inline constexpr std::array<std::uint64_t, 3> kDefaultSampleSeeds = {1, 2, 3};

// ---------------------------------------------------------------------------
// Shared machinery.
// ---------------------------------------------------------------------------

/// Partial spectrum of a sampled graph: the p largest-magnitude adjacency
/// eigenpairs. The first `required_converged` pairs must meet the residual
/// tolerance or a convergence_error is thrown; trailing pairs (bulk-edge
/// eigenvalues, reported only as magnitudes) may carry larger residuals.
inline PartialEigenResult graph_extreme_pairs(const SampledGraph& graph, int p,
                                              int required_converged,
                                              double tol_abs,
                                              long max_matvecs = 10000) {
  PartialEigenOptions options;
  options.max_matvecs = max_matvecs;
  const PartialEigenResult result =
      top_bottom_eigenpairs(LinearOperator::from(graph), p, tol_abs, options);
  for (int i = 0; i < required_converged && i < p; ++i) {
    if (static_cast<std::size_t>(i) >= result.pairs.size() ||
        !result.pairs[i].converged)
      throw convergence_error(
          "adjacency eigensolver did not converge for extreme pair " +
              std::to_string(i + 1),
          result.worst_residual(), result.matvecs);
  }
  return result;
}

/// Agreement of a transferred character basis against the model basis,
/// resolved per eigen-slot cluster: the basis columns are ranked by
/// |eigenvalue| and grouped into the slot clusters induced by the character
/// pairing of the reference; the agreement of reference column i is the norm
/// of its projection onto the span of the cluster holding slot i. For
/// clusters of size one this is the plain absolute inner product.
inline Eigen::VectorXd transferred_agreement(const TransferredBasis& reference,
                                             const SBMFourierBasis& basis) {
  const int n = static_cast<int>(reference.vectors.cols());
  if (basis.rank() < n)
    throw validation_error(
        "transferred_agreement: model basis has fewer vectors than the "
        "reference (kernel collision)");
  if (basis.dim() != reference.vectors.rows())
    throw validation_error("transferred_agreement: dimension mismatch");

  const std::vector<int> order = basis.magnitude_order();
  Eigen::VectorXd agreement(n);
  for (const auto& cluster : reference.source.group_columns) {
    Eigen::MatrixXd span(basis.dim(), cluster.size());
    for (std::size_t c = 0; c < cluster.size(); ++c)
      span.col(c) = basis.lifted.col(order[cluster[c]]);
    for (int i : cluster) {
      const double value = (span.transpose() * reference.vectors.col(i)).norm();
      agreement(i) = std::min(value, 1.0);
    }
  }
  return agreement;
}

// ---------------------------------------------------------------------------
// Eigenvalue table: model row vs. sampled-adjacency rows.
// ---------------------------------------------------------------------------

struct Table1Result {
  std::array<double, 6> model;  // by descending magnitude; 6th entry is 0
  std::vector<std::uint64_t> seeds;
  std::vector<std::array<double, 6>> samples;      // per seed
  std::vector<double> bulk_residuals;              // residual of the 6th pair
};

inline Table1Result run_z5_table1(
    int n_vertices,
    const std::vector<std::uint64_t>& seeds = {kDefaultSampleSeeds.begin(),
                                               kDefaultSampleSeeds.end()}) {
  if (seeds.empty())
    throw validation_error("run_z5_table1: seed list must not be empty");
  const SBMSpec spec = z5_spec(n_vertices);
  const SBMFourierBasis basis = sbm_fourier_basis(spec);

  Table1Result out;
  out.model.fill(0.0);
  const auto order = basis.magnitude_order();
  for (std::size_t i = 0; i < order.size() && i < 5; ++i)
    out.model[i] = basis.eigenvalues(order[i]) * n_vertices;
  out.seeds = seeds;

  const double tol = 1e-6 * n_vertices;
  for (std::uint64_t seed : seeds) {
    const SampledGraph graph = sample_graph(spec, seed);
    const PartialEigenResult pairs = graph_extreme_pairs(graph, 6, 5, tol);
    std::array<double, 6> row{};
    for (std::size_t i = 0; i < pairs.pairs.size() && i < 6; ++i)
      row[i] = pairs.pairs[i].value;
    out.samples.push_back(row);
    out.bulk_residuals.push_back(
        pairs.pairs.size() >= 6 ? pairs.pairs[5].residual : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigenvector alignment table: |<phi_i^graph, phi_i^model>| per seed.
// ---------------------------------------------------------------------------

struct Table2Result {
  std::vector<std::uint64_t> seeds;
  std::vector<std::array<double, 5>> per_seed;
};

inline Table2Result run_z5_table2(
    int n_vertices,
    const std::vector<std::uint64_t>& seeds = {kDefaultSampleSeeds.begin(),
                                               kDefaultSampleSeeds.end()}) {
  if (seeds.empty())
    throw validation_error("run_z5_table2: seed list must not be empty");
  const SBMSpec spec = z5_spec(n_vertices);
  const SBMFourierBasis basis = sbm_fourier_basis(spec);
  const auto order = basis.magnitude_order();
  const auto clusters = basis.magnitude_slot_clusters();

  Table2Result out;
  out.seeds = seeds;
  const double tol = 1e-6 * n_vertices;
  for (std::uint64_t seed : seeds) {
    const SampledGraph graph = sample_graph(spec, seed);
    const PartialEigenResult pairs = graph_extreme_pairs(graph, 5, 5, tol);
    std::array<double, 5> row{};
    // Absolute inner products for simple eigenvalues; degenerate groups fall
    // back to the projection of the graph vector onto the model cluster span.
    for (const auto& cluster : clusters) {
      Eigen::MatrixXd span(basis.dim(), cluster.size());
      for (std::size_t c = 0; c < cluster.size(); ++c)
        span.col(c) = basis.lifted.col(order[cluster[c]]);
      for (int slot : cluster) {
        if (slot >= 5) continue;
        const double v =
            (span.transpose() * pairs.pairs[slot].vector).norm();
        row[slot] = std::min(v, 1.0);
      }
    }
    out.per_seed.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transferred-basis sweeps over one-parameter measure families.
// ---------------------------------------------------------------------------

struct AgreementRow {
  int parameter = 0;  // family parameter k (0 = uniform)
  std::array<double, 5> agreement{};
};

namespace detail {

inline AgreementRow agreement_for_blocks(const AbelianGroup& group,
                                         const ConnectionFunction& f,
                                         const BlockSizes& blocks,
                                         int parameter) {
  const SBMSpec spec = SBMSpec::from_block_sizes(cayley_matrix(group, f), blocks);
  const SBMFourierBasis basis = sbm_fourier_basis(spec);
  const TransferredBasis reference =
      transferred_character_basis(group, f, spec.mu, spec.n_vertices);
  const Eigen::VectorXd agreement = transferred_agreement(reference, basis);
  AgreementRow row;
  row.parameter = parameter;
  for (int i = 0; i < 5; ++i) row.agreement[i] = agreement(i);
  return row;
}

}  // namespace detail

/// One-large-block family at N = 3000: block sizes
/// (600 + 40k, 600 - 10k, ..., 600 - 10k), k = 0..20.
inline std::vector<AgreementRow> run_z5_fig4(int k_max = 20) {
  const AbelianGroup group = z5_group();
  const ConnectionFunction f = z5_connection(group);
  std::vector<AgreementRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    const BlockSizes blocks{
        {600 + 40 * k, 600 - 10 * k, 600 - 10 * k, 600 - 10 * k, 600 - 10 * k}};
    rows.push_back(detail::agreement_for_blocks(group, f, blocks, k));
  }
  return rows;
}

/// Three-distinct-block-size family at N = 150: block sizes
/// (30 + 2k, 30 + k, 30 - k, 30 - k, 30 - k), k = 0..20.
inline std::vector<AgreementRow> run_z5_fig5a(int k_max = 20) {
  const AbelianGroup group = z5_group();
  const ConnectionFunction f = z5_connection(group);
  std::vector<AgreementRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    const BlockSizes blocks{
        {30 + 2 * k, 30 + k, 30 - k, 30 - k, 30 - k}};
    rows.push_back(detail::agreement_for_blocks(group, f, blocks, k));
  }
  return rows;
}

/// Two fixed models compared: model 1 with one dominant block
/// (2000, 250, 250, 250, 250) and model 2 with mild size spread
/// (1350, 1344, 1102, 1102, 1102).
inline std::vector<AgreementRow> run_z5_fig5b() {
  const AbelianGroup group = z5_group();
  const ConnectionFunction f = z5_connection(group);
  std::vector<AgreementRow> rows;
  rows.push_back(detail::agreement_for_blocks(
      group, f, BlockSizes{{2000, 250, 250, 250, 250}}, 1));
  rows.push_back(detail::agreement_for_blocks(
      group, f, BlockSizes{{1350, 1344, 1102, 1102, 1102}}, 2));
  return rows;
}

// ---------------------------------------------------------------------------
// Perturbation sweep.
// ---------------------------------------------------------------------------

struct PerturbSweepRow {
  int trial = 0;
  double epsilon = 0.0;  // effective (realized) epsilon
  double lambda = 0.0;
  int multiplicity = 1;
  double gamma = 0.0;
  double bound = 0.0;
  double empirical_op = 0.0;
  double empirical_signal = 0.0;
  double v_dist = 0.0;
  double v_bound = 0.0;
};

struct PerturbSweepConfig {
  std::vector<double> epsilons = {0.001, 0.005, 0.01};
  int trials = 100;
  std::uint64_t seed = 2026;
  int signal_trials = 16;
};

inline std::vector<PerturbSweepRow> run_perturb_sweep(
    const SBMSpec& spec, const PerturbSweepConfig& config = {}) {
  std::vector<PerturbSweepRow> rows;
  for (double eps : config.epsilons) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed =
          mix64(config.seed ^ (static_cast<std::uint64_t>(trial) << 20) ^
                std::bit_cast<std::uint64_t>(eps));
      const PerturbationReport report =
          validate_perturbation(spec, eps, seed, config.signal_trials);
      for (const auto& group_row : report.rows) {
        PerturbSweepRow row;
        row.trial = trial;
        row.epsilon = report.perturbation.epsilon();
        row.lambda = group_row.lambda;
        row.multiplicity = group_row.multiplicity;
        row.gamma = group_row.gamma;
        row.bound = group_row.bound;
        row.empirical_op = group_row.empirical_op;
        row.empirical_signal = group_row.empirical_signal;
        row.v_dist = report.v_dist;
        row.v_bound = report.v_bound;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Convergence of sampled-graph eigenspaces to the model eigenspaces.
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  int n_vertices = 0;
  double lambda = 0.0;  // weighted-matrix scale (N-independent label)
  double mean_distance = 0.0;
};

inline std::vector<ConvergenceRow> run_convergence_check(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& mu,
    const std::vector<int>& n_list, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty())
    throw validation_error("run_convergence_check: seed list must not be empty");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw validation_error("run_convergence_check: N list must increase");

  std::vector<ConvergenceRow> rows;
  for (int n_vertices : n_list) {
    const SBMSpec spec(a, mu, n_vertices);
    const SBMFourierBasis basis = sbm_fourier_basis(spec);
    const auto order = basis.magnitude_order();
    const auto clusters = basis.magnitude_slot_clusters();
    const int p = basis.rank();
    const double tol = 1e-6 * n_vertices;

    std::vector<double> sums(clusters.size(), 0.0);
    for (std::uint64_t seed : seeds) {
      const SampledGraph graph = sample_graph(spec, seed);
      const PartialEigenResult pairs = graph_extreme_pairs(graph, p, p, tol);
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        Eigen::MatrixXd model_span(basis.dim(), clusters[c].size());
        Eigen::MatrixXd graph_span(basis.dim(), clusters[c].size());
        for (std::size_t t = 0; t < clusters[c].size(); ++t) {
          model_span.col(t) = basis.lifted.col(order[clusters[c][t]]);
          graph_span.col(t) = pairs.pairs[clusters[c][t]].vector;
        }
        sums[c] += projection_distance(model_span, graph_span).frobenius;
      }
    }
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      ConvergenceRow row;
      row.n_vertices = n_vertices;
      row.lambda = basis.eigenvalues(order[clusters[c].front()]);
      row.mean_distance = sums[c] / seeds.size();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace sbmgft
