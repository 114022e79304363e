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
#include <limits>
#include <numbers>
#include <vector>

#include "sbmgft/errors.hpp"
#include "sbmgft/fourier.hpp"
#include "sbmgft/rng.hpp"
#include "sbmgft/sbm.hpp"
#include "sbmgft/spectral.hpp"

namespace sbmgft {

/// Relative block-measure perturbation: mu'_i = mu_i (1 + eps_i) with
/// sum_i mu_i eps_i = 0, so mu' is again a probability measure.
struct MeasurePerturbation {
  Eigen::VectorXd mu;
  Eigen::VectorXd epsilons;
  Eigen::VectorXd mu_prime;

  double epsilon() const { return epsilons.cwiseAbs().maxCoeff(); }
};

/// Validates an explicit perturbation vector.
inline MeasurePerturbation perturb_measure(const Eigen::VectorXd& mu,
                                           const Eigen::VectorXd& eps_vec) {
  validate_block_measure(mu);
  if (eps_vec.size() != mu.size())
    throw validation_error("perturb_measure: epsilon vector size mismatch");
  if (std::abs(mu.dot(eps_vec)) > 1e-12)
    throw validation_error(
        "perturb_measure: weighted epsilon sum must vanish (measure must "
        "stay normalized)");
  if (eps_vec.cwiseAbs().maxCoeff() > 1.0)
    throw validation_error("perturb_measure: |eps_i| must not exceed 1");
  MeasurePerturbation out;
  out.mu = mu;
  out.epsilons = eps_vec;
  out.mu_prime = mu.cwiseProduct(Eigen::VectorXd::Ones(mu.size()) + eps_vec);
  if (eps_vec.cwiseAbs().maxCoeff() > 0.0) validate_block_measure(out.mu_prime);
  return out;
}

/// Draws a random perturbation: uniform raw deviations, re-centered so the
/// weighted sum vanishes, then rescaled to hit max |eps_i| = eps exactly
/// (sweeps stay comparable across trials).
inline MeasurePerturbation perturb_measure(const Eigen::VectorXd& mu,
                                           double eps, std::uint64_t seed) {
  validate_block_measure(mu);
  if (!(eps > 0.0 && eps <= 1.0))
    throw validation_error("perturb_measure: eps must lie in (0, 1]");
  if (mu.size() < 2)
    throw validation_error(
        "perturb_measure: no nonzero zero-weighted-sum perturbation exists "
        "for a single block");
  SplitMix64 rng(seed);
  Eigen::VectorXd raw(mu.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      raw(i) = rng.uniform(-1.0, 1.0);
    raw.array() -= mu.dot(raw);  // weighted mean; sum(mu) == 1
    const double peak = raw.cwiseAbs().maxCoeff();
    if (peak < 1e-12) continue;  // degenerate draw, retry
    return perturb_measure(mu, Eigen::VectorXd(raw * (eps / peak)));
  }
  throw validation_error("perturb_measure: could not draw a usable direction");
}

/// Lemma-style bound on the isometry drift: sqrt(3 n / mu_min) * sqrt(eps).
inline double v_distance_bound(double mu_min, double eps, int n_blocks) {
  if (!(mu_min > 0.0)) throw validation_error("v_distance_bound: mu_min <= 0");
  if (eps < 0.0) throw validation_error("v_distance_bound: eps < 0");
  return std::sqrt(3.0 * n_blocks / mu_min) * std::sqrt(eps);
}

/// Operator norm of V - V' for two block partitions of the same graph size.
inline double empirical_v_distance(const BlockSizes& k, const BlockSizes& kp) {
  if (k.total() != kp.total() || k.blocks() != kp.blocks())
    throw validation_error("empirical_v_distance: partitions not comparable");
  const Eigen::MatrixXd diff = isometry(k) - isometry(kp);
  // Largest singular value via the small Gram matrix.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff.transpose() *
                                                        diff);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

/// Projection-distance bound for the eigenspace at descending positions
/// [r, s] of a symmetric matrix under an additive perturbation:
/// 2^{3/2} min(sqrt(d) |dA|_opr, |dA|_F) / min(lambda_{r-1} - lambda,
/// lambda - lambda_{s+1}), with dummy sentinels beyond the spectrum edges.
inline double davis_kahan_bound(const Eigen::VectorXd& descending_eigenvalues,
                                int r, int s, double delta_opr,
                                double delta_frob) {
  const int m = static_cast<int>(descending_eigenvalues.size());
  if (r < 0 || s < r || s >= m)
    throw validation_error("davis_kahan_bound: invalid position range");
  for (int i = 1; i < m; ++i)
    if (descending_eigenvalues(i - 1) < descending_eigenvalues(i))
      throw validation_error("davis_kahan_bound: eigenvalues not descending");
  const double lambda = descending_eigenvalues.segment(r, s - r + 1).mean();
  const double upper = (r == 0) ? std::numeric_limits<double>::infinity()
                                : descending_eigenvalues(r - 1) - lambda;
  const double lower = (s == m - 1)
                           ? std::numeric_limits<double>::infinity()
                           : lambda - descending_eigenvalues(s + 1);
  const double gap = std::min(upper, lower);
  if (!(gap > 0.0))
    throw validation_error("davis_kahan_bound: spectral gap is not positive");
  const int d = s - r + 1;
  const double numerator =
      std::min(std::sqrt(static_cast<double>(d)) * delta_opr, delta_frob);
  return 2.0 * std::numbers::sqrt2 * numerator / gap;
}

/// Right-hand side of the block-size robustness bound (per unit signal norm):
/// 2^{5/2} sqrt(d) |A_mu|_opr / gamma * n eps + 2 sqrt(3) / sqrt(mu_min)
/// * sqrt(n eps).
inline double projection_drift_bound(int d, double gamma, double norm_a_mu,
                            int n_blocks, double eps, double mu_min) {
  if (!(gamma > 0.0))
    throw validation_error("projection_drift_bound: spectral gap must be positive");
  if (!(mu_min > 0.0)) throw validation_error("projection_drift_bound: mu_min <= 0");
  if (eps < 0.0 || eps > 1.0)
    throw validation_error("projection_drift_bound: eps must lie in [0, 1]");
  const double first = std::pow(2.0, 2.5) * std::sqrt(double(d)) * norm_a_mu /
                       gamma * n_blocks * eps;
  const double second =
      2.0 * std::sqrt(3.0) / std::sqrt(mu_min) * std::sqrt(n_blocks * eps);
  return first + second;
}

/// A measure perturbation realized at integral block sizes: k' is the
/// largest-remainder rounding of mu' N, and the effective deviations are the
/// exact ratios k'_i / k_i - 1. The weighted sum of the effective deviations
/// vanishes exactly ((sum k' - sum k)/N = 0), so the realized pair
/// (mu, mu'') satisfies the perturbation model verbatim.
struct RealizedPerturbation {
  BlockSizes k, k_prime;
  Eigen::VectorXd mu, mu_prime;  // exact integer ratios k/N, k'/N
  Eigen::VectorXd epsilons;      // k'_i / k_i - 1
  double nominal_epsilon = 0.0;
  double epsilon() const {
    return epsilons.size() ? epsilons.cwiseAbs().maxCoeff() : 0.0;
  }
};

inline RealizedPerturbation realize_perturbation(const BlockSizes& k,
                                                 double eps,
                                                 std::uint64_t seed) {
  RealizedPerturbation out;
  out.k = k;
  out.nominal_epsilon = eps;
  out.mu = k.measure();
  if (eps == 0.0) {
    out.k_prime = k;
  } else {
    const MeasurePerturbation raw = perturb_measure(out.mu, eps, seed);
    out.k_prime = block_sizes(raw.mu_prime, k.total());
  }
  out.mu_prime = out.k_prime.measure();
  out.epsilons.resize(k.blocks());
  for (int i = 0; i < k.blocks(); ++i)
    out.epsilons(i) =
        (static_cast<double>(out.k_prime.k[i]) - k.k[i]) / k.k[i];
  return out;
}

/// Empirical vs. theoretical drift of one eigenvalue group under a
/// block-size perturbation.
struct GroupPerturbationRow {
  double lambda = 0.0;  // weighted-matrix scale
  int multiplicity = 1;
  double gamma = 0.0;
  double bound = 0.0;            // theorem_bound at the effective epsilon
  double empirical_op = 0.0;     // ||P_E - P_E'||_opr (authoritative)
  double empirical_signal = 0.0; // max over random unit signals
};

struct PerturbationReport {
  RealizedPerturbation perturbation;
  double norm_a_mu = 0.0;
  double a_mu_delta_opr = 0.0;    // ||A_mu' - A_mu||_opr
  double a_mu_delta_bound = 0.0;  // 2 eps n ||A_mu||_opr
  double v_dist = 0.0;
  double v_bound = 0.0;
  std::vector<GroupPerturbationRow> rows;

  bool all_within_bounds() const {
    if (v_dist > v_bound || a_mu_delta_opr > a_mu_delta_bound) return false;
    for (const auto& row : rows)
      if (row.empirical_op > row.bound || row.empirical_signal > row.bound)
        return false;
    return true;
  }
};

namespace detail {

/// Operator norm and Frobenius norm of P_A - P_B for two orthonormal column
/// families in the same ambient space, computed inside span(A) + span(B).
inline SubspaceDistance projection_difference_norms(const Eigen::MatrixXd& a,
                                                    const Eigen::MatrixXd& b) {
  Eigen::MatrixXd joint(a.rows(), a.cols() + b.cols());
  joint << a, b;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(joint);
  const int rank = static_cast<int>(std::min<Eigen::Index>(
      joint.cols(), joint.rows()));
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(joint.rows(), rank);
  const Eigen::MatrixXd qa = q.transpose() * a;  // coordinates of A columns
  const Eigen::MatrixXd qb = q.transpose() * b;
  const Eigen::MatrixXd diff = qa * qa.transpose() - qb * qb.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff);
  SubspaceDistance out;
  out.operator_norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  out.frobenius = diff.norm();
  return out;
}

}  // namespace detail

/// Matches a baseline eigenvalue group to the perturbed basis by signed
/// spectral positions (the positions r..s the group occupies among the
/// nonzero eigenvalues, counted from the appropriate end of the spectrum),
/// and measures the projection drift two ways: the exact operator norm of
/// P_E - P_E' and the worst error over random unit signals.
///
/// Throws if the perturbed spectrum cannot host the same signed positions
/// (correspondence failure is reported, never guessed).
inline GroupPerturbationRow empirical_projection_error(
    const SBMFourierBasis& base, const SBMFourierBasis& perturbed,
    std::size_t group_index, int signal_trials, std::uint64_t seed) {
  if (group_index >= base.groups.size())
    throw validation_error("empirical_projection_error: no such group");
  const EigenGroup& group = base.groups[group_index];

  // Signed positions: positives are counted from the top of the descending
  // order, negatives from the bottom.
  int n_plus_base = 0;
  for (int c = 0; c < base.rank(); ++c)
    if (base.eigenvalues(c) > 0) ++n_plus_base;
  int n_plus_pert = 0;
  for (int c = 0; c < perturbed.rank(); ++c)
    if (perturbed.eigenvalues(c) > 0) ++n_plus_pert;

  Eigen::MatrixXd pert_basis(perturbed.dim(), group.multiplicity());
  for (int c = 0; c < group.multiplicity(); ++c) {
    const int pos = group.positions[c];
    const bool positive = base.eigenvalues(pos) > 0;
    int pert_pos;
    if (positive) {
      if (pos >= n_plus_pert)
        throw validation_error(
            "empirical_projection_error: perturbed spectrum has too few "
            "positive eigenvalues to match the group by index");
      pert_pos = pos;
    } else {
      const int from_bottom = base.rank() - 1 - pos;
      pert_pos = perturbed.rank() - 1 - from_bottom;
      if (pert_pos < n_plus_pert)
        throw validation_error(
            "empirical_projection_error: perturbed spectrum has too few "
            "negative eigenvalues to match the group by index");
    }
    pert_basis.col(c) = perturbed.lifted.col(pert_pos);
  }

  GroupPerturbationRow row;
  row.lambda = group.eigenvalue;
  row.multiplicity = group.multiplicity();
  row.gamma = group.gap;
  const SubspaceDistance dist =
      detail::projection_difference_norms(group.basis, pert_basis);
  row.empirical_op = dist.operator_norm;

  SplitMix64 rng(seed);
  for (int t = 0; t < signal_trials; ++t) {
    Eigen::VectorXd x(base.dim());
    for (int i = 0; i < base.dim(); ++i) x(i) = rng.normal();
    x.normalize();
    const Eigen::VectorXd base_proj = group.basis * (group.basis.transpose() * x);
    const Eigen::VectorXd pert_proj = pert_basis * (pert_basis.transpose() * x);
    row.empirical_signal =
        std::max(row.empirical_signal, (base_proj - pert_proj).norm());
  }
  return row;
}

/// Runs one full perturbation trial against a spec: draws a realized
/// perturbation, checks the isometry drift and the weighted-matrix drift,
/// and measures the projection error of every nonzero eigenvalue group
/// against its theorem bound (evaluated at the effective epsilon).
inline PerturbationReport validate_perturbation(const SBMSpec& spec,
                                                double eps, std::uint64_t seed,
                                                int signal_trials = 16) {
  PerturbationReport report;
  const BlockSizes k = block_sizes(spec.mu, spec.n_vertices);
  report.perturbation = realize_perturbation(k, eps, seed);
  const double eps_eff = report.perturbation.epsilon();
  const int n = spec.blocks();

  const SBMSpec base_spec(spec.a, report.perturbation.mu, spec.n_vertices);
  const SBMSpec pert_spec(spec.a, report.perturbation.mu_prime,
                          spec.n_vertices);
  const SBMFourierBasis base = sbm_fourier_basis(base_spec);
  const SBMFourierBasis perturbed = sbm_fourier_basis(pert_spec);

  report.norm_a_mu = base.eigenvalues.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd a_mu =
      weighted_probability_matrix(base_spec.a, base_spec.mu);
  const Eigen::MatrixXd a_mu_pert =
      weighted_probability_matrix(pert_spec.a, pert_spec.mu);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_mu_pert - a_mu);
    report.a_mu_delta_opr = solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  report.a_mu_delta_bound = 2.0 * eps_eff * n * report.norm_a_mu;

  const double mu_min = report.perturbation.mu.minCoeff();
  report.v_dist =
      empirical_v_distance(report.perturbation.k, report.perturbation.k_prime);
  report.v_bound = v_distance_bound(mu_min, eps_eff, n);

  for (std::size_t g = 0; g < base.groups.size(); ++g) {
    GroupPerturbationRow row = empirical_projection_error(
        base, perturbed, g, signal_trials, mix64(seed ^ (0xabcd + g)));
    row.bound = projection_drift_bound(row.multiplicity, row.gamma, report.norm_a_mu, n,
                              eps_eff, mu_min);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace sbmgft
