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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sbmgft/experiments.hpp"
#include "sbmgft/perturbation.hpp"
#include "test_helpers.hpp"

using namespace sbmgft;
using Catch::Approx;

TEST_CASE("measure perturbation") {
  Eigen::VectorXd mu(2);
  mu << 0.5, 0.5;

  SECTION("zero vector is the identity perturbation") {
    const MeasurePerturbation p = perturb_measure(mu, Eigen::VectorXd::Zero(2));
    CHECK((p.mu_prime - mu).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("two equal blocks force opposite deviations") {
    Eigen::VectorXd eps(2);
    eps << 0.1, -0.1;
    CHECK_NOTHROW(perturb_measure(mu, eps));
    eps << 0.1, 0.1;
    CHECK_THROWS_AS(perturb_measure(mu, eps), validation_error);
  }
  SECTION("random draws renormalize exactly and peak at eps") {
    SplitMix64 seed_gen(41);
    Eigen::VectorXd mu5(5);
    mu5 << 0.3, 0.25, 0.2, 0.15, 0.1;
    for (int t = 0; t < 50; ++t) {
      const MeasurePerturbation p =
          perturb_measure(mu5, 0.02, seed_gen.next());
      CHECK(std::abs(p.mu_prime.sum() - 1.0) < 1e-14);
      CHECK(p.epsilon() == Approx(0.02).margin(1e-12));
      CHECK(std::abs(p.mu.dot(p.epsilons)) < 1e-14);
    }
  }
  SECTION("a single block cannot be perturbed") {
    CHECK_THROWS_AS(perturb_measure(Eigen::VectorXd::Ones(1), 0.1, 1),
                    validation_error);
  }
  SECTION("eps range validation") {
    CHECK_THROWS_AS(perturb_measure(mu, 0.0, 1), validation_error);
    CHECK_THROWS_AS(perturb_measure(mu, 1.5, 1), validation_error);
  }
}

TEST_CASE("isometry drift bound") {
  SECTION("frozen arithmetic example") {
    // sqrt(3 * 5 / (1/6)) * sqrt(0.01) = sqrt(90) / 10
    CHECK(v_distance_bound(1.0 / 6.0, 0.01, 5) ==
          Approx(0.9486832980505138).margin(1e-12));
  }
  SECTION("zero perturbation gives zero") {
    CHECK(v_distance_bound(0.2, 0.0, 5) == 0.0);
    CHECK(empirical_v_distance(BlockSizes{{3, 4}}, BlockSizes{{3, 4}}) == 0.0);
  }
  SECTION("empirical drift stays under the bound on realized perturbations") {
    const BlockSizes k{{200, 100, 100, 100, 100}};
    const double mu_min = 100.0 / 600.0;
    SplitMix64 seed_gen(42);
    for (int t = 0; t < 100; ++t) {
      const RealizedPerturbation p =
          realize_perturbation(k, 0.05, seed_gen.next());
      const double bound = v_distance_bound(mu_min, p.epsilon(), 5);
      CHECK(empirical_v_distance(p.k, p.k_prime) <= bound + 1e-12);
    }
  }
}

TEST_CASE("projection bound under additive symmetric perturbation") {
  SECTION("frozen arithmetic example") {
    Eigen::VectorXd eigs(3);
    eigs << 1.0, 0.5, -0.5;
    // d=1 at position 1, gap = 0.5, both norms 0.01
    CHECK(davis_kahan_bound(eigs, 1, 1, 0.01, 0.01) ==
          Approx(0.05656854249492381).margin(1e-12));
  }
  SECTION("unperturbed matrix gives zero") {
    Eigen::VectorXd eigs(3);
    eigs << 1.0, 0.5, -0.5;
    CHECK(davis_kahan_bound(eigs, 0, 0, 0.0, 0.0) == 0.0);
  }
  SECTION("zero gap is rejected") {
    Eigen::VectorXd eigs(3);
    eigs << 1.0, 1.0, 0.5;
    CHECK_THROWS_AS(davis_kahan_bound(eigs, 0, 0, 0.01, 0.01),
                    validation_error);
  }
  SECTION("random matrix pairs never violate the bound") {
    SplitMix64 rng(43);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
      Eigen::MatrixXd a(6, 6), h(6, 6);
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          a(i, j) = a(j, i) = rng.normal();
          h(i, j) = h(j, i) = 0.05 * rng.normal();
        }
      const Spectrum sa = symmetric_eigendecomposition(a);
      const Spectrum sb = symmetric_eigendecomposition(a + h);
      const int r = static_cast<int>(rng.uniform() * 6);
      const double delta_opr =
          symmetric_eigendecomposition(h).op_norm;
      const double delta_frob = h.norm();
      double bound;
      try {
        bound = davis_kahan_bound(sa.eigenvalues, r, r, delta_opr, delta_frob);
      } catch (const validation_error&) {
        continue;  // degenerate draw
      }
      const SubspaceDistance dist = projection_distance(
          sa.vectors.col(r), sb.vectors.col(r));
      CHECK(dist.frobenius <= bound + 1e-12);
      ++checked;
    }
    CHECK(checked > 150);
  }
}

TEST_CASE("block-size drift bound for fourier projections") {
  SECTION("zero perturbation gives a zero bound") {
    CHECK(projection_drift_bound(1, 0.5, 0.44, 5, 0.0, 0.2) == 0.0);
  }
  SECTION("frozen independently derived example") {
    // d=1, gap 0.365836, |A_mu| = 0.44, n = 5, eps = 0.01, mu_min = 0.2:
    // 2^{5/2} * 0.44 / 0.365836 * 0.05 + 2 sqrt(3) / sqrt(0.2) * sqrt(0.05)
    //   = 0.34018192... + 1.73205081... = 2.07223273...
    CHECK(projection_drift_bound(1, 0.365836, 0.44, 5, 0.01, 0.2) ==
          Approx(2.072232729219104).margin(1e-9));
  }
  SECTION("monotone increasing in eps") {
    double prev = 0.0;
    for (double eps : {0.0, 1e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.2, 1.0}) {
      const double b = projection_drift_bound(2, 0.3, 0.5, 4, eps, 0.15);
      CHECK(b >= prev);
      prev = b;
    }
  }
  SECTION("zero gap is rejected") {
    CHECK_THROWS_AS(projection_drift_bound(1, 0.0, 0.44, 5, 0.01, 0.2),
                    validation_error);
  }
}

TEST_CASE("empirical projection error") {
  const SBMSpec spec = z5_spec(600);

  SECTION("identity perturbation produces zero errors") {
    const PerturbationReport report = validate_perturbation(spec, 0.0, 5, 8);
    CHECK(report.v_dist == 0.0);
    for (const auto& row : report.rows) {
      CHECK(row.empirical_op == Approx(0.0).margin(1e-12));
      CHECK(row.empirical_signal == Approx(0.0).margin(1e-12));
      CHECK(row.bound == 0.0);
    }
  }
  SECTION("signal-route error never exceeds the operator route") {
    SplitMix64 seed_gen(44);
    for (int t = 0; t < 10; ++t) {
      const PerturbationReport report =
          validate_perturbation(spec, 0.02, seed_gen.next(), 8);
      for (const auto& row : report.rows)
        CHECK(row.empirical_signal <= row.empirical_op + 1e-10);
    }
  }
  SECTION("every empirical quantity respects its bound") {
    SplitMix64 seed_gen(45);
    for (double eps : {0.005, 0.02}) {
      for (int t = 0; t < 15; ++t) {
        const PerturbationReport report =
            validate_perturbation(spec, eps, seed_gen.next(), 8);
        CHECK(report.all_within_bounds());
      }
    }
  }
  SECTION("group correspondence failures are reported, not guessed") {
    // base has a negative eigenvalue group; the "perturbed" spectrum is
    // positive definite, so index matching must fail loudly
    Eigen::MatrixXd swap(2, 2), near_id(2, 2);
    swap << 0, 1, 1, 0;
    near_id << 1.0, 0.1, 0.1, 1.0;
    Eigen::VectorXd half(2);
    half << 0.5, 0.5;
    const SBMFourierBasis base = sbm_fourier_basis(SBMSpec(swap, half, 4));
    const SBMFourierBasis pert = sbm_fourier_basis(SBMSpec(near_id, half, 4));
    // group 1 of base is the eigenvalue -1/2
    CHECK_THROWS_AS(empirical_projection_error(base, pert, 1, 4, 7),
                    validation_error);
  }
}

TEST_CASE("weighted probability matrix drift inequality") {
  const SBMSpec spec = z5_spec(600);
  SplitMix64 seed_gen(46);
  for (int t = 0; t < 25; ++t) {
    const PerturbationReport report =
        validate_perturbation(spec, 0.03, seed_gen.next(), 4);
    CHECK(report.a_mu_delta_opr <= report.a_mu_delta_bound + 1e-12);
  }
}
