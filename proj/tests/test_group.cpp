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
#include <complex>

#include "sbmgft/group.hpp"
#include "sbmgft/spectral.hpp"
#include "test_helpers.hpp"

using namespace sbmgft;
using Catch::Approx;

TEST_CASE("element enumeration is lexicographic with the identity first") {
  SECTION("Z2") {
    AbelianGroup g({2});
    const auto els = g.elements();
    REQUIRE(els.size() == 2);
    CHECK(els[0].coords == std::vector<int>{0});
    CHECK(els[1].coords == std::vector<int>{1});
  }
  SECTION("Z2 x Z2") {
    AbelianGroup g({2, 2});
    const auto els = g.elements();
    REQUIRE(els.size() == 4);
    CHECK(els[0].coords == std::vector<int>{0, 0});
    CHECK(els[1].coords == std::vector<int>{0, 1});
    CHECK(els[2].coords == std::vector<int>{1, 0});
    CHECK(els[3].coords == std::vector<int>{1, 1});
  }
  SECTION("Z5 matches the relabeling g_i = i - 1") {
    AbelianGroup g({5});
    for (int i = 0; i < 5; ++i) CHECK(g.element(i).coords == std::vector<int>{i});
    CHECK(g.identity() == g.element(0));
  }
}

TEST_CASE("element arithmetic") {
  AbelianGroup g({3, 4});
  const GroupElement a{{2, 3}};
  const GroupElement b{{2, 2}};
  CHECK(g.multiply(a, b).coords == std::vector<int>{1, 1});
  CHECK(g.multiply(a, g.inverse(a)) == g.identity());
  CHECK_THROWS_AS(g.multiply(a, GroupElement{{1}}), validation_error);
}

TEST_CASE("character values") {
  SECTION("Z5 generator character at g = 1") {
    AbelianGroup g({5});
    const std::complex<double> v =
        g.character_value(g.character(1), g.element(1));
    const std::complex<double> expected = std::polar(1.0, 2.0 * testutil::kPi / 5.0);
    CHECK(std::abs(v - expected) < 1e-14);
  }
  SECTION("trivial character is 1 everywhere") {
    for (const auto& factors : testutil::abelian_groups_up_to(12)) {
      AbelianGroup g(factors);
      for (int i = 0; i < g.order(); ++i)
        CHECK(std::abs(g.character_value(g.character(0), g.element(i)) - 1.0) <
              1e-14);
    }
  }
  SECTION("Z2 x Z2 at chi=(1,1), g=(1,1)") {
    AbelianGroup g({2, 2});
    const std::complex<double> v =
        g.character_value(Character{{1, 1}}, GroupElement{{1, 1}});
    CHECK(v.real() == Approx(1.0).margin(1e-14));
    CHECK(v.imag() == Approx(0.0).margin(1e-14));
  }
  SECTION("multiplicative in the group argument") {
    SplitMix64 rng(7);
    AbelianGroup g({4, 3});
    for (int trial = 0; trial < 50; ++trial) {
      const int ci = static_cast<int>(rng.uniform() * g.order());
      const int ai = static_cast<int>(rng.uniform() * g.order());
      const int bi = static_cast<int>(rng.uniform() * g.order());
      const Character chi = g.character(ci);
      const GroupElement a = g.element(ai), b = g.element(bi);
      const auto lhs = g.character_value(chi, g.multiply(a, b));
      const auto rhs = g.character_value(chi, a) * g.character_value(chi, b);
      CHECK(std::abs(lhs - rhs) < 1e-13);
    }
  }
  SECTION("shape mismatch is rejected") {
    AbelianGroup g({5});
    CHECK_THROWS_AS(g.character_value(Character{{1, 0}}, g.element(0)),
                    validation_error);
  }
}

TEST_CASE("character matrix is unitary with unimodular entries") {
  SECTION("Z2 is the order-2 transform") {
    const Eigen::MatrixXcd u = character_matrix(AbelianGroup({2}));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(u(0, 0) - s) < 1e-14);
    CHECK(std::abs(u(1, 0) - s) < 1e-14);
    CHECK(std::abs(u(0, 1) - s) < 1e-14);
    CHECK(std::abs(u(1, 1) + s) < 1e-14);
  }
  for (const auto& factors : testutil::abelian_groups_up_to(16)) {
    AbelianGroup g(factors);
    const Eigen::MatrixXcd u = character_matrix(g);
    const int n = g.order();
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    const double expected = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(u(i, j)) == Approx(expected).margin(1e-13));
  }
}

TEST_CASE("character orthogonality") {
  for (const auto& factors : testutil::abelian_groups_up_to(16)) {
    AbelianGroup g(factors);
    const int n = g.order();
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const Eigen::VectorXcd a = character_vector(g, g.character(k));
        const Eigen::VectorXcd b = character_vector(g, g.character(l));
        const std::complex<double> ip = b.dot(a);  // sum a conj(b)
        const double expected = (k == l) ? n : 0.0;
        CHECK(std::abs(ip - expected) < 1e-12 * n);
      }
  }
}

TEST_CASE("cayley matrices") {
  SECTION("Z5 reference connection gives the expected circulant") {
    AbelianGroup g({5});
    const ConnectionFunction f(g, {0.2, 0.8, 0.2, 0.2, 0.8});
    const Eigen::MatrixXd a = cayley_matrix(g, f);
    Eigen::VectorXd first(5);
    first << 0.2, 0.8, 0.2, 0.2, 0.8;
    CHECK((a.row(0).transpose() - first).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(a(i, j) == a((i + 1) % 5, (j + 1) % 5));
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("constant connection gives the all-p matrix") {
    AbelianGroup g({2, 3});
    const ConnectionFunction f(g, std::vector<double>(6, 0.3));
    const Eigen::MatrixXd a = cayley_matrix(g, f);
    CHECK((a.array() - 0.3).abs().maxCoeff() == 0.0);
  }
  SECTION("Z2 swap matrix") {
    AbelianGroup g({2});
    const Eigen::MatrixXd a = cayley_matrix(g, ConnectionFunction(g, {0.0, 1.0}));
    CHECK(a(0, 0) == 0.0);
    CHECK(a(0, 1) == 1.0);
    CHECK(a(1, 0) == 1.0);
    CHECK(a(1, 1) == 0.0);
  }
  SECTION("non-inverse-invariant functions are rejected") {
    AbelianGroup g({5});
    CHECK_THROWS_AS(ConnectionFunction(g, {0.2, 0.8, 0.2, 0.2, 0.7}),
                    validation_error);
    CHECK_THROWS_AS(ConnectionFunction(g, {0.2, 1.5, 0.2, 0.2, 1.5}),
                    validation_error);
  }
}

TEST_CASE("cayley eigenvalues") {
  AbelianGroup g({5});
  const ConnectionFunction f(g, {0.2, 0.8, 0.2, 0.2, 0.8});

  SECTION("reference values in character order") {
    const Eigen::VectorXd lams = cayley_eigenvalues(g, f);
    const double plus = 1.2 * std::cos(2.0 * testutil::kPi / 5.0);   // 0.370820...
    const double minus = 1.2 * std::cos(4.0 * testutil::kPi / 5.0);  // -0.970820...
    CHECK(lams(0) == Approx(2.2).margin(1e-12));
    CHECK(lams(1) == Approx(plus).margin(1e-12));
    CHECK(lams(2) == Approx(minus).margin(1e-12));
    CHECK(lams(3) == Approx(minus).margin(1e-12));
    CHECK(lams(4) == Approx(plus).margin(1e-12));
  }
  SECTION("cross-check against a dense eigensolver") {
    Eigen::VectorXd lams = cayley_eigenvalues(g, f);
    std::sort(lams.data(), lams.data() + lams.size(), std::greater<>());
    const Spectrum dense = symmetric_eigendecomposition(cayley_matrix(g, f));
    CHECK((lams - dense.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("constant connection keeps only the trivial character") {
    AbelianGroup h({3, 2});
    const ConnectionFunction c(h, std::vector<double>(6, 0.4));
    const Eigen::VectorXd lams = cayley_eigenvalues(h, c);
    CHECK(lams(0) == Approx(6 * 0.4).margin(1e-12));
    for (int j = 1; j < 6; ++j) CHECK(std::abs(lams(j)) < 1e-12);
  }
  SECTION("Z2 swap") {
    AbelianGroup h({2});
    const Eigen::VectorXd lams =
        cayley_eigenvalues(h, ConnectionFunction(h, {0.0, 1.0}));
    CHECK(lams(0) == Approx(1.0).margin(1e-14));
    CHECK(lams(1) == Approx(-1.0).margin(1e-14));
  }
  SECTION("conjugate characters share their eigenvalue") {
    SplitMix64 rng(11);
    for (const auto& factors : testutil::abelian_groups_up_to(16)) {
      AbelianGroup h(factors);
      const ConnectionFunction c = testutil::random_connection(h, rng);
      const Eigen::VectorXd lams = cayley_eigenvalues(h, c);
      for (int j = 0; j < h.order(); ++j)
        CHECK(lams(j) == Approx(lams(h.conjugate_index(j))).margin(1e-12));
    }
  }
}

TEST_CASE("characters diagonalize every cayley matrix") {
  SplitMix64 rng(2024);
  for (const auto& factors : testutil::abelian_groups_up_to(16)) {
    AbelianGroup g(factors);
    const ConnectionFunction f = testutil::random_connection(g, rng);
    const Eigen::MatrixXd a = cayley_matrix(g, f);
    const Eigen::MatrixXcd u = character_matrix(g);
    const Eigen::MatrixXcd d = u.adjoint() * a * u;
    const Eigen::VectorXd lams = cayley_eigenvalues(g, f);
    for (int i = 0; i < g.order(); ++i)
      for (int j = 0; j < g.order(); ++j) {
        if (i == j)
          CHECK(std::abs(d(i, j) - lams(i)) < 1e-10);
        else
          CHECK(std::abs(d(i, j)) < 1e-10);
      }
  }
}

TEST_CASE("real eigenpair basis") {
  AbelianGroup g({5});
  const ConnectionFunction f(g, {0.2, 0.8, 0.2, 0.2, 0.8});
  const RealCharacterBasis basis = real_eigenpair_basis(g, f);
  const Eigen::MatrixXd a = cayley_matrix(g, f);

  SECTION("orthonormal real eigenvectors") {
    CHECK((basis.vectors.transpose() * basis.vectors -
           Eigen::MatrixXd::Identity(5, 5))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (int c = 0; c < 5; ++c) {
      const Eigen::VectorXd v = basis.vectors.col(c);
      CHECK((a * v - basis.eigenvalues(c) * v).norm() < 1e-10);
    }
  }
  SECTION("groups ordered by descending magnitude, pairs split Re/Im") {
    REQUIRE(basis.group_columns.size() == 3);
    CHECK(basis.group_columns[0] == std::vector<int>{0});
    CHECK(basis.group_columns[1] == std::vector<int>{1, 2});
    CHECK(basis.group_columns[2] == std::vector<int>{3, 4});
    CHECK(basis.eigenvalues(0) == Approx(2.2));
    CHECK(basis.eigenvalues(1) == Approx(1.2 * std::cos(4 * testutil::kPi / 5)));
    CHECK(basis.eigenvalues(3) == Approx(1.2 * std::cos(2 * testutil::kPi / 5)));
  }
  SECTION("matches the expected normalized character combinations") {
    // phi_2 ~ (chi_3 + chi_4)/sqrt(10), phi_3 ~ (chi_4 - chi_3)/(i sqrt(10)),
    // phi_4 ~ (chi_2 + chi_5)/sqrt(10), phi_5 ~ (chi_2 - chi_5)/(i sqrt(10)),
    // each up to sign.
    const Eigen::VectorXcd chi2 = character_vector(g, g.character(1));
    const Eigen::VectorXcd chi3 = character_vector(g, g.character(2));
    const double s10 = std::sqrt(10.0);
    const Eigen::VectorXd phi2 = ((chi3 + chi3.conjugate()) / s10).real();
    const Eigen::VectorXd phi3 =
        ((chi3.conjugate() - chi3) / std::complex<double>(0, 1) / s10).real();
    const Eigen::VectorXd phi4 = ((chi2 + chi2.conjugate()) / s10).real();
    const Eigen::VectorXd phi5 =
        ((chi2 - chi2.conjugate()) / std::complex<double>(0, 1) / s10).real();
    CHECK(std::abs(basis.vectors.col(1).dot(phi2)) == Approx(1.0).margin(1e-12));
    CHECK(std::abs(basis.vectors.col(2).dot(phi3)) == Approx(1.0).margin(1e-12));
    CHECK(std::abs(basis.vectors.col(3).dot(phi4)) == Approx(1.0).margin(1e-12));
    CHECK(std::abs(basis.vectors.col(4).dot(phi5)) == Approx(1.0).margin(1e-12));
  }
  SECTION("trivial character becomes the constant vector") {
    CHECK((basis.vectors.col(0).array() - 1.0 / std::sqrt(5.0)).abs().maxCoeff() <
          1e-14);
  }
  SECTION("self-conjugate characters stay real and untouched") {
    AbelianGroup h({2});
    const RealCharacterBasis b =
        real_eigenpair_basis(h, ConnectionFunction(h, {0.0, 1.0}));
    CHECK(b.vectors.cwiseAbs().maxCoeff() == Approx(1.0 / std::sqrt(2.0)));
    CHECK(b.column_characters[0][0] == b.column_characters[0][1]);
  }
  SECTION("random groups: always an orthonormal eigenbasis") {
    SplitMix64 rng(5);
    for (const auto& factors : testutil::abelian_groups_up_to(12)) {
      AbelianGroup h(factors);
      const ConnectionFunction c = testutil::random_connection(h, rng);
      const RealCharacterBasis b = real_eigenpair_basis(h, c);
      const int n = h.order();
      CHECK((b.vectors.transpose() * b.vectors - Eigen::MatrixXd::Identity(n, n))
                .cwiseAbs()
                .maxCoeff() < 1e-11);
      const Eigen::MatrixXd am = cayley_matrix(h, c);
      for (int col = 0; col < n; ++col)
        CHECK((am * b.vectors.col(col) - b.eigenvalues(col) * b.vectors.col(col))
                  .norm() < 1e-10);
    }
  }
}

TEST_CASE("index identifier and character arithmetic") {
  AbelianGroup g({5});
  SECTION("trivial character has index 0") {
    CHECK(g.index_of(g.character(0)) == 0);
    CHECK(g.self_conjugate(g.character(0)));
  }
  SECTION("inverse-product arithmetic on Z5") {
    // chi_2^{-1} chi_3 in 1-based labels: exponents 1 and 2, difference 1.
    const Character prod = g.character_product(
        g.character_inverse(g.character(1)), g.character(2));
    CHECK(g.index_of(prod) == 1);
  }
  SECTION("chi^{-1} chi is trivial") {
    for (int k = 0; k < 5; ++k) {
      const Character prod =
          g.character_product(g.character_inverse(g.character(k)),
                              g.character(k));
      CHECK(g.index_of(prod) == 0);
    }
  }
  SECTION("self-conjugacy is structural") {
    AbelianGroup h({4});
    CHECK(h.self_conjugate(h.character(0)));
    CHECK(h.self_conjugate(h.character(2)));
    CHECK(!h.self_conjugate(h.character(1)));
    CHECK(!h.self_conjugate(h.character(3)));
  }
}
