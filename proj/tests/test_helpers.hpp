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

#include <algorithm>
#include <vector>

#include "sbmgft/group.hpp"
#include "sbmgft/rng.hpp"
#include "sbmgft/sbm.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Random symmetric probability matrix with entries in [0, 1].
inline Eigen::MatrixXd random_probability_matrix(int n, sbmgft::SplitMix64& rng) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform();
  return a;
}

/// Random block sizes: n positive integers summing to n_total.
inline sbmgft::BlockSizes random_block_sizes(int n, int n_total,
                                             sbmgft::SplitMix64& rng) {
  std::vector<int> k(n, 1);
  for (int extra = 0; extra < n_total - n; ++extra)
    ++k[static_cast<int>(rng.uniform() * n) % n];
  return sbmgft::BlockSizes{std::move(k)};
}

/// Random spec whose measure is exactly k/N, so all lift identities are
/// exact up to floating point.
inline sbmgft::SBMSpec random_spec(int n, int n_total, sbmgft::SplitMix64& rng) {
  return sbmgft::SBMSpec::from_block_sizes(random_probability_matrix(n, rng),
                                           random_block_sizes(n, n_total, rng));
}

/// Random inverse-invariant connection function: one value per orbit
/// {x, x^-1}.
inline sbmgft::ConnectionFunction random_connection(
    const sbmgft::AbelianGroup& group, sbmgft::SplitMix64& rng) {
  std::vector<double> values(group.order(), -1.0);
  for (int i = 0; i < group.order(); ++i) {
    if (values[i] >= 0.0) continue;
    const int inv = group.index_of(group.inverse(group.element(i)));
    const double v = rng.uniform();
    values[i] = v;
    values[inv] = v;
  }
  return sbmgft::ConnectionFunction(group, std::move(values));
}

/// All Abelian groups (as non-decreasing factor lists) of order in
/// [2, max_order].
inline std::vector<std::vector<int>> abelian_groups_up_to(int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  auto recurse = [&](auto&& self, int product, int min_factor) -> void {
    if (product > 1) out.push_back(current);
    for (int f = min_factor; product * f <= max_order; ++f) {
      current.push_back(f);
      self(self, product * f, f);
      current.pop_back();
    }
  };
  recurse(recurse, 1, 2);
  return out;
}

inline Eigen::VectorXd random_unit_vector(int n, sbmgft::SplitMix64& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.normal();
  x.normalize();
  return x;
}

inline Eigen::VectorXcd random_complex_vector(int n, sbmgft::SplitMix64& rng) {
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i)
    x(i) = std::complex<double>(rng.normal(), rng.normal());
  return x;
}

}  // namespace testutil
