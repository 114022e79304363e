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

#include <stdexcept>
#include <string>

namespace sbmgft {

/// Raised when an input violates a documented precondition or invariant
/// (bad measure, asymmetric matrix, mismatched dimensions, ...).
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Raised when an iterative solver hits its iteration cap before reaching
/// the requested residual. Carries the best residual achieved.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double achieved_residual,
                    long iterations)
      : std::runtime_error(what),
        achieved_residual_(achieved_residual),
        iterations_(iterations) {}

  double achieved_residual() const { return achieved_residual_; }
  long iterations() const { return iterations_; }

 private:
  double achieved_residual_;
  long iterations_;
};

}  // namespace sbmgft
