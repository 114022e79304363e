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

#include "sbmgft/errors.hpp"
#include "sbmgft/experiments.hpp"
#include "sbmgft/fourier.hpp"
#include "sbmgft/group.hpp"
#include "sbmgft/io.hpp"
#include "sbmgft/perturbation.hpp"
#include "sbmgft/rng.hpp"
#include "sbmgft/sbm.hpp"
#include "sbmgft/spectral.hpp"
