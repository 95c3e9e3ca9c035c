// Copyright 2026 The Unicity Authors
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

#include "unicity/core.hpp"
#include "unicity/estimator.hpp"
#include "unicity/fit.hpp"
#include "unicity/io.hpp"
#include "unicity/match_index.hpp"
#include "unicity/reports.hpp"
#include "unicity/rng.hpp"
#include "unicity/scaling.hpp"
#include "unicity/synthgen.hpp"
#include "unicity/temporal.hpp"
#include "unicity/tensor.hpp"
#include "unicity/version.hpp"
