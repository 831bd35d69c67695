/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Umbrella header.

#pragma once

#include "stmask/distance.hpp"
#include "stmask/dpc.hpp"
#include "stmask/error.hpp"
#include "stmask/io.hpp"
#include "stmask/masking.hpp"
#include "stmask/parallel.hpp"
#include "stmask/relevance.hpp"
#include "stmask/rng.hpp"
#include "stmask/synthetic.hpp"
#include "stmask/temporal_density.hpp"
#include "stmask/tensor.hpp"
