// Copyright 2026 The Crossing Scenarios Authors
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

#include "crossing/constraints.hpp"
#include "crossing/enumeration.hpp"
#include "crossing/scoring.hpp"

// Counting kernels. The serial kernel is the reference the others are tested
// against; all three produce identical tallies.
namespace crossing::kernels {

Tally tally_serial(const ScoreModel& model, const CompiledConstraint& filter, bool with_histograms);

/// OpenMP over contiguous chunks of the linear index range; per-thread
/// tallies merged at the end.
Tally tally_parallel(const ScoreModel& model, const CompiledConstraint& filter, bool with_histograms);

/// Convolution of per-feature score distributions. Constrained histograms
/// use prefix/suffix products; an AtLeastOne clause is handled by
/// inclusion-exclusion: count(C and any atom) = count(C) - count(C and no atom).
Tally tally_convolution(const ScoreModel& model, const ProductForm& form, bool with_histograms);

}  // namespace crossing::kernels
