/******************************************************************************
 * Copyright 2026 The encodebench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * 	http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <span>
#include <vector>

#include "encodebench/features.hpp"
#include "encodebench/ridge.hpp"
#include "encodebench/splits.hpp"

namespace encodebench {

struct SigmaSweep {
	std::vector<double> sigmas;
	std::vector<double> scores; // mean validation R2 across units and outer folds
	double best_sigma = 0.0;
};

// Fits OASM at each width and keeps the one with the highest mean inner
// validation R2. Widths are visited in ascending order; ties keep the
// smaller width.
SigmaSweep sweep_oasm_sigma(const Matrix& responses, std::span<const int> block_ids,
		const SplitPlan& plan, const RidgeConfig& ridge = {},
		const BandedSearchConfig& search = {}, std::vector<double> sigmas = oasm_sigma_grid());

} // namespace encodebench
