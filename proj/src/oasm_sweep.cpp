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

#include "encodebench/oasm_sweep.hpp"

#include <algorithm>
#include <limits>

#include "encodebench/error.hpp"

namespace encodebench {

SigmaSweep sweep_oasm_sigma(const Matrix& responses, std::span<const int> block_ids,
		const SplitPlan& plan, const RidgeConfig& ridge, const BandedSearchConfig& search,
		std::vector<double> sigmas)
{
	if (sigmas.empty())
		throw ValidationError("no widths to sweep");
	std::sort(sigmas.begin(), sigmas.end());

	SigmaSweep out;
	out.sigmas = sigmas;
	double best = -std::numeric_limits<double>::infinity();
	for (const double sigma : sigmas) {
		const FeatureSpace oasm = build_oasm(responses.rows(), block_ids, sigma);
		const auto fit = banded_search(std::span(&oasm, 1), responses, plan, ridge, search);
		double score = 0.0;
		for (const auto& f : fit.folds)
			score += f.validation_r2.mean();
		score /= static_cast<double>(fit.folds.size());
		out.scores.push_back(score);
		if (score > best) {
			best = score;
			out.best_sigma = sigma;
		}
	}
	return out;
}

} // namespace encodebench
