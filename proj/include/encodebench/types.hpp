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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace encodebench {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// A named samples x dims design matrix. Spaces that share a band_group are
// concatenated and receive one scaling factor in banded ridge.
struct FeatureSpace {
	std::string name;
	Matrix data;
	std::string band_group;
};

// samples x units responses, with the sample and unit labels that the
// splitting and aggregation steps need.
struct NeuralRecording {
	Matrix responses;
	std::vector<int> unit_participants;
	std::vector<int> sample_blocks;
	std::vector<int> sample_categories; // empty when the dataset has none

	Index n_samples() const { return responses.rows(); }
	Index n_units() const { return responses.cols(); }
};

// Half-open sample range [begin, end) carrying one block id.
struct BlockRun {
	int id;
	Index begin;
	Index end;

	Index size() const { return end - begin; }
};

// Collapses per-sample block ids into runs. Throws ValidationError when an
// id reappears after a different id has started (non-contiguous block).
std::vector<BlockRun> block_runs(std::span<const int> block_ids);

} // namespace encodebench
