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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "encodebench/matrixio.hpp"
#include "encodebench/types.hpp"

namespace encodebench {

struct SignalSpace {
	FeatureSpace space;
	double weight_scale = 1.0;
};

struct SynthSpec {
	Index n_samples = 0;
	Index n_units = 0;
	std::vector<int> block_ids;
	std::vector<int> sample_categories; // optional, copied into the recording
	std::vector<SignalSpace> signal_features;
	double autocorr_sigma = 0.0; // 0 means white noise
	double noise_scale = 1.0;
	double signal_scale = 1.0;
	std::vector<int> participants; // one per unit
	std::uint64_t seed = 0;

	void validate() const;
};

struct SynthDataset {
	NeuralRecording recording;
	// Per signal space, dims x units, acting on the column-standardized
	// features so that signal = sum_f standardize(X_f) * W_f exactly.
	std::vector<Matrix> true_weights;
	Matrix signal; // signal_scale times the sum above
	Matrix noise;  // noise_scale times the filtered noise
};

/**
 * responses = signal_scale * S + noise_scale * E.
 *
 * S is sum_f weight_scale_f * Z_f * W_f with Z_f the column-standardized
 * features and W_f standard normal, then each unit rescaled to unit variance
 * (the rescaling is folded into the returned weights). E is white Gaussian
 * noise filtered inside blocks with the OASM kernel, then rescaled to unit
 * variance per unit. Both are skipped when their scale is zero. The same
 * seed reproduces the dataset bit for bit.
 */
SynthDataset generate(const SynthSpec& spec);

// Writes every feature space and the responses as matrix files plus a
// manifest.json into `dir`, which must exist. Returns the manifest path.
std::filesystem::path write_dataset(const std::filesystem::path& dir,
		const std::string& dataset_name, const std::vector<FeatureSpace>& features,
		const NeuralRecording& recording);

} // namespace encodebench
