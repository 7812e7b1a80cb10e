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

#include "encodebench/types.hpp"

namespace encodebench {

// Sum-normalized Gaussian taps for offsets -r..r, r = ceil(4 sigma).
// Requires sigma > 0.
std::vector<double> gaussian_kernel(double sigma);

// Filters every column of `m` along the row axis, independently inside each
// block. Rows outside a block contribute zero, so no mass crosses a block
// boundary. sigma <= 0 returns `m` unchanged.
Matrix gaussian_filter_blocks(const Matrix& m, std::span<const int> block_ids, double sigma);

// Orthogonal autocorrelated sequences: the n x n identity with each column
// Gaussian-filtered inside its block. Rows from different blocks have
// disjoint support.
FeatureSpace build_oasm(Index n_samples, std::span<const int> block_ids, double sigma);

// 50 evenly spaced widths, 0.1 to 5.0 inclusive.
std::vector<double> oasm_sigma_grid();

// 4-D one-hot of each sentence's index within its passage.
FeatureSpace build_sentence_position(std::span<const int> passage_lengths);

// Same as above with passage lengths read off contiguous block runs.
FeatureSpace build_sentence_position_from_blocks(std::span<const int> block_ids);

FeatureSpace build_sentence_length(std::span<const int> word_counts);

inline constexpr int kWordsPerSentence = 8;

// Per word: a ramp over positions 0..7 scaled to [0, 1], followed by the
// 8-D position one-hot smoothed with a unit-width Gaussian.
FeatureSpace build_word_position(Index n_sentences, int words_per_sentence = kWordsPerSentence);

// Row s of the result is the sum of the token rows mapped to s. The map must
// be non-decreasing and hit every sample index from 0 to its maximum.
Matrix sum_pool(const Matrix& tokens, std::span<const int> token_map);

// Element-wise mean of equally shaped matrices.
Matrix mean_pool_variants(std::span<const Matrix> variants);

struct Standardizer {
	Vector mean;
	Vector scale; // population std; 0 marks a degenerate column

	static Standardizer fit(const Matrix& train);
	Matrix apply(const Matrix& m) const;
};

struct StandardizedSplits {
	Matrix train;
	std::vector<Matrix> others;
	Standardizer stats;
};

// Fits column statistics on `train` only and applies them everywhere.
// Degenerate (constant) columns come out as zeros.
StandardizedSplits zscore_fit_apply(const Matrix& train, std::span<const Matrix> others);

} // namespace encodebench
