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

#include "encodebench/features.hpp"

#include <cmath>

#include "encodebench/error.hpp"

namespace encodebench {

std::vector<double> gaussian_kernel(double sigma)
{
	if (!(sigma > 0.0))
		throw ValidationError("Gaussian width must be positive");
	const int radius = static_cast<int>(std::ceil(4.0 * sigma));
	std::vector<double> taps(2 * radius + 1);
	double total = 0.0;
	for (int k = -radius; k <= radius; ++k) {
		const double w = std::exp(-0.5 * (k / sigma) * (k / sigma));
		taps[k + radius] = w;
		total += w;
	}
	for (auto& w : taps)
		w /= total;
	return taps;
}

Matrix gaussian_filter_blocks(const Matrix& m, std::span<const int> block_ids, double sigma)
{
	if (static_cast<Index>(block_ids.size()) != m.rows())
		throw ValidationError("block id count does not match matrix rows");
	const auto runs = block_runs(block_ids);
	if (sigma <= 0.0)
		return m;

	const auto taps = gaussian_kernel(sigma);
	const Index radius = static_cast<Index>(taps.size() / 2);
	Matrix out = Matrix::Zero(m.rows(), m.cols());
	for (const auto& run : runs) {
		for (Index i = run.begin; i < run.end; ++i) {
			const Index lo = std::max(run.begin, i - radius);
			const Index hi = std::min(run.end - 1, i + radius);
			for (Index j = lo; j <= hi; ++j)
				out.row(i) += taps[static_cast<std::size_t>(j - i + radius)] * m.row(j);
		}
	}
	return out;
}

FeatureSpace build_oasm(Index n_samples, std::span<const int> block_ids, double sigma)
{
	if (static_cast<Index>(block_ids.size()) != n_samples)
		throw ValidationError("OASM needs one block id per sample");
	if (!(sigma > 0.0))
		throw ValidationError("OASM width must be positive");
	const auto runs = block_runs(block_ids);
	const auto taps = gaussian_kernel(sigma);
	const Index radius = static_cast<Index>(taps.size() / 2);

	// Column j of the filtered identity is the kernel centred on j, clipped
	// to j's block.
	Matrix out = Matrix::Zero(n_samples, n_samples);
	for (const auto& run : runs) {
		for (Index j = run.begin; j < run.end; ++j) {
			const Index lo = std::max(run.begin, j - radius);
			const Index hi = std::min(run.end - 1, j + radius);
			for (Index i = lo; i <= hi; ++i)
				out(i, j) = taps[static_cast<std::size_t>(i - j + radius)];
		}
	}
	return {"OASM", std::move(out), "OASM"};
}

std::vector<double> oasm_sigma_grid()
{
	std::vector<double> grid(50);
	for (int i = 0; i < 50; ++i)
		grid[i] = (i + 1) / 10.0;
	return grid;
}

FeatureSpace build_sentence_position(std::span<const int> passage_lengths)
{
	Index n = 0;
	for (const int len : passage_lengths) {
		if (len < 1 || len > 4) {
			throw ValidationError("passages must hold 1 to 4 sentences, got " +
					std::to_string(len));
		}
		n += len;
	}
	Matrix out = Matrix::Zero(n, 4);
	Index row = 0;
	for (const int len : passage_lengths)
		for (int k = 0; k < len; ++k)
			out(row++, k) = 1.0;
	return {"SP", std::move(out), "SP+SL"};
}

FeatureSpace build_sentence_position_from_blocks(std::span<const int> block_ids)
{
	std::vector<int> lengths;
	for (const auto& run : block_runs(block_ids))
		lengths.push_back(static_cast<int>(run.size()));
	return build_sentence_position(lengths);
}

FeatureSpace build_sentence_length(std::span<const int> word_counts)
{
	Matrix out(static_cast<Index>(word_counts.size()), 1);
	for (std::size_t i = 0; i < word_counts.size(); ++i) {
		if (word_counts[i] < 1)
			throw ValidationError("sentence word counts must be >= 1");
		out(static_cast<Index>(i), 0) = word_counts[i];
	}
	return {"SL", std::move(out), "SP+SL"};
}

FeatureSpace build_word_position(Index n_sentences, int words_per_sentence)
{
	if (words_per_sentence != kWordsPerSentence)
		throw ValidationError("word position features need 8-word sentences");
	if (n_sentences < 1)
		throw ValidationError("word position features need at least one sentence");

	const int w = kWordsPerSentence;
	const auto taps = gaussian_kernel(1.0);
	const int radius = static_cast<int>(taps.size() / 2);
	Matrix block = Matrix::Zero(w, 1 + w);
	for (int p = 0; p < w; ++p) {
		block(p, 0) = static_cast<double>(p) / (w - 1);
		for (int k = std::max(0, p - radius); k <= std::min(w - 1, p + radius); ++k)
			block(p, 1 + k) = taps[static_cast<std::size_t>(k - p + radius)];
	}

	Matrix out(n_sentences * w, 1 + w);
	for (Index s = 0; s < n_sentences; ++s)
		out.middleRows(s * w, w) = block;
	return {"WP", std::move(out), "WP"};
}

Matrix sum_pool(const Matrix& tokens, std::span<const int> token_map)
{
	if (static_cast<Index>(token_map.size()) != tokens.rows())
		throw ValidationError("token map length does not match token rows");
	if (token_map.empty())
		throw ValidationError("token map is empty");
	if (token_map.front() != 0)
		throw ValidationError("token map must start at sample 0");
	for (std::size_t i = 1; i < token_map.size(); ++i) {
		const int step = token_map[i] - token_map[i - 1];
		if (step < 0)
			throw ValidationError("token map must be non-decreasing");
		if (step > 1) {
			throw ValidationError("sample " + std::to_string(token_map[i - 1] + 1) +
					" has no tokens");
		}
	}
	Matrix out = Matrix::Zero(token_map.back() + 1, tokens.cols());
	for (Index t = 0; t < tokens.rows(); ++t)
		out.row(token_map[static_cast<std::size_t>(t)]) += tokens.row(t);
	return out;
}

Matrix mean_pool_variants(std::span<const Matrix> variants)
{
	if (variants.empty())
		throw ValidationError("no variant matrices to pool");
	Matrix acc = Matrix::Zero(variants.front().rows(), variants.front().cols());
	for (const auto& v : variants) {
		if (v.rows() != acc.rows() || v.cols() != acc.cols())
			throw ValidationError("variant matrices differ in shape");
		acc += v;
	}
	return acc / static_cast<double>(variants.size());
}

Standardizer Standardizer::fit(const Matrix& train)
{
	if (train.rows() < 2)
		throw ValidationError("standardization needs at least two training rows");
	Standardizer s;
	const double n = static_cast<double>(train.rows());
	s.mean = train.colwise().mean().transpose();
	s.scale.resize(train.cols());
	for (Index c = 0; c < train.cols(); ++c) {
		const double var = (train.col(c).array() - s.mean(c)).square().sum() / n;
		double sd = std::sqrt(var);
		if (sd <= 1e-12 * std::max(1.0, std::abs(s.mean(c))))
			sd = 0.0;
		s.scale(c) = sd;
	}
	return s;
}

Matrix Standardizer::apply(const Matrix& m) const
{
	if (m.cols() != mean.size())
		throw ValidationError("column count differs from fitted statistics");
	Matrix out(m.rows(), m.cols());
	for (Index c = 0; c < m.cols(); ++c) {
		if (scale(c) == 0.0)
			out.col(c).setZero();
		else
			out.col(c) = (m.col(c).array() - mean(c)) / scale(c);
	}
	return out;
}

StandardizedSplits zscore_fit_apply(const Matrix& train, std::span<const Matrix> others)
{
	StandardizedSplits out;
	out.stats = Standardizer::fit(train);
	out.train = out.stats.apply(train);
	for (const auto& m : others)
		out.others.push_back(out.stats.apply(m));
	return out;
}

} // namespace encodebench
