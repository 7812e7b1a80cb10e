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

#include "encodebench/synthgen.hpp"

#include <cmath>
#include <random>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"

namespace encodebench {

void SynthSpec::validate() const
{
	if (n_samples < 2 || n_units < 1)
		throw ValidationError("synthetic data needs >= 2 samples and >= 1 unit");
	if (static_cast<Index>(block_ids.size()) != n_samples)
		throw ValidationError("one block id per sample required");
	if (!sample_categories.empty() && static_cast<Index>(sample_categories.size()) != n_samples)
		throw ValidationError("one category per sample required");
	if (static_cast<Index>(participants.size()) != n_units)
		throw ValidationError("one participant per unit required");
	if (noise_scale < 0.0 || signal_scale < 0.0 || autocorr_sigma < 0.0)
		throw ValidationError("synthetic scales must be non-negative");
	for (const auto& s : signal_features) {
		if (s.space.data.rows() != n_samples)
			throw ValidationError("signal space '" + s.space.name + "' has the wrong row count");
		if (s.weight_scale < 0.0)
			throw ValidationError("weight scales must be non-negative");
	}
	block_runs(block_ids);
}

namespace {

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& rng)
{
	std::normal_distribution<double> draw(0.0, 1.0);
	Matrix m(rows, cols);
	for (Index c = 0; c < cols; ++c)
		for (Index r = 0; r < rows; ++r)
			m(r, c) = draw(rng);
	return m;
}

// Divides each column by its population standard deviation (zero columns
// are left alone) and returns the divisors.
Vector unit_variance_columns(Matrix& m)
{
	Vector sd(m.cols());
	for (Index c = 0; c < m.cols(); ++c) {
		const double mu = m.col(c).mean();
		sd(c) = std::sqrt((m.col(c).array() - mu).square().mean());
		if (sd(c) > 0.0)
			m.col(c) /= sd(c);
		else
			sd(c) = 1.0;
	}
	return sd;
}

} // namespace

SynthDataset generate(const SynthSpec& spec)
{
	spec.validate();
	std::mt19937_64 rng(spec.seed);

	SynthDataset out;
	out.signal = Matrix::Zero(spec.n_samples, spec.n_units);
	std::vector<Matrix> standardized;
	for (const auto& s : spec.signal_features) {
		const Standardizer st = Standardizer::fit(s.space.data);
		standardized.push_back(st.apply(s.space.data));
		Matrix w = s.weight_scale * standard_normal(s.space.data.cols(), spec.n_units, rng);
		out.signal += standardized.back() * w;
		out.true_weights.push_back(std::move(w));
	}
	Matrix noise = standard_normal(spec.n_samples, spec.n_units, rng);

	if (!spec.signal_features.empty()) {
		const Vector sd = unit_variance_columns(out.signal);
		for (auto& w : out.true_weights)
			w = w * sd.cwiseInverse().asDiagonal();
	}
	out.signal *= spec.signal_scale;
	for (auto& w : out.true_weights)
		w *= spec.signal_scale;

	if (spec.autocorr_sigma > 0.0) {
		noise = gaussian_filter_blocks(noise, spec.block_ids, spec.autocorr_sigma);
		unit_variance_columns(noise);
	}
	out.noise = spec.noise_scale * noise;

	out.recording.responses = out.signal + out.noise;
	out.recording.sample_blocks = spec.block_ids;
	out.recording.sample_categories = spec.sample_categories;
	out.recording.unit_participants = spec.participants;
	return out;
}

std::filesystem::path write_dataset(const std::filesystem::path& dir,
		const std::string& dataset_name, const std::vector<FeatureSpace>& features,
		const NeuralRecording& recording)
{
	validate_dataset(features, recording);
	Manifest m;
	m.dataset_name = dataset_name;
	for (const auto& fs : features) {
		const std::string file = fs.name + ".bbsm";
		save_matrix(dir / file, fs.data);
		m.feature_spaces.push_back({fs.name, file, fs.band_group});
	}
	save_matrix(dir / "responses.bbsm", recording.responses);
	m.responses_path = "responses.bbsm";
	m.sample_blocks = recording.sample_blocks;
	if (!recording.sample_categories.empty())
		m.sample_categories = recording.sample_categories;
	m.unit_participants = recording.unit_participants;
	const auto path = dir / "manifest.json";
	write_manifest(path, m);
	return path;
}

} // namespace encodebench
