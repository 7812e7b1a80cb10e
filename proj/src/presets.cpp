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

#include "encodebench/presets.hpp"

#include <random>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"

namespace encodebench {

std::vector<int> even_participants(Index n_units, int n_participants)
{
	if (n_participants < 1 || n_units < n_participants)
		throw ValidationError("need at least one unit per participant");
	std::vector<int> out;
	for (int p = 0; p < n_participants; ++p) {
		const Index lo = n_units * p / n_participants;
		const Index hi = n_units * (p + 1) / n_participants;
		for (Index u = lo; u < hi; ++u)
			out.push_back(p);
	}
	return out;
}

std::vector<std::string> preset_names()
{
	return {"shuffle-demo", "pereira-exp1", "pereira-exp2", "fedorenko", "blank"};
}

namespace {

// Passages grouped by category: category c owns passages c*per_cat ..
// (c+1)*per_cat - 1, laid out category-major.
void passage_layout(SynthSpec& spec, const std::vector<int>& passage_lengths, int per_cat)
{
	spec.block_ids.clear();
	spec.sample_categories.clear();
	for (std::size_t p = 0; p < passage_lengths.size(); ++p) {
		for (int s = 0; s < passage_lengths[p]; ++s) {
			spec.block_ids.push_back(static_cast<int>(p));
			spec.sample_categories.push_back(static_cast<int>(p) / per_cat);
		}
	}
	spec.n_samples = static_cast<Index>(spec.block_ids.size());
}

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng)
{
	std::normal_distribution<double> draw(0.0, 1.0);
	Matrix m(rows, cols);
	for (Index c = 0; c < cols; ++c)
		for (Index r = 0; r < rows; ++r)
			m(r, c) = draw(rng);
	return m;
}

// A wide space that is a random linear image of `sources` plus a little
// isotropic noise, standing in for language-model embeddings that contain
// the simple features.
FeatureSpace projection_space(const std::vector<FeatureSpace>& sources, Index dims,
		double noise, std::mt19937_64& rng, const std::string& name)
{
	Index cols = 0;
	for (const auto& s : sources)
		cols += s.data.cols();
	Matrix z(sources.front().data.rows(), cols);
	Index at = 0;
	for (const auto& s : sources) {
		z.middleCols(at, s.data.cols()) = Standardizer::fit(s.data).apply(s.data);
		at += s.data.cols();
	}
	const Matrix proj = gaussian_matrix(cols, dims, rng) / std::sqrt(static_cast<double>(cols));
	return {name, z * proj + noise * gaussian_matrix(z.rows(), dims, rng), name};
}

nlohmann::json base_config(const std::string& scheme, std::vector<std::string> modes)
{
	return {{"manifest", "manifest.json"}, {"seed", 0},
			{"split", {{"scheme", scheme}, {"modes", modes}}}};
}

} // namespace

Preset make_preset(const std::string& name, std::uint64_t seed, Index n_units)
{
	Preset p;
	p.name = name;
	auto& spec = p.spec;
	spec.seed = seed;
	// Separate stream for preset structure so the generator's own draws stay
	// a pure function of the spec.
	std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

	if (name == "shuffle-demo") {
		passage_layout(spec, std::vector<int>(96, 4), 4);
		spec.n_units = n_units > 0 ? n_units : 200;
		spec.participants = even_participants(spec.n_units, 5);
		spec.signal_scale = 0.0;
		spec.noise_scale = 1.0;
		spec.autocorr_sigma = 2.0;
		p.compare_config = base_config("pereira", {"contiguous", "shuffled"});
		p.compare_config["derived_spaces"] = {{{"name", "OASM"}, {"kind", "oasm"}, {"sigma", 2.0}}};
		p.compare_config["spaces"] = {"OASM"};
		p.compare_config["oasm"] = "OASM";
	} else if (name == "pereira-exp1" || name == "pereira-exp2") {
		const bool exp1 = name == "pereira-exp1";
		std::vector<int> lengths;
		if (exp1) {
			lengths.assign(96, 4);
		} else {
			// 72 passages, 27 of them with 4 sentences: 243 rows.
			for (int i = 0; i < 72; ++i)
				lengths.push_back(i % 8 < 3 ? 4 : 3);
		}
		passage_layout(spec, lengths, exp1 ? 4 : 3);
		spec.n_units = n_units > 0 ? n_units : 100;
		spec.participants = even_participants(spec.n_units, 5);

		FeatureSpace sp = build_sentence_position(lengths);
		std::uniform_int_distribution<int> words(5, 20);
		std::vector<int> counts(static_cast<std::size_t>(spec.n_samples));
		for (auto& c : counts)
			c = words(rng);
		FeatureSpace sl = build_sentence_length(counts);
		FeatureSpace llm = projection_space({sp, sl}, 512, 0.1, rng, "LLM");

		spec.signal_features = {{sp, 1.0}, {sl, 1.0}};
		spec.signal_scale = 0.6;
		spec.noise_scale = 1.0;
		spec.autocorr_sigma = 2.0;
		p.manifest_features = {sp, sl, llm};
		p.compare_config = base_config("pereira", {"contiguous"});
		p.compare_config["spaces"] = {"SP+SL", "LLM"};
		p.compare_config["llm"] = "LLM";
	} else if (name == "fedorenko") {
		std::vector<int> lengths(52, kWordsPerSentence);
		passage_layout(spec, lengths, 1);
		spec.sample_categories.clear();
		spec.n_units = 97;
		if (n_units > 0 && n_units != 97)
			spec.n_units = n_units;
		if (spec.n_units == 97) {
			for (const auto& [pid, count] : std::vector<std::pair<int, int>>{
						 {0, 47}, {1, 8}, {2, 9}, {3, 15}, {4, 18}})
				spec.participants.insert(spec.participants.end(), count, pid);
		} else {
			spec.participants = even_participants(spec.n_units, 5);
		}
		FeatureSpace wp = build_word_position(52);
		FeatureSpace llm = projection_space({wp}, 128, 0.3, rng, "LLM");
		spec.signal_features = {{wp, 1.0}};
		spec.signal_scale = 0.7;
		spec.noise_scale = 1.0;
		spec.autocorr_sigma = 1.8;
		p.manifest_features = {llm};
		p.compare_config = base_config("fedorenko", {"contiguous"});
		p.compare_config["derived_spaces"] = {
				{{"name", "OASM"}, {"kind", "oasm"}, {"sigma", 1.8}},
				{{"name", "WP"}, {"kind", "word_position"}}};
		p.compare_config["spaces"] = {"OASM", "WP", "LLM"};
		p.compare_config["llm"] = "LLM";
		p.compare_config["oasm"] = "OASM";
	} else if (name == "blank") {
		std::uniform_int_distribution<int> len(36, 50);
		std::vector<int> lengths(8);
		for (auto& l : lengths)
			l = len(rng);
		passage_layout(spec, lengths, 1);
		spec.sample_categories.clear();
		spec.n_units = n_units > 0 ? n_units : 60;
		spec.participants = even_participants(spec.n_units, 5);
		spec.signal_scale = 0.0;
		spec.noise_scale = 1.0;
		spec.autocorr_sigma = 1.5;
		p.manifest_features = {FeatureSpace{"LLM", gaussian_matrix(spec.n_samples, 64, rng), "LLM"}};
		p.compare_config = base_config("blank", {"contiguous", "shuffled"});
		p.compare_config["derived_spaces"] = {{{"name", "OASM"}, {"kind", "oasm"}, {"sigma", 1.5}}};
		p.compare_config["spaces"] = {"OASM", "LLM"};
		p.compare_config["llm"] = "LLM";
		p.compare_config["oasm"] = "OASM";
	} else {
		throw ValidationError("unknown preset '" + name + "'");
	}
	p.compare_config["seed"] = seed;
	return p;
}

} // namespace encodebench
