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

#include "encodebench/splits.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "encodebench/error.hpp"

namespace encodebench {

std::string to_string(SplitMode mode)
{
	return mode == SplitMode::contiguous ? "contiguous" : "shuffled";
}

std::string to_string(SplitScheme scheme)
{
	switch (scheme) {
	case SplitScheme::pereira: return "pereira";
	case SplitScheme::fedorenko: return "fedorenko";
	case SplitScheme::blank: return "blank";
	case SplitScheme::generic_grouped: return "generic-grouped";
	}
	return "generic-grouped";
}

SplitMode parse_split_mode(const std::string& s)
{
	if (s == "contiguous")
		return SplitMode::contiguous;
	if (s == "shuffled")
		return SplitMode::shuffled;
	throw ValidationError("unknown split mode '" + s + "'");
}

SplitScheme parse_split_scheme(const std::string& s)
{
	if (s == "pereira")
		return SplitScheme::pereira;
	if (s == "fedorenko")
		return SplitScheme::fedorenko;
	if (s == "blank")
		return SplitScheme::blank;
	if (s == "generic-grouped")
		return SplitScheme::generic_grouped;
	throw ValidationError("unknown split scheme '" + s + "'");
}

namespace {

IndexList samples_of(const std::vector<BlockRun>& runs, const std::vector<std::size_t>& which)
{
	IndexList out;
	for (const auto b : which)
		for (Index i = runs[b].begin; i < runs[b].end; ++i)
			out.push_back(i);
	std::sort(out.begin(), out.end());
	return out;
}

IndexList sorted_union(const IndexList& a, const IndexList& b)
{
	IndexList out;
	std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
	return out;
}

} // namespace

SplitPlan plan_from_groups(const std::vector<IndexList>& groups, Index n_samples,
		SplitScheme scheme)
{
	if (groups.size() < 2)
		throw ValidationError("nested cross-validation needs at least two groups");
	std::vector<IndexList> sorted = groups;
	for (auto& g : sorted)
		std::sort(g.begin(), g.end());

	SplitPlan plan;
	plan.scheme = scheme;
	plan.mode = SplitMode::contiguous;
	plan.n_samples = n_samples;
	for (std::size_t t = 0; t < sorted.size(); ++t) {
		OuterFold fold;
		fold.test = sorted[t];
		for (std::size_t g = 0; g < sorted.size(); ++g)
			if (g != t)
				fold.train = sorted_union(fold.train, sorted[g]);
		for (std::size_t v = 0; v < sorted.size(); ++v) {
			if (v == t)
				continue;
			InnerFold inner;
			inner.validation = sorted[v];
			for (std::size_t g = 0; g < sorted.size(); ++g)
				if (g != t && g != v)
					inner.train = sorted_union(inner.train, sorted[g]);
			fold.inner.push_back(std::move(inner));
		}
		plan.outer.push_back(std::move(fold));
	}
	return plan;
}

SplitPlan plan_pereira(std::span<const int> passage_cats, int passages_per_category,
		std::span<const int> block_ids, std::optional<std::uint64_t> seed)
{
	const auto runs = block_runs(block_ids);
	if (passage_cats.size() != runs.size()) {
		throw ValidationError("expected one category per passage (" +
				std::to_string(runs.size()) + "), got " +
				std::to_string(passage_cats.size()));
	}
	if (passages_per_category < 2)
		throw ValidationError("need at least two passages per category");

	std::map<int, std::vector<std::size_t>> by_cat;
	for (std::size_t p = 0; p < passage_cats.size(); ++p)
		by_cat[passage_cats[p]].push_back(p);
	std::vector<std::vector<std::size_t>> cats;
	for (auto& [id, passages] : by_cat) {
		if (static_cast<int>(passages.size()) != passages_per_category) {
			throw ValidationError("category " + std::to_string(id) + " has " +
					std::to_string(passages.size()) + " passages, expected " +
					std::to_string(passages_per_category));
		}
		cats.push_back(passages);
	}

	if (seed) {
		std::mt19937_64 rng(*seed);
		for (auto& c : cats)
			std::shuffle(c.begin(), c.end(), rng);
		std::shuffle(cats.begin(), cats.end(), rng);
	}

	const std::size_t first_half = (cats.size() + 1) / 2;
	std::vector<IndexList> groups;
	for (int round = 0; round < passages_per_category; ++round) {
		for (int half = 0; half < 2; ++half) {
			const std::size_t lo = half == 0 ? 0 : first_half;
			const std::size_t hi = half == 0 ? first_half : cats.size();
			if (lo == hi)
				continue;
			std::vector<std::size_t> passages;
			for (std::size_t c = lo; c < hi; ++c)
				passages.push_back(cats[c][static_cast<std::size_t>(round)]);
			groups.push_back(samples_of(runs, passages));
		}
	}
	return plan_from_groups(groups, static_cast<Index>(block_ids.size()), SplitScheme::pereira);
}

SplitPlan plan_fedorenko(std::span<const int> sentence_blocks)
{
	const auto runs = block_runs(sentence_blocks);
	if (runs.size() < 8)
		throw ValidationError("fedorenko scheme needs at least 8 sentences");
	std::vector<IndexList> groups;
	for (std::size_t s = 0; s < runs.size(); s += 4) {
		std::vector<std::size_t> which;
		for (std::size_t k = s; k < std::min(runs.size(), s + 4); ++k)
			which.push_back(k);
		groups.push_back(samples_of(runs, which));
	}
	return plan_from_groups(groups, static_cast<Index>(sentence_blocks.size()),
			SplitScheme::fedorenko);
}

SplitPlan plan_blank(std::span<const int> story_ids)
{
	const auto runs = block_runs(story_ids);
	if (runs.size() < 3)
		throw ValidationError("blank scheme needs at least 3 stories");
	std::vector<IndexList> groups;
	for (std::size_t s = 0; s < runs.size(); ++s)
		groups.push_back(samples_of(runs, {s}));
	return plan_from_groups(groups, static_cast<Index>(story_ids.size()), SplitScheme::blank);
}

SplitPlan plan_grouped(std::span<const int> block_ids, int n_folds)
{
	const auto runs = block_runs(block_ids);
	if (n_folds < 3)
		throw ValidationError("grouped scheme needs at least 3 folds (two leave an empty inner training set)");
	if (runs.size() < static_cast<std::size_t>(n_folds))
		throw ValidationError("fewer blocks than folds");
	std::vector<IndexList> groups;
	const std::size_t n_blocks = runs.size();
	for (int g = 0; g < n_folds; ++g) {
		const std::size_t lo = n_blocks * g / n_folds;
		const std::size_t hi = n_blocks * (g + 1) / n_folds;
		std::vector<std::size_t> which(hi - lo);
		std::iota(which.begin(), which.end(), lo);
		groups.push_back(samples_of(runs, which));
	}
	return plan_from_groups(groups, static_cast<Index>(block_ids.size()),
			SplitScheme::generic_grouped);
}

SplitPlan shuffle_plan(const SplitPlan& plan, std::uint64_t seed)
{
	std::vector<Index> perm(static_cast<std::size_t>(plan.n_samples));
	std::iota(perm.begin(), perm.end(), Index{0});
	std::mt19937_64 rng(seed);
	std::shuffle(perm.begin(), perm.end(), rng);

	auto remap = [&](const IndexList& in) {
		IndexList out;
		out.reserve(in.size());
		for (const auto i : in)
			out.push_back(perm[static_cast<std::size_t>(i)]);
		std::sort(out.begin(), out.end());
		return out;
	};

	SplitPlan out = plan;
	out.mode = SplitMode::shuffled;
	for (auto& fold : out.outer) {
		fold.test = remap(fold.test);
		fold.train = remap(fold.train);
		for (auto& inner : fold.inner) {
			inner.train = remap(inner.train);
			inner.validation = remap(inner.validation);
		}
	}
	return out;
}

namespace {

void require_disjoint(const IndexList& a, const IndexList& b, const std::string& what)
{
	IndexList both;
	std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
	if (!both.empty())
		throw ValidationError(what + " share sample " + std::to_string(both.front()));
}

void require_block_disjoint(const IndexList& a, const IndexList& b,
		std::span<const int> blocks, const std::string& what)
{
	std::set<int> ba;
	for (const auto i : a)
		ba.insert(blocks[static_cast<std::size_t>(i)]);
	for (const auto i : b) {
		if (ba.count(blocks[static_cast<std::size_t>(i)]) != 0) {
			throw ValidationError(what + " share block " +
					std::to_string(blocks[static_cast<std::size_t>(i)]));
		}
	}
}

} // namespace

void validate_plan(const SplitPlan& plan, std::span<const int> block_ids)
{
	if (static_cast<Index>(block_ids.size()) != plan.n_samples)
		throw ValidationError("plan size does not match block labels");
	std::vector<int> covered(static_cast<std::size_t>(plan.n_samples), 0);
	for (std::size_t f = 0; f < plan.outer.size(); ++f) {
		const auto& fold = plan.outer[f];
		const std::string tag = "outer fold " + std::to_string(f);
		for (const auto i : fold.test) {
			if (i < 0 || i >= plan.n_samples)
				throw ValidationError(tag + ": index out of range");
			++covered[static_cast<std::size_t>(i)];
		}
		require_disjoint(fold.test, fold.train, tag + " test and train");
		if (fold.test.size() + fold.train.size() != static_cast<std::size_t>(plan.n_samples))
			throw ValidationError(tag + ": test and train do not cover all samples");
		if (fold.inner.empty())
			throw ValidationError(tag + ": no inner folds");
		for (std::size_t k = 0; k < fold.inner.size(); ++k) {
			const auto& inner = fold.inner[k];
			const std::string itag = tag + " inner " + std::to_string(k);
			require_disjoint(fold.test, inner.train, itag + " test and train");
			require_disjoint(fold.test, inner.validation, itag + " test and validation");
			require_disjoint(inner.train, inner.validation, itag + " train and validation");
			if (inner.train.size() < 2 || inner.validation.empty())
				throw ValidationError(itag + ": fold too small");
			if (plan.mode == SplitMode::contiguous) {
				require_block_disjoint(inner.train, fold.test, block_ids, itag + " train and test");
				require_block_disjoint(inner.train, inner.validation, block_ids,
						itag + " train and validation");
			}
		}
		if (plan.mode == SplitMode::contiguous)
			require_block_disjoint(fold.train, fold.test, block_ids, tag + " train and test");
	}
	for (std::size_t i = 0; i < covered.size(); ++i) {
		if (covered[i] != 1) {
			throw ValidationError("sample " + std::to_string(i) + " appears in " +
					std::to_string(covered[i]) + " test sets");
		}
	}
}

std::vector<int> passage_categories(std::span<const int> block_ids,
		std::span<const int> sample_categories)
{
	if (block_ids.size() != sample_categories.size())
		throw ValidationError("category labels do not match sample count");
	std::vector<int> out;
	for (const auto& run : block_runs(block_ids)) {
		const int cat = sample_categories[static_cast<std::size_t>(run.begin)];
		for (Index i = run.begin; i < run.end; ++i) {
			if (sample_categories[static_cast<std::size_t>(i)] != cat) {
				throw ValidationError("block " + std::to_string(run.id) +
						" spans several categories");
			}
		}
		out.push_back(cat);
	}
	return out;
}

void to_json(nlohmann::json& j, const SplitPlan& plan)
{
	j = nlohmann::json::object();
	j["scheme"] = to_string(plan.scheme);
	j["mode"] = to_string(plan.mode);
	j["n_samples"] = plan.n_samples;
	j["outer_folds"] = nlohmann::json::array();
	for (const auto& fold : plan.outer) {
		nlohmann::json f;
		f["test"] = fold.test;
		f["train"] = fold.train;
		f["inner_folds"] = nlohmann::json::array();
		for (const auto& inner : fold.inner)
			f["inner_folds"].push_back({{"train", inner.train}, {"validation", inner.validation}});
		j["outer_folds"].push_back(std::move(f));
	}
}

void from_json(const nlohmann::json& j, SplitPlan& plan)
{
	try {
		plan.scheme = parse_split_scheme(j.at("scheme").get<std::string>());
		plan.mode = parse_split_mode(j.at("mode").get<std::string>());
		plan.n_samples = j.at("n_samples").get<Index>();
		plan.outer.clear();
		for (const auto& f : j.at("outer_folds")) {
			OuterFold fold;
			fold.test = f.at("test").get<IndexList>();
			fold.train = f.at("train").get<IndexList>();
			for (const auto& in : f.at("inner_folds"))
				fold.inner.push_back({in.at("train").get<IndexList>(),
						in.at("validation").get<IndexList>()});
			plan.outer.push_back(std::move(fold));
		}
	} catch (const nlohmann::json::exception& e) {
		throw FormatError(std::string("split plan: ") + e.what());
	}
}

} // namespace encodebench
