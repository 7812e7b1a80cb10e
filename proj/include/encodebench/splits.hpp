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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "encodebench/types.hpp"

namespace encodebench {

using IndexList = std::vector<Index>;

enum class SplitMode { contiguous, shuffled };
enum class SplitScheme { pereira, fedorenko, blank, generic_grouped };

std::string to_string(SplitMode mode);
std::string to_string(SplitScheme scheme);
SplitMode parse_split_mode(const std::string& s);
SplitScheme parse_split_scheme(const std::string& s);

struct InnerFold {
	IndexList train;
	IndexList validation;
};

struct OuterFold {
	IndexList test;
	IndexList train; // every non-test sample: the refit set
	std::vector<InnerFold> inner;
};

// Nested cross-validation layout. Index lists are sorted ascending.
struct SplitPlan {
	std::vector<OuterFold> outer;
	SplitMode mode = SplitMode::contiguous;
	SplitScheme scheme = SplitScheme::generic_grouped;
	Index n_samples = 0;
};

// Nested leave-one-group-out over explicit sample groups. Every scheme
// below reduces to this once its groups are formed.
SplitPlan plan_from_groups(const std::vector<IndexList>& groups, Index n_samples,
		SplitScheme scheme);

// Each block is a passage; `passage_categories` has one entry per block in
// order of appearance. Per selection round one passage is drawn from every
// category (round robin, or permuted when `seed` is set) and the draw is
// split in half, each half forming one fold. The first ceil(C/2) categories
// fill the first half.
SplitPlan plan_pereira(std::span<const int> passage_categories, int passages_per_category,
		std::span<const int> block_ids, std::optional<std::uint64_t> seed = std::nullopt);

// Each block is a sentence; folds take 4 consecutive sentences (the last
// fold may be smaller). Needs at least 8 sentences.
SplitPlan plan_fedorenko(std::span<const int> sentence_blocks);

// Each block is a story; leave one story out at both levels.
SplitPlan plan_blank(std::span<const int> story_ids);

// Blocks are cut into `n_folds` >= 3 contiguous, near-equal groups.
SplitPlan plan_grouped(std::span<const int> block_ids, int n_folds);

// Relabels samples through a seeded uniform permutation. Fold sizes are
// preserved exactly; block integrity is intentionally lost.
SplitPlan shuffle_plan(const SplitPlan& plan, std::uint64_t seed);

// Throws ValidationError when disjointness, coverage, or (for contiguous
// plans) block integrity is violated.
void validate_plan(const SplitPlan& plan, std::span<const int> block_ids);

// Per-passage categories read off per-sample labels. Throws when a block
// carries more than one category.
std::vector<int> passage_categories(std::span<const int> block_ids,
		std::span<const int> sample_categories);

void to_json(nlohmann::json& j, const SplitPlan& plan);
void from_json(const nlohmann::json& j, SplitPlan& plan);

} // namespace encodebench
