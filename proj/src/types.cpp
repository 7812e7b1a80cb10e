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

#include "encodebench/types.hpp"

#include <set>

#include "encodebench/error.hpp"

namespace encodebench {

std::vector<BlockRun> block_runs(std::span<const int> block_ids)
{
	std::vector<BlockRun> runs;
	std::set<int> seen;
	for (std::size_t i = 0; i < block_ids.size(); ++i) {
		const int id = block_ids[i];
		if (!runs.empty() && runs.back().id == id) {
			runs.back().end = static_cast<Index>(i) + 1;
			continue;
		}
		if (!seen.insert(id).second) {
			throw ValidationError("block id " + std::to_string(id) +
					" is not contiguous (reappears at sample " +
					std::to_string(i) + ")");
		}
		runs.push_back({id, static_cast<Index>(i), static_cast<Index>(i) + 1});
	}
	return runs;
}

} // namespace encodebench
