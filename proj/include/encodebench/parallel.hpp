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

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace encodebench {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is claimed
// dynamically; callers must write results into per-index slots so that the
// outcome never depends on scheduling. The lowest-index exception is
// rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn)
{
	const std::size_t workers =
			std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
	if (workers <= 1) {
		for (std::size_t i = 0; i < n; ++i)
			fn(i);
		return;
	}

	std::vector<std::exception_ptr> errors(n);
	std::atomic<std::size_t> next{0};
	{
		std::vector<std::jthread> pool;
		pool.reserve(workers);
		for (std::size_t w = 0; w < workers; ++w) {
			pool.emplace_back([&] {
				for (std::size_t i = next++; i < n; i = next++) {
					try {
						fn(i);
					} catch (...) {
						errors[i] = std::current_exception();
					}
				}
			});
		}
	}
	for (auto& e : errors)
		if (e)
			std::rethrow_exception(e);
}

// Resolves a requested worker count: positive values pass through, anything
// else means "all hardware threads".
inline int resolve_threads(int requested)
{
	if (requested > 0)
		return requested;
	const unsigned hw = std::thread::hardware_concurrency();
	return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace encodebench
