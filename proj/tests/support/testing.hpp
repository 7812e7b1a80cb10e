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
#include <random>
#include <string>
#include <vector>

#include "encodebench/types.hpp"

namespace testing {

using encodebench::Index;
using encodebench::Matrix;

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng)
{
	std::normal_distribution<double> n(0.0, 1.0);
	Matrix m(rows, cols);
	for (Index c = 0; c < cols; ++c)
		for (Index r = 0; r < rows; ++r)
			m(r, c) = n(rng);
	return m;
}

// Block ids 0..n_blocks-1, each repeated `size` times.
inline std::vector<int> equal_blocks(int n_blocks, int size)
{
	std::vector<int> out;
	for (int b = 0; b < n_blocks; ++b)
		out.insert(out.end(), static_cast<std::size_t>(size), b);
	return out;
}

class TempDir {
public:
	explicit TempDir(const std::string& tag)
	{
		std::random_device rd;
		path_ = std::filesystem::temp_directory_path() /
				("encodebench_" + tag + "_" + std::to_string(rd()));
		std::filesystem::create_directories(path_);
	}
	~TempDir()
	{
		std::error_code ec;
		std::filesystem::remove_all(path_, ec);
	}
	TempDir(const TempDir&) = delete;
	TempDir& operator=(const TempDir&) = delete;

	const std::filesystem::path& path() const { return path_; }

private:
	std::filesystem::path path_;
};

} // namespace testing
