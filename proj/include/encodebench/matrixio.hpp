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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "encodebench/types.hpp"

namespace encodebench {

/**
 * Binary matrix file ("BBSM"):
 *
 *   offset  size  field
 *   0       4     magic, ASCII "BBSM"
 *   4       4     version, uint32 little-endian, always 1
 *   8       4     rows, uint32 little-endian
 *   12      4     cols, uint32 little-endian
 *   16      8*r*c float64 little-endian payload, row-major
 *
 * Loading rejects NaN payloads; infinities are passed through.
 */
inline constexpr char kMatrixMagic[4] = {'B', 'B', 'S', 'M'};
inline constexpr std::uint32_t kMatrixVersion = 1;

Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& m);

// Headerless comma-separated float64 rows. Used for small fixtures.
Matrix load_csv_matrix(const std::filesystem::path& path);

// Dispatches on extension: ".csv" goes through load_csv_matrix, anything
// else is treated as a binary matrix file.
Matrix load_any_matrix(const std::filesystem::path& path);

struct FeatureSpaceEntry {
	std::string name;
	std::string path;
	std::string band_group;
};

struct Manifest {
	std::string dataset_name;
	std::vector<FeatureSpaceEntry> feature_spaces;
	std::string responses_path;
	std::vector<int> sample_blocks;
	std::optional<std::vector<int>> sample_categories;
	std::vector<int> unit_participants;
	std::optional<std::vector<int>> token_map;
};

void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

// A manifest with every matrix resolved. Feature matrices whose row count
// equals the token map length are sum-pooled to sample rows on load.
struct LoadedManifest {
	Manifest manifest;
	std::vector<FeatureSpace> features;
	NeuralRecording recording;
};

LoadedManifest load_manifest(const std::filesystem::path& path);

// Structural checks shared by load_manifest and the in-memory path used by
// the synthetic generator.
void validate_dataset(const std::vector<FeatureSpace>& features,
		const NeuralRecording& recording);

} // namespace encodebench
