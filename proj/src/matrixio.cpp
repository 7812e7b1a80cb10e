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

#include "encodebench/matrixio.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"

namespace encodebench {

namespace {

void put_u32(std::string& out, std::uint32_t v)
{
	for (int i = 0; i < 4; ++i)
		out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double d)
{
	const auto bits = std::bit_cast<std::uint64_t>(d);
	for (int i = 0; i < 8; ++i)
		out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p)
{
	std::uint32_t v = 0;
	for (int i = 0; i < 4; ++i)
		v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
	return v;
}

double get_f64(const unsigned char* p)
{
	std::uint64_t bits = 0;
	for (int i = 0; i < 8; ++i)
		bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
	return std::bit_cast<double>(bits);
}

std::string slurp(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ValidationError("cannot open " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

} // namespace

Matrix load_matrix(const std::filesystem::path& path)
{
	const std::string bytes = slurp(path);
	if (bytes.size() < 16)
		throw TruncationError(path.string() + ": header shorter than 16 bytes");
	const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
	if (std::memcmp(p, kMatrixMagic, 4) != 0)
		throw FormatError(path.string() + ": bad magic, expected BBSM");
	const std::uint32_t version = get_u32(p + 4);
	if (version != kMatrixVersion)
		throw FormatError(path.string() + ": unsupported version " +
				std::to_string(version));
	const std::uint32_t rows = get_u32(p + 8);
	const std::uint32_t cols = get_u32(p + 12);
	if (rows == 0 || cols == 0)
		throw FormatError(path.string() + ": empty matrix");
	const std::uint64_t expected = 16 + std::uint64_t{rows} * cols * 8;
	if (bytes.size() != expected) {
		throw TruncationError(path.string() + ": payload is " +
				std::to_string(bytes.size() - 16) + " bytes, header implies " +
				std::to_string(expected - 16));
	}

	Matrix m(rows, cols);
	const unsigned char* payload = p + 16;
	for (std::uint32_t r = 0; r < rows; ++r) {
		for (std::uint32_t c = 0; c < cols; ++c) {
			const double v = get_f64(payload + 8 * (std::uint64_t{r} * cols + c));
			if (std::isnan(v)) {
				throw DataError(path.string() + ": NaN at row " +
						std::to_string(r) + " col " + std::to_string(c));
			}
			m(r, c) = v;
		}
	}
	return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m)
{
	if (m.rows() < 1 || m.cols() < 1)
		throw ValidationError("cannot save an empty matrix");
	std::string out;
	out.reserve(16 + 8 * static_cast<std::size_t>(m.size()));
	out.append(kMatrixMagic, 4);
	put_u32(out, kMatrixVersion);
	put_u32(out, static_cast<std::uint32_t>(m.rows()));
	put_u32(out, static_cast<std::uint32_t>(m.cols()));
	for (Index r = 0; r < m.rows(); ++r)
		for (Index c = 0; c < m.cols(); ++c)
			put_f64(out, m(r, c));

	std::ofstream f(path, std::ios::binary | std::ios::trunc);
	if (!f)
		throw ValidationError("cannot write " + path.string());
	f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

Matrix load_csv_matrix(const std::filesystem::path& path)
{
	std::istringstream in(slurp(path));
	std::vector<std::vector<double>> rows;
	std::string line;
	while (std::getline(in, line)) {
		if (!line.empty() && line.back() == '\r')
			line.pop_back();
		if (line.empty())
			continue;
		std::vector<double> row;
		std::size_t start = 0;
		while (start <= line.size()) {
			const std::size_t end = std::min(line.find(',', start), line.size());
			std::string field = line.substr(start, end - start);
			const auto first = field.find_first_not_of(" \t");
			const auto last = field.find_last_not_of(" \t");
			field = first == std::string::npos ? "" : field.substr(first, last - first + 1);
			double v = 0.0;
			const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
			if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
				throw FormatError(path.string() + ": bad number '" + field + "'");
			if (std::isnan(v))
				throw DataError(path.string() + ": NaN value");
			row.push_back(v);
			start = end + 1;
		}
		if (!rows.empty() && row.size() != rows.front().size())
			throw FormatError(path.string() + ": ragged CSV rows");
		rows.push_back(std::move(row));
	}
	if (rows.empty())
		throw FormatError(path.string() + ": empty CSV");

	Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
	for (Index r = 0; r < m.rows(); ++r)
		for (Index c = 0; c < m.cols(); ++c)
			m(r, c) = rows[r][c];
	return m;
}

Matrix load_any_matrix(const std::filesystem::path& path)
{
	if (path.extension() == ".csv")
		return load_csv_matrix(path);
	return load_matrix(path);
}

void to_json(nlohmann::json& j, const Manifest& m)
{
	j = nlohmann::json::object();
	j["dataset_name"] = m.dataset_name;
	j["feature_spaces"] = nlohmann::json::array();
	for (const auto& fs : m.feature_spaces) {
		j["feature_spaces"].push_back(
				{{"name", fs.name}, {"path", fs.path}, {"band_group", fs.band_group}});
	}
	j["responses_path"] = m.responses_path;
	j["sample_blocks"] = m.sample_blocks;
	if (m.sample_categories)
		j["sample_categories"] = *m.sample_categories;
	j["unit_participants"] = m.unit_participants;
	if (m.token_map)
		j["token_map"] = *m.token_map;
}

void from_json(const nlohmann::json& j, Manifest& m)
{
	try {
		m.dataset_name = j.at("dataset_name").get<std::string>();
		m.feature_spaces.clear();
		for (const auto& fs : j.at("feature_spaces")) {
			m.feature_spaces.push_back({fs.at("name").get<std::string>(),
					fs.at("path").get<std::string>(),
					fs.at("band_group").get<std::string>()});
		}
		m.responses_path = j.at("responses_path").get<std::string>();
		m.sample_blocks = j.at("sample_blocks").get<std::vector<int>>();
		m.sample_categories.reset();
		if (j.contains("sample_categories") && !j["sample_categories"].is_null())
			m.sample_categories = j["sample_categories"].get<std::vector<int>>();
		m.unit_participants = j.at("unit_participants").get<std::vector<int>>();
		m.token_map.reset();
		if (j.contains("token_map") && !j["token_map"].is_null())
			m.token_map = j["token_map"].get<std::vector<int>>();
	} catch (const nlohmann::json::exception& e) {
		throw FormatError(std::string("manifest: ") + e.what());
	}
}

Manifest read_manifest(const std::filesystem::path& path)
{
	const std::string text = slurp(path);
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(text);
	} catch (const nlohmann::json::parse_error& e) {
		throw FormatError(path.string() + ": " + e.what());
	}
	return j.get<Manifest>();
}

void write_manifest(const std::filesystem::path& path, const Manifest& m)
{
	std::ofstream f(path, std::ios::trunc);
	if (!f)
		throw ValidationError("cannot write " + path.string());
	f << nlohmann::json(m).dump(2) << '\n';
}

void validate_dataset(const std::vector<FeatureSpace>& features,
		const NeuralRecording& recording)
{
	const Index n = recording.n_samples();
	for (const auto& fs : features) {
		if (fs.data.rows() != n) {
			throw ValidationError("feature space '" + fs.name + "' has " +
					std::to_string(fs.data.rows()) + " rows, responses have " +
					std::to_string(n));
		}
		if (!fs.data.allFinite())
			throw DataError("feature space '" + fs.name + "' has non-finite values");
	}
	if (static_cast<Index>(recording.sample_blocks.size()) != n) {
		throw ValidationError("sample_blocks has " +
				std::to_string(recording.sample_blocks.size()) + " entries for " +
				std::to_string(n) + " samples");
	}
	if (!recording.sample_categories.empty() &&
			static_cast<Index>(recording.sample_categories.size()) != n) {
		throw ValidationError("sample_categories length does not match samples");
	}
	if (static_cast<Index>(recording.unit_participants.size()) != recording.n_units()) {
		throw ValidationError("unit_participants has " +
				std::to_string(recording.unit_participants.size()) + " entries for " +
				std::to_string(recording.n_units()) + " units");
	}
	block_runs(recording.sample_blocks);
}

LoadedManifest load_manifest(const std::filesystem::path& path)
{
	if (!std::filesystem::exists(path))
		throw ValidationError("manifest not found: " + path.string());
	LoadedManifest out;
	out.manifest = read_manifest(path);
	const auto& m = out.manifest;
	const auto base = path.parent_path();
	auto resolve = [&](const std::string& p) {
		const std::filesystem::path fp(p);
		return fp.is_absolute() ? fp : base / fp;
	};

	for (const auto& fs : m.feature_spaces) {
		const auto fp = resolve(fs.path);
		if (!std::filesystem::exists(fp))
			throw ValidationError("feature matrix not found: " + fp.string());
	}
	const auto rp = resolve(m.responses_path);
	if (!std::filesystem::exists(rp))
		throw ValidationError("response matrix not found: " + rp.string());

	out.recording.responses = load_any_matrix(rp);
	out.recording.sample_blocks = m.sample_blocks;
	out.recording.unit_participants = m.unit_participants;
	if (m.sample_categories)
		out.recording.sample_categories = *m.sample_categories;

	for (const auto& entry : m.feature_spaces) {
		Matrix data = load_any_matrix(resolve(entry.path));
		if (m.token_map && data.rows() == static_cast<Index>(m.token_map->size()) &&
				data.rows() != out.recording.n_samples()) {
			data = sum_pool(data, *m.token_map);
		}
		out.features.push_back({entry.name, std::move(data), entry.band_group});
	}

	validate_dataset(out.features, out.recording);
	return out;
}

} // namespace encodebench
