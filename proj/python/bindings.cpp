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

#include <fstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "encodebench/matrixio.hpp"
#include "encodebench/metrics.hpp"
#include "encodebench/pipeline.hpp"
#include "encodebench/presets.hpp"
#include "encodebench/ridge.hpp"
#include "encodebench/splits.hpp"
#include "encodebench/stats.hpp"
#include "encodebench/synthgen.hpp"

namespace py = pybind11;
using namespace encodebench;
using nlohmann::json;

namespace {

// Structured values cross the boundary as JSON text; the Python wrapper
// decodes them.
std::string dump(const json& j)
{
	return j.dump();
}

SplitPlan plan_of(const std::string& text)
{
	return json::parse(text).get<SplitPlan>();
}

std::vector<FeatureSpace> spaces_of(const std::vector<std::tuple<std::string, Matrix, std::string>>& in)
{
	std::vector<FeatureSpace> out;
	for (const auto& [name, data, group] : in)
		out.push_back({name, data, group.empty() ? name : group});
	return out;
}

json summary_json(const ParticipantSummary& s)
{
	return {{"participants", s.participants}, {"values", s.values}, {"mean", s.mean}, {"sem", s.sem}};
}

} // namespace

PYBIND11_MODULE(_encodebench, m)
{
	m.doc() = "Encoding-model benchmarking: banded ridge, nested splits and comparison metrics.";

	// Later registrations are tried first, so derived types come last.
	auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
	py::register_exception<FormatError>(m, "FormatError", base.ptr());
	py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
	py::register_exception<DataError>(m, "DataError", base.ptr());
	py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
	py::register_exception_translator([](std::exception_ptr p) {
		try {
			if (p)
				std::rethrow_exception(p);
		} catch (const json::exception& e) {
			py::set_error(py::module_::import("encodebench._encodebench").attr("FormatError"), e.what());
		}
	});

	m.def("load_matrix", &load_any_matrix, py::arg("path"));
	m.def("save_matrix", &save_matrix, py::arg("path"), py::arg("matrix"));

	m.def("build_oasm", [](Index n, const std::vector<int>& blocks, double sigma) {
		return build_oasm(n, blocks, sigma).data;
	}, py::arg("n_samples"), py::arg("block_ids"), py::arg("sigma"));
	m.def("oasm_sigma_grid", &oasm_sigma_grid);
	m.def("default_alpha_grid", &default_alpha_grid);

	m.def("ridge_solve", [](const Matrix& x, const Matrix& y, const Matrix& x_eval,
			const std::vector<double>& alphas) { return ridge_solve(x, y, x_eval, alphas); },
			py::arg("x_train"), py::arg("y_train"), py::arg("x_eval"), py::arg("alphas"));

	m.def("plan_grouped", [](const std::vector<int>& blocks, int n_folds) {
		return dump(plan_grouped(blocks, n_folds));
	}, py::arg("block_ids"), py::arg("n_folds"));
	m.def("shuffle_plan", [](const std::string& plan, std::uint64_t seed) {
		return dump(shuffle_plan(plan_of(plan), seed));
	}, py::arg("plan"), py::arg("seed"));

	m.def("banded_search", [](const std::vector<std::tuple<std::string, Matrix, std::string>>& spaces,
			const Matrix& responses, const std::string& plan, std::uint64_t seed, int threads) {
		BandedSearchConfig search;
		search.seed = seed;
		search.threads = threads;
		FitResult fit;
		{
			py::gil_scoped_release release;
			fit = banded_search(spaces_of(spaces), responses, plan_of(plan), RidgeConfig{}, search);
		}
		return py::make_tuple(dump(fit_summary_json(fit)), fit.test_predictions,
				fit.intercept_predictions);
	}, py::arg("spaces"), py::arg("responses"), py::arg("plan"), py::arg("seed") = 0,
			py::arg("threads") = 1);

	m.def("r2_oos", &r2_oos, py::arg("y_true"), py::arg("y_pred"), py::arg("y_intercept"));
	m.def("omega", [](const Vector& m_star, const Vector& m_llm_star, const Vector& llm,
			const std::vector<int>& parts) { return dump(summary_json(omega(m_star, m_llm_star, llm, parts))); },
			py::arg("r2_m_star"), py::arg("r2_m_llm_star"), py::arg("r2_llm"), py::arg("participants"));
	m.def("phi", [](const Vector& with, const Vector& oasm, const std::vector<int>& parts) {
		return dump(summary_json(phi(with, oasm, parts)));
	}, py::arg("r2_oasm_llm_star"), py::arg("r2_oasm"), py::arg("participants"));

	m.def("paired_ttest", [](const Matrix& y, const Matrix& a, const Matrix& b) {
		const auto r = paired_squared_error_ttest(y, a, b);
		return py::make_tuple(r.t, r.p);
	}, py::arg("y_true"), py::arg("pred_a"), py::arg("pred_b"));
	m.def("bh_fdr", [](const Vector& p, const std::vector<int>& parts, double level) {
		return bh_fdr(p, parts, level);
	}, py::arg("p_values"), py::arg("participants"), py::arg("level") = 0.05);

	m.def("preset_names", &preset_names);
	m.def("synthesize", [](const std::string& preset, std::uint64_t seed, Index units,
			const std::filesystem::path& dir) {
		const Preset p = make_preset(preset, seed, units);
		const SynthDataset d = generate(p.spec);
		std::filesystem::create_directories(dir);
		const auto manifest = write_dataset(dir, p.name, p.manifest_features, d.recording);
		std::ofstream(dir / "compare.json", std::ios::trunc) << p.compare_config.dump(2) << '\n';
		return manifest;
	}, py::arg("preset"), py::arg("seed"), py::arg("units"), py::arg("directory"));

	m.def("compare", [](const std::filesystem::path& config, const std::filesystem::path& out,
			int threads) {
		AnalysisConfig cfg = load_analysis_config(config);
		cfg.threads = threads;
		RunReport report;
		{
			py::gil_scoped_release release;
			report = run_analysis(cfg);
		}
		write_report(report, out);
		return dump(report_summary_json(report));
	}, py::arg("config"), py::arg("output"), py::arg("threads") = 1);
}
