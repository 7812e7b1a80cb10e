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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "encodebench/matrixio.hpp"
#include "encodebench/metrics.hpp"
#include "encodebench/oasm_sweep.hpp"
#include "encodebench/parallel.hpp"
#include "encodebench/pipeline.hpp"
#include "encodebench/presets.hpp"
#include "encodebench/ridge.hpp"
#include "encodebench/splits.hpp"
#include "encodebench/synthgen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace encodebench;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Globals {
	std::optional<std::uint64_t> seed;
	int threads = 0;
	std::string output;
};

void emit(const json& j)
{
	std::cout << j.dump() << '\n' << std::flush;
}

void log_config(const std::string& command, const json& resolved)
{
	std::cerr << "encodebench " << command << ": " << resolved.dump() << '\n';
}

int env_threads()
{
	if (const char* v = std::getenv("ENCODEBENCH_THREADS")) {
		try {
			return std::stoi(v);
		} catch (const std::exception&) {
			throw ValidationError(std::string("ENCODEBENCH_THREADS is not an integer: ") + v);
		}
	}
	return 0;
}

int threads_of(const Globals& g)
{
	return resolve_threads(g.threads > 0 ? g.threads : env_threads());
}

fs::path require_output(const Globals& g)
{
	if (g.output.empty())
		throw CLI::RequiredError("--output");
	return g.output;
}

std::vector<std::string> split_list(const std::string& s)
{
	std::vector<std::string> out;
	std::string cur;
	for (const char c : s) {
		if (c == ',') {
			if (!cur.empty())
				out.push_back(cur);
			cur.clear();
		} else {
			cur.push_back(c);
		}
	}
	if (!cur.empty())
		out.push_back(cur);
	return out;
}

// Split and search options shared by fit, split and oasm-sweep.
struct PlanOptions {
	std::string scheme = "generic-grouped";
	std::string mode = "contiguous";
	int passages_per_category = 0;
	int n_folds = 5;
	bool randomize_selection = false;
	std::string standardize = "train";

	void add(CLI::App* cmd)
	{
		cmd->add_option("--scheme", scheme, "pereira | fedorenko | blank | generic-grouped")
				->check(CLI::IsMember({"pereira", "fedorenko", "blank", "generic-grouped"}));
		cmd->add_option("--mode", mode, "contiguous | shuffled")
				->check(CLI::IsMember({"contiguous", "shuffled"}));
		cmd->add_option("--passages-per-category", passages_per_category);
		cmd->add_option("--n-folds", n_folds, "generic-grouped only");
		cmd->add_flag("--randomize-selection", randomize_selection);
		cmd->add_option("--standardize", standardize, "feature z-score statistics: train | all")
				->check(CLI::IsMember({"train", "all"}));
	}

	AnalysisConfig config(std::uint64_t seed) const
	{
		AnalysisConfig cfg;
		cfg.seed = seed;
		cfg.search.seed = seed;
		cfg.scheme = parse_split_scheme(scheme);
		cfg.passages_per_category = passages_per_category;
		cfg.n_folds = n_folds;
		cfg.randomize_selection = randomize_selection;
		cfg.ridge.standardize = parse_standardization(standardize);
		return cfg;
	}

	json resolved() const
	{
		return {{"scheme", scheme}, {"mode", mode}, {"passages_per_category", passages_per_category},
				{"n_folds", n_folds}, {"randomize_selection", randomize_selection},
				{"standardize", standardize}};
	}
};

int run_synth(const Globals& g, const std::string& preset, Index units)
{
	const fs::path out = require_output(g);
	const std::uint64_t seed = g.seed.value_or(0);
	log_config("synth", {{"preset", preset}, {"seed", seed}, {"units", units}, {"output", out}});

	Preset p = make_preset(preset, seed, units);
	const SynthDataset data = generate(p.spec);
	fs::create_directories(out);
	const fs::path manifest = write_dataset(out, p.name, p.manifest_features, data.recording);
	{
		std::ofstream f(out / "compare.json", std::ios::trunc);
		f << p.compare_config.dump(2) << '\n';
	}
	emit({{"command", "synth"}, {"preset", preset}, {"seed", seed}, {"manifest", manifest},
			{"config", out / "compare.json"}, {"n_samples", data.recording.n_samples()},
			{"n_units", data.recording.n_units()}});
	return 0;
}

int run_features(const Globals& g, const std::string& manifest, const std::string& kind,
		double sigma, std::string name)
{
	const fs::path out = require_output(g);
	if (name.empty())
		name = kind == "oasm" ? "OASM" : kind == "sentence_position" ? "SP" : "WP";
	log_config("features", {{"manifest", manifest}, {"kind", kind}, {"sigma", sigma},
			{"name", name}, {"output", out}});

	const auto data = load_manifest(manifest);
	const FeatureSpace fsp = derived_space({name, kind, sigma, name}, data.recording);
	fs::create_directories(out);
	const fs::path path = out / (name + ".bbsm");
	save_matrix(path, fsp.data);
	emit({{"command", "features"}, {"kind", kind}, {"name", name}, {"path", path},
			{"rows", fsp.data.rows()}, {"cols", fsp.data.cols()}});
	return 0;
}

int run_split(const Globals& g, const std::string& manifest, const PlanOptions& po)
{
	const fs::path out = require_output(g);
	const std::uint64_t seed = g.seed.value_or(0);
	json resolved = po.resolved();
	resolved["manifest"] = manifest;
	resolved["seed"] = seed;
	resolved["output"] = out;
	log_config("split", resolved);

	const auto data = load_manifest(manifest);
	const SplitPlan plan = plan_for(po.config(seed), data.recording, parse_split_mode(po.mode));
	fs::create_directories(out);
	{
		std::ofstream f(out / "plan.json", std::ios::trunc);
		f << json(plan).dump() << '\n';
	}
	emit({{"command", "split"}, {"scheme", po.scheme}, {"mode", po.mode},
			{"outer_folds", plan.outer.size()},
			{"inner_folds", plan.outer.empty() ? 0 : plan.outer.front().inner.size()},
			{"path", out / "plan.json"}});
	return 0;
}

// Band groups of the manifest, narrowed to `wanted` in the given order.
std::vector<FeatureSpace> select_spaces(const std::vector<FeatureSpace>& features,
		const std::vector<std::string>& wanted)
{
	const auto bands = group_bands(features);
	std::vector<FeatureSpace> out;
	if (wanted.empty()) {
		for (const auto& b : bands)
			out.push_back({b.name, b.data, b.name});
		return out;
	}
	for (const auto& w : wanted) {
		bool found = false;
		for (const auto& b : bands) {
			if (b.name == w) {
				out.push_back({b.name, b.data, b.name});
				found = true;
			}
		}
		if (!found)
			throw ValidationError("unknown feature space '" + w + "'");
	}
	return out;
}

int run_fit(const Globals& g, const std::string& manifest, const std::string& spaces,
		double oasm_sigma, const PlanOptions& po)
{
	const fs::path out = require_output(g);
	const std::uint64_t seed = g.seed.value_or(0);
	json resolved = po.resolved();
	resolved["manifest"] = manifest;
	resolved["spaces"] = spaces;
	resolved["oasm_sigma"] = oasm_sigma;
	resolved["seed"] = seed;
	resolved["threads"] = threads_of(g);
	resolved["output"] = out;
	log_config("fit", resolved);

	// Everything is loaded and fitted before the output directory is touched.
	const auto data = load_manifest(manifest);
	auto features = data.features;
	if (oasm_sigma > 0.0)
		features.push_back(derived_space({"OASM", "oasm", oasm_sigma, "OASM"}, data.recording));
	const auto chosen = select_spaces(features, split_list(spaces));
	AnalysisConfig cfg = po.config(seed);
	const SplitPlan plan = plan_for(cfg, data.recording, parse_split_mode(po.mode));
	cfg.search.threads = threads_of(g);
	const FitResult fit = banded_search(chosen, data.recording.responses, plan, cfg.ridge, cfg.search);
	const auto summary = clip_and_average(fit.test_r2, data.recording.unit_participants);

	fs::create_directories(out);
	{
		std::ofstream f(out / "fit.json", std::ios::trunc);
		f << fit_summary_json(fit).dump() << '\n';
	}
	{
		std::ofstream f(out / "r2.csv", std::ios::trunc);
		f.precision(17);
		f << "unit,participant,r2\n";
		for (Index u = 0; u < fit.test_r2.size(); ++u)
			f << u << ',' << data.recording.unit_participants[static_cast<std::size_t>(u)] << ','
			  << fit.test_r2(u) << '\n';
	}
	save_matrix(out / "predictions.bbsm", fit.test_predictions);
	save_matrix(out / "intercept.bbsm", fit.intercept_predictions);
	emit({{"command", "fit"}, {"bands", fit.band_names}, {"mode", po.mode},
			{"mean_clipped_r2", summary.mean}, {"sem", summary.sem},
			{"participant_means", summary.values}});
	return 0;
}

int run_compare(const Globals& g, const std::string& config_path)
{
	const fs::path out = require_output(g);
	AnalysisConfig cfg = load_analysis_config(config_path);
	if (g.seed) {
		cfg.seed = *g.seed;
		cfg.search.seed = *g.seed;
	}
	cfg.threads = threads_of(g);
	json resolved = analysis_config_json(cfg);
	resolved["threads"] = cfg.threads;
	resolved["output"] = out;
	log_config("compare", resolved);

	const RunReport report = run_analysis(cfg);
	write_report(report, out);
	for (const auto& mr : report.modes) {
		for (const auto& s : mr.subsets)
			emit({{"command", "compare"}, {"mode", to_string(mr.mode)}, {"subset", s.name},
					{"mean_clipped_r2", s.summary.mean}, {"sem", s.summary.sem}});
		for (const auto& o : mr.omega)
			if (o.omega)
				emit({{"command", "compare"}, {"mode", to_string(mr.mode)}, {"omega", o.model},
						{"mean", o.omega->mean}, {"sem", o.omega->sem}});
		if (mr.phi)
			emit({{"command", "compare"}, {"mode", to_string(mr.mode)}, {"phi", *report.config.oasm},
					{"mean", mr.phi->mean}, {"sem", mr.phi->sem}});
	}
	emit({{"command", "compare"}, {"report", out / "summary.json"},
			{"elapsed_seconds", report.elapsed_seconds}});
	return 0;
}

int run_oasm_sweep(const Globals& g, const std::string& manifest, const std::string& sigmas,
		const PlanOptions& po)
{
	const fs::path out = require_output(g);
	const std::uint64_t seed = g.seed.value_or(0);
	std::vector<double> grid = oasm_sigma_grid();
	if (!sigmas.empty()) {
		grid.clear();
		for (const auto& s : split_list(sigmas))
			grid.push_back(std::stod(s));
	}
	json resolved = po.resolved();
	resolved["manifest"] = manifest;
	resolved["sigmas"] = grid;
	resolved["seed"] = seed;
	resolved["output"] = out;
	log_config("oasm-sweep", resolved);

	const auto data = load_manifest(manifest);
	AnalysisConfig cfg = po.config(seed);
	const SplitPlan plan = plan_for(cfg, data.recording, parse_split_mode(po.mode));
	cfg.search.threads = threads_of(g);
	const SigmaSweep sweep = sweep_oasm_sigma(data.recording.responses, data.recording.sample_blocks,
			plan, cfg.ridge, cfg.search, grid);

	fs::create_directories(out);
	const json j{{"sigmas", sweep.sigmas}, {"scores", sweep.scores}, {"best_sigma", sweep.best_sigma}};
	{
		std::ofstream f(out / "oasm_sweep.json", std::ios::trunc);
		f << j.dump(2) << '\n';
	}
	emit({{"command", "oasm-sweep"}, {"best_sigma", sweep.best_sigma}, {"path", out / "oasm_sweep.json"}});
	return 0;
}

json read_json(const fs::path& path)
{
	std::ifstream f(path);
	if (!f)
		throw DataError("cannot open " + path.string());
	try {
		return json::parse(f);
	} catch (const json::exception& e) {
		throw FormatError(path.string() + ": " + e.what());
	}
}

std::string fmt_summary(const json& s)
{
	if (s.is_null())
		return "n/a";
	std::ostringstream o;
	o.precision(4);
	o << std::fixed << s.at("mean").get<double>() << " +/- " << s.at("sem").get<double>();
	return o.str();
}

int run_report(const Globals& g, const std::string& input)
{
	log_config("report", {{"input", input}, {"output", g.output}});
	const json summary = read_json(fs::path(input) / "summary.json");

	std::ostringstream md;
	md << "# " << summary.value("dataset", std::string("report")) << "\n";
	for (const auto& [mode, m] : summary.at("modes").items()) {
		md << "\n## " << mode << " (" << m.at("outer_folds").get<int>() << " outer, "
		   << m.at("inner_folds").get<int>() << " inner folds)\n\n";
		md << "| subset | mean clipped R2 |\n|---|---|\n";
		for (const auto& s : m.at("subsets")) {
			md << "| " << s.at("name").get<std::string>() << " | " << fmt_summary(s) << " |\n";
			emit({{"command", "report"}, {"mode", mode}, {"subset", s.at("name")},
					{"mean", s.at("mean")}, {"sem", s.at("sem")}});
		}
		if (!m.at("omega").empty()) {
			md << "\n| model | omega (%) |\n|---|---|\n";
			for (const auto& o : m.at("omega")) {
				md << "| " << o.at("model").get<std::string>() << " | " << fmt_summary(o.at("omega"))
				   << " |\n";
				emit({{"command", "report"}, {"mode", mode}, {"omega", o.at("model")},
						{"value", o.at("omega")}});
			}
		}
		if (!m.at("phi").is_null()) {
			md << "\nphi (%): " << fmt_summary(m.at("phi")) << "\n";
			emit({{"command", "report"}, {"mode", mode}, {"phi", m.at("phi")}});
		}
		for (const auto& t : m.at("tests"))
			md << "\ntest " << t.at("name").get<std::string>() << ": "
			   << t.at("rejected_after_fdr").get<int>() << " of " << t.at("n_units").get<int>()
			   << " units significant after FDR\n";
	}
	if (!g.output.empty()) {
		fs::create_directories(g.output);
		std::ofstream f(fs::path(g.output) / "report.md", std::ios::trunc);
		f << md.str();
	} else {
		std::cerr << md.str();
	}
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Banded ridge encoding models with leakage controls"};
	app.require_subcommand(1);
	app.fallthrough();

	Globals g;
	std::uint64_t seed = 0;
	app.add_option("--seed", seed, "seed for every stochastic step");
	app.add_option("--threads", g.threads, "worker count (default: ENCODEBENCH_THREADS, else all cores)")
			->check(CLI::PositiveNumber);
	app.add_option("--output", g.output, "directory that receives all artifacts");

	std::string preset;
	Index units = 0;
	auto* synth = app.add_subcommand("synth", "generate a synthetic preset dataset");
	synth->add_option("--preset", preset)->required()->check(CLI::IsMember(preset_names()));
	synth->add_option("--units", units, "override the preset's unit count");

	std::string manifest, kind, name;
	double sigma = 2.0;
	auto* features = app.add_subcommand("features", "build a derived feature space");
	features->add_option("--manifest", manifest)->required();
	features->add_option("--kind", kind)
			->required()
			->check(CLI::IsMember({"oasm", "sentence_position", "word_position"}));
	features->add_option("--sigma", sigma, "OASM width");
	features->add_option("--name", name);

	PlanOptions split_opts, fit_opts, sweep_opts;
	auto* split = app.add_subcommand("split", "write the nested fold plan");
	split->add_option("--manifest", manifest)->required();
	split_opts.add(split);

	std::string spaces;
	double oasm_sigma = 0.0;
	auto* fit = app.add_subcommand("fit", "banded ridge fit of one feature set");
	fit->add_option("--manifest", manifest)->required();
	fit->add_option("--spaces", spaces, "comma-separated band groups (default: all)");
	fit->add_option("--oasm-sigma", oasm_sigma, "append an OASM band of this width");
	fit_opts.add(fit);

	std::string config;
	auto* compare = app.add_subcommand("compare", "fit every subset model and write a report");
	compare->add_option("--config", config)->required();

	std::string sigmas;
	auto* sweep = app.add_subcommand("oasm-sweep", "choose the OASM width on validation folds");
	sweep->add_option("--manifest", manifest)->required();
	sweep->add_option("--sigmas", sigmas, "comma-separated widths (default: 0.1..5.0)");
	sweep_opts.add(sweep);

	std::string input;
	auto* report = app.add_subcommand("report", "render a compare report");
	report->add_option("--input", input)->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : kExitUsage;
	}
	if (app.count("--seed") > 0)
		g.seed = seed;

	try {
		if (*synth)
			return run_synth(g, preset, units);
		if (*features)
			return run_features(g, manifest, kind, sigma, name);
		if (*split)
			return run_split(g, manifest, split_opts);
		if (*fit)
			return run_fit(g, manifest, spaces, oasm_sigma, fit_opts);
		if (*compare)
			return run_compare(g, config);
		if (*sweep)
			return run_oasm_sweep(g, manifest, sigmas, sweep_opts);
		if (*report)
			return run_report(g, input);
	} catch (const CLI::ParseError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitUsage;
	} catch (const Error& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitData;
	} catch (const nlohmann::json::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitData;
	} catch (const std::filesystem::filesystem_error& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitData;
	} catch (const std::invalid_argument& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitUsage;
	}
	return kExitUsage;
}
