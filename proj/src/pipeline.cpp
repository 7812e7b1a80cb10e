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

#include "encodebench/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "encodebench/matrixio.hpp"
#include "encodebench/parallel.hpp"

namespace encodebench {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& where)
{
	for (const auto& [key, value] : j.items())
		if (known.count(key) == 0)
			throw ValidationError(where + ": unknown key '" + key + "'");
}

std::vector<std::string> string_list(const json& j)
{
	return j.get<std::vector<std::string>>();
}

} // namespace

AnalysisConfig parse_analysis_config(const json& j, const std::filesystem::path& base_dir)
{
	AnalysisConfig cfg;
	try {
		reject_unknown_keys(j, {"manifest", "seed", "split", "derived_spaces", "spaces", "families",
				"llm", "oasm", "ridge", "search", "tests", "chance_tests", "fdr_level",
				"write_predictions"}, "config");

		std::filesystem::path manifest = j.at("manifest").get<std::string>();
		cfg.manifest = manifest.is_absolute() || base_dir.empty() ? manifest : base_dir / manifest;
		cfg.seed = j.value("seed", std::uint64_t{0});

		if (j.contains("split")) {
			const auto& s = j["split"];
			reject_unknown_keys(s, {"scheme", "modes", "passages_per_category", "n_folds",
					"randomize_selection"}, "split");
			cfg.scheme = parse_split_scheme(s.value("scheme", std::string("generic-grouped")));
			if (s.contains("modes")) {
				cfg.modes.clear();
				for (const auto& m : s["modes"])
					cfg.modes.push_back(parse_split_mode(m.get<std::string>()));
			}
			cfg.passages_per_category = s.value("passages_per_category", 0);
			cfg.n_folds = s.value("n_folds", 5);
			cfg.randomize_selection = s.value("randomize_selection", false);
		}
		if (cfg.modes.empty())
			throw ValidationError("config: no split modes");

		for (const auto& d : j.value("derived_spaces", json::array())) {
			reject_unknown_keys(d, {"name", "kind", "sigma", "band_group"}, "derived_spaces");
			DerivedSpace ds;
			ds.name = d.at("name").get<std::string>();
			ds.kind = d.at("kind").get<std::string>();
			ds.sigma = d.value("sigma", 0.0);
			ds.band_group = d.value("band_group", ds.name);
			if (ds.kind != "oasm" && ds.kind != "sentence_position" && ds.kind != "word_position")
				throw ValidationError("derived space kind '" + ds.kind + "' is not supported");
			cfg.derived.push_back(ds);
		}

		cfg.spaces = string_list(j.at("spaces"));
		if (j.contains("families"))
			for (const auto& f : j["families"])
				cfg.families.push_back(string_list(f));
		if (j.contains("llm") && !j["llm"].is_null())
			cfg.llm = j["llm"].get<std::string>();
		if (j.contains("oasm") && !j["oasm"].is_null())
			cfg.oasm = j["oasm"].get<std::string>();

		if (j.contains("ridge")) {
			reject_unknown_keys(j["ridge"], {"alphas", "standardize"}, "ridge");
			if (j["ridge"].contains("alphas"))
				cfg.ridge.alphas = j["ridge"]["alphas"].get<std::vector<double>>();
			if (j["ridge"].contains("standardize"))
				cfg.ridge.standardize = parse_standardization(j["ridge"]["standardize"].get<std::string>());
		}
		if (j.contains("search")) {
			const auto& s = j["search"];
			reject_unknown_keys(s, {"max_iters", "patience", "min_improvement",
					"dirichlet_concentration"}, "search");
			cfg.search.max_iters = s.value("max_iters", cfg.search.max_iters);
			cfg.search.patience = s.value("patience", cfg.search.patience);
			cfg.search.min_improvement = s.value("min_improvement", cfg.search.min_improvement);
			cfg.search.dirichlet_concentration =
					s.value("dirichlet_concentration", cfg.search.dirichlet_concentration);
		}
		if (j.contains("tests")) {
			std::vector<ModelPair> tests;
			for (const auto& t : j["tests"]) {
				reject_unknown_keys(t, {"name", "model_a", "model_b"}, "tests");
				tests.push_back({t.at("name").get<std::string>(), string_list(t.at("model_a")),
						string_list(t.at("model_b"))});
			}
			cfg.tests = std::move(tests);
		}
		if (j.contains("chance_tests")) {
			std::vector<std::vector<std::string>> chance;
			for (const auto& c : j["chance_tests"])
				chance.push_back(string_list(c));
			cfg.chance_tests = std::move(chance);
		}
		cfg.fdr_level = j.value("fdr_level", 0.05);
		cfg.write_predictions = j.value("write_predictions", true);
	} catch (const json::exception& e) {
		throw FormatError(std::string("config: ") + e.what());
	}
	cfg.search.seed = cfg.seed;
	cfg.ridge.validate();
	cfg.search.validate();
	return cfg;
}

AnalysisConfig load_analysis_config(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
		throw ValidationError("config not found: " + path.string());
	json j;
	try {
		j = json::parse(in);
	} catch (const json::parse_error& e) {
		throw FormatError(path.string() + ": " + e.what());
	}
	return parse_analysis_config(j, path.parent_path());
}

json analysis_config_json(const AnalysisConfig& cfg)
{
	json j;
	j["seed"] = cfg.seed;
	json split;
	split["scheme"] = to_string(cfg.scheme);
	split["modes"] = json::array();
	for (const auto m : cfg.modes)
		split["modes"].push_back(to_string(m));
	split["passages_per_category"] = cfg.passages_per_category;
	split["n_folds"] = cfg.n_folds;
	split["randomize_selection"] = cfg.randomize_selection;
	j["split"] = split;
	j["derived_spaces"] = json::array();
	for (const auto& d : cfg.derived)
		j["derived_spaces"].push_back(
				{{"name", d.name}, {"kind", d.kind}, {"sigma", d.sigma}, {"band_group", d.band_group}});
	j["spaces"] = cfg.spaces;
	j["families"] = cfg.families;
	j["llm"] = cfg.llm ? json(*cfg.llm) : json(nullptr);
	j["oasm"] = cfg.oasm ? json(*cfg.oasm) : json(nullptr);
	j["ridge"] = {{"alphas", cfg.ridge.alphas}, {"standardize", to_string(cfg.ridge.standardize)}};
	j["search"] = {{"max_iters", cfg.search.max_iters}, {"patience", cfg.search.patience},
			{"min_improvement", cfg.search.min_improvement},
			{"dirichlet_concentration", cfg.search.dirichlet_concentration}};
	j["fdr_level"] = cfg.fdr_level;
	j["write_predictions"] = cfg.write_predictions;
	return j;
}

std::vector<TierBest> layered_best(const std::map<SubsetMask, double>& subset_scores, int n_spaces)
{
	if (n_spaces < 1 || n_spaces > 31)
		throw ValidationError("layered_best: bad space count");
	const SubsetMask all = (SubsetMask{1} << n_spaces) - 1;
	for (const auto& [mask, score] : subset_scores)
		if ((mask & ~all) != 0 || mask == 0)
			throw ValidationError("layered_best: subset references a space outside the order");

	std::vector<TierBest> out;
	for (int k = 0; k < n_spaces; ++k) {
		const SubsetMask allowed = (SubsetMask{1} << (k + 1)) - 1;
		bool found = false;
		TierBest best{k, 0, -std::numeric_limits<double>::infinity()};
		for (const auto& [mask, score] : subset_scores) {
			if (!contains(mask, k) || (mask & ~allowed) != 0)
				continue;
			const bool better = !found || score > best.score ||
					(score == best.score && (std::popcount(mask) < std::popcount(best.best_subset) ||
							(std::popcount(mask) == std::popcount(best.best_subset) && mask < best.best_subset)));
			if (better) {
				best.best_subset = mask;
				best.score = score;
				found = true;
			}
		}
		if (!found)
			throw ValidationError("layered_best: no fitted subset for tier " + std::to_string(k));
		out.push_back(best);
	}
	return out;
}

const SubsetFit& ModeReport::subset(SubsetMask mask) const
{
	for (const auto& s : subsets)
		if (s.mask == mask)
			return s;
	throw ValidationError("subset mask " + std::to_string(mask) + " was not fitted");
}

const ModeReport& RunReport::mode(SplitMode m) const
{
	for (const auto& r : modes)
		if (r.mode == m)
			return r;
	throw ValidationError("mode " + to_string(m) + " was not run");
}

std::string subset_name(SubsetMask mask, const std::vector<std::string>& spaces)
{
	std::string out;
	for (std::size_t i = 0; i < spaces.size(); ++i) {
		if (!contains(mask, static_cast<int>(i)))
			continue;
		if (!out.empty())
			out += "+";
		out += spaces[i];
	}
	return out;
}

namespace {

int space_index(const std::vector<std::string>& spaces, const std::string& name)
{
	const auto it = std::find(spaces.begin(), spaces.end(), name);
	if (it == spaces.end())
		throw ValidationError("unknown feature space '" + name + "'");
	return static_cast<int>(it - spaces.begin());
}

SubsetMask mask_of(const std::vector<std::string>& spaces, const std::vector<std::string>& names)
{
	if (names.empty())
		throw ValidationError("empty model specification");
	SubsetMask m = 0;
	for (const auto& n : names)
		m |= SubsetMask{1} << space_index(spaces, n);
	return m;
}

void add_all_subsets(std::set<SubsetMask>& out, SubsetMask family)
{
	for (SubsetMask sub = family; sub != 0; sub = (sub - 1) & family)
		out.insert(sub);
}

bool covers(const std::set<SubsetMask>& fitted, SubsetMask family)
{
	for (SubsetMask sub = family; sub != 0; sub = (sub - 1) & family)
		if (fitted.count(sub) == 0)
			return false;
	return true;
}

SplitPlan contiguous_plan(const AnalysisConfig& cfg, const NeuralRecording& rec)
{
	switch (cfg.scheme) {
	case SplitScheme::pereira: {
		if (rec.sample_categories.empty())
			throw ValidationError("pereira scheme needs sample_categories in the manifest");
		const auto cats = passage_categories(rec.sample_blocks, rec.sample_categories);
		int per_cat = cfg.passages_per_category;
		if (per_cat == 0)
			per_cat = static_cast<int>(std::count(cats.begin(), cats.end(), cats.front()));
		std::optional<std::uint64_t> selection_seed;
		if (cfg.randomize_selection)
			selection_seed = cfg.seed;
		return plan_pereira(cats, per_cat, rec.sample_blocks, selection_seed);
	}
	case SplitScheme::fedorenko:
		return plan_fedorenko(rec.sample_blocks);
	case SplitScheme::blank:
		return plan_blank(rec.sample_blocks);
	case SplitScheme::generic_grouped:
		return plan_grouped(rec.sample_blocks, cfg.n_folds);
	}
	throw ValidationError("unknown split scheme");
}

FeatureSpace build_derived(const DerivedSpace& d, const NeuralRecording& rec)
{
	FeatureSpace fs;
	if (d.kind == "oasm") {
		fs = build_oasm(rec.n_samples(), rec.sample_blocks, d.sigma);
	} else if (d.kind == "sentence_position") {
		fs = build_sentence_position_from_blocks(rec.sample_blocks);
	} else {
		const auto runs = block_runs(rec.sample_blocks);
		for (const auto& r : runs)
			if (r.size() != kWordsPerSentence)
				throw ValidationError("word position needs every block to hold 8 words");
		fs = build_word_position(static_cast<Index>(runs.size()));
	}
	fs.name = d.name;
	fs.band_group = d.band_group;
	return fs;
}

int count_true(const std::vector<bool>& v)
{
	return static_cast<int>(std::count(v.begin(), v.end(), true));
}

} // namespace

SplitPlan plan_for(const AnalysisConfig& cfg, const NeuralRecording& rec, SplitMode mode)
{
	SplitPlan plan = contiguous_plan(cfg, rec);
	validate_plan(plan, rec.sample_blocks);
	return mode == SplitMode::contiguous ? plan : shuffle_plan(plan, cfg.seed);
}

FeatureSpace derived_space(const DerivedSpace& d, const NeuralRecording& rec)
{
	return build_derived(d, rec);
}

RunReport run_analysis(const AnalysisConfig& config, const std::string& dataset,
		std::vector<FeatureSpace> features, const NeuralRecording& recording)
{
	const auto start = std::chrono::steady_clock::now();
	config.ridge.validate();
	config.search.validate();

	const auto& spaces = config.spaces;
	if (spaces.empty())
		throw ValidationError("no feature spaces declared");
	if (static_cast<int>(spaces.size()) > kMaxDeclaredSpaces)
		throw ValidationError("at most 6 declared spaces are supported (63 subset fits)");
	if (std::set<std::string>(spaces.begin(), spaces.end()).size() != spaces.size())
		throw ValidationError("declared spaces must be unique");

	for (const auto& d : config.derived)
		features.push_back(build_derived(d, recording));
	validate_dataset(features, recording);

	const auto bands = group_bands(features);
	std::vector<FeatureSpace> declared;
	for (const auto& name : spaces) {
		const auto it = std::find_if(bands.begin(), bands.end(),
				[&](const Band& b) { return b.name == name; });
		if (it == bands.end())
			throw ValidationError("unknown feature space '" + name + "'");
		declared.push_back({name, it->data, name});
	}

	const int n_spaces = static_cast<int>(spaces.size());
	const SubsetMask all = (SubsetMask{1} << n_spaces) - 1;
	std::optional<int> llm;
	if (config.llm)
		llm = space_index(spaces, *config.llm);
	std::optional<int> oasm;
	if (config.oasm)
		oasm = space_index(spaces, *config.oasm);

	std::vector<std::pair<std::string, SubsetMask>> families;
	if (config.families.empty()) {
		families.emplace_back(subset_name(all, spaces), all);
	} else {
		for (const auto& f : config.families) {
			const SubsetMask m = mask_of(spaces, f);
			families.emplace_back(subset_name(m, spaces), m);
		}
	}

	std::vector<ModelPair> pairs;
	if (config.tests) {
		pairs = *config.tests;
	} else if (llm && n_spaces > 1) {
		std::vector<std::string> without;
		for (const auto& s : spaces)
			if (s != *config.llm)
				without.push_back(s);
		pairs.push_back({"all_vs_without_" + *config.llm, spaces, without});
	}
	std::vector<std::vector<std::string>> chance;
	if (config.chance_tests)
		chance = *config.chance_tests;
	else if (llm)
		chance.push_back({*config.llm});

	std::set<SubsetMask> to_fit;
	for (const auto& [name, m] : families)
		add_all_subsets(to_fit, m);
	for (const auto& p : pairs) {
		to_fit.insert(mask_of(spaces, p.model_a));
		to_fit.insert(mask_of(spaces, p.model_b));
	}
	for (const auto& c : chance)
		to_fit.insert(mask_of(spaces, c));
	const std::vector<SubsetMask> masks(to_fit.begin(), to_fit.end());

	const SplitPlan contiguous = contiguous_plan(config, recording);
	const auto& participants = recording.unit_participants;

	RunReport report;
	report.dataset = dataset;
	report.config = config;
	report.spaces = spaces;
	report.unit_participants = participants;

	for (const auto mode : config.modes) {
		ModeReport mr;
		mr.mode = mode;
		mr.plan = mode == SplitMode::contiguous ? contiguous : shuffle_plan(contiguous, config.seed);
		validate_plan(mr.plan, recording.sample_blocks);

		BandedSearchConfig search = config.search;
		search.threads = 1;
		std::vector<SubsetFit> fits(masks.size());
		parallel_for(masks.size(), config.threads, [&](std::size_t i) {
			std::vector<FeatureSpace> chosen;
			for (int s = 0; s < n_spaces; ++s)
				if (contains(masks[i], s))
					chosen.push_back(declared[static_cast<std::size_t>(s)]);
			fits[i].mask = masks[i];
			fits[i].name = subset_name(masks[i], spaces);
			fits[i].fit = banded_search(chosen, recording.responses, mr.plan, config.ridge, search);
			fits[i].summary = clip_and_average(fits[i].fit.test_r2, participants);
		});
		mr.subsets = std::move(fits);

		SubsetScores scores;
		std::map<SubsetMask, double> mean_scores;
		for (const auto& s : mr.subsets) {
			scores[s.mask] = s.fit.test_r2;
			mean_scores[s.mask] = s.summary.mean;
		}

		for (const auto& [name, m] : families) {
			FamilyReport fr;
			fr.name = name;
			fr.mask = m;
			fr.r2_star = submodel_max(scores, m);
			fr.summary = clip_and_average(fr.r2_star, participants);
			if (llm && contains(m, *llm)) {
				fr.r2_star_with_llm = submodel_max(scores, m, *llm);
				fr.summary_with_llm = clip_and_average(*fr.r2_star_with_llm, participants);
			}
			mr.families.push_back(std::move(fr));
		}

		if (llm) {
			const SubsetMask llm_bit = SubsetMask{1} << *llm;
			const SubsetMask rest = all & ~llm_bit;
			if (to_fit.count(llm_bit) != 0) {
				const Vector& r2_llm = scores.at(llm_bit);
				for (SubsetMask m = 1; m <= rest; ++m) {
					if ((m & ~rest) != 0 || !covers(to_fit, m | llm_bit))
						continue;
					OmegaRow row;
					row.model = subset_name(m, spaces);
					row.mask = m;
					const Vector m_star = submodel_max(scores, m);
					const Vector m_llm_star = submodel_max(scores, m | llm_bit, *llm);
					row.r2_star = clip_and_average(m_star, participants);
					row.r2_star_with_llm = clip_and_average(m_llm_star, participants);
					try {
						row.omega = omega(m_star, m_llm_star, r2_llm, participants);
					} catch (const DataError& e) {
						row.error = e.what();
					}
					mr.omega.push_back(std::move(row));
				}
			}
			if (oasm && *oasm != *llm) {
				const SubsetMask pair = llm_bit | (SubsetMask{1} << *oasm);
				if (covers(to_fit, pair)) {
					try {
						mr.phi = phi(submodel_max(scores, pair, *llm),
								scores.at(SubsetMask{1} << *oasm), participants);
					} catch (const DataError& e) {
						mr.phi_error = e.what();
					}
				}
			}
		}

		// Tiers need at least one candidate each; skip when the fitted family
		// does not provide them.
		try {
			mr.layered = layered_best(mean_scores, n_spaces);
		} catch (const ValidationError&) {
			mr.layered.clear();
		}

		const Matrix& y = recording.responses;
		for (const auto& p : pairs) {
			TestReport tr;
			tr.name = p.name;
			tr.kind = "paired";
			tr.model_a = mask_of(spaces, p.model_a);
			tr.model_b = mask_of(spaces, p.model_b);
			tr.test = paired_squared_error_ttest(y, mr.subset(tr.model_a).fit.test_predictions,
					mr.subset(tr.model_b).fit.test_predictions);
			tr.rejected = bh_fdr(tr.test.p, participants, config.fdr_level);
			tr.rejected_before_fdr = static_cast<int>((tr.test.p.array() <= config.fdr_level).count());
			tr.rejected_after_fdr = count_true(tr.rejected);
			mr.tests.push_back(std::move(tr));
		}
		for (const auto& c : chance) {
			TestReport tr;
			tr.model_a = mask_of(spaces, c);
			tr.name = "chance_" + subset_name(tr.model_a, spaces);
			tr.kind = "chance";
			const auto& fit = mr.subset(tr.model_a).fit;
			auto ct = chance_level_test(y, fit.test_predictions, fit.intercept_predictions,
					participants, config.fdr_level);
			tr.test = std::move(ct.test);
			tr.rejected = std::move(ct.rejected);
			tr.rejected_before_fdr = static_cast<int>((tr.test.p.array() <= config.fdr_level).count());
			tr.rejected_after_fdr = count_true(tr.rejected);
			mr.tests.push_back(std::move(tr));
		}

		report.modes.push_back(std::move(mr));
	}

	report.elapsed_seconds =
			std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
	return report;
}

RunReport run_analysis(const AnalysisConfig& config)
{
	const auto data = load_manifest(config.manifest);
	return run_analysis(config, data.manifest.dataset_name, data.features, data.recording);
}

namespace {

json summary_json(const ParticipantSummary& s)
{
	return {{"mean", s.mean}, {"sem", s.sem}, {"participants", s.participants},
			{"participant_values", s.values}};
}

std::string file_stem(const std::string& name)
{
	std::string out;
	for (const char c : name)
		out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
	return out;
}

std::string subset_file(const SubsetFit& s)
{
	return "m" + std::to_string(s.mask) + "_" + file_stem(s.name);
}

} // namespace

json report_summary_json(const RunReport& report)
{
	json j;
	j["dataset"] = report.dataset;
	j["config"] = analysis_config_json(report.config);
	j["spaces"] = report.spaces;
	j["modes"] = json::object();
	for (const auto& mr : report.modes) {
		json m;
		m["outer_folds"] = mr.plan.outer.size();
		m["inner_folds"] = mr.plan.outer.empty() ? 0 : mr.plan.outer.front().inner.size();
		m["subsets"] = json::array();
		for (const auto& s : mr.subsets) {
			json js = summary_json(s.summary);
			js["name"] = s.name;
			js["mask"] = s.mask;
			js["file"] = subset_file(s);
			m["subsets"].push_back(std::move(js));
		}
		m["families"] = json::array();
		for (const auto& f : mr.families) {
			json jf;
			jf["name"] = f.name;
			jf["corrected"] = summary_json(f.summary);
			jf["corrected_with_llm"] = f.summary_with_llm ? summary_json(*f.summary_with_llm) : json(nullptr);
			m["families"].push_back(std::move(jf));
		}
		m["omega"] = json::array();
		for (const auto& o : mr.omega) {
			json jo;
			jo["model"] = o.model;
			jo["r2_star"] = summary_json(o.r2_star);
			jo["r2_star_with_llm"] = summary_json(o.r2_star_with_llm);
			jo["omega"] = o.omega ? summary_json(*o.omega) : json(nullptr);
			if (!o.error.empty())
				jo["error"] = o.error;
			m["omega"].push_back(std::move(jo));
		}
		m["phi"] = mr.phi ? summary_json(*mr.phi) : json(nullptr);
		if (!mr.phi_error.empty())
			m["phi_error"] = mr.phi_error;
		m["layered"] = json::array();
		for (const auto& t : mr.layered) {
			m["layered"].push_back({{"space", report.spaces[static_cast<std::size_t>(t.space)]},
					{"best_subset", subset_name(t.best_subset, report.spaces)}, {"score", t.score}});
		}
		m["tests"] = json::array();
		for (const auto& t : mr.tests) {
			m["tests"].push_back({{"name", t.name}, {"kind", t.kind},
					{"model_a", subset_name(t.model_a, report.spaces)},
					{"model_b", t.model_b == 0 ? json(nullptr) : json(subset_name(t.model_b, report.spaces))},
					{"n_units", t.test.t.size()}, {"n_samples", t.test.n_samples},
					{"rejected_before_fdr", t.rejected_before_fdr},
					{"rejected_after_fdr", t.rejected_after_fdr},
					{"file", "tests/" + file_stem(t.name) + ".csv"}});
		}
		j["modes"][to_string(mr.mode)] = std::move(m);
	}
	return j;
}

void write_report(const RunReport& report, const std::filesystem::path& dir)
{
	namespace fs = std::filesystem;
	fs::create_directories(dir);
	{
		std::ofstream f(dir / "summary.json", std::ios::trunc);
		f << report_summary_json(report).dump(2) << '\n';
	}
	{
		std::ofstream f(dir / "run_info.json", std::ios::trunc);
		f << json{{"elapsed_seconds", report.elapsed_seconds}, {"threads", report.config.threads}}.dump(2)
		  << '\n';
	}
	for (const auto& mr : report.modes) {
		const fs::path mdir = dir / to_string(mr.mode);
		fs::create_directories(mdir / "fits");
		fs::create_directories(mdir / "tests");
		{
			std::ofstream f(mdir / "plan.json", std::ios::trunc);
			f << json(mr.plan).dump() << '\n';
		}
		{
			std::ofstream f(mdir / "r2_table.csv", std::ios::trunc);
			f.precision(17);
			f << "unit,participant,subset,r2\n";
			for (const auto& s : mr.subsets)
				for (Index u = 0; u < s.fit.test_r2.size(); ++u)
					f << u << ',' << report.unit_participants[static_cast<std::size_t>(u)] << ','
					  << s.name << ',' << s.fit.test_r2(u) << '\n';
		}
		for (const auto& s : mr.subsets) {
			std::ofstream f(mdir / "fits" / (subset_file(s) + ".json"), std::ios::trunc);
			json j = fit_summary_json(s.fit);
			j["name"] = s.name;
			f << j.dump() << '\n';
		}
		if (report.config.write_predictions && !mr.subsets.empty()) {
			fs::create_directories(mdir / "predictions");
			for (const auto& s : mr.subsets)
				save_matrix(mdir / "predictions" / (subset_file(s) + ".bbsm"), s.fit.test_predictions);
			save_matrix(mdir / "predictions" / "intercept.bbsm",
					mr.subsets.front().fit.intercept_predictions);
		}
		for (const auto& t : mr.tests)
			write_test_csv(mdir / "tests" / (file_stem(t.name) + ".csv"), t.test, t.rejected,
					report.unit_participants);
	}
}

} // namespace encodebench
