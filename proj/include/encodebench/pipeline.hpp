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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "encodebench/metrics.hpp"
#include "encodebench/ridge.hpp"
#include "encodebench/splits.hpp"
#include "encodebench/stats.hpp"
#include "encodebench/types.hpp"

namespace encodebench {

inline constexpr int kMaxDeclaredSpaces = 6;

// Feature spaces computed from the recording's block structure rather than
// read from disk. kind is one of "oasm", "sentence_position", "word_position".
struct DerivedSpace {
	std::string name;
	std::string kind;
	double sigma = 0.0;
	std::string band_group;
};

struct ModelPair {
	std::string name;
	std::vector<std::string> model_a; // tested as the better model
	std::vector<std::string> model_b;
};

struct AnalysisConfig {
	std::filesystem::path manifest;
	std::uint64_t seed = 0;

	SplitScheme scheme = SplitScheme::generic_grouped;
	std::vector<SplitMode> modes{SplitMode::contiguous};
	int passages_per_category = 0; // 0: infer from the data
	int n_folds = 5;               // generic-grouped only
	bool randomize_selection = false;

	std::vector<DerivedSpace> derived;
	// Band groups in complexity order, least complex first.
	std::vector<std::string> spaces;
	// Each family is expanded to all of its non-empty subsets. Defaults to
	// one family holding every declared space.
	std::vector<std::vector<std::string>> families;
	std::optional<std::string> llm;
	std::optional<std::string> oasm;

	RidgeConfig ridge;
	BandedSearchConfig search;

	std::optional<std::vector<ModelPair>> tests;
	std::optional<std::vector<std::vector<std::string>>> chance_tests;
	double fdr_level = 0.05;
	bool write_predictions = true;

	int threads = 1; // not part of the report payload
};

// Parses the JSON form. Relative manifest paths resolve against base_dir.
// Unknown keys are rejected.
AnalysisConfig parse_analysis_config(const nlohmann::json& j,
		const std::filesystem::path& base_dir = {});
AnalysisConfig load_analysis_config(const std::filesystem::path& path);
nlohmann::json analysis_config_json(const AnalysisConfig& cfg);

// The split plan the config's scheme produces for this recording. Shuffled
// plans are the contiguous plan relabeled with cfg.seed.
SplitPlan plan_for(const AnalysisConfig& cfg, const NeuralRecording& rec, SplitMode mode);

FeatureSpace derived_space(const DerivedSpace& d, const NeuralRecording& rec);

struct TierBest {
	int space = 0;
	SubsetMask best_subset = 0;
	double score = 0.0;
};

// Space index = complexity rank. Tier k is the best score among subsets
// that contain space k and nothing ranked above it; ties go to the subset
// with fewer spaces, then the smaller mask. Throws ValidationError if a
// score references a space outside the order or a tier has no candidates.
std::vector<TierBest> layered_best(const std::map<SubsetMask, double>& subset_scores, int n_spaces);

struct SubsetFit {
	SubsetMask mask = 0;
	std::string name;
	FitResult fit;
	ParticipantSummary summary; // clipped R2
};

struct FamilyReport {
	std::string name;
	SubsetMask mask = 0;
	Vector r2_star;
	ParticipantSummary summary;
	std::optional<Vector> r2_star_with_llm;
	std::optional<ParticipantSummary> summary_with_llm;
};

struct OmegaRow {
	std::string model;
	SubsetMask mask = 0;
	ParticipantSummary r2_star;
	ParticipantSummary r2_star_with_llm;
	std::optional<ParticipantSummary> omega;
	std::string error; // set when omega is undefined
};

struct TestReport {
	std::string name;
	std::string kind; // "paired" or "chance"
	SubsetMask model_a = 0;
	SubsetMask model_b = 0; // 0 for chance tests
	PairedTest test;
	std::vector<bool> rejected;
	int rejected_before_fdr = 0;
	int rejected_after_fdr = 0;
};

struct ModeReport {
	SplitMode mode = SplitMode::contiguous;
	SplitPlan plan;
	std::vector<SubsetFit> subsets;
	std::vector<FamilyReport> families;
	std::vector<OmegaRow> omega;
	std::optional<ParticipantSummary> phi;
	std::string phi_error;
	std::vector<TierBest> layered;
	std::vector<TestReport> tests;

	const SubsetFit& subset(SubsetMask mask) const;
};

struct RunReport {
	std::string dataset;
	AnalysisConfig config;
	std::vector<std::string> spaces;
	std::vector<int> unit_participants;
	std::vector<ModeReport> modes;
	double elapsed_seconds = 0.0;

	const ModeReport& mode(SplitMode m) const;
};

// Name of a subset as its declared spaces joined with "+", in declared order.
std::string subset_name(SubsetMask mask, const std::vector<std::string>& spaces);

RunReport run_analysis(const AnalysisConfig& config);

// In-memory variant: `features` are the manifest spaces before derived ones
// are appended.
RunReport run_analysis(const AnalysisConfig& config, const std::string& dataset,
		std::vector<FeatureSpace> features, const NeuralRecording& recording);

nlohmann::json report_summary_json(const RunReport& report);

/**
 * Report directory layout:
 *
 *   summary.json                    everything below in condensed form
 *   run_info.json                   timings and thread count
 *   <mode>/r2_table.csv             unit,participant,subset,r2
 *   <mode>/fits/<subset>.json       chosen hyperparameters per fold
 *   <mode>/predictions/<subset>.bbsm  pooled test predictions
 *   <mode>/predictions/intercept.bbsm
 *   <mode>/tests/<name>.csv         unit,participant,t,p,rejected
 *
 * Everything except run_info.json is a pure function of config and data.
 */
void write_report(const RunReport& report, const std::filesystem::path& dir);

} // namespace encodebench
