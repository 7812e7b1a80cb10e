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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "encodebench/splits.hpp"
#include "encodebench/types.hpp"

namespace encodebench {

// {0} followed by 2^k for k = -5..34.
std::vector<double> default_alpha_grid();

// Rows whose column statistics z-score the features: each fit's training
// rows, or every sample. Feature values never depend on the responses, so
// all_rows reads no held-out targets.
enum class Standardization { training_rows, all_rows };

std::string to_string(Standardization s);
Standardization parse_standardization(const std::string& s);

struct RidgeConfig {
	std::vector<double> alphas = default_alpha_grid();
	Standardization standardize = Standardization::training_rows;

	void validate() const;
};

struct BandedSearchConfig {
	int max_iters = 1000;
	int patience = 50;
	double min_improvement = 1e-4;
	double dirichlet_concentration = 1.0;
	std::uint64_t seed = 0;
	int threads = 1;

	void validate() const;
};

/**
 * Ridge with an unpenalized intercept, solved once through the SVD of the
 * centred training design and then evaluated for any number of penalties.
 *
 * For penalty a the weights are V diag(s / (s^2 + a)) U^T Yc. Singular values
 * below max(n, p) * eps * s_max are dropped for every penalty, which makes
 * a = 0 the minimum-norm least-squares solution.
 */
class RidgeSolver {
public:
	RidgeSolver(const Matrix& x_train, const Matrix& y_train);

	Matrix predict(const Matrix& x_eval, double alpha) const;
	Matrix weights(double alpha) const;

	// Per-penalty residual sum of squares on (x_eval, y_eval): one row per
	// penalty, one column per unit.
	Matrix eval_sse(const Matrix& x_eval, const Matrix& y_eval,
			std::span<const double> alphas) const;

	const Vector& singular_values() const { return s_; }
	Index rank() const { return s_.size(); }

private:
	Vector shrink(double alpha) const;

	Eigen::RowVectorXd x_mean_;
	Eigen::RowVectorXd y_mean_;
	Matrix v_;  // p x k
	Vector s_;  // k
	Matrix uty_; // k x units
};

// Predictions on x_eval for each penalty, all units at once.
std::vector<Matrix> ridge_solve(const Matrix& x_train, const Matrix& y_train,
		const Matrix& x_eval, std::span<const double> alphas);

// One band per distinct band_group, in order of first appearance; spaces
// sharing a group are concatenated column-wise.
struct Band {
	std::string name;
	Matrix data;
};
std::vector<Band> group_bands(std::span<const FeatureSpace> features);

// Concatenates the bands with band f multiplied by gamma[f].
Matrix apply_band_scaling(std::span<const Matrix> bands, std::span<const double> gamma);

// Uniform weights over every non-empty subset of bands: singletons first,
// then pairs, ..., ending with the full set. Each size class is ordered
// lexicographically by band index.
std::vector<std::vector<double>> enumerate_masks(int n_bands);

// Hyperparameters picked for one outer fold.
struct FoldSelection {
	Matrix gamma;                 // units x bands
	std::vector<double> alpha;    // per unit
	Vector validation_r2;         // per unit, pooled over inner folds
	int mask_candidates = 0;
	int random_iterations = 0;
	bool early_stopped = false;
	std::vector<double> mean_best_trace; // mean best validation R2 after each candidate
};

struct FitResult {
	std::vector<std::string> band_names;
	std::vector<FoldSelection> folds;
	Matrix test_predictions;      // samples x units, pooled over outer folds
	Matrix intercept_predictions; // training means, pooled the same way
	Vector test_r2;               // pooled R2_oos per unit
};

/**
 * Per-unit banded ridge with nested cross-validation.
 *
 * For every outer fold: candidates are all band masks, then Dirichlet draws.
 * Each candidate is fitted on every inner training set across the penalty
 * grid, and scored per unit on the pooled inner validation predictions. A
 * unit keeps the first (gamma, alpha) reaching its best score; lower alpha
 * wins ties. The random phase stops once the across-unit mean of those best
 * scores has not risen by more than min_improvement for `patience` draws, or
 * after max_iters draws. Winners are refitted on the whole non-test set
 * and predict the test samples.
 *
 * Features are z-scored per fold with training statistics. Draw i of outer
 * fold f uses its own generator seeded from (seed, f, i), so results do not
 * depend on `threads`.
 */
FitResult banded_search(std::span<const FeatureSpace> features, const Matrix& responses,
		const SplitPlan& plan, const RidgeConfig& ridge = {}, const BandedSearchConfig& search = {});

// Best-so-far bookkeeping for the random phase, exposed for testing.
class EarlyStopper {
public:
	EarlyStopper(double reference, int patience, double min_improvement);

	// Feeds the current mean score; returns true when the search should stop.
	bool update(double current);
	int stale() const { return stale_; }

private:
	double reference_;
	int patience_;
	double min_improvement_;
	int stale_ = 0;
};

struct LayerSelection {
	std::size_t best_index = 0;
	std::vector<double> scores; // mean clipped test R2 per candidate
};

struct MultiSeedLayerSelection {
	std::vector<LayerSelection> per_seed;
	double mean_best_score = 0.0;
};

// Fits every candidate feature set and returns the one with the highest mean
// (non-negative clipped) test R2 across units. Ties go to the lower index.
LayerSelection select_best_layer(const std::vector<std::vector<FeatureSpace>>& candidates,
		const Matrix& responses, const SplitPlan& plan, const RidgeConfig& ridge = {},
		const BandedSearchConfig& search = {});

MultiSeedLayerSelection select_best_layer_seeds(
		const std::vector<std::vector<std::vector<FeatureSpace>>>& per_seed_candidates,
		const Matrix& responses, const SplitPlan& plan, const RidgeConfig& ridge = {},
		const BandedSearchConfig& search = {});

nlohmann::json fit_summary_json(const FitResult& fit);

} // namespace encodebench
