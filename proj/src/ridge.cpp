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

#include "encodebench/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "encodebench/metrics.hpp"
#include "encodebench/parallel.hpp"

namespace encodebench {

std::vector<double> default_alpha_grid()
{
	std::vector<double> grid{0.0};
	for (int k = -5; k <= 34; ++k)
		grid.push_back(std::ldexp(1.0, k));
	return grid;
}

std::string to_string(Standardization s)
{
	return s == Standardization::all_rows ? "all" : "train";
}

Standardization parse_standardization(const std::string& s)
{
	if (s == "train")
		return Standardization::training_rows;
	if (s == "all")
		return Standardization::all_rows;
	throw ValidationError("standardization must be 'train' or 'all', got '" + s + "'");
}

void RidgeConfig::validate() const
{
	if (alphas.empty())
		throw ValidationError("penalty grid is empty");
	for (std::size_t i = 0; i < alphas.size(); ++i) {
		if (!(alphas[i] >= 0.0) || !std::isfinite(alphas[i]))
			throw ValidationError("penalties must be finite and non-negative");
		if (i > 0 && !(alphas[i] > alphas[i - 1]))
			throw ValidationError("penalty grid must be strictly ascending");
	}
}

void BandedSearchConfig::validate() const
{
	if (patience < 1 || max_iters < patience)
		throw ValidationError("search needs max_iters >= patience >= 1");
	if (!(min_improvement > 0.0))
		throw ValidationError("min_improvement must be positive");
	if (!(dirichlet_concentration > 0.0))
		throw ValidationError("Dirichlet concentration must be positive");
}

RidgeSolver::RidgeSolver(const Matrix& x_train, const Matrix& y_train)
{
	if (x_train.rows() != y_train.rows())
		throw ValidationError("ridge: design and target row counts differ");
	if (x_train.rows() < 2)
		throw ValidationError("ridge: need at least two training rows");
	if (!x_train.allFinite() || !y_train.allFinite())
		throw DataError("ridge: non-finite training data");

	x_mean_ = x_train.colwise().mean();
	y_mean_ = y_train.colwise().mean();
	const Matrix xc = x_train.rowwise() - x_mean_;
	const Matrix yc = y_train.rowwise() - y_mean_;

	Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
	const Vector& s = svd.singularValues();
	Index k = 0;
	if (s.size() > 0 && s(0) > 0.0) {
		const double tol = static_cast<double>(std::max(xc.rows(), xc.cols())) *
				std::numeric_limits<double>::epsilon() * s(0);
		while (k < s.size() && s(k) > tol)
			++k;
	}
	s_ = s.head(k);
	v_ = svd.matrixV().leftCols(k);
	uty_ = svd.matrixU().leftCols(k).transpose() * yc;
}

Vector RidgeSolver::shrink(double alpha) const
{
	return s_.array() / (s_.array().square() + alpha);
}

Matrix RidgeSolver::weights(double alpha) const
{
	return v_ * (shrink(alpha).asDiagonal() * uty_);
}

Matrix RidgeSolver::predict(const Matrix& x_eval, double alpha) const
{
	if (x_eval.cols() != x_mean_.size())
		throw ValidationError("ridge: evaluation design has the wrong width");
	if (!x_eval.allFinite())
		throw DataError("ridge: non-finite evaluation data");
	const Matrix a = (x_eval.rowwise() - x_mean_) * v_;
	Matrix out = a * (shrink(alpha).asDiagonal() * uty_);
	out.rowwise() += y_mean_;
	return out;
}

Matrix RidgeSolver::eval_sse(const Matrix& x_eval, const Matrix& y_eval,
		std::span<const double> alphas) const
{
	if (x_eval.cols() != x_mean_.size() || y_eval.cols() != y_mean_.size() ||
			x_eval.rows() != y_eval.rows())
		throw ValidationError("ridge: evaluation shapes do not match the fit");
	const Matrix a = (x_eval.rowwise() - x_mean_) * v_;
	const Matrix r0 = y_eval.rowwise() - y_mean_;
	Matrix sse(static_cast<Index>(alphas.size()), y_eval.cols());
	Matrix scaled(a.rows(), a.cols());
	for (std::size_t i = 0; i < alphas.size(); ++i) {
		scaled = a * shrink(alphas[i]).asDiagonal();
		sse.row(static_cast<Index>(i)) = (r0 - scaled * uty_).colwise().squaredNorm();
	}
	return sse;
}

std::vector<Matrix> ridge_solve(const Matrix& x_train, const Matrix& y_train,
		const Matrix& x_eval, std::span<const double> alphas)
{
	const RidgeSolver solver(x_train, y_train);
	std::vector<Matrix> out;
	out.reserve(alphas.size());
	for (const double a : alphas)
		out.push_back(solver.predict(x_eval, a));
	return out;
}

std::vector<Band> group_bands(std::span<const FeatureSpace> features)
{
	std::vector<Band> bands;
	for (const auto& fs : features) {
		auto it = std::find_if(bands.begin(), bands.end(),
				[&](const Band& b) { return b.name == fs.band_group; });
		if (it == bands.end()) {
			bands.push_back({fs.band_group, fs.data});
			continue;
		}
		if (it->data.rows() != fs.data.rows())
			throw ValidationError("band '" + fs.band_group + "' mixes row counts");
		Matrix joined(it->data.rows(), it->data.cols() + fs.data.cols());
		joined << it->data, fs.data;
		it->data = std::move(joined);
	}
	return bands;
}

Matrix apply_band_scaling(std::span<const Matrix> bands, std::span<const double> gamma)
{
	if (bands.size() != gamma.size())
		throw ValidationError("one gamma entry per band required");
	if (bands.empty())
		throw ValidationError("no bands to scale");
	Index cols = 0;
	for (std::size_t b = 0; b < bands.size(); ++b) {
		if (gamma[b] < 0.0)
			throw ValidationError("gamma entries must be non-negative");
		if (bands[b].rows() != bands.front().rows())
			throw ValidationError("bands differ in row count");
		cols += bands[b].cols();
	}
	Matrix out(bands.front().rows(), cols);
	Index at = 0;
	for (std::size_t b = 0; b < bands.size(); ++b) {
		out.middleCols(at, bands[b].cols()) = gamma[b] * bands[b];
		at += bands[b].cols();
	}
	return out;
}

std::vector<std::vector<double>> enumerate_masks(int n_bands)
{
	if (n_bands < 1 || n_bands > 16)
		throw ValidationError("mask enumeration supports 1 to 16 bands");
	std::vector<SubsetMask> subsets;
	for (SubsetMask m = 1; m < (SubsetMask{1} << n_bands); ++m)
		subsets.push_back(m);
	// Size first, then lexicographic on the sorted member list.
	auto members = [&](SubsetMask m) {
		std::vector<int> out;
		for (int b = 0; b < n_bands; ++b)
			if (contains(m, b))
				out.push_back(b);
		return out;
	};
	std::stable_sort(subsets.begin(), subsets.end(), [&](SubsetMask a, SubsetMask b) {
		const auto ma = members(a);
		const auto mb = members(b);
		if (ma.size() != mb.size())
			return ma.size() < mb.size();
		return ma < mb;
	});

	std::vector<std::vector<double>> out;
	for (const auto m : subsets) {
		const auto mem = members(m);
		std::vector<double> gamma(static_cast<std::size_t>(n_bands), 0.0);
		for (const int b : mem)
			gamma[static_cast<std::size_t>(b)] = 1.0 / static_cast<double>(mem.size());
		out.push_back(std::move(gamma));
	}
	return out;
}

EarlyStopper::EarlyStopper(double reference, int patience, double min_improvement)
	: reference_(reference), patience_(patience), min_improvement_(min_improvement)
{
}

bool EarlyStopper::update(double current)
{
	if (current - reference_ > min_improvement_) {
		reference_ = current;
		stale_ = 0;
		return false;
	}
	return ++stale_ >= patience_;
}

namespace {

Matrix take_rows(const Matrix& m, const IndexList& rows)
{
	return m(rows, Eigen::all);
}

struct InnerData {
	std::vector<Matrix> train_bands;
	std::vector<Matrix> val_bands;
	Matrix y_train;
	Matrix y_val;
	// Kernel form for designs wider than the training set: per-band Gram
	// matrices of the train-centered bands and centered targets.
	std::vector<Matrix> gram_train;
	std::vector<Matrix> gram_val;
	Matrix yc_train;
	Matrix yc_val;
};

void add_kernels(InnerData& d)
{
	for (std::size_t b = 0; b < d.train_bands.size(); ++b) {
		const Eigen::RowVectorXd mu = d.train_bands[b].colwise().mean();
		const Matrix xt = d.train_bands[b].rowwise() - mu;
		const Matrix xv = d.val_bands[b].rowwise() - mu;
		d.gram_train.push_back(xt * xt.transpose());
		d.gram_val.push_back(xv * xt.transpose());
	}
	const Eigen::RowVectorXd mu = d.y_train.colwise().mean();
	d.yc_train = d.y_train.rowwise() - mu;
	d.yc_val = d.y_val.rowwise() - mu;
}

// Validation residual sums of squares in the kernel form. Equivalent to
// RidgeSolver on the scaled design; eigenvalues below the rank tolerance
// are dropped.
Matrix kernel_eval_sse(const InnerData& d, const std::vector<double>& gamma, Index n_cols,
		std::span<const double> alphas)
{
	const Index n = d.yc_train.rows();
	Matrix k = Matrix::Zero(n, n);
	Matrix kv = Matrix::Zero(d.yc_val.rows(), n);
	for (std::size_t b = 0; b < gamma.size(); ++b) {
		if (gamma[b] > 0.0) {
			const double g2 = gamma[b] * gamma[b];
			k += g2 * d.gram_train[b];
			kv += g2 * d.gram_val[b];
		}
	}
	const Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
	const Vector& lambda = eig.eigenvalues(); // ascending
	Index first = n;
	if (n > 0 && lambda(n - 1) > 0.0) {
		const double tol = static_cast<double>(std::max(n, n_cols)) *
				std::numeric_limits<double>::epsilon() * lambda(n - 1);
		while (first > 0 && lambda(first - 1) > tol)
			--first;
	}
	const Index kept = n - first;
	const Vector l = lambda.tail(kept);
	const Matrix q = eig.eigenvectors().rightCols(kept);
	const Matrix a = kv * q;
	const Matrix qty = q.transpose() * d.yc_train;
	Matrix sse(static_cast<Index>(alphas.size()), d.yc_val.cols());
	Matrix scaled(a.rows(), a.cols());
	for (std::size_t i = 0; i < alphas.size(); ++i) {
		scaled = a * (l.array() + alphas[i]).inverse().matrix().asDiagonal();
		sse.row(static_cast<Index>(i)) = (d.yc_val - scaled * qty).colwise().squaredNorm();
	}
	return sse;
}

// Builds the design for one gamma, leaving out bands scaled to zero.
Matrix scaled_design(const std::vector<Matrix>& bands, const std::vector<double>& gamma)
{
	std::vector<Matrix> kept;
	std::vector<double> g;
	for (std::size_t b = 0; b < bands.size(); ++b) {
		if (gamma[b] > 0.0) {
			kept.push_back(bands[b]);
			g.push_back(gamma[b]);
		}
	}
	return apply_band_scaling(kept, g);
}

std::vector<double> draw_dirichlet(std::uint64_t seed, std::size_t fold, int iter,
		std::size_t n_bands, double concentration)
{
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
			static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(iter)};
	std::mt19937_64 rng(seq);
	std::gamma_distribution<double> draw(concentration, 1.0);
	std::vector<double> g(n_bands);
	double total = 0.0;
	while (total <= 0.0) {
		total = 0.0;
		for (auto& v : g) {
			v = draw(rng);
			total += v;
		}
	}
	for (auto& v : g)
		v /= total;
	return g;
}

struct FoldOutcome {
	FoldSelection selection;
	Matrix test_pred;
	Matrix intercept_pred;
};

FoldOutcome search_outer_fold(const std::vector<Band>& bands, const Matrix& responses,
		const OuterFold& fold, std::size_t fold_index, const RidgeConfig& ridge,
		const BandedSearchConfig& search)
{
	const std::size_t n_bands = bands.size();
	const Index n_units = responses.cols();
	const auto n_alpha = static_cast<Index>(ridge.alphas.size());

	Index total_cols = 0;
	for (const auto& band : bands)
		total_cols += band.data.cols();

	std::vector<InnerData> inner;
	Eigen::RowVectorXd sse_base = Eigen::RowVectorXd::Zero(n_units);
	for (const auto& in : fold.inner) {
		InnerData d;
		for (const auto& band : bands) {
			const Standardizer st = ridge.standardize == Standardization::all_rows
					? Standardizer::fit(band.data)
					: Standardizer::fit(take_rows(band.data, in.train));
			d.train_bands.push_back(st.apply(take_rows(band.data, in.train)));
			d.val_bands.push_back(st.apply(take_rows(band.data, in.validation)));
		}
		d.y_train = take_rows(responses, in.train);
		d.y_val = take_rows(responses, in.validation);
		const Eigen::RowVectorXd mu = d.y_train.colwise().mean();
		sse_base += (d.y_val.rowwise() - mu).colwise().squaredNorm();
		if (n_bands > 1 && total_cols > d.y_train.rows())
			add_kernels(d);
		inner.push_back(std::move(d));
	}
	for (Index u = 0; u < n_units; ++u) {
		if (sse_base(u) == 0.0)
			throw DataError("unit " + std::to_string(u) +
					" is constant on the validation data; R2 is undefined");
	}

	std::vector<std::vector<double>> candidates;
	Vector best_r2 = Vector::Constant(n_units, -std::numeric_limits<double>::infinity());
	std::vector<int> best_candidate(static_cast<std::size_t>(n_units), -1);
	std::vector<int> best_alpha(static_cast<std::size_t>(n_units), 0);
	FoldSelection sel;

	auto evaluate = [&](const std::vector<double>& gamma) {
		Matrix sse = Matrix::Zero(n_alpha, n_units);
		for (const auto& d : inner) {
			if (!d.gram_train.empty()) {
				Index cols = 0;
				for (std::size_t b = 0; b < n_bands; ++b)
					cols += gamma[b] > 0.0 ? bands[b].data.cols() : 0;
				sse += kernel_eval_sse(d, gamma, cols, ridge.alphas);
				continue;
			}
			const RidgeSolver solver(scaled_design(d.train_bands, gamma), d.y_train);
			sse += solver.eval_sse(scaled_design(d.val_bands, gamma), d.y_val, ridge.alphas);
		}
		const int cand = static_cast<int>(candidates.size());
		candidates.push_back(gamma);
		for (Index u = 0; u < n_units; ++u) {
			for (Index a = 0; a < n_alpha; ++a) {
				const double r2 = 1.0 - sse(a, u) / sse_base(u);
				if (r2 > best_r2(u)) {
					best_r2(u) = r2;
					best_candidate[static_cast<std::size_t>(u)] = cand;
					best_alpha[static_cast<std::size_t>(u)] = static_cast<int>(a);
				}
			}
		}
		sel.mean_best_trace.push_back(best_r2.mean());
	};

	for (const auto& mask : enumerate_masks(static_cast<int>(n_bands)))
		evaluate(mask);
	sel.mask_candidates = static_cast<int>(candidates.size());

	// With one band every draw is [1], already covered by the mask phase.
	if (n_bands > 1) {
		EarlyStopper stopper(best_r2.mean(), search.patience, search.min_improvement);
		for (int it = 0; it < search.max_iters; ++it) {
			evaluate(draw_dirichlet(search.seed, fold_index, it, n_bands,
					search.dirichlet_concentration));
			sel.random_iterations = it + 1;
			if (stopper.update(best_r2.mean())) {
				sel.early_stopped = true;
				break;
			}
		}
	}

	// Refit winners on all non-test samples.
	std::vector<Matrix> train_bands;
	std::vector<Matrix> test_bands;
	for (const auto& band : bands) {
		const Standardizer st = ridge.standardize == Standardization::all_rows
				? Standardizer::fit(band.data)
				: Standardizer::fit(take_rows(band.data, fold.train));
		train_bands.push_back(st.apply(take_rows(band.data, fold.train)));
		test_bands.push_back(st.apply(take_rows(band.data, fold.test)));
	}
	const Matrix y_train = take_rows(responses, fold.train);

	FoldOutcome out;
	out.test_pred.resize(static_cast<Index>(fold.test.size()), n_units);
	out.intercept_pred.resize(static_cast<Index>(fold.test.size()), n_units);
	out.intercept_pred.rowwise() = y_train.colwise().mean();

	std::map<int, std::vector<Index>> units_by_candidate;
	for (Index u = 0; u < n_units; ++u)
		units_by_candidate[best_candidate[static_cast<std::size_t>(u)]].push_back(u);
	for (const auto& [cand, units] : units_by_candidate) {
		const auto& gamma = candidates[static_cast<std::size_t>(cand)];
		const RidgeSolver solver(scaled_design(train_bands, gamma), y_train(Eigen::all, units));
		const Matrix x_test = scaled_design(test_bands, gamma);
		std::map<int, std::vector<Index>> by_alpha;
		for (std::size_t k = 0; k < units.size(); ++k)
			by_alpha[best_alpha[static_cast<std::size_t>(units[k])]].push_back(static_cast<Index>(k));
		for (const auto& [a, local] : by_alpha) {
			const Matrix pred = solver.predict(x_test, ridge.alphas[static_cast<std::size_t>(a)]);
			for (const Index k : local)
				out.test_pred.col(units[static_cast<std::size_t>(k)]) = pred.col(k);
		}
	}

	sel.gamma.resize(n_units, static_cast<Index>(n_bands));
	sel.alpha.resize(static_cast<std::size_t>(n_units));
	for (Index u = 0; u < n_units; ++u) {
		const auto& gamma = candidates[static_cast<std::size_t>(best_candidate[static_cast<std::size_t>(u)])];
		for (std::size_t b = 0; b < n_bands; ++b)
			sel.gamma(u, static_cast<Index>(b)) = gamma[b];
		sel.alpha[static_cast<std::size_t>(u)] =
				ridge.alphas[static_cast<std::size_t>(best_alpha[static_cast<std::size_t>(u)])];
	}
	sel.validation_r2 = best_r2;
	out.selection = std::move(sel);
	return out;
}

} // namespace

FitResult banded_search(std::span<const FeatureSpace> features, const Matrix& responses,
		const SplitPlan& plan, const RidgeConfig& ridge, const BandedSearchConfig& search)
{
	ridge.validate();
	search.validate();
	if (features.empty())
		throw ValidationError("banded search needs at least one feature space");
	if (plan.n_samples != responses.rows())
		throw ValidationError("split plan size does not match the responses");
	if (!responses.allFinite())
		throw DataError("responses contain non-finite values");
	const auto bands = group_bands(features);
	if (bands.size() > 16)
		throw ValidationError("at most 16 bands are supported");
	for (const auto& b : bands) {
		if (b.data.rows() != responses.rows())
			throw ValidationError("band '" + b.name + "' row count differs from responses");
	}

	std::vector<FoldOutcome> outcomes(plan.outer.size());
	parallel_for(plan.outer.size(), search.threads, [&](std::size_t f) {
		outcomes[f] = search_outer_fold(bands, responses, plan.outer[f], f, ridge, search);
	});

	FitResult fit;
	for (const auto& b : bands)
		fit.band_names.push_back(b.name);
	fit.test_predictions = Matrix::Zero(responses.rows(), responses.cols());
	fit.intercept_predictions = Matrix::Zero(responses.rows(), responses.cols());
	for (std::size_t f = 0; f < plan.outer.size(); ++f) {
		const auto& test = plan.outer[f].test;
		for (std::size_t i = 0; i < test.size(); ++i) {
			fit.test_predictions.row(test[i]) = outcomes[f].test_pred.row(static_cast<Index>(i));
			fit.intercept_predictions.row(test[i]) = outcomes[f].intercept_pred.row(static_cast<Index>(i));
		}
		fit.folds.push_back(std::move(outcomes[f].selection));
	}
	fit.test_r2 = r2_oos(responses, fit.test_predictions, fit.intercept_predictions);
	return fit;
}

LayerSelection select_best_layer(const std::vector<std::vector<FeatureSpace>>& candidates,
		const Matrix& responses, const SplitPlan& plan, const RidgeConfig& ridge,
		const BandedSearchConfig& search)
{
	if (candidates.empty())
		throw ValidationError("no candidate layers");
	LayerSelection out;
	double best = -std::numeric_limits<double>::infinity();
	for (std::size_t c = 0; c < candidates.size(); ++c) {
		const auto fit = banded_search(candidates[c], responses, plan, ridge, search);
		const double score = fit.test_r2.cwiseMax(0.0).mean();
		out.scores.push_back(score);
		if (score > best) {
			best = score;
			out.best_index = c;
		}
	}
	return out;
}

MultiSeedLayerSelection select_best_layer_seeds(
		const std::vector<std::vector<std::vector<FeatureSpace>>>& per_seed_candidates,
		const Matrix& responses, const SplitPlan& plan, const RidgeConfig& ridge,
		const BandedSearchConfig& search)
{
	if (per_seed_candidates.empty())
		throw ValidationError("no seeds given");
	MultiSeedLayerSelection out;
	double total = 0.0;
	for (const auto& cands : per_seed_candidates) {
		out.per_seed.push_back(select_best_layer(cands, responses, plan, ridge, search));
		total += out.per_seed.back().scores[out.per_seed.back().best_index];
	}
	out.mean_best_score = total / static_cast<double>(per_seed_candidates.size());
	return out;
}

nlohmann::json fit_summary_json(const FitResult& fit)
{
	nlohmann::json j;
	j["bands"] = fit.band_names;
	j["test_r2"] = std::vector<double>(fit.test_r2.data(), fit.test_r2.data() + fit.test_r2.size());
	j["folds"] = nlohmann::json::array();
	for (const auto& f : fit.folds) {
		nlohmann::json jf;
		jf["mask_candidates"] = f.mask_candidates;
		jf["random_iterations"] = f.random_iterations;
		jf["early_stopped"] = f.early_stopped;
		jf["alpha"] = f.alpha;
		jf["validation_r2"] = std::vector<double>(f.validation_r2.data(),
				f.validation_r2.data() + f.validation_r2.size());
		nlohmann::json gammas = nlohmann::json::array();
		for (Index u = 0; u < f.gamma.rows(); ++u) {
			std::vector<double> row(static_cast<std::size_t>(f.gamma.cols()));
			for (Index b = 0; b < f.gamma.cols(); ++b)
				row[static_cast<std::size_t>(b)] = f.gamma(u, b);
			gammas.push_back(row);
		}
		jf["gamma"] = std::move(gammas);
		j["folds"].push_back(std::move(jf));
	}
	return j;
}

} // namespace encodebench
