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

#include <doctest.h>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "encodebench/oasm_sweep.hpp"
#include "encodebench/ridge.hpp"
#include "encodebench/synthgen.hpp"
#include "oracles.hpp"
#include "testing.hpp"

using namespace encodebench;

namespace {

struct Problem {
	std::vector<int> blocks;
	SplitPlan plan;
	std::vector<FeatureSpace> features;
	Matrix y;
	Index n_signal_units = 0;
};

// Band 0 drives the first `signal_units` units; band 1 is unrelated noise.
Problem two_band_problem(std::uint64_t seed, Index units, Index signal_units)
{
	std::mt19937_64 rng(seed);
	Problem p;
	p.blocks = testing::equal_blocks(20, 5);
	p.plan = plan_grouped(p.blocks, 5);
	const Matrix x0 = testing::gaussian(100, 4, rng);
	const Matrix x1 = testing::gaussian(100, 6, rng);
	p.features = {{"A", x0, "A"}, {"B", x1, "B"}};
	p.y = testing::gaussian(100, units, rng);
	p.y.leftCols(signal_units) += 2.0 * x0 * testing::gaussian(4, signal_units, rng);
	p.n_signal_units = signal_units;
	return p;
}

} // namespace

TEST_CASE("single band search is plain alpha selection")
{
	std::mt19937_64 rng(31);
	const auto blocks = testing::equal_blocks(12, 4);
	const auto plan = plan_grouped(blocks, 4);
	const Matrix x = testing::gaussian(48, 6, rng);
	const Matrix y = x * testing::gaussian(6, 5, rng) + 3.0 * testing::gaussian(48, 5, rng);
	const std::vector<FeatureSpace> fs{{"X", x, "X"}};

	const auto fit = banded_search(fs, y, plan);
	const auto ref = testing::plain_alpha_selection(x, y, plan, default_alpha_grid());
	for (std::size_t f = 0; f < plan.outer.size(); ++f) {
		CHECK(fit.folds[f].alpha == ref.alpha[f]);
		CHECK(fit.folds[f].random_iterations == 0);
		CHECK(fit.folds[f].mask_candidates == 1);
		CHECK((fit.folds[f].gamma.array() == 1.0).all());
	}
	CHECK((fit.test_predictions - ref.test_predictions).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("all-row standardization")
{
	std::mt19937_64 rng(32);
	const auto blocks = testing::equal_blocks(12, 4);
	const auto plan = plan_grouped(blocks, 4);
	const Matrix x = testing::gaussian(48, 5, rng);
	const Matrix y = x * testing::gaussian(5, 4, rng) + 2.0 * testing::gaussian(48, 4, rng);
	const std::vector<FeatureSpace> fs{{"X", x, "X"}};
	RidgeConfig ridge;
	ridge.standardize = Standardization::all_rows;
	const auto fit = banded_search(fs, y, plan, ridge);
	const auto ref = testing::plain_alpha_selection(x, y, plan, default_alpha_grid(), true);
	for (std::size_t f = 0; f < plan.outer.size(); ++f)
		CHECK(fit.folds[f].alpha == ref.alpha[f]);
	CHECK((fit.test_predictions - ref.test_predictions).cwiseAbs().maxCoeff() < 1e-12);

	CHECK(parse_standardization("all") == Standardization::all_rows);
	CHECK(to_string(Standardization::training_rows) == "train");
	CHECK_THROWS_AS(parse_standardization("some"), ValidationError);
}

TEST_CASE("search recovers the signal-bearing band")
{
	const auto p = two_band_problem(5, 30, 20);
	BandedSearchConfig cfg;
	cfg.seed = 3;
	const auto fit = banded_search(p.features, p.y, p.plan, {}, cfg);
	int hits = 0, total = 0;
	for (const auto& f : fit.folds) {
		for (Index u = 0; u < p.n_signal_units; ++u) {
			++total;
			if (f.gamma(u, 0) > 0.5)
				++hits;
		}
		CHECK(f.random_iterations <= cfg.max_iters);
		CHECK(f.mask_candidates == 3);
		for (Index u = 0; u < f.gamma.rows(); ++u)
			CHECK(f.gamma.row(u).sum() == doctest::Approx(1.0).epsilon(1e-12));
	}
	CHECK(hits >= 0.9 * total);
	CHECK(fit.test_r2.head(p.n_signal_units).mean() > 0.5);
}

TEST_CASE("search never loses to the best single band on validation data")
{
	const auto p = two_band_problem(9, 12, 6);
	const auto fit = banded_search(p.features, p.y, p.plan);
	const std::vector<FeatureSpace> a{p.features[0]}, b{p.features[1]};
	const auto fa = banded_search(a, p.y, p.plan);
	const auto fb = banded_search(b, p.y, p.plan);
	for (std::size_t f = 0; f < p.plan.outer.size(); ++f)
		for (Index u = 0; u < p.y.cols(); ++u) {
			const double single = std::max(fa.folds[f].validation_r2(u), fb.folds[f].validation_r2(u));
			CHECK(fit.folds[f].validation_r2(u) >= single - 1e-12);
		}
}

TEST_CASE("wide designs score candidates like the direct solver")
{
	std::mt19937_64 rng(21);
	const auto blocks = testing::equal_blocks(12, 5);
	const auto plan = plan_grouped(blocks, 4);
	const Matrix x0 = testing::gaussian(60, 30, rng);
	const Matrix x1 = testing::gaussian(60, 50, rng);
	const std::vector<FeatureSpace> fs{{"A", x0, "A"}, {"B", x1, "B"}};
	Matrix y = testing::gaussian(60, 6, rng);
	y += 0.3 * x0 * testing::gaussian(30, 6, rng);
	BandedSearchConfig cfg;
	cfg.max_iters = 10;
	cfg.patience = 5;
	const auto fit = banded_search(fs, y, plan, {}, cfg);

	const auto take = [](const Matrix& m, const IndexList& rows) { return Matrix(m(rows, Eigen::all)); };
	for (std::size_t f = 0; f < plan.outer.size(); ++f) {
		const auto& sel = fit.folds[f];
		for (Index u = 0; u < y.cols(); ++u) {
			double sse = 0.0, base = 0.0;
			for (const auto& in : plan.outer[f].inner) {
				std::vector<Matrix> tr, va;
				for (const auto& band : fs) {
					const auto st = Standardizer::fit(take(band.data, in.train));
					tr.push_back(st.apply(take(band.data, in.train)));
					va.push_back(st.apply(take(band.data, in.validation)));
				}
				const std::vector<double> g{sel.gamma(u, 0), sel.gamma(u, 1)};
				const Matrix yt = take(y, in.train).col(u);
				const Matrix yv = take(y, in.validation).col(u);
				const RidgeSolver solver(apply_band_scaling(tr, g), yt);
				const double a = sel.alpha[static_cast<std::size_t>(u)];
				sse += (yv - solver.predict(apply_band_scaling(va, g), a)).squaredNorm();
				base += (yv.array() - yt.mean()).square().sum();
			}
			CHECK(sel.validation_r2(u) == doctest::Approx(1.0 - sse / base).epsilon(1e-8));
		}
	}
}

TEST_CASE("results do not depend on thread count")
{
	const auto p = two_band_problem(13, 10, 5);
	BandedSearchConfig one, many;
	one.seed = many.seed = 99;
	one.threads = 1;
	many.threads = 4;
	const auto a = banded_search(p.features, p.y, p.plan, {}, one);
	const auto b = banded_search(p.features, p.y, p.plan, {}, many);
	CHECK(a.test_predictions == b.test_predictions);
	CHECK(fit_summary_json(a) == fit_summary_json(b));

	BandedSearchConfig other = one;
	other.seed = 100;
	const auto c = banded_search(p.features, p.y, p.plan, {}, other);
	CHECK(fit_summary_json(c)["folds"][0]["random_iterations"].is_number());
}

TEST_CASE("early stopping rule")
{
	EarlyStopper flat(0.2, 50, 1e-4);
	int calls = 0;
	while (!flat.update(0.2))
		++calls;
	CHECK(calls + 1 == 50);

	// Sub-threshold creep accumulates against the last accepted reference.
	EarlyStopper creep(0.0, 50, 1e-4);
	CHECK_FALSE(creep.update(0.6e-4));
	CHECK(creep.stale() == 1);
	CHECK_FALSE(creep.update(1.2e-4));
	CHECK(creep.stale() == 0);

	EarlyStopper exact(0.0, 3, 1e-4);
	CHECK_FALSE(exact.update(1e-4));
	CHECK_FALSE(exact.update(1e-4));
	CHECK(exact.update(1e-4));
}

TEST_CASE("random phase stops on a plateau and respects the cap")
{
	// Pure noise responses: nothing improves after the mask phase.
	std::mt19937_64 rng(4);
	const auto blocks = testing::equal_blocks(10, 4);
	const auto plan = plan_grouped(blocks, 5);
	const std::vector<FeatureSpace> fs{{"A", testing::gaussian(40, 3, rng), "A"},
			{"B", testing::gaussian(40, 3, rng), "B"}};
	const Matrix y = testing::gaussian(40, 4, rng);
	BandedSearchConfig cfg;
	const auto fit = banded_search(fs, y, plan, {}, cfg);
	for (const auto& f : fit.folds) {
		CHECK(f.random_iterations <= 1000);
		CHECK(f.random_iterations >= 50);
		if (f.early_stopped) {
			const auto& t = f.mean_best_trace;
			const std::size_t last = t.size() - 1;
			CHECK(t[last] - t[last - 50] <= 1e-4);
		}
	}

	cfg.max_iters = 60;
	cfg.patience = 60;
	cfg.min_improvement = 1e9;
	const auto capped = banded_search(fs, y, plan, {}, cfg);
	for (const auto& f : capped.folds) {
		CHECK(f.random_iterations == 60);
		CHECK(f.early_stopped);
	}
}

TEST_CASE("config validation")
{
	BandedSearchConfig cfg;
	cfg.patience = 2000;
	CHECK_THROWS_AS(cfg.validate(), ValidationError);
	cfg = {};
	cfg.min_improvement = 0.0;
	CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("best layer selection")
{
	const auto p = two_band_problem(21, 20, 20);
	const std::vector<std::vector<FeatureSpace>> cands{{p.features[0]}, {p.features[1]}};
	const auto sel = select_best_layer(cands, p.y, p.plan);
	CHECK(sel.best_index == 0);
	CHECK(sel.scores[0] > sel.scores[1]);

	const std::vector<std::vector<FeatureSpace>> dup{{p.features[1]}, {p.features[1]}};
	const auto tie = select_best_layer(dup, p.y, p.plan);
	CHECK(tie.scores[0] == tie.scores[1]);
	CHECK(tie.best_index == 0);

	const std::vector<std::vector<FeatureSpace>> one{{p.features[1]}};
	CHECK(select_best_layer(one, p.y, p.plan).best_index == 0);
	CHECK_THROWS_AS(select_best_layer({}, p.y, p.plan), ValidationError);

	const std::vector<std::vector<std::vector<FeatureSpace>>> seeds{cands, dup};
	const auto ms = select_best_layer_seeds(seeds, p.y, p.plan);
	REQUIRE(ms.per_seed.size() == 2);
	CHECK(ms.mean_best_score ==
			doctest::Approx((sel.scores[0] + tie.scores[0]) / 2.0).epsilon(1e-15));
}

TEST_CASE("sigma sweep recovers the generating width")
{
	SynthSpec spec;
	spec.block_ids = testing::equal_blocks(20, 8);
	spec.n_samples = 160;
	spec.n_units = 100;
	spec.participants.assign(100, 0);
	spec.signal_features = {{build_oasm(160, spec.block_ids, 2.0), 1.0}};
	spec.signal_scale = 1.0;
	spec.noise_scale = 0.5;
	spec.seed = 17;
	const auto data = generate(spec);
	const auto plan = shuffle_plan(plan_grouped(spec.block_ids, 4), 5);

	// OASM columns of held-out samples are almost empty on the training rows,
	// so training-row statistics inflate them; the recovery needs all rows.
	RidgeConfig ridge;
	ridge.standardize = Standardization::all_rows;
	const auto sweep = sweep_oasm_sigma(data.recording.responses, spec.block_ids, plan, ridge);
	REQUIRE(sweep.sigmas.size() == 50);
	CHECK(sweep.best_sigma >= 1.7);
	CHECK(sweep.best_sigma <= 2.3);
}

TEST_CASE("sigma sweep ties keep the smaller width")
{
	// With single-sample blocks and widths this small, every off-centre tap
	// is clipped away and the centre tap rounds to exactly 1, so both widths
	// give the identity design and tie exactly.
	SynthSpec spec;
	spec.block_ids.resize(30);
	for (int i = 0; i < 30; ++i)
		spec.block_ids[static_cast<std::size_t>(i)] = i;
	spec.n_samples = 30;
	spec.n_units = 5;
	spec.participants.assign(5, 0);
	spec.seed = 2;
	const auto data = generate(spec);
	const auto plan = plan_grouped(spec.block_ids, 3);
	CHECK(build_oasm(30, spec.block_ids, 0.11).data == Matrix::Identity(30, 30));
	const std::vector<double> grid{0.11, 0.1};
	const auto sweep = sweep_oasm_sigma(data.recording.responses, spec.block_ids, plan, {}, {}, grid);
	CHECK(sweep.sigmas == std::vector<double>{0.1, 0.11});
	CHECK(sweep.scores[0] == sweep.scores[1]);
	CHECK(sweep.best_sigma == 0.1);
}
