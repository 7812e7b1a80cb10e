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

#include <cmath>

#include "encodebench/error.hpp"
#include "encodebench/features.hpp"
#include "testing.hpp"

using namespace encodebench;

namespace {

// Direct discrete convolution with a freshly computed, sum-normalized
// Gaussian truncated at ceil(4 sigma); everything outside [lo, hi] is zero.
Vector convolve_segment(const Vector& x, Index lo, Index hi, double sigma)
{
	const int r = static_cast<int>(std::ceil(4.0 * sigma));
	double z = 0.0;
	for (int k = -r; k <= r; ++k)
		z += std::exp(-(k * k) / (2.0 * sigma * sigma));
	Vector out = Vector::Zero(x.size());
	for (Index i = lo; i <= hi; ++i) {
		double acc = 0.0;
		for (Index j = lo; j <= hi; ++j) {
			const Index d = j - i;
			if (d < -r || d > r)
				continue;
			acc += std::exp(-static_cast<double>(d * d) / (2.0 * sigma * sigma)) / z * x(j);
		}
		out(i) = acc;
	}
	return out;
}

} // namespace

TEST_CASE("gaussian kernel")
{
	const auto k = gaussian_kernel(1.0);
	CHECK(k.size() == 9);
	double total = 0.0;
	for (const double w : k)
		total += w;
	CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
	CHECK(k[0] == k[8]);
	CHECK(gaussian_kernel(0.1).size() == 3);
	CHECK_THROWS_AS(gaussian_kernel(0.0), ValidationError);
}

TEST_CASE("OASM matches a direct convolution of identity columns")
{
	const std::vector<int> one_block{0, 0, 0};
	const Matrix o = build_oasm(3, one_block, 1.0).data;
	for (Index c = 0; c < 3; ++c) {
		const Vector e = Vector::Unit(3, c);
		const Vector ref = convolve_segment(e, 0, 2, 1.0);
		CHECK((o.col(c) - ref).cwiseAbs().maxCoeff() < 1e-15);
	}

	const auto blocks = testing::equal_blocks(3, 5);
	const Matrix big = build_oasm(15, blocks, 1.7).data;
	for (Index c = 0; c < 15; ++c) {
		const Index lo = (c / 5) * 5;
		const Vector ref = convolve_segment(Vector::Unit(15, c), lo, lo + 4, 1.7);
		CHECK((big.col(c) - ref).cwiseAbs().maxCoeff() < 1e-15);
	}
}

TEST_CASE("OASM small sigma is the identity")
{
	const std::vector<int> b{0, 0, 0, 0};
	const Matrix o = build_oasm(4, b, 1e-6).data;
	CHECK((o - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("OASM rows from different blocks are orthogonal")
{
	std::mt19937_64 rng(5);
	for (int trial = 0; trial < 10; ++trial) {
		std::vector<int> blocks;
		std::uniform_int_distribution<int> len(1, 9);
		for (int b = 0; b < 7; ++b)
			blocks.insert(blocks.end(), static_cast<std::size_t>(len(rng)), b);
		std::uniform_real_distribution<double> sig(0.1, 5.0);
		const Index n = static_cast<Index>(blocks.size());
		const Matrix o = build_oasm(n, blocks, sig(rng)).data;
		const Matrix gram = o * o.transpose();
		for (Index i = 0; i < n; ++i)
			for (Index j = 0; j < n; ++j)
				if (blocks[static_cast<std::size_t>(i)] != blocks[static_cast<std::size_t>(j)])
					REQUIRE(gram(i, j) == 0.0);
	}

	const std::vector<int> two{0, 0, 1, 1};
	const Matrix o = build_oasm(4, two, 3.0).data;
	CHECK(o.block(0, 2, 2, 2).isZero(0.0));
	CHECK(o.block(2, 0, 2, 2).isZero(0.0));
}

TEST_CASE("OASM rejects non-contiguous blocks")
{
	const std::vector<int> b{0, 1, 0};
	CHECK_THROWS_AS(build_oasm(3, b, 1.0), ValidationError);
}

TEST_CASE("sigma grid")
{
	const auto g = oasm_sigma_grid();
	REQUIRE(g.size() == 50);
	CHECK(g.front() == 0.1);
	CHECK(g.back() == 5.0);
	for (std::size_t i = 1; i < g.size(); ++i)
		CHECK(g[i] - g[i - 1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("block filter equals per-column convolution")
{
	std::mt19937_64 rng(9);
	const auto blocks = testing::equal_blocks(4, 6);
	const Matrix x = testing::gaussian(24, 3, rng);
	const Matrix f = gaussian_filter_blocks(x, blocks, 1.3);
	for (Index c = 0; c < 3; ++c) {
		Vector ref = Vector::Zero(24);
		for (Index b = 0; b < 4; ++b) {
			Vector seg = Vector::Zero(24);
			seg.segment(b * 6, 6) = x.col(c).segment(b * 6, 6);
			ref += convolve_segment(seg, b * 6, b * 6 + 5, 1.3);
		}
		CHECK((f.col(c) - ref).cwiseAbs().maxCoeff() < 1e-14);
	}
	CHECK(gaussian_filter_blocks(x, blocks, 0.0) == x);
}

TEST_CASE("sentence position")
{
	const std::vector<int> four{4};
	CHECK(build_sentence_position(four).data == Matrix::Identity(4, 4));

	const std::vector<int> threes{3, 3};
	const Matrix sp = build_sentence_position(threes).data;
	CHECK(sp.rows() == 6);
	CHECK(sp.col(3).isZero(0.0));
	for (Index r = 0; r < sp.rows(); ++r)
		CHECK(sp.row(r).sum() == 1.0);

	const std::vector<int> five{5};
	CHECK_THROWS_AS(build_sentence_position(five), ValidationError);

	const std::vector<int> blocks{0, 0, 0, 1, 1, 2};
	const std::vector<int> lens{3, 2, 1};
	CHECK(build_sentence_position_from_blocks(blocks).data == build_sentence_position(lens).data);
}

TEST_CASE("sentence length")
{
	const std::vector<int> c{7, 12};
	Matrix expected(2, 1);
	expected << 7, 12;
	CHECK(build_sentence_length(c).data == expected);
	const std::vector<int> one{1};
	CHECK(build_sentence_length(one).data(0, 0) == 1.0);
	const std::vector<int> zero{0};
	CHECK_THROWS_AS(build_sentence_length(zero), ValidationError);
}

TEST_CASE("word position block matches a direct convolution")
{
	const Matrix wp = build_word_position(3).data;
	REQUIRE(wp.rows() == 24);
	REQUIRE(wp.cols() == 9);
	CHECK(wp(0, 0) == 0.0);
	CHECK(wp(7, 0) == 1.0);
	for (int p = 0; p < 8; ++p)
		CHECK(wp(p, 0) == doctest::Approx(p / 7.0).epsilon(1e-15));

	// Smoothing acts along the position axis, so the one-hot block is the
	// 8x8 identity with every row convolved inside [0, 7].
	for (int p = 0; p < 8; ++p) {
		const Vector ref = convolve_segment(Vector::Unit(8, p), 0, 7, 1.0);
		CHECK((wp.row(p).tail(8).transpose() - ref).cwiseAbs().maxCoeff() < 1e-15);
	}
	CHECK(wp.row(3).tail(8).sum() == doctest::Approx(wp.row(4).tail(8).sum()).epsilon(1e-15));
	CHECK(wp.middleRows(8, 8) == wp.topRows(8));
	CHECK(wp.middleRows(16, 8) == wp.topRows(8));
	CHECK_THROWS_AS(build_word_position(2, 7), ValidationError);
}

TEST_CASE("sum pool")
{
	Matrix t(2, 2);
	t << 1, 1, 2, 2;
	const std::vector<int> both{0, 0};
	Matrix expected(1, 2);
	expected << 3, 3;
	CHECK(sum_pool(t, both) == expected);

	std::mt19937_64 rng(2);
	const Matrix a = testing::gaussian(5, 3, rng);
	const Matrix b = testing::gaussian(5, 3, rng);
	const std::vector<int> id{0, 1, 2, 3, 4};
	CHECK(sum_pool(a, id) == a);

	const std::vector<int> map{0, 0, 1, 1, 1};
	Matrix ref = Matrix::Zero(2, 3);
	for (Index r = 0; r < 5; ++r)
		ref.row(map[static_cast<std::size_t>(r)]) += a.row(r);
	CHECK((sum_pool(a, map) - ref).cwiseAbs().maxCoeff() < 1e-15);

	const Matrix lin = sum_pool(a + b, map) - sum_pool(a, map) - sum_pool(b, map);
	CHECK(lin.cwiseAbs().maxCoeff() < 1e-14);

	const std::vector<int> gap{0, 0, 2, 2, 2};
	CHECK_THROWS_AS(sum_pool(a, gap), ValidationError);
	const std::vector<int> down{0, 1, 0, 1, 1};
	CHECK_THROWS_AS(sum_pool(a, down), ValidationError);
}

TEST_CASE("mean pool variants")
{
	std::vector<Matrix> one{Matrix::Constant(2, 2, 3.5)};
	CHECK(mean_pool_variants(one) == one[0]);
	std::vector<Matrix> two{Matrix::Zero(1, 1), Matrix::Constant(1, 1, 2.0)};
	CHECK(mean_pool_variants(two)(0, 0) == 1.0);

	std::mt19937_64 rng(4);
	std::vector<Matrix> many;
	for (int i = 0; i < 100; ++i)
		many.push_back(testing::gaussian(2, 3, rng));
	Matrix ref = Matrix::Zero(2, 3);
	for (Index r = 0; r < 2; ++r)
		for (Index c = 0; c < 3; ++c) {
			double s = 0.0;
			for (const auto& m : many)
				s += m(r, c);
			ref(r, c) = s / 100.0;
		}
	CHECK((mean_pool_variants(many) - ref).cwiseAbs().maxCoeff() < 1e-14);

	std::vector<Matrix> none;
	CHECK_THROWS_AS(mean_pool_variants(none), ValidationError);
	std::vector<Matrix> mismatched{Matrix::Zero(1, 1), Matrix::Zero(2, 1)};
	CHECK_THROWS_AS(mean_pool_variants(mismatched), ValidationError);
}

TEST_CASE("z-scoring uses training statistics only")
{
	Matrix tr(2, 2);
	tr << 1, 5, 3, 5;
	const auto z = zscore_fit_apply(tr, {});
	CHECK(z.train(0, 0) == -1.0);
	CHECK(z.train(1, 0) == 1.0);
	CHECK(z.train.col(1).isZero(0.0));

	std::mt19937_64 rng(8);
	const Matrix train = testing::gaussian(10, 4, rng) * 3.0 + Matrix::Constant(10, 4, 2.0);
	const Matrix test = testing::gaussian(5, 4, rng);
	const std::vector<Matrix> others{test};
	const auto s = zscore_fit_apply(train, others);
	for (Index c = 0; c < 4; ++c) {
		double mean = 0.0;
		for (Index r = 0; r < 10; ++r)
			mean += train(r, c);
		mean /= 10.0;
		double var = 0.0;
		for (Index r = 0; r < 10; ++r)
			var += (train(r, c) - mean) * (train(r, c) - mean);
		const double sd = std::sqrt(var / 10.0);
		for (Index r = 0; r < 5; ++r)
			CHECK(s.others[0](r, c) == doctest::Approx((test(r, c) - mean) / sd).epsilon(1e-13));
		CHECK(std::abs(s.train.col(c).mean()) < 1e-12);
		const double sd_out = std::sqrt(s.train.col(c).array().square().mean());
		CHECK(std::abs(sd_out - 1.0) < 1e-12);
	}
	CHECK_THROWS_AS(Standardizer::fit(Matrix::Zero(1, 3)), ValidationError);
}
