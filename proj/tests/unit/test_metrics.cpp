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
#include <numeric>

#include "encodebench/error.hpp"
#include "encodebench/metrics.hpp"
#include "testing.hpp"

using namespace encodebench;

namespace {

Vector vec(std::initializer_list<double> v)
{
	Vector out(static_cast<Index>(v.size()));
	Index i = 0;
	for (const double x : v)
		out(i++) = x;
	return out;
}

Matrix col(std::initializer_list<double> v)
{
	return vec(v);
}

} // namespace

TEST_CASE("r2_oos identities")
{
	std::mt19937_64 rng(1);
	const Matrix y = testing::gaussian(12, 3, rng);
	const Matrix base = Matrix::Constant(12, 3, 0.1);
	CHECK((r2_oos(y, y, base).array() == 1.0).all());
	CHECK((r2_oos(y, base, base).array() == 0.0).all());
	CHECK(r2_oos(col({0, 2}), col({2, 0}), col({1, 1}))(0) == -3.0);
	CHECK_THROWS_AS(r2_oos(col({1, 1}), col({0, 0}), col({1, 1})), DataError);
	CHECK_THROWS_AS(r2_oos(col({1, 1}), col({0, 0, 0}), col({1, 1})), ValidationError);
}

TEST_CASE("r2_oos ignores a common row permutation")
{
	std::mt19937_64 rng(2);
	const Matrix y = testing::gaussian(20, 4, rng);
	const Matrix p = testing::gaussian(20, 4, rng);
	const Matrix b = testing::gaussian(20, 4, rng);
	std::vector<Index> perm(20);
	std::iota(perm.begin(), perm.end(), Index{0});
	std::shuffle(perm.begin(), perm.end(), rng);
	const Vector a = r2_oos(y, p, b);
	const Vector c = r2_oos(y(perm, Eigen::all), p(perm, Eigen::all), b(perm, Eigen::all));
	CHECK((a - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clip and average")
{
	const std::vector<int> one{0, 0};
	const auto s = clip_and_average(vec({-0.5, 0.5}), one);
	CHECK(s.values == std::vector<double>{0.25});
	CHECK(s.mean == 0.25);
	CHECK(s.sem == 0.0);

	const std::vector<int> two{7, 3};
	const auto t = clip_and_average(vec({0.4, 0.2}), two);
	CHECK(t.participants == std::vector<int>{3, 7});
	CHECK(t.mean == doctest::Approx(0.3).epsilon(1e-15));
	CHECK(t.sem == doctest::Approx(0.1).epsilon(1e-14));

	// Non-negative scores: plain mean of participant means.
	const std::vector<int> p{0, 0, 1, 1, 1};
	const auto u = clip_and_average(vec({0.1, 0.3, 0.2, 0.2, 0.5}), p);
	CHECK(u.values[0] == doctest::Approx(0.2).epsilon(1e-15));
	CHECK(u.values[1] == doctest::Approx(0.3).epsilon(1e-15));

	// Clipped units count as exact zeros.
	const std::vector<int> q{0, 0, 0, 1, 1, 1};
	const auto w = clip_and_average(vec({0.3, 0.6, -2.0, 0.9, 0.0, -0.1}), q);
	CHECK(w.values[0] == doctest::Approx(0.3).epsilon(1e-15));
	CHECK(w.values[1] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("sub-model maximum")
{
	SubsetScores s;
	s[0b01] = vec({0.1});
	s[0b10] = vec({0.2});
	s[0b11] = vec({0.15});
	CHECK(submodel_max(s, 0b11)(0) == 0.2);
	CHECK(submodel_max(s, 0b11, 0)(0) == 0.15);
	CHECK(submodel_max(s, 0b01)(0) == 0.1);
	s.erase(0b10);
	CHECK_THROWS_AS(submodel_max(s, 0b11), ValidationError);
	CHECK(submodel_max(s, 0b11, 0)(0) == 0.15);
}

TEST_CASE("sub-model maximum matches exhaustive enumeration")
{
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> r(-0.2, 0.5);
	for (int trial = 0; trial < 20; ++trial) {
		const int n = 1 + trial % 5;
		const Index units = 6;
		SubsetScores s;
		for (SubsetMask m = 1; m < (SubsetMask{1} << n); ++m) {
			Vector v(units);
			for (Index u = 0; u < units; ++u)
				v(u) = r(rng);
			s[m] = v;
		}
		const SubsetMask all = (SubsetMask{1} << n) - 1;
		for (int req = -1; req < n; ++req) {
			Vector ref = Vector::Constant(units, -1e300);
			for (const auto& [m, v] : s) {
				bool member = true;
				for (int b = 0; b < 32; ++b)
					if (((m >> b) & 1u) && !((all >> b) & 1u))
						member = false;
				if (!member || (req >= 0 && !((m >> req) & 1u)))
					continue;
				ref = ref.cwiseMax(v);
			}
			const Vector got = req < 0 ? submodel_max(s, all) : submodel_max(s, all, req);
			CHECK(got == ref);
			if (req >= 0)
				CHECK((got.array() <= submodel_max(s, all).array()).all());
		}
	}
}

TEST_CASE("omega")
{
	const std::vector<int> p{0};
	CHECK(omega(vec({0.03}), vec({0.03}), vec({0.05}), p).mean == 100.0);
	CHECK(omega(vec({0.0}), vec({0.05}), vec({0.05}), p).mean == 0.0);
	CHECK(omega(vec({0.02}), vec({0.03}), vec({0.04}), p).mean == doctest::Approx(75.0).epsilon(1e-12));

	// Strictly decreasing in the gap for a fixed denominator.
	double prev = 101.0;
	for (double gap = 0.0; gap <= 0.04; gap += 0.005) {
		const double v = omega(vec({0.01}), vec({0.01 + gap}), vec({0.04}), p).mean;
		CHECK(v < prev);
		prev = v;
	}

	// Units with non-positive denominators drop out; the cap applies to
	// participant means.
	const std::vector<int> two{0, 0, 1, 1};
	const auto o = omega(vec({0.05, 0.9, 0.02, 0.02}), vec({0.03, 0.1, 0.03, 0.02}),
			vec({0.04, -0.1, 0.04, 0.04}), two);
	CHECK(o.values[0] == 100.0);
	CHECK(o.values[1] == doctest::Approx(87.5).epsilon(1e-12));

	CHECK_THROWS_AS(omega(vec({0.1}), vec({0.1}), vec({0.0}), p), DataError);
}

TEST_CASE("phi")
{
	const std::vector<int> p{0};
	CHECK(phi(vec({0.02}), vec({0.02}), p).mean == 0.0);
	CHECK(phi(vec({0.04}), vec({0.02}), p).mean == 100.0);
	CHECK(phi(vec({0.03}), vec({0.02}), p).mean == doctest::Approx(50.0).epsilon(1e-12));
	// No capping.
	CHECK(phi(vec({0.5}), vec({0.01}), p).mean == doctest::Approx(4900.0).epsilon(1e-12));
	CHECK_THROWS_AS(phi(vec({0.03}), vec({-0.02}), p), DataError);
}
