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

#include "encodebench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "encodebench/error.hpp"

namespace encodebench {

namespace {

// Continued fraction for I_x(a, b) without the front factor; converges for
// x < (a + 1) / (a + b + 2).
double beta_cf(double a, double b, double x)
{
	constexpr int kMaxIter = 10000;
	constexpr double kEps = 1e-16;
	constexpr double kTiny = 1e-300;
	const double qab = a + b;
	const double qap = a + 1.0;
	const double qam = a - 1.0;
	double c = 1.0;
	double d = 1.0 - qab * x / qap;
	if (std::abs(d) < kTiny)
		d = kTiny;
	d = 1.0 / d;
	double h = d;
	for (int m = 1; m <= kMaxIter; ++m) {
		const int m2 = 2 * m;
		double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
		d = 1.0 + aa * d;
		if (std::abs(d) < kTiny)
			d = kTiny;
		c = 1.0 + aa / c;
		if (std::abs(c) < kTiny)
			c = kTiny;
		d = 1.0 / d;
		h *= d * c;
		aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
		d = 1.0 + aa * d;
		if (std::abs(d) < kTiny)
			d = kTiny;
		c = 1.0 + aa / c;
		if (std::abs(c) < kTiny)
			c = kTiny;
		d = 1.0 / d;
		const double del = d * c;
		h *= del;
		if (std::abs(del - 1.0) < kEps)
			return h;
	}
	throw DataError("incomplete beta continued fraction did not converge");
}

// I_x(a, b) given both x and its complement, so callers can avoid forming
// 1 - x when it would cancel.
double incomplete_beta_pair(double a, double b, double x, double xc)
{
	if (x <= 0.0)
		return 0.0;
	if (xc <= 0.0)
		return 1.0;
	const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
			a * std::log(x) + b * std::log(xc);
	const double front = std::exp(log_front);
	if (x < (a + 1.0) / (a + b + 2.0))
		return front * beta_cf(a, b, x) / a;
	return 1.0 - front * beta_cf(b, a, xc) / b;
}

} // namespace

double incomplete_beta(double a, double b, double x)
{
	if (!(a > 0.0) || !(b > 0.0))
		throw DataError("incomplete beta needs positive shape parameters");
	if (x < 0.0 || x > 1.0 || std::isnan(x))
		throw DataError("incomplete beta argument outside [0, 1]");
	return incomplete_beta_pair(a, b, x, 1.0 - x);
}

double student_t_cdf(double t, double df)
{
	if (!(df > 0.0))
		throw DataError("t distribution needs positive degrees of freedom");
	if (std::isnan(t))
		throw DataError("t statistic is NaN");
	if (std::isinf(t))
		return t > 0 ? 1.0 : 0.0;
	const double t2 = t * t;
	const double x = df / (df + t2);
	const double xc = t2 / (df + t2);
	const double tail = 0.5 * incomplete_beta_pair(0.5 * df, 0.5, x, xc);
	return t < 0.0 ? tail : 1.0 - tail;
}

PairedTest paired_squared_error_ttest(const Matrix& y_true, const Matrix& pred_a,
		const Matrix& pred_b)
{
	if (y_true.rows() != pred_a.rows() || y_true.cols() != pred_a.cols() ||
			y_true.rows() != pred_b.rows() || y_true.cols() != pred_b.cols())
		throw ValidationError("paired test: shape mismatch");
	const Index n = y_true.rows();
	if (n < 3)
		throw ValidationError("paired test needs at least 3 samples");

	PairedTest out;
	out.n_samples = n;
	out.t.resize(y_true.cols());
	out.p.resize(y_true.cols());
	const double dn = static_cast<double>(n);
	for (Index u = 0; u < y_true.cols(); ++u) {
		const Vector d = (y_true.col(u) - pred_a.col(u)).array().square() -
				(y_true.col(u) - pred_b.col(u)).array().square();
		const double mean = d.sum() / dn;
		const double var = (d.array() - mean).square().sum() / (dn - 1.0);
		if (var == 0.0) {
			if (mean != 0.0)
				throw DataError("paired test: unit " + std::to_string(u) +
						" has constant nonzero squared-error differences");
			out.t(u) = 0.0;
			out.p(u) = 0.5;
			continue;
		}
		out.t(u) = mean / (std::sqrt(var) / std::sqrt(dn));
		out.p(u) = student_t_cdf(out.t(u), dn - 1.0);
	}
	return out;
}

std::vector<bool> bh_fdr(const Vector& p_values, std::span<const int> participants, double level)
{
	if (static_cast<Index>(participants.size()) != p_values.size())
		throw ValidationError("one participant id per p-value required");
	std::map<int, std::vector<Index>> groups;
	for (Index u = 0; u < p_values.size(); ++u) {
		if (!(p_values(u) >= 0.0 && p_values(u) <= 1.0))
			throw ValidationError("p-values must lie in [0, 1]");
		groups[participants[static_cast<std::size_t>(u)]].push_back(u);
	}

	std::vector<bool> rejected(static_cast<std::size_t>(p_values.size()), false);
	for (auto& [pid, units] : groups) {
		std::stable_sort(units.begin(), units.end(),
				[&](Index a, Index b) { return p_values(a) < p_values(b); });
		const double m = static_cast<double>(units.size());
		std::size_t k = 0;
		for (std::size_t i = 0; i < units.size(); ++i)
			if (p_values(units[i]) <= static_cast<double>(i + 1) * level / m)
				k = i + 1;
		for (std::size_t i = 0; i < k; ++i)
			rejected[static_cast<std::size_t>(units[i])] = true;
	}
	return rejected;
}

ChanceTest chance_level_test(const Matrix& y_true, const Matrix& pred_model,
		const Matrix& intercept_preds, std::span<const int> participants, double level)
{
	ChanceTest out;
	out.test = paired_squared_error_ttest(y_true, pred_model, intercept_preds);
	out.rejected = bh_fdr(out.test.p, participants, level);
	return out;
}

void write_test_csv(const std::filesystem::path& path, const PairedTest& test,
		const std::vector<bool>& rejected, std::span<const int> participants)
{
	std::ofstream f(path, std::ios::trunc);
	if (!f)
		throw ValidationError("cannot write " + path.string());
	f.precision(17);
	f << "unit,participant,t,p,rejected\n";
	for (Index u = 0; u < test.t.size(); ++u) {
		f << u << ',' << participants[static_cast<std::size_t>(u)] << ',' << test.t(u) << ','
		  << test.p(u) << ',' << (rejected[static_cast<std::size_t>(u)] ? 1 : 0) << '\n';
	}
}

} // namespace encodebench
