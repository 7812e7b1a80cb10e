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

#include <filesystem>
#include <span>
#include <vector>

#include "encodebench/types.hpp"

namespace encodebench {

// Regularized incomplete beta I_x(a, b), evaluated with a modified Lentz
// continued fraction on whichever of x, 1-x converges faster.
double incomplete_beta(double a, double b, double x);

// Student-t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct PairedTest {
	Vector t;
	Vector p; // one-sided, H1: model A has lower squared error
	Index n_samples = 0;
};

/**
 * One-sided paired t-test on per-sample squared errors.
 *
 * d_i = (y_i - a_i)^2 - (y_i - b_i)^2 per unit; t = mean(d) / (sd(d) / sqrt(n))
 * with the n-1 standard deviation; p = P(T_{n-1} <= t). A unit whose d is
 * constant gets t = 0, p = 0.5 when the constant is 0 and throws DataError
 * otherwise. Needs n >= 3.
 */
PairedTest paired_squared_error_ttest(const Matrix& y_true, const Matrix& pred_a,
		const Matrix& pred_b);

// Benjamini-Hochberg step-up, run separately inside each participant's units.
// Equal p-values are ordered by unit index.
std::vector<bool> bh_fdr(const Vector& p_values, std::span<const int> participants,
		double level = 0.05);

struct ChanceTest {
	PairedTest test;
	std::vector<bool> rejected;
};

// Model vs the intercept-only baseline, with within-participant FDR.
ChanceTest chance_level_test(const Matrix& y_true, const Matrix& pred_model,
		const Matrix& intercept_preds, std::span<const int> participants, double level = 0.05);

// unit,participant,t,p,rejected
void write_test_csv(const std::filesystem::path& path, const PairedTest& test,
		const std::vector<bool>& rejected, std::span<const int> participants);

} // namespace encodebench
