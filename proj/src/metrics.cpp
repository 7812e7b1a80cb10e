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

#include "encodebench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "encodebench/error.hpp"

namespace encodebench {

Vector r2_oos(const Matrix& y_true, const Matrix& y_pred, const Matrix& y_intercept)
{
	if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols() ||
			y_true.rows() != y_intercept.rows() || y_true.cols() != y_intercept.cols())
		throw ValidationError("r2_oos: shape mismatch");
	Vector out(y_true.cols());
	for (Index u = 0; u < y_true.cols(); ++u) {
		const double sse_model = (y_true.col(u) - y_pred.col(u)).squaredNorm();
		const double sse_base = (y_true.col(u) - y_intercept.col(u)).squaredNorm();
		if (sse_base == 0.0)
			throw DataError("r2_oos undefined for unit " + std::to_string(u) +
					": intercept model is exact");
		out(u) = 1.0 - sse_model / sse_base;
	}
	return out;
}

ParticipantSummary summarize_participants(std::vector<int> participants, std::vector<double> values)
{
	ParticipantSummary s;
	s.participants = std::move(participants);
	s.values = std::move(values);
	const auto n = static_cast<double>(s.values.size());
	if (s.values.empty())
		return s;
	double sum = 0.0;
	for (const double v : s.values)
		sum += v;
	s.mean = sum / n;
	if (s.values.size() > 1) {
		double ss = 0.0;
		for (const double v : s.values)
			ss += (v - s.mean) * (v - s.mean);
		s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
	}
	return s;
}

namespace {

// Within-participant means of the units flagged by `keep`.
std::map<int, std::pair<double, int>> participant_sums(const Vector& values,
		std::span<const int> participants, const std::vector<bool>& keep)
{
	if (static_cast<Index>(participants.size()) != values.size())
		throw ValidationError("one participant id per unit required");
	std::map<int, std::pair<double, int>> acc;
	for (Index u = 0; u < values.size(); ++u) {
		auto& slot = acc[participants[static_cast<std::size_t>(u)]];
		if (keep[static_cast<std::size_t>(u)]) {
			slot.first += values(u);
			slot.second += 1;
		}
	}
	return acc;
}

ParticipantSummary ratio_summary(const Vector& per_unit, const std::vector<bool>& keep,
		std::span<const int> participants, std::optional<double> cap, const char* what)
{
	std::vector<int> ids;
	std::vector<double> vals;
	for (const auto& [pid, sum_n] : participant_sums(per_unit, participants, keep)) {
		if (sum_n.second == 0)
			throw DataError(std::string(what) + ": every unit of participant " +
					std::to_string(pid) + " has a non-positive denominator");
		double v = sum_n.first / sum_n.second;
		if (cap)
			v = std::min(v, *cap);
		ids.push_back(pid);
		vals.push_back(v);
	}
	return summarize_participants(std::move(ids), std::move(vals));
}

} // namespace

ParticipantSummary clip_and_average(const Vector& scores, std::span<const int> participants)
{
	const Vector clipped = scores.cwiseMax(0.0);
	const std::vector<bool> keep(static_cast<std::size_t>(scores.size()), true);
	std::vector<int> ids;
	std::vector<double> vals;
	for (const auto& [pid, sum_n] : participant_sums(clipped, participants, keep)) {
		ids.push_back(pid);
		vals.push_back(sum_n.first / sum_n.second);
	}
	return summarize_participants(std::move(ids), std::move(vals));
}

Vector submodel_max(const SubsetScores& scores, SubsetMask family, std::optional<int> required)
{
	if (family == 0)
		throw ValidationError("submodel_max: empty family");
	if (required && !contains(family, *required))
		throw ValidationError("submodel_max: required space is not in the family");

	Vector best;
	// Enumerate non-empty sub-masks of `family`.
	for (SubsetMask sub = family; sub != 0; sub = (sub - 1) & family) {
		if (required && !contains(sub, *required))
			continue;
		const auto it = scores.find(sub);
		if (it == scores.end())
			throw ValidationError("submodel_max: missing scores for subset mask " +
					std::to_string(sub));
		if (best.size() == 0)
			best = it->second;
		else if (it->second.size() != best.size())
			throw ValidationError("submodel_max: unit counts differ between subsets");
		else
			best = best.cwiseMax(it->second);
	}
	return best;
}

ParticipantSummary omega(const Vector& r2_m_star, const Vector& r2_m_llm_star,
		const Vector& r2_llm, std::span<const int> participants)
{
	if (r2_m_star.size() != r2_llm.size() || r2_m_llm_star.size() != r2_llm.size())
		throw ValidationError("omega: unit counts differ");
	Vector per_unit(r2_llm.size());
	std::vector<bool> keep(static_cast<std::size_t>(r2_llm.size()));
	for (Index u = 0; u < r2_llm.size(); ++u) {
		keep[static_cast<std::size_t>(u)] = r2_llm(u) > 0.0;
		per_unit(u) = keep[static_cast<std::size_t>(u)]
				? (1.0 - (r2_m_llm_star(u) - r2_m_star(u)) / r2_llm(u)) * 100.0
				: 0.0;
	}
	return ratio_summary(per_unit, keep, participants, 100.0, "omega");
}

ParticipantSummary phi(const Vector& r2_oasm_llm_star, const Vector& r2_oasm,
		std::span<const int> participants)
{
	if (r2_oasm_llm_star.size() != r2_oasm.size())
		throw ValidationError("phi: unit counts differ");
	Vector per_unit(r2_oasm.size());
	std::vector<bool> keep(static_cast<std::size_t>(r2_oasm.size()));
	for (Index u = 0; u < r2_oasm.size(); ++u) {
		keep[static_cast<std::size_t>(u)] = r2_oasm(u) > 0.0;
		per_unit(u) = keep[static_cast<std::size_t>(u)]
				? (r2_oasm_llm_star(u) / r2_oasm(u) - 1.0) * 100.0
				: 0.0;
	}
	return ratio_summary(per_unit, keep, participants, std::nullopt, "phi");
}

} // namespace encodebench
