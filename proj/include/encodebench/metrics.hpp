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
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "encodebench/types.hpp"

namespace encodebench {

// 1 - MSE_model / MSE_intercept per unit (column), on pooled predictions.
// `y_intercept` holds each fold's training mean, pooled in the same order
// as `y_pred`. Throws DataError when a unit's intercept MSE is zero.
Vector r2_oos(const Matrix& y_true, const Matrix& y_pred, const Matrix& y_intercept);

// Per-participant values (sorted by participant id) with their mean and
// standard error across participants. SEM uses the n-1 standard deviation
// and is 0 when there is a single participant.
struct ParticipantSummary {
	std::vector<int> participants;
	std::vector<double> values;
	double mean = 0.0;
	double sem = 0.0;
};

ParticipantSummary summarize_participants(std::vector<int> participants, std::vector<double> values);

// Floors each unit at 0, averages within participant, then across.
ParticipantSummary clip_and_average(const Vector& scores, std::span<const int> participants);

// Bit i set means declared space i is in the model.
using SubsetMask = std::uint32_t;
using SubsetScores = std::map<SubsetMask, Vector>;

inline bool contains(SubsetMask set, int space) { return (set >> space) & 1u; }

// Per-unit maximum over every non-empty subset of `family`; with `required`,
// only subsets containing that space are considered. Throws
// ValidationError if a needed subset is missing from `scores`.
Vector submodel_max(const SubsetScores& scores, SubsetMask family,
		std::optional<int> required = std::nullopt);

// Percentage of the designated space's explained variance that model M also
// explains: (1 - (r2_m_llm_star - r2_m_star) / r2_llm) * 100. Units with
// r2_llm <= 0 are skipped. Participant means are capped at 100.
ParticipantSummary omega(const Vector& r2_m_star, const Vector& r2_m_llm_star,
		const Vector& r2_llm, std::span<const int> participants);

// Unique variance over OASM: (r2_oasm_llm_star / r2_oasm - 1) * 100.
// Units with r2_oasm <= 0 are skipped; no capping.
ParticipantSummary phi(const Vector& r2_oasm_llm_star, const Vector& r2_oasm,
		std::span<const int> participants);

} // namespace encodebench
