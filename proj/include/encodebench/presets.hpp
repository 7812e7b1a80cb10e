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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "encodebench/synthgen.hpp"

namespace encodebench {

// A desk-scale synthetic dataset shaped like one of the reference designs,
// plus the analysis config that exercises it.
struct Preset {
	std::string name;
	SynthSpec spec;
	std::vector<FeatureSpace> manifest_features; // written next to the responses
	nlohmann::json compare_config;               // manifest path is "manifest.json"
};

/**
 * Available presets:
 *
 *   shuffle-demo   24 categories x 4 passages x 4 sentences, 200 units, no
 *                  signal, within-passage autocorrelated noise (width 2)
 *   pereira-exp1   same layout; SP+SL signal and a 512-D "LLM" space that
 *                  is a noisy random projection of SP+SL
 *   pereira-exp2   24 categories x 3 passages of 3-4 sentences (243 rows)
 *   fedorenko      52 sentences x 8 words, word-position signal, 97 units
 *   blank          8 stories of 36-50 samples, autocorrelated noise only
 *
 * n_units <= 0 keeps the preset's default.
 */
Preset make_preset(const std::string& name, std::uint64_t seed, Index n_units = 0);
std::vector<std::string> preset_names();

// Splits n_units as evenly as possible over n_participants (ids 0..n-1).
std::vector<int> even_participants(Index n_units, int n_participants);

} // namespace encodebench
