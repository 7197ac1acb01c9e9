// Copyright 2026 The bidlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIDLEARN_CONFIG_H_
#define BIDLEARN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bidlearn/engine.h"
#include "bidlearn/report.h"

namespace bidlearn {

// Everything one experiment file describes.
struct ExperimentConfig {
  SimulationConfig simulation;
  std::vector<std::uint64_t> seeds;  // empty means {simulation.seed}
  std::int64_t report_window = kDefaultWindow;
};

// INI text with sections [simulation], [mechanism], [values], [values.<i>],
// [learner], [learner.<i>], [report] and [run]. Unknown sections or keys are
// rejected. The result is validated.
ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       const std::string& source = "<config>");
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Fully resolved INI text; parsing it back yields an identical simulation.
std::string ResolvedConfigText(const ExperimentConfig& config);

// "3", "1..10", "1,4,7" or a mix such as "1..3,9".
std::vector<std::uint64_t> ParseSeeds(std::string_view text);

}  // namespace bidlearn

#endif  // BIDLEARN_CONFIG_H_
