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

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bidlearn/config.h"
#include "bidlearn/engine.h"
#include "bidlearn/errors.h"
#include "bidlearn/io.h"
#include "doctest.h"

using namespace bidlearn;

namespace {

constexpr const char* kSkewed = R"(
[simulation]
bidders = 2
resolution = 4
horizon = 3000
exploration_rounds = 200
rollout_rounds = 100
seed = 9
logging_cadence = 1000

[mechanism]
kind = spa

[values]
prior = pmf
pmf = 0.1, 0.2, 0.3, 0.4

[values.1]
pmf = 0.4, 0.3, 0.2, 0.1

[learner]
policy = epsilon_greedy
feedback = cross_learning
anneal_rounds = 1000

[learner.1]
policy = ucb1
ucb_c = 0.25

[report]
window = 500

[run]
seeds = 1..3,7
)";

std::string Jsonl(const TrajectoryLog& log) {
  std::ostringstream os;
  WriteTrajectoryJsonl(log, os);
  return os.str();
}

}  // namespace

TEST_CASE("config parses every section") {
  const auto cfg = ParseExperimentConfig(kSkewed);
  const auto& s = cfg.simulation;
  CHECK(s.num_bidders == 2);
  CHECK(s.resolution == 4);
  CHECK(s.horizon == 3000);
  CHECK(s.exploration_rounds == 200);
  CHECK(s.rollout_rounds == 100);
  CHECK(s.seed == 9);
  CHECK(s.logging_cadence == 1000);
  CHECK(s.mechanism.kind() == MechanismKind::kSecondPrice);
  REQUIRE(s.distributions.size() == 2);
  CHECK(s.distributions[0].Mass(4) == doctest::Approx(0.4));
  CHECK(s.distributions[1].Mass(1) == doctest::Approx(0.4));
  CHECK(s.LearnerFor(0).policy.kind == PolicyKind::kEpsilonGreedy);
  CHECK(s.LearnerFor(0).feedback == FeedbackMode::kCrossLearning);
  CHECK(s.LearnerFor(0).policy.epsilon.anneal_rounds == 1000);
  CHECK(s.LearnerFor(1).policy.kind == PolicyKind::kUcb1);
  CHECK(s.LearnerFor(1).policy.ucb_c == 0.25);
  CHECK(cfg.report_window == 500);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
}

TEST_CASE("config defaults and vcg") {
  const auto cfg = ParseExperimentConfig(
      "[simulation]\nbidders = 3\nresolution = 5\nhorizon = 1000\nexploration_rounds = 100\n"
      "[mechanism]\nkind = vcg\nmultipliers = 1, 0.5\n"
      "[learner]\npolicy = mwu\nfeedback = full_info\neta_target = power:1,0.25\n");
  CHECK(cfg.simulation.mechanism.Slots() == 2);
  CHECK(cfg.simulation.mechanism.Multiplier(1) == 0.5);
  CHECK(cfg.simulation.distributions.empty());
  CHECK(cfg.seeds.empty());
  CHECK(cfg.report_window == kDefaultWindow);
  const auto& p = cfg.simulation.LearnerFor(2).policy;
  CHECK(p.kind == PolicyKind::kMwu);
  REQUIRE(p.eta_target.has_value());
  CHECK((*p.eta_target)(16) == doctest::Approx(0.5));
}

TEST_CASE("config rejects bad input") {
  const std::string sim = "[simulation]\nhorizon = 1000\nexploration_rounds = 100\n";
  const std::vector<std::string> bad{
      sim + "bogus = 1\n",
      sim + "[nonsense]\nx = 1\n",
      sim + "[mechanism]\nkind = dutch\n",
      sim + "[mechanism]\nkind = vcg\n",
      sim + "[mechanism]\nkind = spa\nmultipliers = 1\n",
      sim + "[values]\nprior = pmf\n",
      sim + "[values]\nprior = uniform\npmf = 0.5, 0.5\n",
      sim + "[values.5]\npmf = 1\n",
      sim + "[learner]\npolicy = oracle\n",
      sim + "[learner]\nfeedback = telepathy\n",
      sim + "[learner.4]\npolicy = ucb1\n",
      sim + "[report]\nwindow = 0\n",
      sim + "[run]\nseeds = 5..2\n",
      "[simulation]\nhorizon = ten\n",
      "[simulation]\nhorizon = 10\nexploration_rounds = 100\n",
      "[simulation]\nresolution = 7\n[mechanism]\nkind = fpa\n[simulation.x]\n",
      "horizon = 10\n",
  };
  for (const auto& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(ParseExperimentConfig(text), ConfigError);
  }
  CHECK_THROWS_WITH_AS(ParseExperimentConfig(sim + "bogus = 1\n", "x.cfg"),
                       doctest::Contains("x.cfg"), ConfigError);
  CHECK_THROWS_AS(LoadExperimentConfig("/nonexistent/dir/x.cfg"), IoError);
}

TEST_CASE("resolved config reproduces the run") {
  const auto cfg = ParseExperimentConfig(kSkewed);
  const auto text = ResolvedConfigText(cfg);
  const auto back = ParseExperimentConfig(text, "resolved");
  CHECK(ResolvedConfigText(back) == text);
  CHECK(back.seeds == cfg.seeds);
  CHECK(Jsonl(RunSimulation(back.simulation)) == Jsonl(RunSimulation(cfg.simulation)));

  const auto vcg = ParseExperimentConfig(
      "[simulation]\nbidders = 3\nresolution = 5\nhorizon = 800\nexploration_rounds = 100\n"
      "[mechanism]\nkind = vcg\nmultipliers = 1, 0.3333333333333333\n"
      "[learner]\npolicy = mwu\nfeedback = full_info\neta_target = power:0.1,0.3\n");
  const auto vtext = ResolvedConfigText(vcg);
  CHECK(ResolvedConfigText(ParseExperimentConfig(vtext)) == vtext);
  CHECK(Jsonl(RunSimulation(ParseExperimentConfig(vtext).simulation)) ==
        Jsonl(RunSimulation(vcg.simulation)));
}

TEST_CASE("seed lists") {
  CHECK(ParseSeeds("3") == std::vector<std::uint64_t>{3});
  CHECK(ParseSeeds("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(ParseSeeds("1..3,9, 11") == std::vector<std::uint64_t>{1, 2, 3, 9, 11});
  CHECK_THROWS_AS(ParseSeeds(""), ConfigError);
  CHECK_THROWS_AS(ParseSeeds("4..1"), ConfigError);
  CHECK_THROWS_AS(ParseSeeds("x"), ConfigError);
}

TEST_CASE("trajectory jsonl round trip") {
  auto cfg = ParseExperimentConfig(kSkewed).simulation;
  cfg.mechanism = Mechanism::FirstPrice();
  cfg.num_bidders = 3;
  cfg.distributions.clear();
  cfg.learners.resize(1);
  const auto log = RunSimulation(cfg);
  std::stringstream ss;
  WriteTrajectoryJsonl(log, ss);
  const std::string text = ss.str();
  const auto back = ReadTrajectoryJsonl(ss, cfg);
  CHECK(Jsonl(back) == text);
  CHECK(back.size() == log.size());
  CHECK(back.training_rounds() == log.training_rounds());
  for (std::int64_t r = 0; r < log.size(); r += 97) {
    CHECK(back.Bids(r) == log.Bids(r));
    CHECK(back.Values(r) == log.Values(r));
    CHECK(back.Outcome(r).payments == log.Outcome(r).payments);
  }

  std::ostringstream rollout_only;
  WriteTrajectoryJsonl(log, rollout_only, false);
  std::istringstream ro(rollout_only.str());
  std::string line;
  std::int64_t lines = 0;
  while (std::getline(ro, line)) {
    ++lines;
    CHECK(line.find("\"phase\":\"rollout\"") != std::string::npos);
  }
  CHECK(lines == cfg.rollout_rounds);

  std::istringstream corrupt(text.substr(0, text.size() / 2) + "{not json\n");
  CHECK_THROWS_AS(ReadTrajectoryJsonl(corrupt, cfg), IoError);
  auto other = cfg;
  other.horizon += 1;
  std::istringstream again(text);
  CHECK_THROWS_AS(ReadTrajectoryJsonl(again, other), IoError);
}

TEST_CASE("play log round trip and compliance csv") {
  auto cfg = ParseExperimentConfig(kSkewed).simulation;
  cfg.horizon = 600;
  cfg.rollout_rounds = 0;
  std::stringstream ss;
  PlayLogWriter writer(ss);
  ComplianceObserver live;
  SimulationObserver* obs[] = {&writer, &live};
  RunSimulation(cfg, obs);
  const auto records = ReadPlayLogJsonl(ss);
  CHECK(records.size() == 2 * 600);
  ComplianceMonitor replay;
  for (const auto& r : records) replay.Observe(r);
  CHECK(replay.report().decisions_checked == live.report().decisions_checked);
  CHECK(replay.report().decisions_skipped == live.report().decisions_skipped);
  CHECK(replay.report().violations.size() == live.report().violations.size());
  std::stringstream again;
  for (const auto& r : records) WritePlayRecordJsonl(r, again);
  CHECK(again.str() == ss.str());

  std::ostringstream csv;
  WriteComplianceCsv(live.report(), csv);
  const std::string out = csv.str();
  CHECK(out.rfind("t,bidder,context,action,deficit,threshold,probability,gamma\n", 0) == 0);
  CHECK(out.find("# checked=" + std::to_string(live.report().decisions_checked)) !=
        std::string::npos);
}
