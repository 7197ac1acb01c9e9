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

#include <cmath>
#include <sstream>
#include <vector>

#include "bidlearn/engine.h"
#include "bidlearn/errors.h"
#include "bidlearn/io.h"
#include "doctest.h"

using namespace bidlearn;

namespace {

SimulationConfig Small(Mechanism mech = Mechanism::SecondPrice()) {
  SimulationConfig c;
  c.num_bidders = 2;
  c.resolution = 6;
  c.mechanism = std::move(mech);
  c.exploration_rounds = 500;
  c.horizon = 5000;
  c.rollout_rounds = 300;
  c.learners[0].policy.epsilon.anneal_rounds = 2000;
  return c;
}

std::string Jsonl(const TrajectoryLog& log) {
  std::ostringstream os;
  WriteTrajectoryJsonl(log, os);
  return os.str();
}

// Upper 0.1% point of chi-square with 9 degrees of freedom.
constexpr double kChi2Df9 = 27.877;

class OutcomeRecorder : public SimulationObserver {
 public:
  void OnRound(const RoundEvent& e) override {
    payments.push_back(e.outcome->payments);
    utilities.push_back(e.outcome->utilities);
    exploring.push_back(e.exploring);
    rollout.push_back(e.rollout);
  }
  std::vector<std::vector<double>> payments, utilities;
  std::vector<bool> exploring, rollout;
};

}  // namespace

TEST_CASE("config validation names the violated invariant") {
  auto c = Small();
  c.num_bidders = 1;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = Small();
  c.horizon = 100;
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("T0"), ConfigError);
  c = Small(Mechanism::FirstPrice());
  c.fpa_theorem_pipeline = true;
  c.resolution = 7;
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("even"), ConfigError);
  c.resolution = 6;
  c.num_bidders = 3;
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("n=2"), ConfigError);
  c.num_bidders = 2;
  c.distributions = {ValueDistribution::FromPmf(c.Grid(), {0.5, 0.1, 0.1, 0.1, 0.1, 0.1}),
                     ValueDistribution::Uniform(c.Grid())};
  CHECK_THROWS_WITH_AS(c.Validate(), doctest::Contains("uniform"), ConfigError);
  c.distributions.clear();
  CHECK_NOTHROW(c.Validate());
  c = Small(Mechanism::MultiPositionVcg({1.0, 0.5}));
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c.num_bidders = 3;
  CHECK_NOTHROW(c.Validate());
}

TEST_CASE("log shape and grid membership") {
  const auto c = Small();
  const auto log = RunSimulation(c);
  CHECK(log.size() == c.horizon + c.rollout_rounds);
  CHECK(log.training_rounds() == c.horizon);
  for (std::int64_t r = 0; r < log.size(); ++r) {
    CHECK(log.IsRollout(r) == (r >= c.horizon));
    CHECK(log.IsExploration(r) == (r < c.exploration_rounds));
    for (int i = 0; i < 2; ++i) {
      CHECK(c.Grid().Contains(log.Value(r, i)));
      CHECK(c.Grid().Contains(log.Bid(r, i)));
    }
  }
  REQUIRE_FALSE(log.snapshots().empty());
  CHECK(log.snapshots().back().t == c.horizon);
}

TEST_CASE("pure exploration bids are uniform") {
  auto c = Small();
  c.resolution = 10;
  c.exploration_rounds = c.horizon = 20000;
  c.rollout_rounds = 0;
  const auto log = RunSimulation(c);
  for (int i = 0; i < 2; ++i) {
    std::vector<int> freq(10, 0);
    for (std::int64_t r = 0; r < log.size(); ++r) ++freq[log.Bid(r, i) - 1];
    const double band = 4.0 * std::sqrt(std::log(10.0) / 20000.0);
    for (int f : freq) CHECK(std::abs(f / 20000.0 - 0.1) <= band);
  }
}

TEST_CASE("values follow the configured priors") {
  auto c = Small();
  c.resolution = 10;
  c.horizon = 100000;
  c.exploration_rounds = 100000;
  c.rollout_rounds = 0;
  std::vector<double> skew{0.02, 0.03, 0.05, 0.1, 0.1, 0.1, 0.1, 0.15, 0.15, 0.2};
  c.distributions = {ValueDistribution::Uniform(c.Grid()),
                     ValueDistribution::FromPmf(c.Grid(), skew)};
  const auto log = RunSimulation(c);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> obs(10, 0.0);
    for (std::int64_t r = 0; r < log.size(); ++r) obs[log.Value(r, i) - 1] += 1;
    double chi2 = 0.0;
    for (int k = 0; k < 10; ++k) {
      const double e = c.distributions[i].Mass(k + 1) * log.size();
      chi2 += (obs[k] - e) * (obs[k] - e) / e;
    }
    CHECK(chi2 < kChi2Df9);
  }
}

TEST_CASE("runs are deterministic per seed") {
  const auto c = Small(Mechanism::FirstPrice());
  const auto a = RunSimulation(c);
  const auto b = RunSimulation(c);
  CHECK(a == b);
  CHECK(Jsonl(a) == Jsonl(b));
  auto d = c;
  d.seed = 2;
  CHECK_FALSE(RunSimulation(d) == a);
}

TEST_CASE("trials are independent of order and thread count") {
  const auto c = Small();
  const std::vector<std::uint64_t> fwd{1, 2, 3}, rev{3, 2, 1};
  const auto seq = RunTrials(c, fwd, 1);
  const auto par = RunTrials(c, fwd, 3);
  const auto back = RunTrials(c, rev, 2);
  REQUIRE(seq.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(seq[k] == par[k]);
    CHECK(seq[k] == back[2 - k]);
  }
  auto one = c;
  one.seed = 2;
  CHECK(seq[1] == RunSimulation(one));
  CHECK_THROWS_AS(RunTrials(c, std::vector<std::uint64_t>{}, 1), ConfigError);
}

TEST_CASE("changing one learner leaves other streams alone") {
  auto a = Small();
  auto b = Small();
  LearnerSpec other;
  other.policy.kind = PolicyKind::kMwu;
  other.feedback = FeedbackMode::kFullInfo;
  b.learners = {b.learners[0], other};
  const auto la = RunSimulation(a);
  const auto lb = RunSimulation(b);
  for (std::int64_t r = 0; r < la.size(); ++r) {
    CHECK(la.Value(r, 0) == lb.Value(r, 0));
    CHECK(la.Value(r, 1) == lb.Value(r, 1));
  }
  for (std::int64_t r = 0; r < a.exploration_rounds; ++r) {
    CHECK(la.Bid(r, 0) == lb.Bid(r, 0));
  }
}

TEST_CASE("logged outcomes match what the bidders were told") {
  for (const auto& mech : {Mechanism::SecondPrice(), Mechanism::FirstPrice()}) {
    auto c = Small(mech);
    c.resolution = 3;  // many ties
    OutcomeRecorder rec;
    SimulationObserver* obs[] = {&rec};
    const auto log = RunSimulation(c, obs);
    REQUIRE(static_cast<std::int64_t>(rec.payments.size()) == log.size());
    int ties = 0;
    for (std::int64_t r = 0; r < log.size(); ++r) {
      const auto out = log.Outcome(r);
      CHECK(out.payments == rec.payments[r]);
      CHECK(out.utilities == rec.utilities[r]);
      CHECK(rec.rollout[r] == log.IsRollout(r));
      CHECK(rec.exploring[r] == log.IsExploration(r));
      ties += out.tie;
      // Utility only depends on the opposing max m_{i,t} and the tie draw.
      for (int i = 0; i < 2; ++i) {
        const Tick m = log.OpponentMax(r, i);
        const double v = c.Grid().Value(log.Value(r, i));
        if (log.Bid(r, i) < m) CHECK(out.utilities[i] == 0.0);
        if (log.Bid(r, i) > m) {
          const double price = mech.kind() == MechanismKind::kFirstPrice
                                   ? c.Grid().Value(log.Bid(r, i))
                                   : c.Grid().Value(m);
          CHECK(out.utilities[i] == doctest::Approx(v - price));
        }
      }
    }
    CHECK(ties > 0);
  }
}

TEST_CASE("snapshots follow the logging cadence") {
  auto c = Small();
  c.logging_cadence = 1000;
  const auto log = RunSimulation(c);
  std::vector<std::int64_t> ts;
  for (const auto& s : log.snapshots()) {
    if (s.bidder == 0) ts.push_back(s.t);
  }
  CHECK(ts == std::vector<std::int64_t>{1000, 2000, 3000, 4000, 5000});
  for (const auto& s : log.snapshots()) {
    CHECK(s.scores.size() == 36);
    CHECK(s.counts.size() == 36);
  }
}

TEST_CASE("compliance observer: epsilon-greedy passes, worst arm fails") {
  auto c = Small();
  c.horizon = 20000;
  c.exploration_rounds = 1000;
  ComplianceObserver eg;
  SimulationObserver* obs[] = {&eg};
  RunSimulation(c, obs);
  CHECK(eg.report().Clean());
  CHECK(eg.report().decisions_checked > 0);

  c.learners[0].policy.kind = PolicyKind::kWorstArm;
  c.horizon = 10000;
  ComplianceObserver worst;
  SimulationObserver* obs2[] = {&worst};
  RunSimulation(c, obs2);
  CHECK_FALSE(worst.report().Clean());
}
