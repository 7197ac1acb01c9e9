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

#ifndef BIDLEARN_ENGINE_H_
#define BIDLEARN_ENGINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bidlearn/grid.h"
#include "bidlearn/learner.h"
#include "bidlearn/mechanism.h"

namespace bidlearn {

struct LearnerSpec {
  PolicySpec policy;
  FeedbackMode feedback = FeedbackMode::kBandit;
};

struct SimulationConfig {
  int num_bidders = 2;
  int resolution = 10;
  // One prior per bidder; empty means uniform for everyone.
  std::vector<ValueDistribution> distributions;
  Mechanism mechanism = Mechanism::SecondPrice();
  // One spec per bidder, or a single spec shared by all bidders.
  std::vector<LearnerSpec> learners{LearnerSpec{}};
  std::int64_t exploration_rounds = 10000;
  std::int64_t horizon = 1000000;
  std::uint64_t seed = 1;
  // Rounds between sigma snapshots; 0 keeps only the final snapshot.
  std::int64_t logging_cadence = 0;
  std::int64_t rollout_rounds = 1000;
  // Enforce the two-bidder, even-H, uniform-prior setting the first-price
  // convergence guarantee is stated for.
  bool fpa_theorem_pipeline = false;

  ValueGrid Grid() const { return ValueGrid(resolution); }
  // Priors with the "empty means uniform" default resolved.
  std::vector<ValueDistribution> ResolvedDistributions() const;
  const LearnerSpec& LearnerFor(int bidder) const;
  // Throws ConfigError naming the violated invariant.
  void Validate() const;
};

struct SigmaSnapshot {
  std::int64_t t = 0;
  int bidder = 0;
  std::vector<double> scores;        // H x H, row = context
  std::vector<std::int64_t> counts;  // H x H
};

// Compact per-round record store. Outcomes are not stored; they are rebuilt
// from bids, values and the realised ranking, which fixes every tie.
class TrajectoryLog {
 public:
  TrajectoryLog(SimulationConfig config);

  const SimulationConfig& config() const { return config_; }
  int num_bidders() const { return config_.num_bidders; }
  std::int64_t size() const { return static_cast<std::int64_t>(phase_.size()); }
  std::int64_t training_rounds() const { return training_rounds_; }
  std::int64_t rollout_rounds() const { return size() - training_rounds_; }

  // Zero-based record index r covers round r + 1.
  bool IsRollout(std::int64_t r) const { return r >= training_rounds_; }
  bool IsExploration(std::int64_t r) const {
    return r < config_.exploration_rounds && !IsRollout(r);
  }
  Tick Value(std::int64_t r, int bidder) const {
    return values_[r * num_bidders() + bidder];
  }
  Tick Bid(std::int64_t r, int bidder) const {
    return bids_[r * num_bidders() + bidder];
  }
  int RankingAt(std::int64_t r, int position) const {
    return ranking_[r * num_bidders() + position];
  }
  // max over j != bidder of the bid of j.
  Tick OpponentMax(std::int64_t r, int bidder) const;
  AuctionOutcome Outcome(std::int64_t r) const;
  std::vector<Tick> Values(std::int64_t r) const;
  std::vector<Tick> Bids(std::int64_t r) const;
  std::vector<Tick> OpponentBids(std::int64_t r, int bidder) const;

  const std::vector<SigmaSnapshot>& snapshots() const { return snapshots_; }

  void Append(bool rollout, std::span<const Tick> values,
              std::span<const Tick> bids, std::span<const int> ranking);
  void AddSnapshot(SigmaSnapshot snapshot);
  void Reserve(std::int64_t rounds);

  friend bool operator==(const TrajectoryLog& a, const TrajectoryLog& b);

 private:
  SimulationConfig config_;
  std::int64_t training_rounds_ = 0;
  std::vector<std::uint8_t> values_;
  std::vector<std::uint8_t> bids_;
  std::vector<std::uint8_t> ranking_;
  std::vector<std::uint8_t> phase_;
  std::vector<SigmaSnapshot> snapshots_;
};

struct RoundEvent {
  std::int64_t t = 0;  // 1-based round index, rollout rounds continue it
  bool exploring = false;
  bool rollout = false;
  std::span<const Tick> values;
  std::span<const Tick> bids;
  const AuctionOutcome* outcome = nullptr;
};

// Hooks into a running simulation. Decision records are only built when some
// observer asks for them.
class SimulationObserver {
 public:
  virtual ~SimulationObserver() = default;
  virtual bool WantsDecisions() const { return false; }
  virtual void OnDecision(const PlayRecord& /*record*/) {}
  virtual void OnRound(const RoundEvent& /*event*/) {}
};

// Runs the mean-based compliance monitor on every decision as it is made.
class ComplianceObserver : public SimulationObserver {
 public:
  explicit ComplianceObserver(std::optional<GammaSchedule> schedule = {})
      : monitor_(std::move(schedule)) {}
  bool WantsDecisions() const override { return true; }
  void OnDecision(const PlayRecord& record) override { monitor_.Observe(record); }
  const ComplianceReport& report() const { return monitor_.report(); }

 private:
  ComplianceMonitor monitor_;
};

TrajectoryLog RunSimulation(const SimulationConfig& config,
                            std::span<SimulationObserver* const> observers = {});

// One independent trial per seed, in seed order. `threads` <= 1 runs
// sequentially; results do not depend on it.
std::vector<TrajectoryLog> RunTrials(const SimulationConfig& config,
                                     std::span<const std::uint64_t> seeds,
                                     int threads = 1);

}  // namespace bidlearn

#endif  // BIDLEARN_ENGINE_H_
