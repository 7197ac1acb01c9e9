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

#include "bidlearn/engine.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include "bidlearn/errors.h"
#include "bidlearn/rng.h"

namespace bidlearn {

std::vector<ValueDistribution> SimulationConfig::ResolvedDistributions() const {
  if (!distributions.empty()) return distributions;
  return std::vector<ValueDistribution>(num_bidders,
                                        ValueDistribution::Uniform(Grid()));
}

const LearnerSpec& SimulationConfig::LearnerFor(int bidder) const {
  return learners.size() == 1 ? learners[0] : learners[bidder];
}

void SimulationConfig::Validate() const {
  if (num_bidders < 2) throw ConfigError("n >= 2 bidders required");
  if (resolution < 2) throw InvalidResolution("grid resolution H must be >= 2");
  if (resolution > 255) {
    throw ConfigError("grid resolution H must be <= 255 for trajectory logs");
  }
  if (num_bidders > 255) throw ConfigError("at most 255 bidders supported");
  if (exploration_rounds < 0) throw ConfigError("T0 must be >= 0");
  // T == T0 is allowed and gives a pure-exploration run.
  if (horizon < 1 || horizon < exploration_rounds) {
    throw ConfigError("horizon T must be >= 1 and >= T0");
  }
  if (rollout_rounds < 0) throw ConfigError("rollout rounds must be >= 0");
  if (logging_cadence < 0) throw ConfigError("logging cadence must be >= 0");
  mechanism.Validate(num_bidders);
  if (!distributions.empty()) {
    if (static_cast<int>(distributions.size()) != num_bidders) {
      throw ConfigError("one value distribution per bidder required");
    }
    for (const auto& d : distributions) {
      if (!(d.grid() == Grid())) {
        throw ConfigError("value distributions must live on the configured grid");
      }
    }
  }
  if (learners.empty() ||
      (learners.size() != 1 &&
       static_cast<int>(learners.size()) != num_bidders)) {
    throw ConfigError("learner specs must be one shared or one per bidder");
  }
  if (fpa_theorem_pipeline) {
    if (mechanism.kind() != MechanismKind::kFirstPrice) {
      throw ConfigError("FPA pipeline requires the first-price mechanism");
    }
    if (num_bidders != 2) {
      throw ConfigError("FPA pipeline requires exactly two bidders (n=2)");
    }
    if (resolution % 2 != 0) {
      throw ConfigError("FPA pipeline requires an even grid resolution H");
    }
    for (const auto& d : ResolvedDistributions()) {
      if (!d.IsUniform()) {
        throw ConfigError("FPA pipeline requires uniform value priors");
      }
    }
  }
}

TrajectoryLog::TrajectoryLog(SimulationConfig config)
    : config_(std::move(config)) {}

void TrajectoryLog::Reserve(std::int64_t rounds) {
  const auto n = static_cast<size_t>(num_bidders());
  values_.reserve(rounds * n);
  bids_.reserve(rounds * n);
  ranking_.reserve(rounds * n);
  phase_.reserve(rounds);
}

void TrajectoryLog::Append(bool rollout, std::span<const Tick> values,
                           std::span<const Tick> bids,
                           std::span<const int> ranking) {
  for (Tick v : values) values_.push_back(static_cast<std::uint8_t>(v));
  for (Tick b : bids) bids_.push_back(static_cast<std::uint8_t>(b));
  for (int r : ranking) ranking_.push_back(static_cast<std::uint8_t>(r));
  phase_.push_back(rollout ? 1 : 0);
  if (!rollout) training_rounds_ = size();
}

void TrajectoryLog::AddSnapshot(SigmaSnapshot snapshot) {
  snapshots_.push_back(std::move(snapshot));
}

Tick TrajectoryLog::OpponentMax(std::int64_t r, int bidder) const {
  Tick top = 0;
  for (int j = 0; j < num_bidders(); ++j) {
    if (j != bidder) top = std::max(top, Bid(r, j));
  }
  return top;
}

std::vector<Tick> TrajectoryLog::Values(std::int64_t r) const {
  std::vector<Tick> out(num_bidders());
  for (int i = 0; i < num_bidders(); ++i) out[i] = Value(r, i);
  return out;
}

std::vector<Tick> TrajectoryLog::Bids(std::int64_t r) const {
  std::vector<Tick> out(num_bidders());
  for (int i = 0; i < num_bidders(); ++i) out[i] = Bid(r, i);
  return out;
}

std::vector<Tick> TrajectoryLog::OpponentBids(std::int64_t r, int bidder) const {
  std::vector<Tick> out;
  for (int j = 0; j < num_bidders(); ++j) {
    if (j != bidder) out.push_back(Bid(r, j));
  }
  return out;
}

AuctionOutcome TrajectoryLog::Outcome(std::int64_t r) const {
  std::vector<int> ranking(num_bidders());
  for (int p = 0; p < num_bidders(); ++p) ranking[p] = RankingAt(r, p);
  return Settle(config_.mechanism, config_.Grid(), Bids(r), Values(r), ranking);
}

bool operator==(const SigmaSnapshot& a, const SigmaSnapshot& b) {
  return a.t == b.t && a.bidder == b.bidder && a.scores == b.scores &&
         a.counts == b.counts;
}

bool operator==(const TrajectoryLog& a, const TrajectoryLog& b) {
  return a.training_rounds_ == b.training_rounds_ && a.values_ == b.values_ &&
         a.bids_ == b.bids_ && a.ranking_ == b.ranking_ &&
         a.phase_ == b.phase_ && a.snapshots_ == b.snapshots_;
}

namespace {

// Draws values for one bidder from its prior.
class ValueSampler {
 public:
  ValueSampler(const ValueDistribution& dist, Rng rng)
      : uniform_(dist.IsUniform()),
        rng_(std::move(rng)),
        flat_(1, dist.grid().Resolution()),
        weighted_(dist.pmf().begin(), dist.pmf().end()) {}

  Tick Draw() { return uniform_ ? flat_(rng_) : weighted_(rng_) + 1; }

 private:
  bool uniform_;
  Rng rng_;
  std::uniform_int_distribution<int> flat_;
  std::discrete_distribution<int> weighted_;
};

SigmaSnapshot TakeSnapshot(const ContextualLearner& learner, std::int64_t t,
                           int bidder) {
  const int h = learner.grid().Size();
  SigmaSnapshot snap;
  snap.t = t;
  snap.bidder = bidder;
  snap.scores.resize(h * h);
  snap.counts.resize(h * h);
  for (Tick c = 1; c <= h; ++c) {
    for (Tick b = 1; b <= h; ++b) {
      snap.scores[(c - 1) * h + (b - 1)] = learner.Score(c, b);
      snap.counts[(c - 1) * h + (b - 1)] = learner.Count(c, b);
    }
  }
  return snap;
}

}  // namespace

TrajectoryLog RunSimulation(const SimulationConfig& config,
                            std::span<SimulationObserver* const> observers) {
  config.Validate();
  const int n = config.num_bidders;
  const ValueGrid grid = config.Grid();
  const auto priors = config.ResolvedDistributions();

  std::vector<ValueSampler> samplers;
  std::vector<Rng> policy_rngs;
  std::vector<ContextualLearner> learners;
  for (int i = 0; i < n; ++i) {
    samplers.emplace_back(priors[i],
                          MakeStream(config.seed, Stream::kValueBase, i));
    policy_rngs.push_back(MakeStream(config.seed, Stream::kPolicyBase, i));
    const LearnerSpec& spec = config.LearnerFor(i);
    learners.emplace_back(grid, config.mechanism, spec.policy, spec.feedback,
                          config.exploration_rounds);
  }
  Rng tie_rng = MakeStream(config.seed, Stream::kTieBreak);

  const bool want_decisions =
      std::any_of(observers.begin(), observers.end(),
                  [](const SimulationObserver* o) { return o->WantsDecisions(); });

  TrajectoryLog log(config);
  log.Reserve(config.horizon + config.rollout_rounds);

  std::vector<Tick> values(n), bids(n), opponents(n - 1);
  std::vector<int> ranking(n);
  AuctionOutcome outcome;
  PlayRecord record;

  auto emit_round = [&](std::int64_t t, bool exploring, bool rollout) {
    if (observers.empty()) return;
    RoundEvent event{t, exploring, rollout, values, bids, &outcome};
    for (auto* o : observers) o->OnRound(event);
  };

  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const bool exploring = t <= config.exploration_rounds;
    for (int i = 0; i < n; ++i) values[i] = samplers[i].Draw();
    for (int i = 0; i < n; ++i) {
      if (want_decisions) {
        record.t = t - 1;
        record.bidder = i;
        record.context = values[i];
        record.exploring = exploring;
        record.scores = learners[i].Scores(values[i]);
        record.gamma = learners[i].RegisteredGamma();
        bids[i] = learners[i].ChooseBid(values[i], policy_rngs[i],
                                        &record.distribution);
        for (auto* o : observers) {
          if (o->WantsDecisions()) o->OnDecision(record);
        }
      } else {
        bids[i] = learners[i].ChooseBid(values[i], policy_rngs[i]);
      }
    }
    RankBids(bids, tie_rng, ranking);
    SettleInto(config.mechanism, grid, bids, values, ranking, outcome);
    for (int i = 0; i < n; ++i) {
      int k = 0;
      for (int j = 0; j < n; ++j) {
        if (j != i) opponents[k++] = bids[j];
      }
      learners[i].Update(values[i], bids[i],
                         Feedback{outcome.utilities[i],
                                  std::span<const Tick>(opponents)});
    }
    log.Append(false, values, bids, ranking);
    emit_round(t, exploring, false);

    const bool cadence_hit =
        config.logging_cadence > 0 && t % config.logging_cadence == 0;
    if (cadence_hit || t == config.horizon) {
      for (int i = 0; i < n; ++i) log.AddSnapshot(TakeSnapshot(learners[i], t, i));
    }
  }

  // Greedy rollout: exploitation only, no further learning.
  for (std::int64_t r = 1; r <= config.rollout_rounds; ++r) {
    for (int i = 0; i < n; ++i) values[i] = samplers[i].Draw();
    for (int i = 0; i < n; ++i) {
      bids[i] = learners[i].ChooseGreedy(values[i], policy_rngs[i]);
    }
    RankBids(bids, tie_rng, ranking);
    SettleInto(config.mechanism, grid, bids, values, ranking, outcome);
    log.Append(true, values, bids, ranking);
    emit_round(config.horizon + r, false, true);
  }
  return log;
}

std::vector<TrajectoryLog> RunTrials(const SimulationConfig& config,
                                     std::span<const std::uint64_t> seeds,
                                     int threads) {
  if (seeds.empty()) throw ConfigError("at least one seed required");
  config.Validate();
  std::vector<std::optional<TrajectoryLog>> slots(seeds.size());
  auto run_one = [&](size_t index) {
    SimulationConfig trial = config;
    trial.seed = seeds[index];
    slots[index].emplace(RunSimulation(trial));
  };

  const int workers =
      std::clamp<int>(threads, 1, static_cast<int>(seeds.size()));
  if (workers == 1) {
    for (size_t i = 0; i < seeds.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t i = next++; i < seeds.size(); i = next++) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<TrajectoryLog> logs;
  logs.reserve(slots.size());
  for (auto& slot : slots) logs.push_back(std::move(*slot));
  return logs;
}

}  // namespace bidlearn
