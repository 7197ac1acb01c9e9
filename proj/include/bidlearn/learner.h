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

#ifndef BIDLEARN_LEARNER_H_
#define BIDLEARN_LEARNER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bidlearn/grid.h"
#include "bidlearn/mechanism.h"
#include "bidlearn/rng.h"

namespace bidlearn {

enum class FeedbackMode { kBandit, kFullInfo, kCrossLearning };
enum class PolicyKind { kEpsilonGreedy, kMwu, kExp3, kUcb1, kWorstArm };

std::string_view FeedbackName(FeedbackMode mode);
FeedbackMode ParseFeedbackMode(std::string_view name);
std::string_view PolicyName(PolicyKind kind);
PolicyKind ParsePolicyKind(std::string_view name);

// Linear anneal from `start` to `end` over `anneal_rounds`, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t anneal_rounds = 500000;

  double At(std::int64_t t) const;
};

// The probability bound gamma_t of a mean-based learner.
class GammaSchedule {
 public:
  GammaSchedule(std::string description, std::function<double(std::int64_t)> fn)
      : description_(std::move(description)), fn_(std::move(fn)) {}

  static GammaSchedule Constant(double gamma);
  // gamma_t = scale * t^(-exponent); mean-based for 0 < exponent < 1.
  static GammaSchedule Power(double scale, double exponent);
  static GammaSchedule FromEpsilon(const EpsilonSchedule& epsilon);
  // "const:<g>", "power:<scale>,<exponent>" or
  // "epsilon:<start>,<end>,<anneal_rounds>".
  static GammaSchedule Parse(std::string_view spec);

  double operator()(std::int64_t t) const { return fn_(t); }
  const std::string& description() const { return description_; }

  // Checks on a logarithmic probe grid up to `horizon` that gamma_t * t never
  // decreases and that gamma_t shrinks towards zero. Returns one message per
  // violated clause; empty means the shape is mean-based.
  std::vector<std::string> CheckMeanBasedShape(std::int64_t horizon) const;

 private:
  std::string description_;
  std::function<double(std::int64_t)> fn_;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kEpsilonGreedy;
  EpsilonSchedule epsilon;     // epsilon-greedy and worst-arm
  double eta = 0.1;            // MWU and Exp3 learning rate
  // When set, MWU uses eta_t = ln(H / gamma_t) / (gamma_t * t), which keeps
  // any arm trailing by more than gamma_t * t below probability gamma_t / H.
  std::optional<GammaSchedule> eta_target;
  double exp3_mixing = 0.05;
  double ucb_c = 0.5;
};

// Round feedback. `opponent_bids` is required for full-information and
// cross-learning modes.
struct Feedback {
  double utility = 0.0;
  std::optional<std::span<const Tick>> opponent_bids;
};

// Running sum with Neumaier compensation.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void Add(double x);
  double Value() const { return sum + compensation; }
};

// A contextual learner driven by Algorithm-MBL: uniform exploration for the
// first T0 rounds, then the configured mean-based policy. Context = value.
class ContextualLearner {
 public:
  ContextualLearner(ValueGrid grid, Mechanism mechanism, PolicySpec policy,
                    FeedbackMode feedback, std::int64_t exploration_rounds);

  // Bid for round round() + 1. When `distribution` is non-null it receives
  // the action probabilities the bid was drawn from (size H).
  Tick ChooseBid(Tick value, Rng& rng,
                 std::vector<double>* distribution = nullptr);
  // Exploit-only choice used for greedy rollouts; never updates state.
  Tick ChooseGreedy(Tick value, Rng& rng) const;
  // Probabilities ChooseBid would use for `value` at round round() + 1.
  void ActionDistribution(Tick value, std::vector<double>& out) const;

  // Throws FeedbackError when opponent bids are missing in a non-bandit mode.
  void Update(Tick value, Tick chosen_bid, const Feedback& feedback);

  // Cumulative-reward statistic the policy ranks arms by, in the form of the
  // mean-based definition: exact counterfactual sums under full information
  // and cross-learning, estimates under bandit feedback.
  double Score(Tick context, Tick bid) const;
  std::vector<double> Scores(Tick context) const;
  // Raw running sums and counts.
  double Sigma(Tick context, Tick bid) const;
  std::int64_t Count(Tick context, Tick bid) const;
  std::int64_t ContextVisits(Tick context) const;

  // Gamma the policy registers for the compliance monitor at the next
  // decision (epsilon_t for epsilon-greedy); nullopt when it has none.
  std::optional<double> RegisteredGamma() const;

  std::int64_t rounds() const { return rounds_; }
  std::int64_t exploration_rounds() const { return exploration_rounds_; }
  bool Exploring() const { return rounds_ + 1 <= exploration_rounds_; }
  const ValueGrid& grid() const { return grid_; }
  const PolicySpec& policy() const { return policy_; }
  FeedbackMode feedback() const { return feedback_; }

 private:
  int Index(Tick context, Tick bid) const {
    return (context - 1) * grid_.Size() + (bid - 1);
  }
  void ExploitDistribution(Tick context, std::int64_t t,
                           std::vector<double>& out) const;
  Tick ArgmaxScore(Tick context, Rng& rng) const;
  Tick SampleFrom(std::span<const double> probs, Rng& rng) const;

  ValueGrid grid_;
  Mechanism mechanism_;
  PolicySpec policy_;
  FeedbackMode feedback_;
  std::int64_t exploration_rounds_;
  std::int64_t rounds_ = 0;

  std::vector<CompensatedSum> sigma_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> visits_;
  // Exp3 importance-weighted sums of rewards mapped to [0, 1].
  std::vector<CompensatedSum> weighted_;
  std::vector<double> scratch_;
  mutable std::vector<double> probs_;
};

// One logged decision for the compliance monitor. `t` counts completed
// rounds, so the decision is for round t + 1 and `scores` is sigma_t.
struct PlayRecord {
  std::int64_t t = 0;
  int bidder = 0;
  Tick context = 0;
  bool exploring = false;
  std::vector<double> scores;
  std::vector<double> distribution;
  std::optional<double> gamma;
};

struct Violation {
  std::int64_t t = 0;
  int bidder = 0;
  Tick context = 0;
  Tick action = 0;
  double deficit = 0.0;      // max_b sigma_b - sigma_a
  double threshold = 0.0;    // gamma_t * t
  double probability = 0.0;  // p_a
  double gamma = 0.0;
};

struct ComplianceReport {
  std::int64_t decisions_checked = 0;
  std::int64_t decisions_skipped = 0;  // exploration rounds
  std::vector<Violation> violations;

  bool Clean() const { return violations.empty(); }
};

// Streaming form of the check so long runs need not keep their play log.
class ComplianceMonitor {
 public:
  // With no schedule, each record's registered gamma is used.
  explicit ComplianceMonitor(std::optional<GammaSchedule> schedule = {})
      : schedule_(std::move(schedule)) {}

  void Observe(const PlayRecord& record);
  const ComplianceReport& report() const { return report_; }

 private:
  std::optional<GammaSchedule> schedule_;
  ComplianceReport report_;
};

// Lists every (t, context, action) with sigma_a < max_b sigma_b - gamma_t t
// that was nevertheless played with probability above gamma_t.
ComplianceReport ComplianceCheck(std::span<const PlayRecord> log,
                                 const std::optional<GammaSchedule>& schedule);

}  // namespace bidlearn

#endif  // BIDLEARN_LEARNER_H_
