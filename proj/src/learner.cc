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

#include "bidlearn/learner.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "bidlearn/errors.h"

namespace bidlearn {

std::string_view FeedbackName(FeedbackMode mode) {
  switch (mode) {
    case FeedbackMode::kBandit:
      return "bandit";
    case FeedbackMode::kFullInfo:
      return "full_info";
    case FeedbackMode::kCrossLearning:
      return "cross_learning";
  }
  return "unknown";
}

FeedbackMode ParseFeedbackMode(std::string_view name) {
  if (name == "bandit") return FeedbackMode::kBandit;
  if (name == "full_info" || name == "fullinfo") return FeedbackMode::kFullInfo;
  if (name == "cross_learning" || name == "crosslearning") {
    return FeedbackMode::kCrossLearning;
  }
  throw ConfigError("unknown feedback mode '" + std::string(name) +
                    "' (expected bandit, full_info or cross_learning)");
}

std::string_view PolicyName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kEpsilonGreedy:
      return "epsilon_greedy";
    case PolicyKind::kMwu:
      return "mwu";
    case PolicyKind::kExp3:
      return "exp3";
    case PolicyKind::kUcb1:
      return "ucb1";
    case PolicyKind::kWorstArm:
      return "worst_arm";
  }
  return "unknown";
}

PolicyKind ParsePolicyKind(std::string_view name) {
  if (name == "epsilon_greedy") return PolicyKind::kEpsilonGreedy;
  if (name == "mwu") return PolicyKind::kMwu;
  if (name == "exp3") return PolicyKind::kExp3;
  if (name == "ucb1" || name == "ucb") return PolicyKind::kUcb1;
  if (name == "worst_arm") return PolicyKind::kWorstArm;
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected epsilon_greedy, mwu, exp3, ucb1 or "
                    "worst_arm)");
}

double EpsilonSchedule::At(std::int64_t t) const {
  if (anneal_rounds <= 0) return end;
  const double frac =
      std::min(1.0, static_cast<double>(t) / static_cast<double>(anneal_rounds));
  return std::max(end, start - (start - end) * frac);
}

GammaSchedule GammaSchedule::Constant(double gamma) {
  std::ostringstream os;
  os.precision(17);
  os << "const:" << gamma;
  return GammaSchedule(os.str(), [gamma](std::int64_t) { return gamma; });
}

GammaSchedule GammaSchedule::Power(double scale, double exponent) {
  std::ostringstream os;
  os.precision(17);
  os << "power:" << scale << "," << exponent;
  return GammaSchedule(os.str(), [scale, exponent](std::int64_t t) {
    return scale * std::pow(static_cast<double>(std::max<std::int64_t>(t, 1)),
                            -exponent);
  });
}

GammaSchedule GammaSchedule::FromEpsilon(const EpsilonSchedule& epsilon) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon:" << epsilon.start << "," << epsilon.end << ","
     << epsilon.anneal_rounds;
  return GammaSchedule(os.str(),
                       [epsilon](std::int64_t t) { return epsilon.At(t); });
}

namespace {

std::vector<double> ParseNumberList(std::string_view text,
                                    std::string_view what) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string item(text.substr(start, end - start));
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + item + "' in " +
                        std::string(what));
    }
    start = end + 1;
  }
  return out;
}

}  // namespace

GammaSchedule GammaSchedule::Parse(std::string_view spec) {
  const size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("gamma schedule '" + std::string(spec) +
                      "' must look like const:<g>, power:<c>,<a> or "
                      "epsilon:<start>,<end>,<rounds>");
  }
  const std::string_view kind = spec.substr(0, colon);
  const auto args = ParseNumberList(spec.substr(colon + 1), "gamma schedule");
  if (kind == "const" && args.size() == 1) return Constant(args[0]);
  if (kind == "power" && args.size() == 2) return Power(args[0], args[1]);
  if (kind == "epsilon" && args.size() == 3) {
    return FromEpsilon({args[0], args[1], static_cast<std::int64_t>(args[2])});
  }
  throw ConfigError("unrecognised gamma schedule '" + std::string(spec) + "'");
}

std::vector<std::string> GammaSchedule::CheckMeanBasedShape(
    std::int64_t horizon) const {
  std::vector<std::string> problems;
  double previous_product = -1.0;
  std::int64_t previous_t = 0;
  for (double probe = 1.0; probe <= static_cast<double>(horizon);
       probe *= 1.25) {
    const auto t = static_cast<std::int64_t>(std::ceil(probe));
    if (t == previous_t) continue;
    const double gamma = (*this)(t);
    if (!(gamma >= 0.0)) {
      problems.push_back("gamma_t must be >= 0 (t=" + std::to_string(t) + ")");
      break;
    }
    const double product = gamma * static_cast<double>(t);
    if (product < previous_product * (1.0 - 1e-12)) {
      problems.push_back("gamma_t * t decreases between t=" +
                         std::to_string(previous_t) +
                         " and t=" + std::to_string(t));
      break;
    }
    previous_product = product;
    previous_t = t;
  }
  const auto mid = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<double>(std::max<std::int64_t>(horizon, 1)))));
  if (!((*this)(horizon) < (*this)(mid) * (1.0 - 1e-9))) {
    problems.push_back("gamma_t does not decay towards 0 up to t=" +
                       std::to_string(horizon));
  }
  return problems;
}

void CompensatedSum::Add(double x) {
  const double total = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    compensation += (sum - total) + x;
  } else {
    compensation += (x - total) + sum;
  }
  sum = total;
}

ContextualLearner::ContextualLearner(ValueGrid grid, Mechanism mechanism,
                                     PolicySpec policy, FeedbackMode feedback,
                                     std::int64_t exploration_rounds)
    : grid_(grid),
      mechanism_(std::move(mechanism)),
      policy_(std::move(policy)),
      feedback_(feedback),
      exploration_rounds_(exploration_rounds) {
  if (exploration_rounds < 0) {
    throw ConfigError("exploration rounds T0 must be >= 0");
  }
  const int cells = grid_.Size() * grid_.Size();
  sigma_.assign(cells, {});
  counts_.assign(cells, 0);
  visits_.assign(grid_.Size(), 0);
  weighted_.assign(cells, {});
  scratch_.assign(grid_.Size(), 0.0);
  probs_.assign(grid_.Size(), 0.0);
}

double ContextualLearner::Sigma(Tick context, Tick bid) const {
  return sigma_[Index(context, bid)].Value();
}

std::int64_t ContextualLearner::Count(Tick context, Tick bid) const {
  return counts_[Index(context, bid)];
}

std::int64_t ContextualLearner::ContextVisits(Tick context) const {
  return visits_[context - 1];
}

double ContextualLearner::Score(Tick context, Tick bid) const {
  if (feedback_ != FeedbackMode::kBandit) return Sigma(context, bid);
  const auto visits = static_cast<double>(ContextVisits(context));
  if (policy_.kind == PolicyKind::kExp3) {
    return 2.0 * weighted_[Index(context, bid)].Value() - visits;
  }
  const std::int64_t n = Count(context, bid);
  if (n == 0) return 0.0;
  return Sigma(context, bid) / static_cast<double>(n) * visits;
}

std::vector<double> ContextualLearner::Scores(Tick context) const {
  std::vector<double> out(grid_.Size());
  for (Tick b = 1; b <= grid_.Size(); ++b) out[b - 1] = Score(context, b);
  return out;
}

std::optional<double> ContextualLearner::RegisteredGamma() const {
  const std::int64_t t = rounds_ + 1;
  switch (policy_.kind) {
    case PolicyKind::kEpsilonGreedy:
    case PolicyKind::kWorstArm:
      return policy_.epsilon.At(t);
    case PolicyKind::kMwu:
      if (policy_.eta_target) return (*policy_.eta_target)(rounds_);
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

namespace {

// Uniform weight on the positions where `key` attains its extreme value.
void ExtremeSet(std::span<const double> key, bool maximum,
                std::vector<double>& out) {
  const double best = maximum ? *std::max_element(key.begin(), key.end())
                              : *std::min_element(key.begin(), key.end());
  int hits = 0;
  for (double k : key) hits += (k == best);
  for (size_t i = 0; i < key.size(); ++i) {
    out[i] = key[i] == best ? 1.0 / hits : 0.0;
  }
}

void Softmax(std::span<const double> key, double eta, std::vector<double>& out) {
  const double top = *std::max_element(key.begin(), key.end());
  double total = 0.0;
  for (size_t i = 0; i < key.size(); ++i) {
    out[i] = std::exp(eta * (key[i] - top));
    total += out[i];
  }
  for (double& p : out) p /= total;
}

}  // namespace

void ContextualLearner::ExploitDistribution(Tick context, std::int64_t t,
                                            std::vector<double>& out) const {
  const int h = grid_.Size();
  out.assign(h, 0.0);
  std::vector<double> key(h);
  for (Tick b = 1; b <= h; ++b) key[b - 1] = Score(context, b);

  switch (policy_.kind) {
    case PolicyKind::kEpsilonGreedy:
    case PolicyKind::kWorstArm: {
      const double eps = policy_.epsilon.At(t);
      ExtremeSet(key, policy_.kind == PolicyKind::kEpsilonGreedy, out);
      for (double& p : out) p = eps / h + (1.0 - eps) * p;
      return;
    }
    case PolicyKind::kUcb1: {
      if (feedback_ == FeedbackMode::kBandit) {
        const double visits = static_cast<double>(ContextVisits(context));
        for (Tick b = 1; b <= h; ++b) {
          const auto n = static_cast<double>(Count(context, b));
          key[b - 1] =
              n == 0 ? std::numeric_limits<double>::infinity()
                     : Sigma(context, b) / n +
                           policy_.ucb_c * std::sqrt(std::log(visits) / n);
        }
      }
      ExtremeSet(key, true, out);
      return;
    }
    case PolicyKind::kMwu: {
      double eta = policy_.eta;
      const std::int64_t completed = t - 1;
      if (policy_.eta_target) {
        const double gamma = (*policy_.eta_target)(completed);
        eta = completed > 0 && gamma > 0.0
                  ? std::log(h / gamma) / (gamma * static_cast<double>(completed))
                  : 0.0;
      }
      Softmax(key, eta, out);
      return;
    }
    case PolicyKind::kExp3: {
      if (feedback_ == FeedbackMode::kBandit) {
        // Rank by the importance-weighted [0, 1] sums directly.
        for (Tick b = 1; b <= h; ++b) {
          key[b - 1] = weighted_[Index(context, b)].Value();
        }
      }
      Softmax(key, policy_.eta, out);
      const double mix = policy_.exp3_mixing;
      for (double& p : out) p = (1.0 - mix) * p + mix / h;
      return;
    }
  }
}

void ContextualLearner::ActionDistribution(Tick value,
                                           std::vector<double>& out) const {
  const std::int64_t t = rounds_ + 1;
  if (t <= exploration_rounds_) {
    out.assign(grid_.Size(), 1.0 / grid_.Size());
    return;
  }
  ExploitDistribution(value, t, out);
}

Tick ContextualLearner::SampleFrom(std::span<const double> probs,
                                   Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<Tick>(i + 1);
  }
  // Rounding left a sliver of mass; return the last arm with support.
  for (size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<Tick>(i + 1);
  }
  return grid_.Size();
}

Tick ContextualLearner::ArgmaxScore(Tick context, Rng& rng) const {
  const int h = grid_.Size();
  double best = -std::numeric_limits<double>::infinity();
  int hits = 0;
  Tick choice = 1;
  // Reservoir sampling over the tied maximisers keeps one pass.
  for (Tick b = 1; b <= h; ++b) {
    const double s = Score(context, b);
    if (s > best) {
      best = s;
      hits = 1;
      choice = b;
    } else if (s == best) {
      ++hits;
      std::uniform_int_distribution<int> pick(1, hits);
      if (pick(rng) == 1) choice = b;
    }
  }
  return choice;
}

Tick ContextualLearner::ChooseBid(Tick value, Rng& rng,
                                  std::vector<double>* distribution) {
  const int h = grid_.Size();
  const std::int64_t t = rounds_ + 1;
  if (distribution != nullptr) ActionDistribution(value, *distribution);

  if (t <= exploration_rounds_) {
    std::uniform_int_distribution<int> uniform(1, h);
    return uniform(rng);
  }
  switch (policy_.kind) {
    case PolicyKind::kEpsilonGreedy:
    case PolicyKind::kWorstArm: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng) < policy_.epsilon.At(t)) {
        std::uniform_int_distribution<int> uniform(1, h);
        return uniform(rng);
      }
      if (policy_.kind == PolicyKind::kEpsilonGreedy) {
        return ArgmaxScore(value, rng);
      }
      ExploitDistribution(value, t, probs_);
      // Remove the epsilon share: the remaining mass sits on the argmin set.
      const double floor = *std::min_element(probs_.begin(), probs_.end());
      for (double& p : probs_) p -= floor;
      double total = 0.0;
      for (double p : probs_) total += p;
      for (double& p : probs_) p /= total;
      return SampleFrom(probs_, rng);
    }
    case PolicyKind::kUcb1:
    case PolicyKind::kMwu:
    case PolicyKind::kExp3:
      ExploitDistribution(value, t, probs_);
      return SampleFrom(probs_, rng);
  }
  return 1;
}

Tick ContextualLearner::ChooseGreedy(Tick value, Rng& rng) const {
  return ArgmaxScore(value, rng);
}

void ContextualLearner::Update(Tick value, Tick chosen_bid,
                               const Feedback& feedback) {
  if (feedback_ != FeedbackMode::kBandit && !feedback.opponent_bids) {
    throw FeedbackError(std::string(FeedbackName(feedback_)) +
                        " feedback requires the opposing bids");
  }
  if (policy_.kind == PolicyKind::kExp3 &&
      feedback_ == FeedbackMode::kBandit) {
    ActionDistribution(value, probs_);
    const double p = probs_[chosen_bid - 1];
    // Utilities live in [-1, 1]; map to [0, 1] before weighting.
    weighted_[Index(value, chosen_bid)].Add((feedback.utility + 1.0) / 2.0 / p);
  }

  ++rounds_;
  ++visits_[value - 1];
  ++counts_[Index(value, chosen_bid)];

  switch (feedback_) {
    case FeedbackMode::kBandit:
      sigma_[Index(value, chosen_bid)].Add(feedback.utility);
      return;
    case FeedbackMode::kFullInfo:
      CounterfactualRewardsInto(mechanism_, grid_, *feedback.opponent_bids,
                                value, scratch_);
      for (Tick b = 1; b <= grid_.Size(); ++b) {
        sigma_[Index(value, b)].Add(scratch_[b - 1]);
      }
      return;
    case FeedbackMode::kCrossLearning:
      for (Tick c = 1; c <= grid_.Size(); ++c) {
        CounterfactualRewardsInto(mechanism_, grid_, *feedback.opponent_bids,
                                  c, scratch_);
        for (Tick b = 1; b <= grid_.Size(); ++b) {
          sigma_[Index(c, b)].Add(scratch_[b - 1]);
        }
      }
      return;
  }
}

void ComplianceMonitor::Observe(const PlayRecord& record) {
  if (record.exploring) {
    ++report_.decisions_skipped;
    return;
  }
  const std::optional<double> gamma =
      schedule_ ? std::optional<double>((*schedule_)(record.t)) : record.gamma;
  if (!gamma) {
    ++report_.decisions_skipped;
    return;
  }
  ++report_.decisions_checked;
  const double best =
      *std::max_element(record.scores.begin(), record.scores.end());
  const double threshold = *gamma * static_cast<double>(record.t);
  for (size_t a = 0; a < record.scores.size(); ++a) {
    const double deficit = best - record.scores[a];
    if (deficit > threshold && record.distribution[a] > *gamma) {
      report_.violations.push_back({record.t, record.bidder, record.context,
                                    static_cast<Tick>(a + 1), deficit,
                                    threshold, record.distribution[a], *gamma});
    }
  }
}

ComplianceReport ComplianceCheck(std::span<const PlayRecord> log,
                                 const std::optional<GammaSchedule>& schedule) {
  ComplianceMonitor monitor(schedule);
  for (const auto& record : log) monitor.Observe(record);
  return monitor.report();
}

}  // namespace bidlearn
