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

#ifndef BIDLEARN_ANALYSIS_H_
#define BIDLEARN_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bidlearn/grid.h"
#include "bidlearn/learner.h"
#include "bidlearn/mechanism.h"

namespace bidlearn {

// Which convergence guarantee a bound or schedule belongs to.
enum class Theorem { kSecondPrice, kFirstPrice, kVcg };

std::string_view TheoremName(Theorem theorem);
Theorem ParseTheorem(std::string_view name);

// Exhaustive oracles enumerate H^(n-1) opponent profiles; larger instances
// are refused with a PreconditionError.
inline constexpr int kOracleMaxBidders = 4;
inline constexpr int kOracleMaxResolution = 16;
void CheckOracleSize(int num_bidders, int resolution);

// E[u(b; v)] when every opponent bids uniformly on the grid, with ties
// resolved uniformly at random. Exact up to floating-point summation.
double ExactExpectedUtilityUniform(const Mechanism& mech, int num_bidders,
                                   int resolution, Tick value, Tick bid);

// (v - b)(b - 1/(2H)): two-bidder first-price expected utility against a
// uniform opponent.
double FirstPriceUniformClosedForm(int resolution, Tick value, Tick bid);

struct AdvantageProbability {
  double probability = 0.0;  // P(u(v) - u(b) >= rho/H)
  double bound = 0.0;        // tau/n with tau = 1/H^(n-1)
  bool holds = false;
};

// Probability, over uniformly random opposing bids and independent tie
// breaks for both counterfactual bids, that truthful bidding beats bid `b`
// by at least rho/H (rho = 1 for second price). Throws PreconditionError for
// b == v or a non-truthful mechanism.
AdvantageProbability TruthfulAdvantageProbability(const Mechanism& mech,
                                                  int num_bidders,
                                                  int resolution, Tick value,
                                                  Tick bid);

struct ExplorationThreshold {
  std::int64_t t0 = 0;     // least T0 with exp(-tau^2 rho^2 T0/(32 n^2 H^2)) <= 1/2
  double gamma_cap = 0.0;  // tau rho / (8 n H)
};

// exp(-tau^2 rho^2 T0 / (32 n^2 H^2)).
double ExplorationTail(int num_bidders, int resolution, double tau, double rho,
                       std::int64_t t0);

ExplorationThreshold MinimalExplorationRounds(int num_bidders, int resolution,
                                              double tau, double rho = 1.0);

struct ConvergenceBound {
  double raw = 0.0;    // closed form before clamping
  double value = 0.0;  // clamped to [0, 1]
  bool vacuous = false;
  // One entry per violated precondition; the bound is not a guarantee then.
  std::vector<std::string> violations;
};

struct BoundInputs {
  std::int64_t t = 0;
  double gamma_t = 0.0;
  std::int64_t t0 = 0;
  int num_bidders = 2;
  int resolution = 10;
  double tau = 0.0;
  double rho = 1.0;
};

// Lower bound on the probability of bidding the equilibrium bid at time t.
ConvergenceBound ConvergenceProbability(Theorem theorem,
                                        const BoundInputs& in);

struct EpisodeSchedule {
  Theorem kind = Theorem::kSecondPrice;
  std::vector<std::int64_t> boundaries;  // T0 < T1 < T2 < ...
  // A level could not advance past the previous boundary.
  bool truncated = false;
  std::string note;
};

struct ScheduleInputs {
  std::int64_t t0 = 1;
  int num_bidders = 2;
  int resolution = 10;
  double tau = 0.0;
  std::int64_t horizon = 0;
  int max_levels = 64;
};

// Geometric time partition used by the convergence proofs. Each T_k is the
// last t with gamma_t * t <= tau T_{k-1} / (4 n H) (second price and VCG) or
// (gamma_t + 1) t <= (1/(4H^2) + 1) T_{k-1} (first price). For constant gamma
// this is exactly the floor recursion's solution. gamma_t * t must be
// nondecreasing, which is checked. Boundaries stop at `horizon`.
EpisodeSchedule BuildEpisodeSchedule(Theorem kind, const GammaSchedule& gamma,
                                     const ScheduleInputs& in);

// Equilibrium bids per value: {v} for truthful mechanisms, the singleton
// grid point in [v/2, v/2 + 1/H) for two-bidder first price.
class ReferenceStrategy {
 public:
  ReferenceStrategy(MechanismKind kind, ValueGrid grid,
                    std::vector<std::vector<Tick>> sets)
      : kind_(kind), grid_(grid), sets_(std::move(sets)) {}

  MechanismKind kind() const { return kind_; }
  const ValueGrid& grid() const { return grid_; }
  const std::vector<Tick>& Bids(Tick value) const { return sets_[value - 1]; }
  bool Contains(Tick value, Tick bid) const;

 private:
  MechanismKind kind_;
  ValueGrid grid_;
  std::vector<std::vector<Tick>> sets_;
};

// Throws PreconditionError for first price with odd H or n != 2.
ReferenceStrategy MakeReferenceStrategy(const Mechanism& mech,
                                        const ValueGrid& grid,
                                        int num_bidders = 2);

// min over v and b outside the first-price reference of
// E[u(ref(v))] - E[u(b)] against a uniform opponent, n = 2.
double FirstPriceEquilibriumGap(int resolution);

}  // namespace bidlearn

#endif  // BIDLEARN_ANALYSIS_H_
