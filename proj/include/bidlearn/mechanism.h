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

#ifndef BIDLEARN_MECHANISM_H_
#define BIDLEARN_MECHANISM_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bidlearn/grid.h"
#include "bidlearn/rng.h"

namespace bidlearn {

enum class MechanismKind { kSecondPrice, kFirstPrice, kMultiPositionVcg };

std::string_view MechanismName(MechanismKind kind);
// Accepts "spa"/"second_price", "fpa"/"first_price", "vcg".
MechanismKind ParseMechanismKind(std::string_view name);

class Mechanism {
 public:
  static Mechanism SecondPrice();
  static Mechanism FirstPrice();
  // Position multipliers p_1 >= ... >= p_k > 0; positions past k get 0.
  static Mechanism MultiPositionVcg(std::vector<double> multipliers);

  MechanismKind kind() const { return kind_; }
  std::span<const double> multipliers() const { return multipliers_; }
  int Slots() const { return static_cast<int>(multipliers_.size()); }
  // Multiplier of a zero-based position; zero past the last slot.
  double Multiplier(int position) const {
    return position < Slots() ? multipliers_[position] : 0.0;
  }
  // min over slots of p_i - p_{i+1}, with p_{k+1} = 0.
  double Rho() const;
  bool Truthful() const { return kind_ != MechanismKind::kFirstPrice; }

  // Throws ConfigError when the mechanism cannot host `num_bidders`.
  void Validate(int num_bidders) const;

 private:
  Mechanism(MechanismKind kind, std::vector<double> multipliers)
      : kind_(kind), multipliers_(std::move(multipliers)) {}

  MechanismKind kind_;
  std::vector<double> multipliers_;
};

struct AuctionOutcome {
  // Share of the item (single item) or position multiplier (VCG).
  std::vector<double> allocation;
  std::vector<double> payments;
  std::vector<double> utilities;
  // ranking[pos] is the bidder placed at zero-based position pos.
  std::vector<int> ranking;
  // True when a random tie-break decided an allocated position.
  bool tie = false;
};

// Orders bidders by descending bid. Equal bids are placed in a uniformly
// random order; no randomness is drawn when all bids differ.
void RankBids(std::span<const Tick> bids, Rng& rng, std::vector<int>& ranking);

// Allocation, payments and utilities for a fixed ranking.
AuctionOutcome Settle(const Mechanism& mech, const ValueGrid& grid,
                      std::span<const Tick> bids, std::span<const Tick> values,
                      std::span<const int> ranking);

// As Settle, reusing the vectors already held by `out`.
void SettleInto(const Mechanism& mech, const ValueGrid& grid,
                std::span<const Tick> bids, std::span<const Tick> values,
                std::span<const int> ranking, AuctionOutcome& out);

AuctionOutcome RunAuction(const Mechanism& mech, const ValueGrid& grid,
                          std::span<const Tick> bids,
                          std::span<const Tick> values, Rng& rng);

// One tie-resolution branch of a counterfactual bid.
struct UtilityBranch {
  double probability;
  double utility;
};

// Utility of bidding `bid` with value `value` against fixed opposing bids,
// split by the equally likely positions a random tie-break can assign.
std::vector<UtilityBranch> UtilityLottery(const Mechanism& mech,
                                          const ValueGrid& grid,
                                          std::span<const Tick> opponent_bids,
                                          Tick value, Tick bid);

// For every candidate bid b on the grid, the exact expectation (over the tie
// break) of the utility of bidding b; entry b - 1 belongs to tick b.
std::vector<double> CounterfactualRewards(const Mechanism& mech,
                                          const ValueGrid& grid,
                                          std::span<const Tick> opponent_bids,
                                          Tick value);

// Same as above, writing into `out` (size H) without allocating when the
// opponent count is small. Used by the simulation hot loop.
void CounterfactualRewardsInto(const Mechanism& mech, const ValueGrid& grid,
                               std::span<const Tick> opponent_bids, Tick value,
                               std::span<double> out);

}  // namespace bidlearn

#endif  // BIDLEARN_MECHANISM_H_
