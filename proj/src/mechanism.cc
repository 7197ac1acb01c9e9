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

#include "bidlearn/mechanism.h"

#include <algorithm>
#include <functional>
#include <string>

#include "bidlearn/errors.h"

namespace bidlearn {

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kSecondPrice:
      return "spa";
    case MechanismKind::kFirstPrice:
      return "fpa";
    case MechanismKind::kMultiPositionVcg:
      return "vcg";
  }
  return "unknown";
}

MechanismKind ParseMechanismKind(std::string_view name) {
  if (name == "spa" || name == "second_price") {
    return MechanismKind::kSecondPrice;
  }
  if (name == "fpa" || name == "first_price") return MechanismKind::kFirstPrice;
  if (name == "vcg") return MechanismKind::kMultiPositionVcg;
  throw ConfigError("unknown mechanism kind '" + std::string(name) +
                    "' (expected spa, fpa or vcg)");
}

Mechanism Mechanism::SecondPrice() {
  return Mechanism(MechanismKind::kSecondPrice, {1.0});
}

Mechanism Mechanism::FirstPrice() {
  return Mechanism(MechanismKind::kFirstPrice, {1.0});
}

Mechanism Mechanism::MultiPositionVcg(std::vector<double> multipliers) {
  if (multipliers.empty()) {
    throw ConfigError("VCG needs at least one position multiplier");
  }
  for (size_t i = 0; i < multipliers.size(); ++i) {
    if (!(multipliers[i] > 0.0)) {
      throw ConfigError("VCG position multipliers must be > 0");
    }
    if (i > 0 && multipliers[i] > multipliers[i - 1]) {
      throw ConfigError("VCG position multipliers must be nonincreasing");
    }
  }
  return Mechanism(MechanismKind::kMultiPositionVcg, std::move(multipliers));
}

double Mechanism::Rho() const {
  double rho = multipliers_.back();
  for (int i = 0; i + 1 < Slots(); ++i) {
    rho = std::min(rho, multipliers_[i] - multipliers_[i + 1]);
  }
  return rho;
}

void Mechanism::Validate(int num_bidders) const {
  if (num_bidders < 2) {
    throw ConfigError("an auction needs n >= 2 bidders");
  }
  if (num_bidders <= Slots()) {
    throw ConfigError("VCG requires more bidders than slots (n > k), got n=" +
                      std::to_string(num_bidders) +
                      " k=" + std::to_string(Slots()));
  }
}

void RankBids(std::span<const Tick> bids, Rng& rng, std::vector<int>& ranking) {
  const int n = static_cast<int>(bids.size());
  ranking.resize(n);
  for (int i = 0; i < n; ++i) ranking[i] = i;
  std::stable_sort(ranking.begin(), ranking.end(),
                   [&](int a, int b) { return bids[a] > bids[b]; });
  // Fisher-Yates inside each run of equal bids.
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && bids[ranking[end]] == bids[ranking[start]]) ++end;
    for (int i = end - 1; i > start; --i) {
      std::uniform_int_distribution<int> pick(start, i);
      std::swap(ranking[i], ranking[pick(rng)]);
    }
    start = end;
  }
}

void SettleInto(const Mechanism& mech, const ValueGrid& grid,
                std::span<const Tick> bids, std::span<const Tick> values,
                std::span<const int> ranking, AuctionOutcome& out) {
  const int n = static_cast<int>(bids.size());
  const double h = grid.Resolution();
  out.tie = false;
  out.allocation.assign(n, 0.0);
  out.payments.assign(n, 0.0);
  out.utilities.assign(n, 0.0);
  out.ranking.assign(ranking.begin(), ranking.end());

  auto sorted_bid = [&](int pos) { return bids[ranking[pos]]; };
  const int slots = mech.Slots();
  for (int pos = 0; pos < slots && pos < n; ++pos) {
    const int bidder = ranking[pos];
    const Tick value = values[bidder];
    if (mech.kind() == MechanismKind::kFirstPrice) {
      out.allocation[bidder] = 1.0;
      out.payments[bidder] = sorted_bid(0) / h;
      out.utilities[bidder] = (value - sorted_bid(0)) / h;
      continue;
    }
    // Each slot j >= pos contributes (p_j - p_{j+1}) times the bid just
    // below it; this is the externality the bidder imposes.
    double pay_ticks = 0.0;
    double util_ticks = 0.0;
    for (int j = pos; j < slots; ++j) {
      const double weight = mech.Multiplier(j) - mech.Multiplier(j + 1);
      pay_ticks += weight * sorted_bid(j + 1);
      util_ticks += weight * (value - sorted_bid(j + 1));
    }
    out.allocation[bidder] = mech.Multiplier(pos);
    out.payments[bidder] = pay_ticks / h;
    out.utilities[bidder] = util_ticks / h;
  }

  int start = 0;
  while (start < n && start < slots) {
    int end = start + 1;
    while (end < n && sorted_bid(end) == sorted_bid(start)) ++end;
    if (end - start > 1) out.tie = true;
    start = end;
  }
}

AuctionOutcome Settle(const Mechanism& mech, const ValueGrid& grid,
                      std::span<const Tick> bids, std::span<const Tick> values,
                      std::span<const int> ranking) {
  AuctionOutcome out;
  SettleInto(mech, grid, bids, values, ranking, out);
  return out;
}

AuctionOutcome RunAuction(const Mechanism& mech, const ValueGrid& grid,
                          std::span<const Tick> bids,
                          std::span<const Tick> values, Rng& rng) {
  mech.Validate(static_cast<int>(bids.size()));
  std::vector<int> ranking;
  RankBids(bids, rng, ranking);
  return Settle(mech, grid, bids, values, ranking);
}

std::vector<UtilityBranch> UtilityLottery(const Mechanism& mech,
                                          const ValueGrid& grid,
                                          std::span<const Tick> opponent_bids,
                                          Tick value, Tick bid) {
  const double h = grid.Resolution();
  std::vector<Tick> sorted(opponent_bids.begin(), opponent_bids.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const int above = static_cast<int>(
      std::count_if(sorted.begin(), sorted.end(), [&](Tick o) { return o > bid; }));
  const int tied = static_cast<int>(
      std::count(sorted.begin(), sorted.end(), bid));
  sorted.insert(sorted.begin() + above, bid);

  std::vector<UtilityBranch> branches;
  const double probability = 1.0 / (tied + 1);
  for (int pos = above; pos <= above + tied; ++pos) {
    double util_ticks = 0.0;
    if (mech.kind() == MechanismKind::kFirstPrice) {
      if (pos == 0) util_ticks = value - bid;
    } else {
      for (int j = pos; j < mech.Slots(); ++j) {
        const double weight = mech.Multiplier(j) - mech.Multiplier(j + 1);
        util_ticks += weight * (value - sorted[j + 1]);
      }
    }
    branches.push_back({probability, util_ticks / h});
  }
  return branches;
}

void CounterfactualRewardsInto(const Mechanism& mech, const ValueGrid& grid,
                               std::span<const Tick> opponent_bids, Tick value,
                               std::span<double> out) {
  const int h = grid.Resolution();
  if (mech.kind() == MechanismKind::kMultiPositionVcg) {
    for (Tick b = 1; b <= h; ++b) {
      double expected = 0.0;
      for (const auto& branch :
           UtilityLottery(mech, grid, opponent_bids, value, b)) {
        expected += branch.probability * branch.utility;
      }
      out[b - 1] = expected;
    }
    return;
  }
  // Single item: only the highest opposing bid and its multiplicity matter.
  Tick top = 0;
  int multiplicity = 0;
  for (Tick o : opponent_bids) {
    if (o > top) {
      top = o;
      multiplicity = 1;
    } else if (o == top) {
      ++multiplicity;
    }
  }
  const bool first_price = mech.kind() == MechanismKind::kFirstPrice;
  const double hd = h;
  for (Tick b = 1; b <= h; ++b) {
    const Tick price = first_price ? b : top;
    if (b > top) {
      out[b - 1] = (value - price) / hd;
    } else if (b == top) {
      out[b - 1] = (value - price) / hd / (multiplicity + 1);
    } else {
      out[b - 1] = 0.0;
    }
  }
}

std::vector<double> CounterfactualRewards(const Mechanism& mech,
                                          const ValueGrid& grid,
                                          std::span<const Tick> opponent_bids,
                                          Tick value) {
  std::vector<double> out(grid.Size());
  CounterfactualRewardsInto(mech, grid, opponent_bids, value, out);
  return out;
}

}  // namespace bidlearn
