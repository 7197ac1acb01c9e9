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

#include "bidlearn/grid.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "bidlearn/errors.h"

namespace bidlearn {

ValueGrid::ValueGrid(int resolution) : resolution_(resolution) {
  if (resolution < 2) {
    throw InvalidResolution("grid resolution H must be >= 2, got " +
                            std::to_string(resolution));
  }
}

std::vector<double> ValueGrid::Points() const {
  std::vector<double> points(resolution_);
  for (Tick k = 1; k <= resolution_; ++k) points[k - 1] = Value(k);
  return points;
}

ValueGrid MakeGrid(int resolution) { return ValueGrid(resolution); }

ValueDistribution::ValueDistribution(ValueGrid grid, std::vector<double> pmf)
    : grid_(grid), pmf_(std::move(pmf)), cdf_(pmf_.size()) {
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
  // The last cdf entry is exactly one by construction of the prior.
  cdf_.back() = 1.0;
}

ValueDistribution ValueDistribution::Uniform(const ValueGrid& grid) {
  return ValueDistribution(
      grid, std::vector<double>(grid.Size(), 1.0 / grid.Resolution()));
}

ValueDistribution ValueDistribution::FromPmf(const ValueGrid& grid,
                                             std::vector<double> pmf) {
  if (static_cast<int>(pmf.size()) != grid.Size()) {
    throw ConfigError("pmf has " + std::to_string(pmf.size()) +
                      " entries but the grid has " +
                      std::to_string(grid.Size()) + " points");
  }
  double total = 0.0;
  for (double mass : pmf) {
    if (!(mass >= 0.0)) throw ConfigError("pmf entries must be >= 0");
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("pmf must sum to 1 within 1e-12");
  }
  return ValueDistribution(grid, std::move(pmf));
}

bool ValueDistribution::IsUniform() const {
  const double u = 1.0 / grid_.Resolution();
  return std::all_of(pmf_.begin(), pmf_.end(),
                     [u](double m) { return std::abs(m - u) <= 1e-15; });
}

double MaxThickness(int resolution, int num_bidders) {
  return std::pow(static_cast<double>(resolution), -(num_bidders - 1));
}

namespace {

// P(at most `limit` of the opponents have a value strictly above `tick`).
// Poisson-binomial dynamic program over the independent opponents.
double AtMostAbove(std::span<const ValueDistribution> dists, int bidder,
                   Tick tick, int limit) {
  std::vector<double> count_pmf{1.0};
  for (int j = 0; j < static_cast<int>(dists.size()); ++j) {
    if (j == bidder) continue;
    const double above = 1.0 - dists[j].CdfAt(tick);
    std::vector<double> next(count_pmf.size() + 1, 0.0);
    for (size_t c = 0; c < count_pmf.size(); ++c) {
      next[c] += count_pmf[c] * (1.0 - above);
      next[c + 1] += count_pmf[c] * above;
    }
    count_pmf = std::move(next);
  }
  double total = 0.0;
  for (int c = 0; c <= limit && c < static_cast<int>(count_pmf.size()); ++c) {
    total += count_pmf[c];
  }
  return total;
}

void OrderStatistic(std::span<const ValueDistribution> dists, int bidder,
                    int order, std::vector<double>& pmf,
                    std::vector<double>& cdf) {
  const int h = dists[0].grid().Resolution();
  pmf.assign(h, 0.0);
  cdf.assign(h, 0.0);
  double previous = 0.0;
  for (Tick k = 1; k <= h; ++k) {
    // z^(order) <= k/H  iff  fewer than `order` opponents sit above k/H.
    cdf[k - 1] = k == h ? 1.0 : AtMostAbove(dists, bidder, k, order - 1);
    pmf[k - 1] = cdf[k - 1] - previous;
    previous = cdf[k - 1];
  }
}

}  // namespace

OpponentStatistics OpponentStats(std::span<const ValueDistribution> dists,
                                 int bidder, int order) {
  const int n = static_cast<int>(dists.size());
  if (n < 2) throw ConfigError("order statistics need at least two bidders");
  if (bidder < 0 || bidder >= n) {
    throw ConfigError("bidder index out of range");
  }
  if (order < 1 || order > n - 1) {
    throw ConfigError("order k must satisfy 1 <= k <= n-1, got " +
                      std::to_string(order));
  }
  for (const auto& d : dists) {
    if (!(d.grid() == dists[0].grid())) {
      throw ConfigError("all value distributions must share one grid");
    }
  }

  OpponentStatistics stats;
  stats.bidder = bidder;
  stats.order = order;
  OrderStatistic(dists, bidder, 1, stats.max_pmf, stats.max_cdf);
  OrderStatistic(dists, bidder, order, stats.kth_pmf, stats.kth_cdf);
  const double floor =
      *std::min_element(stats.kth_pmf.begin(), stats.kth_pmf.end());
  stats.tau = std::min(floor, MaxThickness(dists[0].grid().Resolution(), n));
  return stats;
}

double ThicknessTau(std::span<const ValueDistribution> dists, int order) {
  double tau = 1.0;
  for (int i = 0; i < static_cast<int>(dists.size()); ++i) {
    tau = std::min(tau, OpponentStats(dists, i, order).tau);
  }
  return tau;
}

}  // namespace bidlearn
