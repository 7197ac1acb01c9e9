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

#ifndef BIDLEARN_GRID_H_
#define BIDLEARN_GRID_H_

#include <span>
#include <vector>

namespace bidlearn {

// A grid point is identified by its integer numerator k, standing for the
// value k/H. Valid ticks are 1..H. All comparisons between bids and values are
// done on ticks so ties are exact.
using Tick = int;

class ValueGrid {
 public:
  // Throws InvalidResolution when resolution < 2.
  explicit ValueGrid(int resolution);

  int Resolution() const { return resolution_; }
  int Size() const { return resolution_; }
  bool Contains(Tick tick) const { return tick >= 1 && tick <= resolution_; }
  double Value(Tick tick) const {
    return static_cast<double>(tick) / resolution_;
  }
  // 1/H, the spacing between consecutive points.
  double Step() const { return 1.0 / resolution_; }
  std::vector<double> Points() const;

  friend bool operator==(const ValueGrid&, const ValueGrid&) = default;

 private:
  int resolution_;
};

ValueGrid MakeGrid(int resolution);

// Per-bidder prior over the grid. pmf()[k - 1] is the mass of tick k.
class ValueDistribution {
 public:
  static ValueDistribution Uniform(const ValueGrid& grid);
  // Throws ConfigError unless the masses are nonnegative, have one entry per
  // grid point and sum to one within 1e-12.
  static ValueDistribution FromPmf(const ValueGrid& grid,
                                   std::vector<double> pmf);

  const ValueGrid& grid() const { return grid_; }
  std::span<const double> pmf() const { return pmf_; }
  std::span<const double> cdf() const { return cdf_; }
  double Mass(Tick tick) const { return pmf_[tick - 1]; }
  double CdfAt(Tick tick) const { return tick < 1 ? 0.0 : cdf_[tick - 1]; }
  bool IsUniform() const;

 private:
  ValueDistribution(ValueGrid grid, std::vector<double> pmf);

  ValueGrid grid_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

// Distribution of the highest and of the k-th highest opposing value seen by
// one bidder, with the thickness constant derived from the k-th order pmf.
struct OpponentStatistics {
  int bidder = 0;
  int order = 1;
  std::vector<double> max_pmf;
  std::vector<double> max_cdf;
  std::vector<double> kth_pmf;
  std::vector<double> kth_cdf;
  // min over the grid of kth_pmf, clamped to at most 1/H^(n-1).
  double tau = 0.0;
};

// Exact order statistics of the opposing values for independent, possibly
// non-identical priors. `bidder` is zero-based, 1 <= order <= n-1.
OpponentStatistics OpponentStats(std::span<const ValueDistribution> dists,
                                 int bidder, int order);

// Thickness constant over all bidders for the given order statistic.
double ThicknessTau(std::span<const ValueDistribution> dists, int order);

// 1/H^(n-1), the ceiling every thickness constant is clamped to.
double MaxThickness(int resolution, int num_bidders);

}  // namespace bidlearn

#endif  // BIDLEARN_GRID_H_
