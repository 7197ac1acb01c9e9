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

// Brute-force reference computations used only by the tests. They are written
// from the auction definitions directly and share no code with the library's
// tie-expectation or order-statistic routines.

#ifndef BIDLEARN_TESTS_ORACLE_H_
#define BIDLEARN_TESTS_ORACLE_H_

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracle {

enum class Rule { kSecondPrice, kFirstPrice, kVcg };

// Utility of `who` under every ordering of bidders that is consistent with
// descending bids; the orderings are equally likely under a uniform random
// tie-break. Values and bids are grid ticks over `h`. VCG payments are the
// externality the bidder imposes on the others, computed by re-ranking
// everyone else without them.
inline std::vector<double> Utilities(Rule rule, const std::vector<double>& slots,
                                     int h, const std::vector<int>& values,
                                     const std::vector<int>& bids, int who) {
  const int n = static_cast<int>(bids.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto slot = [&](int pos) {
    return pos < static_cast<int>(slots.size()) ? slots[pos] : 0.0;
  };
  std::vector<double> out;
  do {
    bool sorted = true;
    for (int k = 0; k + 1 < n; ++k) {
      if (bids[order[k]] < bids[order[k + 1]]) sorted = false;
    }
    if (!sorted) continue;
    const int pos = static_cast<int>(std::find(order.begin(), order.end(), who) -
                                     order.begin());
    const double v = static_cast<double>(values[who]) / h;
    if (rule != Rule::kVcg) {
      if (pos != 0) {
        out.push_back(0.0);
        continue;
      }
      double price = static_cast<double>(bids[who]) / h;
      if (rule == Rule::kSecondPrice) {
        int top = 0;
        for (int j = 0; j < n; ++j) {
          if (j != who) top = std::max(top, bids[j]);
        }
        price = static_cast<double>(top) / h;
      }
      out.push_back(v - price);
      continue;
    }
    double with = 0.0, without = 0.0;
    int rank_without = 0;
    for (int k = 0; k < n; ++k) {
      const int j = order[k];
      if (j == who) continue;
      const double b = static_cast<double>(bids[j]) / h;
      with += slot(k) * b;
      without += slot(rank_without++) * b;
    }
    out.push_back(slot(pos) * v - (without - with));
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

inline double ExpectedUtility(Rule rule, const std::vector<double>& slots,
                              int h, const std::vector<int>& values,
                              const std::vector<int>& bids, int who) {
  const auto u = Utilities(rule, slots, h, values, bids, who);
  return std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
}

// Visits every profile in {1..h}^m.
template <typename Fn>
void ForEachProfile(int m, int h, Fn&& fn) {
  std::vector<int> p(m, 1);
  while (true) {
    fn(p);
    int i = 0;
    while (i < m && p[i] == h) p[i++] = 1;
    if (i == m) return;
    ++p[i];
  }
}

}  // namespace oracle

#endif  // BIDLEARN_TESTS_ORACLE_H_
