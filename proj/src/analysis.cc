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

#include "bidlearn/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bidlearn/errors.h"

namespace bidlearn {
namespace {

// Calls fn(profile) for every opponent profile in {1..H}^(n-1).
template <typename Fn>
void ForEachProfile(int opponents, int resolution, Fn&& fn) {
  std::vector<Tick> profile(opponents, 1);
  while (true) {
    fn(std::span<const Tick>(profile));
    int i = 0;
    while (i < opponents && profile[i] == resolution) profile[i++] = 1;
    if (i == opponents) return;
    ++profile[i];
  }
}

double Expectation(const std::vector<UtilityBranch>& branches) {
  double e = 0.0;
  for (const auto& br : branches) e += br.probability * br.utility;
  return e;
}

void CheckTick(const ValueGrid& grid, Tick t, const char* what) {
  if (!grid.Contains(t)) {
    throw PreconditionError(std::string(what) + " " + std::to_string(t) +
                            " is off the grid");
  }
}

std::string Format(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::string_view TheoremName(Theorem theorem) {
  switch (theorem) {
    case Theorem::kSecondPrice: return "spa";
    case Theorem::kFirstPrice: return "fpa";
    case Theorem::kVcg: return "vcg";
  }
  return "?";
}

Theorem ParseTheorem(std::string_view name) {
  switch (ParseMechanismKind(name)) {
    case MechanismKind::kSecondPrice: return Theorem::kSecondPrice;
    case MechanismKind::kFirstPrice: return Theorem::kFirstPrice;
    case MechanismKind::kMultiPositionVcg: return Theorem::kVcg;
  }
  return Theorem::kSecondPrice;
}

void CheckOracleSize(int num_bidders, int resolution) {
  if (num_bidders < 2 || num_bidders > kOracleMaxBidders) {
    throw PreconditionError("oracle needs 2 <= n <= " +
                            std::to_string(kOracleMaxBidders) + ", got n=" +
                            std::to_string(num_bidders));
  }
  if (resolution < 2 || resolution > kOracleMaxResolution) {
    throw PreconditionError("oracle needs 2 <= H <= " +
                            std::to_string(kOracleMaxResolution) + ", got H=" +
                            std::to_string(resolution));
  }
}

double ExactExpectedUtilityUniform(const Mechanism& mech, int num_bidders,
                                   int resolution, Tick value, Tick bid) {
  CheckOracleSize(num_bidders, resolution);
  mech.Validate(num_bidders);
  const ValueGrid grid(resolution);
  CheckTick(grid, value, "value");
  CheckTick(grid, bid, "bid");
  const int opponents = num_bidders - 1;
  double total = 0.0;
  ForEachProfile(opponents, resolution, [&](std::span<const Tick> opp) {
    total += Expectation(UtilityLottery(mech, grid, opp, value, bid));
  });
  return total / std::pow(static_cast<double>(resolution), opponents);
}

double FirstPriceUniformClosedForm(int resolution, Tick value, Tick bid) {
  const double h = resolution;
  return (value / h - bid / h) * (bid / h - 1.0 / (2.0 * h));
}

AdvantageProbability TruthfulAdvantageProbability(const Mechanism& mech,
                                                  int num_bidders,
                                                  int resolution, Tick value,
                                                  Tick bid) {
  CheckOracleSize(num_bidders, resolution);
  mech.Validate(num_bidders);
  if (!mech.Truthful()) {
    throw PreconditionError("advantage probability needs a truthful mechanism");
  }
  const ValueGrid grid(resolution);
  CheckTick(grid, value, "value");
  CheckTick(grid, bid, "bid");
  if (bid == value) {
    throw PreconditionError("advantage probability needs bid != value");
  }
  const double threshold = mech.Rho() / resolution;
  // Utilities are multiples of 1/H scaled by multipliers; absorb rounding.
  const double slack = 1e-12;
  const int opponents = num_bidders - 1;
  double hits = 0.0;
  ForEachProfile(opponents, resolution, [&](std::span<const Tick> opp) {
    const auto truthful = UtilityLottery(mech, grid, opp, value, value);
    const auto deviant = UtilityLottery(mech, grid, opp, value, bid);
    for (const auto& a : truthful) {
      for (const auto& d : deviant) {
        if (a.utility - d.utility >= threshold - slack) {
          hits += a.probability * d.probability;
        }
      }
    }
  });
  AdvantageProbability out;
  const double profiles = std::pow(static_cast<double>(resolution), opponents);
  out.probability = hits / profiles;
  out.bound = (1.0 / std::pow(static_cast<double>(resolution), opponents)) /
              num_bidders;
  out.holds = out.probability >= out.bound - slack;
  return out;
}

double ExplorationTail(int num_bidders, int resolution, double tau, double rho,
                       std::int64_t t0) {
  const double n = num_bidders;
  const double h = resolution;
  return std::exp(-tau * tau * rho * rho * static_cast<double>(t0) /
                  (32.0 * n * n * h * h));
}

ExplorationThreshold MinimalExplorationRounds(int num_bidders, int resolution,
                                              double tau, double rho) {
  if (num_bidders < 2) throw PreconditionError("T0 threshold needs n >= 2");
  if (resolution < 2) throw PreconditionError("T0 threshold needs H >= 2");
  if (!(tau > 0.0)) throw PreconditionError("tau must be positive");
  if (tau > MaxThickness(resolution, num_bidders) * (1 + 1e-12)) {
    throw PreconditionError("tau exceeds 1/H^(n-1)");
  }
  if (!(rho > 0.0) || rho > 1.0) throw PreconditionError("rho must be in (0, 1]");
  const double n = num_bidders;
  const double h = resolution;
  const double real =
      32.0 * n * n * h * h * std::numbers::ln2 / (tau * tau * rho * rho);
  auto ok = [&](std::int64_t t) {
    return ExplorationTail(num_bidders, resolution, tau, rho, t) <= 0.5;
  };
  auto t0 = static_cast<std::int64_t>(std::ceil(real));
  // Repair any off-by-one from rounding in the closed form.
  while (!ok(t0)) ++t0;
  while (t0 > 1 && ok(t0 - 1)) --t0;
  return {t0, tau * rho / (8.0 * n * h)};
}

ConvergenceBound ConvergenceProbability(Theorem theorem,
                                        const BoundInputs& in) {
  ConvergenceBound out;
  auto& v = out.violations;
  const double n = in.num_bidders;
  const double h = in.resolution;
  if (in.t <= in.t0) v.push_back("t > T0");
  if (in.t0 < 1) v.push_back("T0 >= 1");
  if (in.resolution < 2) v.push_back("H >= 2");
  if (!(in.gamma_t >= 0.0) || in.gamma_t > 1.0) v.push_back("gamma_t in [0, 1]");

  if (theorem == Theorem::kFirstPrice) {
    if (in.num_bidders != 2) v.push_back("n = 2");
    if (in.resolution % 2 != 0) v.push_back("H even");
    if (in.gamma_t > 1.0 / (4.0 * h * h * h)) v.push_back("gamma_t <= 1/(4H^3)");
    const double tail = std::exp(-(h - 1.0) * static_cast<double>(in.t0) /
                                 (32.0 * (4.0 * h * h * h + 1.0) * h * h * h * h));
    const double ratio = (4.0 * h * h * h + h) / (4.0 * h * h * h + 1.0);
    const double t = static_cast<double>(std::max<std::int64_t>(in.t, 1));
    out.raw = 1.0 - h * in.gamma_t - tail * std::log(t) / std::log(ratio);
  } else {
    const double rho = theorem == Theorem::kVcg ? in.rho : 1.0;
    if (theorem == Theorem::kVcg && (!(rho > 0.0) || rho > 1.0)) {
      v.push_back("rho in (0, 1]");
    }
    if (in.num_bidders < 2) v.push_back("n >= 2");
    if (!(in.tau > 0.0) ||
        in.tau > MaxThickness(std::max(in.resolution, 1),
                              std::max(in.num_bidders, 1)) * (1 + 1e-12)) {
      v.push_back("tau in (0, 1/H^(n-1)]");
    }
    const double tail =
        ExplorationTail(in.num_bidders, in.resolution, in.tau, rho, in.t0);
    if (tail > 0.5) v.push_back("exp(-tau^2 rho^2 T0/(32 n^2 H^2)) <= 1/2");
    if (in.gamma_t > in.tau * rho / (8.0 * n * h)) {
      v.push_back("gamma_t <= tau rho/(8 n H)");
    }
    out.raw = 1.0 - h * in.gamma_t - 4.0 * tail;
  }
  out.vacuous = !(out.raw > 0.0);
  out.value = std::clamp(std::isnan(out.raw) ? 0.0 : out.raw, 0.0, 1.0);
  return out;
}

EpisodeSchedule BuildEpisodeSchedule(Theorem kind, const GammaSchedule& gamma,
                                     const ScheduleInputs& in) {
  if (in.t0 < 1) throw PreconditionError("schedule needs T0 >= 1");
  if (in.horizon <= in.t0) throw PreconditionError("schedule needs horizon > T0");
  if (in.num_bidders < 2) throw PreconditionError("schedule needs n >= 2");
  if (in.resolution < 2) throw PreconditionError("schedule needs H >= 2");
  const long double h = in.resolution;
  const long double n = in.num_bidders;
  if (kind == Theorem::kFirstPrice) {
    if (in.num_bidders != 2) throw PreconditionError("first price schedule needs n = 2");
    if (in.resolution % 2 != 0) throw PreconditionError("first price schedule needs even H");
  } else if (!(in.tau > 0.0)) {
    throw PreconditionError("schedule needs tau > 0");
  }

  // Probe gamma on a geometric grid over [T0, horizon].
  const double cap = 1.0 / (4.0 * in.resolution * in.resolution *
                            static_cast<double>(in.resolution));
  long double prev_product = -1;
  for (std::int64_t t = in.t0;;) {
    const double g = gamma(t);
    if (!(g >= 0.0)) {
      throw PreconditionError("gamma_" + std::to_string(t) + " is negative");
    }
    if (kind == Theorem::kFirstPrice && g > cap * (1 + 1e-12)) {
      throw PreconditionError("first price schedule needs gamma_t <= 1/(4H^3); "
                              "gamma_" + std::to_string(t) + " = " + Format(g));
    }
    const long double product = static_cast<long double>(g) * t;
    if (product < prev_product * (1 - 1e-12L)) {
      throw PreconditionError("gamma_t * t decreases near t=" + std::to_string(t));
    }
    prev_product = product;
    if (t >= in.horizon) break;
    t = std::min(in.horizon, std::max(t + 1, static_cast<std::int64_t>(t * 1.25)));
  }

  // Relative slack absorbs the rounding of gamma itself (about 1e-16) while
  // staying far below the 1/(2 T) step between neighbouring integers.
  const long double slack = 1e-14L;
  auto fits = [&](std::int64_t t, std::int64_t prev) {
    const long double g = gamma(t);
    if (kind == Theorem::kFirstPrice) {
      const long double lhs = (g + 1) * t;
      const long double rhs = (1 / (4 * h * h) + 1) * prev;
      return lhs <= rhs * (1 + slack);
    }
    const long double lhs = g * t;
    const long double rhs = static_cast<long double>(in.tau) * prev / (4 * n * h);
    return lhs <= rhs * (1 + slack);
  };

  EpisodeSchedule out;
  out.kind = kind;
  out.boundaries.push_back(in.t0);
  while (static_cast<int>(out.boundaries.size()) <= in.max_levels) {
    const std::int64_t prev = out.boundaries.back();
    if (!fits(prev + 1, prev)) {
      out.truncated = true;
      out.note = "no boundary after T=" + std::to_string(prev);
      break;
    }
    // Gallop to a failing upper end, then bisect.
    std::int64_t lo = prev + 1;
    std::int64_t hi = prev + 2;
    bool past_horizon = false;
    while (fits(hi, prev)) {
      lo = hi;
      if (hi > in.horizon) {
        past_horizon = true;
        break;
      }
      hi = prev + 1 + 2 * (hi - prev);
    }
    if (past_horizon) break;
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (fits(mid, prev) ? lo : hi) = mid;
    }
    if (lo > in.horizon) break;
    out.boundaries.push_back(lo);
  }
  if (out.note.empty()) {
    out.note = static_cast<int>(out.boundaries.size()) > in.max_levels
                   ? "level limit reached"
                   : "horizon reached";
  }
  return out;
}

bool ReferenceStrategy::Contains(Tick value, Tick bid) const {
  if (!grid_.Contains(value)) return false;
  const auto& s = Bids(value);
  return std::find(s.begin(), s.end(), bid) != s.end();
}

ReferenceStrategy MakeReferenceStrategy(const Mechanism& mech,
                                        const ValueGrid& grid,
                                        int num_bidders) {
  const int h = grid.Resolution();
  std::vector<std::vector<Tick>> sets(h);
  if (mech.Truthful()) {
    for (Tick v = 1; v <= h; ++v) sets[v - 1] = {v};
    return ReferenceStrategy(mech.kind(), grid, std::move(sets));
  }
  if (h % 2 != 0) {
    throw PreconditionError("first price reference needs even H, got H=" +
                            std::to_string(h));
  }
  if (num_bidders != 2) {
    throw PreconditionError(
        "first price reference is only defined for n = 2");
  }
  // Grid points b/H with v/2 <= b/H < v/2 + 1/H, i.e. v <= 2b < v + 2.
  for (Tick v = 1; v <= h; ++v) {
    for (Tick b = 1; b <= h; ++b) {
      if (2 * b >= v && 2 * b < v + 2) sets[v - 1].push_back(b);
    }
  }
  return ReferenceStrategy(mech.kind(), grid, std::move(sets));
}

double FirstPriceEquilibriumGap(int resolution) {
  const auto mech = Mechanism::FirstPrice();
  const ValueGrid grid(resolution);
  const auto ref = MakeReferenceStrategy(mech, grid, 2);
  double gap = std::numeric_limits<double>::infinity();
  for (Tick v = 1; v <= resolution; ++v) {
    const Tick r = ref.Bids(v).front();
    const double best = ExactExpectedUtilityUniform(mech, 2, resolution, v, r);
    for (Tick b = 1; b <= resolution; ++b) {
      if (ref.Contains(v, b)) continue;
      gap = std::min(gap, best - ExactExpectedUtilityUniform(mech, 2, resolution, v, b));
    }
  }
  return gap;
}

}  // namespace bidlearn
