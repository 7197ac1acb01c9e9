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

#ifndef BIDLEARN_REPORT_H_
#define BIDLEARN_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bidlearn/analysis.h"
#include "bidlearn/engine.h"

namespace bidlearn {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::int64_t kDefaultWindow = 1000;

struct WindowStats {
  std::int64_t start = 0;  // first round, 1-based
  std::int64_t end = 0;    // last round, inclusive
  std::int64_t decisions = 0;          // bidder-rounds in the window
  std::int64_t exploit_decisions = 0;  // those outside the exploration phase
  // Share of exploitation decisions inside the reference set; empty when the
  // window is all exploration or no reference is available.
  std::optional<double> agreement;
  // Same share over every decision, exploration included.
  std::optional<double> agreement_all;
  double revenue = 0.0;  // mean total payment per round
  double welfare = 0.0;  // mean allocated value per round

  friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

struct RolloutRow {
  Tick context = 0;
  std::vector<Tick> reference;  // empty without a reference strategy
  // Per bidder: most frequent rollout bid with this value (0 if never seen),
  // how many rollout rounds saw the value, and reference membership.
  std::vector<Tick> modal_bid;
  std::vector<std::int64_t> rounds;
  std::vector<bool> in_reference;

  friend bool operator==(const RolloutRow&, const RolloutRow&) = default;
};

struct RegretCurve {
  int bidder = 0;
  std::vector<std::int64_t> t;  // window ends
  // Context average of max_b S_v(b) - R_v, where S_v(b) is the exact
  // cumulative counterfactual utility of bid b in context v and R_v the
  // realised utility.
  std::vector<double> regret;

  friend bool operator==(const RegretCurve&, const RegretCurve&) = default;
};

struct ConvergenceReport {
  int schema_version = kReportSchemaVersion;
  std::string mechanism;
  int num_bidders = 0;
  int resolution = 0;
  std::int64_t window = kDefaultWindow;
  std::int64_t training_rounds = 0;
  std::int64_t rollout_rounds = 0;
  std::string regret_source = "exact_replay";
  bool has_reference = false;
  bool rollout_omitted = false;
  std::vector<std::string> warnings;
  std::vector<WindowStats> windows;
  std::vector<RolloutRow> rollout;
  std::vector<RegretCurve> regret;

  // Rollout rows whose modal bid is in the reference set, for one bidder.
  int RolloutMatches(int bidder) const;

  friend bool operator==(const ConvergenceReport&,
                         const ConvergenceReport&) = default;
};

// Windows cover training rounds only; the rollout table uses rollout rounds
// only. A window longer than the training stream collapses to one window and
// records a warning.
ConvergenceReport BuildReport(const TrajectoryLog& log,
                              const ReferenceStrategy* ref,
                              std::int64_t window = kDefaultWindow);

// Agreement accumulated while a simulation runs.
class IncrementalAgreement : public SimulationObserver {
 public:
  IncrementalAgreement(ReferenceStrategy ref, std::int64_t window)
      : ref_(std::move(ref)), window_(window) {}

  void OnRound(const RoundEvent& event) override;

  // Per window: {agreement, agreement_all}, same conventions as WindowStats.
  std::vector<std::pair<std::optional<double>, std::optional<double>>> Curve()
      const;

 private:
  struct Counts {
    std::int64_t all = 0, all_hits = 0, exploit = 0, exploit_hits = 0;
  };
  ReferenceStrategy ref_;
  std::int64_t window_;
  std::vector<Counts> counts_;
};

enum class ReportFormat { kCsv, kJsonl };

// CSV: windows.csv, rollout.csv, regret.csv and meta.csv inside `dir`.
// JSONL: report.jsonl with one line per window, context and bidder.
// Returns the files written. Throws IoError on failure.
std::vector<std::filesystem::path> ExportReport(
    const ConvergenceReport& report, const std::filesystem::path& dir,
    ReportFormat format);

ConvergenceReport ReadReport(const std::filesystem::path& dir,
                             ReportFormat format);

}  // namespace bidlearn

#endif  // BIDLEARN_REPORT_H_
