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

#ifndef BIDLEARN_IO_H_
#define BIDLEARN_IO_H_

#include <iosfwd>
#include <vector>

#include "bidlearn/engine.h"
#include "bidlearn/learner.h"

namespace bidlearn {

inline constexpr int kLogSchemaVersion = 1;

// One JSON object per round:
// {"t","phase","values","bids","ranking","allocation","payments",
//  "utilities","tie"}; phase is explore, learn or rollout. Output depends
// only on the log, so equal logs give equal bytes.
void WriteTrajectoryJsonl(const TrajectoryLog& log, std::ostream& os,
                          bool include_training = true);

// Rebuilds a log from its JSONL form. `config` must be the configuration
// the log was produced with; mismatching phases, shapes or round counts
// raise IoError. Only complete logs (training included) can be read.
TrajectoryLog ReadTrajectoryJsonl(std::istream& is,
                                  const SimulationConfig& config);

// Rows t,bidder,context,bid,score,count for every sigma snapshot.
void WriteSigmaCsv(const TrajectoryLog& log, std::ostream& os);

void WritePlayRecordJsonl(const PlayRecord& record, std::ostream& os);
std::vector<PlayRecord> ReadPlayLogJsonl(std::istream& is);

// Simulation observer that streams decisions to a play log.
class PlayLogWriter : public SimulationObserver {
 public:
  explicit PlayLogWriter(std::ostream& os) : os_(os) {}
  bool WantsDecisions() const override { return true; }
  void OnDecision(const PlayRecord& record) override {
    WritePlayRecordJsonl(record, os_);
  }

 private:
  std::ostream& os_;
};

// Violations as CSV: t,bidder,context,action,deficit,threshold,probability,
// gamma; a trailing comment line carries the checked/skipped totals.
void WriteComplianceCsv(const ComplianceReport& report, std::ostream& os);

}  // namespace bidlearn

#endif  // BIDLEARN_IO_H_
