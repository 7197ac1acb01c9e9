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

#include "bidlearn/io.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "bidlearn/errors.h"
#include "json.hpp"

namespace bidlearn {
namespace {

using nlohmann::json;

// Shortest text that parses back to the same double.
void PutDouble(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

template <typename T>
void PutInt(std::string& out, T x) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

template <typename Seq, typename Put>
void PutArray(std::string& out, const char* key, const Seq& xs, Put put) {
  out += ",\"";
  out += key;
  out += "\":[";
  bool first = true;
  for (const auto& x : xs) {
    if (!first) out += ',';
    first = false;
    put(out, x);
  }
  out += ']';
}

const char* PhaseName(const TrajectoryLog& log, std::int64_t r) {
  if (log.IsRollout(r)) return "rollout";
  return log.IsExploration(r) ? "explore" : "learn";
}

}  // namespace

void WriteTrajectoryJsonl(const TrajectoryLog& log, std::ostream& os,
                          bool include_training) {
  const int n = log.num_bidders();
  std::vector<Tick> values(n), bids(n);
  std::vector<int> ranking(n);
  AuctionOutcome outcome;
  const auto& cfg = log.config();
  const ValueGrid grid = cfg.Grid();
  std::string line;
  auto put_int = [](std::string& s, auto x) { PutInt(s, x); };
  auto put_double = [](std::string& s, double x) { PutDouble(s, x); };
  for (std::int64_t r = include_training ? 0 : log.training_rounds();
       r < log.size(); ++r) {
    for (int i = 0; i < n; ++i) {
      values[i] = log.Value(r, i);
      bids[i] = log.Bid(r, i);
      ranking[i] = log.RankingAt(r, i);
    }
    SettleInto(cfg.mechanism, grid, bids, values, ranking, outcome);
    line.clear();
    line += "{\"t\":";
    PutInt(line, r + 1);
    line += ",\"phase\":\"";
    line += PhaseName(log, r);
    line += '"';
    PutArray(line, "values", values, put_int);
    PutArray(line, "bids", bids, put_int);
    PutArray(line, "ranking", ranking, put_int);
    PutArray(line, "allocation", outcome.allocation, put_double);
    PutArray(line, "payments", outcome.payments, put_double);
    PutArray(line, "utilities", outcome.utilities, put_double);
    line += ",\"tie\":";
    line += outcome.tie ? "true" : "false";
    line += "}\n";
    os.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!os) throw IoError("failed writing trajectory log");
}

TrajectoryLog ReadTrajectoryJsonl(std::istream& is,
                                  const SimulationConfig& config) {
  TrajectoryLog log(config);
  const int n = config.num_bidders;
  const ValueGrid grid = config.Grid();
  std::string line;
  std::int64_t expect_t = 1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::string where = "trajectory line " + std::to_string(expect_t);
    try {
      const json j = json::parse(line);
      if (j.at("t").get<std::int64_t>() != expect_t) {
        throw IoError(where + ": expected t=" + std::to_string(expect_t));
      }
      const auto values = j.at("values").get<std::vector<Tick>>();
      const auto bids = j.at("bids").get<std::vector<Tick>>();
      const auto ranking = j.at("ranking").get<std::vector<int>>();
      if (static_cast<int>(values.size()) != n ||
          static_cast<int>(bids.size()) != n ||
          static_cast<int>(ranking.size()) != n) {
        throw IoError(where + ": wrong number of bidders");
      }
      for (int i = 0; i < n; ++i) {
        if (!grid.Contains(values[i]) || !grid.Contains(bids[i]) ||
            ranking[i] < 0 || ranking[i] >= n) {
          throw IoError(where + ": value, bid or ranking out of range");
        }
      }
      const std::string phase = j.at("phase");
      const bool rollout = expect_t > config.horizon;
      const bool exploring = !rollout && expect_t <= config.exploration_rounds;
      const char* want = rollout ? "rollout" : exploring ? "explore" : "learn";
      if (phase != want) {
        throw IoError(where + ": phase '" + phase + "' but config implies '" +
                      want + "'");
      }
      const auto outcome = Settle(config.mechanism, grid, bids, values, ranking);
      if (j.at("payments").get<std::vector<double>>() != outcome.payments ||
          j.at("utilities").get<std::vector<double>>() != outcome.utilities) {
        throw IoError(where + ": outcome does not match the mechanism");
      }
      log.Append(rollout, values, bids, ranking);
    } catch (const json::exception& e) {
      throw IoError(where + ": " + e.what());
    }
    ++expect_t;
  }
  if (expect_t - 1 != config.horizon + config.rollout_rounds) {
    throw IoError("trajectory has " + std::to_string(expect_t - 1) +
                  " rounds but config implies " +
                  std::to_string(config.horizon + config.rollout_rounds));
  }
  return log;
}

void WriteSigmaCsv(const TrajectoryLog& log, std::ostream& os) {
  const int h = log.config().resolution;
  std::string line = "t,bidder,context,bid,score,count\n";
  os << line;
  for (const auto& snap : log.snapshots()) {
    for (int v = 0; v < h; ++v) {
      for (int b = 0; b < h; ++b) {
        line.clear();
        PutInt(line, snap.t);
        line += ',';
        PutInt(line, snap.bidder);
        line += ',';
        PutInt(line, v + 1);
        line += ',';
        PutInt(line, b + 1);
        line += ',';
        PutDouble(line, snap.scores[v * h + b]);
        line += ',';
        PutInt(line, snap.counts[v * h + b]);
        line += '\n';
        os << line;
      }
    }
  }
  if (!os) throw IoError("failed writing sigma snapshots");
}

void WritePlayRecordJsonl(const PlayRecord& record, std::ostream& os) {
  std::string line = "{\"t\":";
  PutInt(line, record.t);
  line += ",\"bidder\":";
  PutInt(line, record.bidder);
  line += ",\"context\":";
  PutInt(line, record.context);
  line += ",\"exploring\":";
  line += record.exploring ? "true" : "false";
  line += ",\"gamma\":";
  if (record.gamma) {
    PutDouble(line, *record.gamma);
  } else {
    line += "null";
  }
  auto put_double = [](std::string& s, double x) { PutDouble(s, x); };
  PutArray(line, "scores", record.scores, put_double);
  PutArray(line, "distribution", record.distribution, put_double);
  line += "}\n";
  os << line;
}

std::vector<PlayRecord> ReadPlayLogJsonl(std::istream& is) {
  std::vector<PlayRecord> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      PlayRecord rec;
      rec.t = j.at("t");
      rec.bidder = j.at("bidder");
      rec.context = j.at("context");
      rec.exploring = j.at("exploring");
      if (!j.at("gamma").is_null()) rec.gamma = j.at("gamma").get<double>();
      rec.scores = j.at("scores").get<std::vector<double>>();
      rec.distribution = j.at("distribution").get<std::vector<double>>();
      if (rec.scores.size() != rec.distribution.size() || rec.scores.empty()) {
        throw IoError("play log line " + std::to_string(lineno) +
                      ": scores and distribution sizes differ");
      }
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw IoError("play log line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void WriteComplianceCsv(const ComplianceReport& report, std::ostream& os) {
  os << "t,bidder,context,action,deficit,threshold,probability,gamma\n";
  std::string line;
  for (const auto& v : report.violations) {
    line.clear();
    PutInt(line, v.t);
    line += ',';
    PutInt(line, v.bidder);
    line += ',';
    PutInt(line, v.context);
    line += ',';
    PutInt(line, v.action);
    for (double x : {v.deficit, v.threshold, v.probability, v.gamma}) {
      line += ',';
      PutDouble(line, x);
    }
    line += '\n';
    os << line;
  }
  os << "# checked=" << report.decisions_checked
     << " skipped=" << report.decisions_skipped
     << " violations=" << report.violations.size() << '\n';
  if (!os) throw IoError("failed writing compliance report");
}

}  // namespace bidlearn
