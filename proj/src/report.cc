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

#include "bidlearn/report.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "bidlearn/errors.h"

namespace bidlearn {
namespace {

using nlohmann::json;

std::optional<double> Ratio(std::int64_t hits, std::int64_t total) {
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Num(const std::optional<double>& x) { return x ? Num(*x) : ""; }

std::optional<double> ParseOptional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

std::ifstream OpenIn(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  return is;
}

void Close(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("failed writing " + path.string());
}

// Reads rows after the header; checks the header matches.
std::vector<std::vector<std::string>> ReadTable(
    const std::filesystem::path& path, const std::string& header) {
  auto is = OpenIn(path);
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw IoError(path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (!line.empty()) rows.push_back(SplitCsv(line));
  }
  return rows;
}

std::string JoinTicks(const std::vector<Tick>& ticks) {
  std::string s;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(ticks[i]);
  }
  return s;
}

std::vector<Tick> SplitTicks(const std::string& s) {
  std::vector<Tick> out;
  std::istringstream is(s);
  Tick t;
  while (is >> t) out.push_back(t);
  return out;
}

constexpr const char* kWindowsHeader =
    "start,end,decisions,exploit_decisions,agreement,agreement_all,revenue,"
    "welfare";
constexpr const char* kRolloutHeader =
    "context,bidder,modal_bid,rounds,in_reference,reference";
constexpr const char* kRegretHeader = "bidder,t,regret";
constexpr const char* kMetaHeader = "key,value";

json MetaJson(const ConvergenceReport& r) {
  return json{{"schema_version", r.schema_version},
              {"mechanism", r.mechanism},
              {"num_bidders", r.num_bidders},
              {"resolution", r.resolution},
              {"window", r.window},
              {"training_rounds", r.training_rounds},
              {"rollout_rounds", r.rollout_rounds},
              {"regret_source", r.regret_source},
              {"has_reference", r.has_reference},
              {"rollout_omitted", r.rollout_omitted},
              {"warnings", r.warnings}};
}

void MetaFromJson(const json& j, ConvergenceReport& r) {
  r.schema_version = j.at("schema_version");
  if (r.schema_version != kReportSchemaVersion) {
    throw IoError("unsupported report schema version " +
                  std::to_string(r.schema_version));
  }
  r.mechanism = j.at("mechanism");
  r.num_bidders = j.at("num_bidders");
  r.resolution = j.at("resolution");
  r.window = j.at("window");
  r.training_rounds = j.at("training_rounds");
  r.rollout_rounds = j.at("rollout_rounds");
  r.regret_source = j.at("regret_source");
  r.has_reference = j.at("has_reference");
  r.rollout_omitted = j.at("rollout_omitted");
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
}

json OptionalJson(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

std::optional<double> OptionalFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

int ConvergenceReport::RolloutMatches(int bidder) const {
  int n = 0;
  for (const auto& row : rollout) n += row.in_reference.at(bidder) ? 1 : 0;
  return n;
}

ConvergenceReport BuildReport(const TrajectoryLog& log,
                              const ReferenceStrategy* ref,
                              std::int64_t window) {
  const SimulationConfig& cfg = log.config();
  const int n = log.num_bidders();
  const int h = cfg.resolution;
  const ValueGrid grid = cfg.Grid();
  const Mechanism& mech = cfg.mechanism;
  if (ref != nullptr && (ref->kind() != mech.kind() || !(ref->grid() == grid))) {
    throw PreconditionError("reference strategy does not match the log");
  }
  if (window < 1) throw PreconditionError("report window must be >= 1");

  ConvergenceReport rep;
  rep.mechanism = std::string(MechanismName(mech.kind()));
  rep.num_bidders = n;
  rep.resolution = h;
  rep.training_rounds = log.training_rounds();
  rep.rollout_rounds = log.rollout_rounds();
  rep.has_reference = ref != nullptr;
  rep.window = window;
  if (window > rep.training_rounds && rep.training_rounds > 0) {
    rep.warnings.push_back("window " + std::to_string(window) +
                           " exceeds training length " +
                           std::to_string(rep.training_rounds) +
                           "; using a single window");
    rep.window = rep.training_rounds;
  }

  std::vector<Tick> values(n), bids(n), opp(n - 1);
  std::vector<int> ranking(n);
  AuctionOutcome outcome;
  std::vector<double> rewards(h);
  // Cumulative counterfactual and realised utility per bidder and context.
  std::vector<double> cf(static_cast<std::size_t>(n) * h * h, 0.0);
  std::vector<double> realised(static_cast<std::size_t>(n) * h, 0.0);
  rep.regret.resize(n);
  for (int i = 0; i < n; ++i) rep.regret[i].bidder = i;

  auto load = [&](std::int64_t r) {
    for (int i = 0; i < n; ++i) {
      values[i] = log.Value(r, i);
      bids[i] = log.Bid(r, i);
      ranking[i] = log.RankingAt(r, i);
    }
    SettleInto(mech, grid, bids, values, ranking, outcome);
  };

  WindowStats cur;
  std::int64_t hits_all = 0, hits_exploit = 0;
  double revenue = 0.0, welfare = 0.0;
  for (std::int64_t r = 0; r < rep.training_rounds; ++r) {
    if (r % rep.window == 0) {
      cur = WindowStats{};
      cur.start = r + 1;
      hits_all = hits_exploit = 0;
      revenue = welfare = 0.0;
    }
    load(r);
    const bool exploring = log.IsExploration(r);
    for (int i = 0; i < n; ++i) {
      ++cur.decisions;
      if (!exploring) ++cur.exploit_decisions;
      if (ref != nullptr && ref->Contains(values[i], bids[i])) {
        ++hits_all;
        if (!exploring) ++hits_exploit;
      }
      revenue += outcome.payments[i];
      welfare += outcome.allocation[i] * grid.Value(values[i]);

      int k = 0;
      for (int j = 0; j < n; ++j) {
        if (j != i) opp[k++] = bids[j];
      }
      CounterfactualRewardsInto(mech, grid, opp, values[i], rewards);
      double* row = &cf[(static_cast<std::size_t>(i) * h + values[i] - 1) * h];
      for (int b = 0; b < h; ++b) row[b] += rewards[b];
      realised[static_cast<std::size_t>(i) * h + values[i] - 1] +=
          outcome.utilities[i];
    }
    const bool last = r + 1 == rep.training_rounds;
    if ((r + 1) % rep.window == 0 || last) {
      cur.end = r + 1;
      const double rounds = static_cast<double>(cur.end - cur.start + 1);
      if (ref != nullptr) {
        cur.agreement = Ratio(hits_exploit, cur.exploit_decisions);
        cur.agreement_all = Ratio(hits_all, cur.decisions);
      }
      cur.revenue = revenue / rounds;
      cur.welfare = welfare / rounds;
      rep.windows.push_back(cur);
      for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int v = 0; v < h; ++v) {
          const double* row = &cf[(static_cast<std::size_t>(i) * h + v) * h];
          total += *std::max_element(row, row + h) -
                   realised[static_cast<std::size_t>(i) * h + v];
        }
        rep.regret[i].t.push_back(r + 1);
        rep.regret[i].regret.push_back(total / h);
      }
    }
  }

  if (rep.rollout_rounds == 0) {
    rep.rollout_omitted = true;
    rep.warnings.push_back("no rollout rounds; rollout table omitted");
    return rep;
  }
  // counts[(i * H + v - 1) * H + b - 1]
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) * h * h, 0);
  for (std::int64_t r = rep.training_rounds; r < log.size(); ++r) {
    for (int i = 0; i < n; ++i) {
      ++counts[(static_cast<std::size_t>(i) * h + log.Value(r, i) - 1) * h +
               log.Bid(r, i) - 1];
    }
  }
  for (Tick v = 1; v <= h; ++v) {
    RolloutRow row;
    row.context = v;
    if (ref != nullptr) row.reference = ref->Bids(v);
    for (int i = 0; i < n; ++i) {
      const std::int64_t* c = &counts[(static_cast<std::size_t>(i) * h + v - 1) * h];
      const std::int64_t seen = std::accumulate(c, c + h, std::int64_t{0});
      const Tick modal =
          seen == 0 ? 0 : static_cast<Tick>(std::max_element(c, c + h) - c) + 1;
      row.modal_bid.push_back(modal);
      row.rounds.push_back(seen);
      row.in_reference.push_back(ref != nullptr && modal != 0 &&
                                 ref->Contains(v, modal));
    }
    rep.rollout.push_back(std::move(row));
  }
  return rep;
}

void IncrementalAgreement::OnRound(const RoundEvent& event) {
  if (event.rollout) return;
  const auto w = static_cast<std::size_t>((event.t - 1) / window_);
  if (counts_.size() <= w) counts_.resize(w + 1);
  Counts& c = counts_[w];
  for (std::size_t i = 0; i < event.values.size(); ++i) {
    const bool hit = ref_.Contains(event.values[i], event.bids[i]);
    ++c.all;
    c.all_hits += hit;
    if (!event.exploring) {
      ++c.exploit;
      c.exploit_hits += hit;
    }
  }
}

std::vector<std::pair<std::optional<double>, std::optional<double>>>
IncrementalAgreement::Curve() const {
  std::vector<std::pair<std::optional<double>, std::optional<double>>> out;
  for (const auto& c : counts_) {
    out.emplace_back(Ratio(c.exploit_hits, c.exploit), Ratio(c.all_hits, c.all));
  }
  return out;
}

std::vector<std::filesystem::path> ExportReport(
    const ConvergenceReport& report, const std::filesystem::path& dir,
    ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  if (format == ReportFormat::kJsonl) {
    const auto meta_path = dir / "report_meta.json";
    auto meta = OpenOut(meta_path);
    meta << MetaJson(report).dump(2) << '\n';
    Close(meta, meta_path);
    written.push_back(meta_path);

    const auto path = dir / "report.jsonl";
    auto os = OpenOut(path);
    const int v = report.schema_version;
    for (const auto& w : report.windows) {
      os << json{{"schema_version", v},
                 {"section", "window"},
                 {"start", w.start},
                 {"end", w.end},
                 {"decisions", w.decisions},
                 {"exploit_decisions", w.exploit_decisions},
                 {"agreement", OptionalJson(w.agreement)},
                 {"agreement_all", OptionalJson(w.agreement_all)},
                 {"revenue", w.revenue},
                 {"welfare", w.welfare}}
                .dump()
         << '\n';
    }
    for (const auto& row : report.rollout) {
      os << json{{"schema_version", v},
                 {"section", "rollout"},
                 {"context", row.context},
                 {"reference", row.reference},
                 {"modal_bid", row.modal_bid},
                 {"rounds", row.rounds},
                 {"in_reference", row.in_reference}}
                .dump()
         << '\n';
    }
    for (const auto& c : report.regret) {
      os << json{{"schema_version", v},
                 {"section", "regret"},
                 {"bidder", c.bidder},
                 {"t", c.t},
                 {"regret", c.regret}}
                .dump()
         << '\n';
    }
    Close(os, path);
    written.push_back(path);
    return written;
  }

  {
    const auto path = dir / "meta.csv";
    auto os = OpenOut(path);
    os << kMetaHeader << '\n';
    const json meta = MetaJson(report);
    for (const auto& [key, value] : meta.items()) {
      os << key << ',' << std::quoted(value.dump()) << '\n';
    }
    Close(os, path);
    written.push_back(path);
  }
  {
    const auto path = dir / "windows.csv";
    auto os = OpenOut(path);
    os << kWindowsHeader << '\n';
    for (const auto& w : report.windows) {
      os << w.start << ',' << w.end << ',' << w.decisions << ','
         << w.exploit_decisions << ',' << Num(w.agreement) << ','
         << Num(w.agreement_all) << ',' << Num(w.revenue) << ','
         << Num(w.welfare) << '\n';
    }
    Close(os, path);
    written.push_back(path);
  }
  if (!report.rollout_omitted) {
    const auto path = dir / "rollout.csv";
    auto os = OpenOut(path);
    os << kRolloutHeader << '\n';
    for (const auto& row : report.rollout) {
      for (std::size_t i = 0; i < row.modal_bid.size(); ++i) {
        os << row.context << ',' << i << ',' << row.modal_bid[i] << ','
           << row.rounds[i] << ',' << (row.in_reference[i] ? 1 : 0) << ','
           << JoinTicks(row.reference) << '\n';
      }
    }
    Close(os, path);
    written.push_back(path);
  }
  {
    const auto path = dir / "regret.csv";
    auto os = OpenOut(path);
    os << kRegretHeader << '\n';
    for (const auto& c : report.regret) {
      for (std::size_t k = 0; k < c.t.size(); ++k) {
        os << c.bidder << ',' << c.t[k] << ',' << Num(c.regret[k]) << '\n';
      }
    }
    Close(os, path);
    written.push_back(path);
  }
  return written;
}

ConvergenceReport ReadReport(const std::filesystem::path& dir,
                             ReportFormat format) {
  ConvergenceReport rep;
  try {
    if (format == ReportFormat::kJsonl) {
      auto meta = OpenIn(dir / "report_meta.json");
      MetaFromJson(json::parse(meta), rep);
      auto is = OpenIn(dir / "report.jsonl");
      std::string line;
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (j.at("schema_version") != rep.schema_version) {
          throw IoError("schema version mismatch in report.jsonl");
        }
        const std::string section = j.at("section");
        if (section == "window") {
          WindowStats w;
          w.start = j.at("start");
          w.end = j.at("end");
          w.decisions = j.at("decisions");
          w.exploit_decisions = j.at("exploit_decisions");
          w.agreement = OptionalFromJson(j.at("agreement"));
          w.agreement_all = OptionalFromJson(j.at("agreement_all"));
          w.revenue = j.at("revenue");
          w.welfare = j.at("welfare");
          rep.windows.push_back(w);
        } else if (section == "rollout") {
          RolloutRow row;
          row.context = j.at("context");
          row.reference = j.at("reference").get<std::vector<Tick>>();
          row.modal_bid = j.at("modal_bid").get<std::vector<Tick>>();
          row.rounds = j.at("rounds").get<std::vector<std::int64_t>>();
          row.in_reference = j.at("in_reference").get<std::vector<bool>>();
          rep.rollout.push_back(std::move(row));
        } else if (section == "regret") {
          RegretCurve c;
          c.bidder = j.at("bidder");
          c.t = j.at("t").get<std::vector<std::int64_t>>();
          c.regret = j.at("regret").get<std::vector<double>>();
          rep.regret.push_back(std::move(c));
        } else {
          throw IoError("unknown report section '" + section + "'");
        }
      }
      return rep;
    }

    json meta;
    {
      auto is = OpenIn(dir / "meta.csv");
      std::string line;
      if (!std::getline(is, line) || line != kMetaHeader) {
        throw IoError("meta.csv: unexpected header");
      }
      while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("meta.csv: bad row");
        std::istringstream value(line.substr(comma + 1));
        std::string text;
        value >> std::quoted(text);
        meta[line.substr(0, comma)] = json::parse(text);
      }
    }
    MetaFromJson(meta, rep);
    for (const auto& c : ReadTable(dir / "windows.csv", kWindowsHeader)) {
      if (c.size() != 8) throw IoError("windows.csv: bad row");
      WindowStats w;
      w.start = std::stoll(c[0]);
      w.end = std::stoll(c[1]);
      w.decisions = std::stoll(c[2]);
      w.exploit_decisions = std::stoll(c[3]);
      w.agreement = ParseOptional(c[4]);
      w.agreement_all = ParseOptional(c[5]);
      w.revenue = std::stod(c[6]);
      w.welfare = std::stod(c[7]);
      rep.windows.push_back(w);
    }
    if (!rep.rollout_omitted) {
      for (const auto& c : ReadTable(dir / "rollout.csv", kRolloutHeader)) {
        if (c.size() != 6) throw IoError("rollout.csv: bad row");
        const Tick context = std::stoi(c[0]);
        if (rep.rollout.empty() || rep.rollout.back().context != context) {
          RolloutRow row;
          row.context = context;
          row.reference = SplitTicks(c[5]);
          rep.rollout.push_back(std::move(row));
        }
        auto& row = rep.rollout.back();
        row.modal_bid.push_back(std::stoi(c[2]));
        row.rounds.push_back(std::stoll(c[3]));
        row.in_reference.push_back(c[4] == "1");
      }
    }
    for (int i = 0; i < rep.num_bidders; ++i) {
      rep.regret.push_back(RegretCurve{i, {}, {}});
    }
    for (const auto& c : ReadTable(dir / "regret.csv", kRegretHeader)) {
      if (c.size() != 3) throw IoError("regret.csv: bad row");
      const int bidder = std::stoi(c[0]);
      if (bidder < 0 || bidder >= rep.num_bidders) {
        throw IoError("regret.csv: bidder out of range");
      }
      rep.regret[bidder].t.push_back(std::stoll(c[1]));
      rep.regret[bidder].regret.push_back(std::stod(c[2]));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  } catch (const std::logic_error& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
  return rep;
}

}  // namespace bidlearn
