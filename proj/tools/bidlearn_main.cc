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

// Command-line entry point: simulate, rollout, oracle, bounds, schedule,
// compliance and report.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bidlearn/analysis.h"
#include "bidlearn/config.h"
#include "bidlearn/engine.h"
#include "bidlearn/errors.h"
#include "bidlearn/io.h"
#include "bidlearn/report.h"
#include "json.hpp"

#ifndef BIDLEARN_VERSION
#define BIDLEARN_VERSION "unknown"
#endif
#ifndef BIDLEARN_GIT_REVISION
#define BIDLEARN_GIT_REVISION "unknown"
#endif

namespace fs = std::filesystem;
using namespace bidlearn;

namespace {

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Output directory that appears only once complete.
class StagedDir {
 public:
  StagedDir(fs::path target, bool overwrite)
      : target_(std::move(target)), overwrite_(overwrite) {
    if (fs::exists(target_) && !overwrite_) {
      throw IoError("output directory " + target_.string() +
                    " exists; pass --overwrite to replace it");
    }
    const fs::path parent =
        target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    staging_ = parent / ("." + target_.filename().string() + ".tmp-" +
                         std::to_string(::getpid()));
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  ~StagedDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(staging_, ec);
  }

  const fs::path& path() const { return staging_; }

  void Commit() {
    if (fs::exists(target_)) {
      if (!overwrite_) throw IoError(target_.string() + " appeared meanwhile");
      fs::remove_all(target_);
    }
    fs::rename(staging_, target_);
    committed_ = true;
  }

 private:
  fs::path target_;
  fs::path staging_;
  bool overwrite_;
  bool committed_ = false;
};

std::ofstream OpenFile(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  return os;
}

// Runs `fn` against stdout or a file.
void WithOutput(const std::string& out, const std::function<void(std::ostream&)>& fn) {
  if (out.empty() || out == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  if (fs::path(out).has_parent_path()) {
    fs::create_directories(fs::path(out).parent_path());
  }
  auto os = OpenFile(out);
  fn(os);
  os.close();
  if (!os) throw IoError("failed writing " + out);
}

fs::path DefaultOutDir(const std::string& flag, const std::string& config_path,
                       const std::string& suffix) {
  if (!flag.empty()) return flag;
  const char* root = std::getenv("BIDLEARN_OUT");
  const fs::path base = root != nullptr && *root ? fs::path(root) : fs::path("runs");
  return base / (fs::path(config_path).stem().string() + suffix);
}

nlohmann::json Manifest(const std::string& command, const std::string& config_path,
                        const ExperimentConfig& cfg,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<std::string>& argv) {
  return nlohmann::json{{"tool", "bidlearn"},
                        {"version", BIDLEARN_VERSION},
                        {"git_revision", BIDLEARN_GIT_REVISION},
                        {"log_schema_version", kLogSchemaVersion},
                        {"report_schema_version", kReportSchemaVersion},
                        {"command", command},
                        {"argv", argv},
                        {"config_path", config_path},
                        {"seeds", seeds},
                        {"resolved_config", ResolvedConfigText(cfg)}};
}

void WriteManifest(const fs::path& dir, const nlohmann::json& manifest,
                   const ExperimentConfig& cfg) {
  {
    auto os = OpenFile(dir / "manifest.json");
    os << manifest.dump(2) << '\n';
  }
  auto os = OpenFile(dir / "config.resolved.ini");
  os << ResolvedConfigText(cfg);
}

std::optional<ReferenceStrategy> ReferenceFor(const SimulationConfig& sim) {
  try {
    return MakeReferenceStrategy(sim.mechanism, sim.Grid(), sim.num_bidders);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

struct SimulateOptions {
  std::string config;
  std::string seeds;
  std::string out;
  bool overwrite = false;
  std::string trajectory = "full";
  bool play_log = false;
  std::string format = "csv";
  std::optional<std::int64_t> horizon;
  std::optional<std::int64_t> rollout_rounds;
  std::optional<std::int64_t> window;
  int threads = 1;
};

ExperimentConfig ResolveConfig(const SimulateOptions& o) {
  ExperimentConfig cfg = LoadExperimentConfig(o.config);
  if (o.horizon) cfg.simulation.horizon = *o.horizon;
  if (o.rollout_rounds) cfg.simulation.rollout_rounds = *o.rollout_rounds;
  if (o.window) cfg.report_window = *o.window;
  if (!o.seeds.empty()) cfg.seeds = ParseSeeds(o.seeds);
  if (cfg.seeds.empty()) cfg.seeds = {cfg.simulation.seed};
  cfg.simulation.Validate();
  return cfg;
}

void WriteRolloutRows(std::ostream& os, std::uint64_t seed,
                      const ConvergenceReport& rep) {
  for (const auto& row : rep.rollout) {
    for (int i = 0; i < rep.num_bidders; ++i) {
      os << seed << ',' << i << ',' << row.context << ',' << row.modal_bid[i]
         << ',' << row.rounds[i] << ',';
      for (std::size_t k = 0; k < row.reference.size(); ++k) {
        os << (k ? " " : "") << row.reference[k];
      }
      os << ',' << (row.in_reference[i] ? 1 : 0) << '\n';
    }
  }
}

constexpr const char* kRolloutHeader =
    "seed,bidder,context,bid,rounds,reference,match\n";

int RunSimulate(const SimulateOptions& o, const std::vector<std::string>& argv,
                bool rollout_only) {
  ExperimentConfig cfg = ResolveConfig(o);
  if (o.trajectory != "full" && o.trajectory != "rollout" && o.trajectory != "none") {
    throw ConfigError("--trajectory must be full, rollout or none");
  }
  const ReportFormat format =
      o.format == "jsonl" ? ReportFormat::kJsonl : ReportFormat::kCsv;
  const auto ref = ReferenceFor(cfg.simulation);
  const fs::path target =
      DefaultOutDir(o.out, o.config, rollout_only ? "_rollout" : "");
  StagedDir dir(target, o.overwrite);
  WriteManifest(dir.path(),
                Manifest(rollout_only ? "rollout" : "simulate", o.config, cfg,
                         cfg.seeds, argv),
                cfg);

  auto rollout_os = OpenFile(dir.path() / "rollout.csv");
  rollout_os << kRolloutHeader;
  auto summary = OpenFile(dir.path() / "summary.csv");
  summary << "seed,bidder,rollout_matches,contexts,final_agreement,"
             "final_regret\n";

  // Logs can be large, so trials run one at a time unless asked otherwise.
  const std::size_t batch = std::max(1, o.threads);
  for (std::size_t start = 0; start < cfg.seeds.size(); start += batch) {
    const std::size_t stop = std::min(cfg.seeds.size(), start + batch);
    std::vector<std::uint64_t> seeds(cfg.seeds.begin() + start,
                                     cfg.seeds.begin() + stop);
    std::vector<TrajectoryLog> logs;
    if (o.play_log && !rollout_only) {
      for (auto seed : seeds) {
        SimulationConfig sim = cfg.simulation;
        sim.seed = seed;
        const fs::path seed_dir = dir.path() / ("seed_" + std::to_string(seed));
        fs::create_directories(seed_dir);
        auto play = OpenFile(seed_dir / "play.jsonl");
        PlayLogWriter writer(play);
        SimulationObserver* observers[] = {&writer};
        logs.push_back(RunSimulation(sim, observers));
      }
    } else {
      logs = RunTrials(cfg.simulation, seeds, o.threads);
    }
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const auto seed = seeds[k];
      const TrajectoryLog& log = logs[k];
      const auto rep = BuildReport(log, ref ? &*ref : nullptr, cfg.report_window);
      WriteRolloutRows(rollout_os, seed, rep);
      for (int i = 0; i < rep.num_bidders; ++i) {
        summary << seed << ',' << i << ',';
        if (rep.rollout_omitted || !rep.has_reference) {
          summary << ',';
        } else {
          summary << rep.RolloutMatches(i) << ',';
        }
        summary << rep.resolution << ',';
        const auto& last = rep.windows.empty() ? WindowStats{} : rep.windows.back();
        summary << (last.agreement ? Num(*last.agreement) : "") << ',';
        summary << (rep.regret[i].regret.empty() ? "" : Num(rep.regret[i].regret.back()))
                << '\n';
      }
      if (rollout_only) {
        std::cerr << "seed " << seed << ": rollout done\n";
        continue;
      }
      const fs::path seed_dir = dir.path() / ("seed_" + std::to_string(seed));
      fs::create_directories(seed_dir);
      if (o.trajectory != "none") {
        auto os = OpenFile(seed_dir / "trajectory.jsonl");
        WriteTrajectoryJsonl(log, os, o.trajectory == "full");
      }
      {
        auto os = OpenFile(seed_dir / "sigma.csv");
        WriteSigmaCsv(log, os);
      }
      ExportReport(rep, seed_dir / "report", format);
      for (const auto& w : rep.warnings) {
        std::cerr << "seed " << seed << ": warning: " << w << '\n';
      }
      std::cerr << "seed " << seed << ": " << log.size() << " rounds written\n";
    }
  }
  rollout_os.close();
  summary.close();
  if (!rollout_os || !summary) throw IoError("failed writing run summary");
  dir.Commit();
  std::cout << target.string() << '\n';
  return 0;
}

struct OracleOptions {
  std::string mech = "fpa";
  int n = 2;
  int h = 10;
  std::vector<double> multipliers;
  std::string out;
};

Mechanism BuildMechanism(const std::string& name, const std::vector<double>& mult) {
  switch (ParseMechanismKind(name)) {
    case MechanismKind::kSecondPrice: return Mechanism::SecondPrice();
    case MechanismKind::kFirstPrice: return Mechanism::FirstPrice();
    case MechanismKind::kMultiPositionVcg:
      if (mult.empty()) throw ConfigError("vcg needs --multipliers");
      return Mechanism::MultiPositionVcg(mult);
  }
  throw ConfigError("unknown mechanism");
}

int RunOracle(const OracleOptions& o) {
  const Mechanism mech = BuildMechanism(o.mech, o.multipliers);
  CheckOracleSize(o.n, o.h);
  mech.Validate(o.n);
  const bool closed = mech.kind() == MechanismKind::kFirstPrice && o.n == 2;
  WithOutput(o.out, [&](std::ostream& os) {
    os << "v,b,value,bid,expected_utility";
    if (closed) os << ",closed_form,abs_diff";
    if (mech.Truthful()) os << ",advantage_probability,advantage_bound";
    os << '\n';
    for (Tick v = 1; v <= o.h; ++v) {
      for (Tick b = 1; b <= o.h; ++b) {
        const double eu = ExactExpectedUtilityUniform(mech, o.n, o.h, v, b);
        os << v << ',' << b << ',' << Num(static_cast<double>(v) / o.h) << ','
           << Num(static_cast<double>(b) / o.h) << ',' << Num(eu);
        if (closed) {
          const double cf = FirstPriceUniformClosedForm(o.h, v, b);
          os << ',' << Num(cf) << ',' << Num(std::abs(cf - eu));
        }
        if (mech.Truthful()) {
          if (b == v) {
            os << ",,";
          } else {
            const auto adv = TruthfulAdvantageProbability(mech, o.n, o.h, v, b);
            os << ',' << Num(adv.probability) << ',' << Num(adv.bound);
          }
        }
        os << '\n';
      }
    }
  });
  return 0;
}

struct BoundsOptions {
  std::string theorem = "spa";
  int n = 2;
  int h = 10;
  std::optional<double> tau;
  double rho = 1.0;
  std::string gamma;
  std::optional<std::int64_t> t0;
  std::int64_t tmax = 0;
  int points = 50;
  std::string out;
};

GammaSchedule DefaultGamma(Theorem th, int n, int h, double tau, double rho) {
  if (th == Theorem::kFirstPrice) {
    return GammaSchedule::Constant(1.0 / (4.0 * h * h * static_cast<double>(h)));
  }
  return GammaSchedule::Constant(tau * (th == Theorem::kVcg ? rho : 1.0) /
                                 (8.0 * n * h));
}

int RunBounds(const BoundsOptions& o) {
  const Theorem th = ParseTheorem(o.theorem);
  const double tau = o.tau.value_or(MaxThickness(o.h, o.n));
  const double rho = th == Theorem::kVcg ? o.rho : 1.0;
  std::optional<ExplorationThreshold> thr;
  if (th != Theorem::kFirstPrice) {
    thr = MinimalExplorationRounds(o.n, o.h, tau, rho);
  }
  std::int64_t t0 = o.t0.value_or(thr ? thr->t0 : 0);
  if (t0 < 1) throw ConfigError("first price bounds need --t0");
  const GammaSchedule gamma =
      o.gamma.empty() ? DefaultGamma(th, o.n, o.h, tau, rho) : GammaSchedule::Parse(o.gamma);
  const std::int64_t tmax = o.tmax > t0 ? o.tmax : t0 * 1000;
  if (o.points < 2) throw ConfigError("--points must be >= 2");
  WithOutput(o.out, [&](std::ostream& os) {
    os << "row,theorem,t,gamma_t,t0,gamma_cap,p_raw,p,vacuous,violations\n";
    if (thr) {
      os << "threshold," << TheoremName(th) << ",," << ',' << thr->t0 << ','
         << Num(thr->gamma_cap) << ",,,,\n";
    }
    std::int64_t prev = 0;
    for (int k = 0; k < o.points; ++k) {
      const double frac = static_cast<double>(k) / (o.points - 1);
      const auto t = static_cast<std::int64_t>(std::llround(
          std::exp(std::log(static_cast<double>(t0 + 1)) * (1 - frac) +
                   std::log(static_cast<double>(tmax)) * frac)));
      if (t <= prev) continue;
      prev = t;
      BoundInputs in{t, gamma(t), t0, o.n, o.h, tau, rho};
      const auto b = ConvergenceProbability(th, in);
      std::string viol;
      for (std::size_t i = 0; i < b.violations.size(); ++i) {
        viol += (i ? "; " : "") + b.violations[i];
      }
      os << "curve," << TheoremName(th) << ',' << t << ',' << Num(in.gamma_t)
         << ',' << t0 << ',' << (thr ? Num(thr->gamma_cap) : "") << ','
         << Num(b.raw) << ',' << Num(b.value) << ',' << (b.vacuous ? 1 : 0)
         << ",\"" << viol << "\"\n";
    }
  });
  return 0;
}

struct ScheduleOptions {
  std::string theorem = "spa";
  int n = 2;
  int h = 10;
  std::optional<double> tau;
  std::string gamma;
  std::optional<std::int64_t> t0;
  std::int64_t horizon = 0;
  int levels = 64;
  std::string out;
};

int RunSchedule(const ScheduleOptions& o) {
  const Theorem th = ParseTheorem(o.theorem);
  const double tau = o.tau.value_or(MaxThickness(o.h, o.n));
  std::int64_t t0 = o.t0.value_or(0);
  if (!o.t0) {
    if (th == Theorem::kFirstPrice) throw ConfigError("first price schedule needs --t0");
    t0 = MinimalExplorationRounds(o.n, o.h, tau).t0;
  }
  const GammaSchedule gamma =
      o.gamma.empty() ? DefaultGamma(th, o.n, o.h, tau, 1.0) : GammaSchedule::Parse(o.gamma);
  const std::int64_t horizon =
      o.horizon > t0 ? o.horizon : std::numeric_limits<std::int64_t>::max() / 4;
  const auto sched =
      BuildEpisodeSchedule(th, gamma, {t0, o.n, o.h, tau, horizon, o.levels});
  WithOutput(o.out, [&](std::ostream& os) {
    os << "k,boundary,ratio\n";
    for (std::size_t k = 0; k < sched.boundaries.size(); ++k) {
      os << k << ',' << sched.boundaries[k] << ',';
      if (k > 0) {
        os << Num(static_cast<double>(sched.boundaries[k]) /
                  static_cast<double>(sched.boundaries[k - 1]));
      }
      os << '\n';
    }
  });
  std::cerr << "schedule: " << sched.note << (sched.truncated ? " (truncated)" : "")
            << ", gamma " << gamma.description() << '\n';
  return 0;
}

struct ComplianceOptions {
  std::string play_log;
  std::string gamma;
  std::string out;
  bool fail_on_violation = false;
};

int RunCompliance(const ComplianceOptions& o) {
  std::ifstream is(o.play_log, std::ios::binary);
  if (!is) throw IoError("cannot read " + o.play_log);
  const auto records = ReadPlayLogJsonl(is);
  std::optional<GammaSchedule> schedule;
  if (!o.gamma.empty()) schedule = GammaSchedule::Parse(o.gamma);
  const auto report = ComplianceCheck(records, schedule);
  WithOutput(o.out, [&](std::ostream& os) { WriteComplianceCsv(report, os); });
  std::cerr << "compliance: " << report.decisions_checked << " checked, "
            << report.decisions_skipped << " skipped, "
            << report.violations.size() << " violations\n";
  return o.fail_on_violation && !report.Clean() ? 3 : 0;
}

struct ReportOptions {
  std::string config;
  std::string trajectory;
  std::string out;
  std::string format = "csv";
  std::optional<std::int64_t> window;
  bool overwrite = false;
};

int RunReport(const ReportOptions& o, const std::vector<std::string>& argv) {
  ExperimentConfig cfg = LoadExperimentConfig(o.config);
  if (o.window) cfg.report_window = *o.window;
  std::ifstream is(o.trajectory, std::ios::binary);
  if (!is) throw IoError("cannot read " + o.trajectory);
  // The seed of the trial lives in the trajectory's directory name only, so
  // the config's seed is used for the echo.
  const TrajectoryLog log = ReadTrajectoryJsonl(is, cfg.simulation);
  if (log.training_rounds() != cfg.simulation.horizon) {
    std::cerr << "warning: trajectory has " << log.training_rounds()
              << " training rounds, config says " << cfg.simulation.horizon
              << '\n';
  }
  const auto ref = ReferenceFor(cfg.simulation);
  const auto rep = BuildReport(log, ref ? &*ref : nullptr, cfg.report_window);
  const fs::path target = DefaultOutDir(o.out, o.config, "_report");
  StagedDir dir(target, o.overwrite);
  WriteManifest(dir.path(), Manifest("report", o.config, cfg, {}, argv), cfg);
  ExportReport(rep, dir.path(),
               o.format == "jsonl" ? ReportFormat::kJsonl : ReportFormat::kCsv);
  dir.Commit();
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << target.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyse mean-based bidders in repeated auctions"};
  app.set_version_flag("--version", std::string(BIDLEARN_VERSION) + " (" +
                                        BIDLEARN_GIT_REVISION + ")");
  app.require_subcommand(1);
  const std::vector<std::string> args(argv, argv + argc);

  SimulateOptions sim;
  auto add_sim_flags = [&](CLI::App* cmd, bool full) {
    cmd->add_option("--config", sim.config, "Experiment config (INI)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seeds", sim.seeds, "Seeds, e.g. 1..10 or 1,3,5");
    cmd->add_option("--out", sim.out,
                    "Output directory (default $BIDLEARN_OUT/<config stem>)");
    cmd->add_flag("--overwrite", sim.overwrite, "Replace an existing output directory");
    cmd->add_option("--horizon", sim.horizon, "Override training rounds");
    cmd->add_option("--rollout-rounds", sim.rollout_rounds, "Override rollout rounds");
    cmd->add_option("--window", sim.window, "Override report window");
    cmd->add_option("--threads", sim.threads, "Trials run concurrently")
        ->check(CLI::PositiveNumber);
    if (full) {
      cmd->add_option("--trajectory", sim.trajectory,
                      "Trajectory JSONL content: full, rollout or none")
          ->check(CLI::IsMember({"full", "rollout", "none"}));
      cmd->add_flag("--play-log", sim.play_log,
                    "Write per-decision play logs for compliance checks");
      cmd->add_option("--format", sim.format, "Report format")
          ->check(CLI::IsMember({"csv", "jsonl"}));
    }
  };
  auto* simulate = app.add_subcommand("simulate", "Run trials and write logs and reports");
  add_sim_flags(simulate, true);
  auto* rollout = app.add_subcommand("rollout", "Run trials and tabulate greedy rollout bids");
  add_sim_flags(rollout, false);

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact expected-utility table");
  oracle_cmd->add_option("--mech", oracle.mech, "spa, fpa or vcg");
  oracle_cmd->add_option("--n", oracle.n, "Bidders");
  oracle_cmd->add_option("--H", oracle.h, "Grid resolution");
  oracle_cmd->add_option("--multipliers", oracle.multipliers, "VCG position multipliers")
      ->delimiter(',');
  oracle_cmd->add_option("--out", oracle.out, "CSV path (default stdout)");

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Convergence probability curve");
  bounds_cmd->add_option("--theorem", bounds.theorem, "spa, fpa or vcg");
  bounds_cmd->add_option("--n", bounds.n, "Bidders");
  bounds_cmd->add_option("--H", bounds.h, "Grid resolution");
  bounds_cmd->add_option("--tau", bounds.tau, "Thickness (default 1/H^(n-1))");
  bounds_cmd->add_option("--rho", bounds.rho, "VCG multiplier gap");
  bounds_cmd->add_option("--gamma", bounds.gamma,
                         "Gamma schedule: const:g, power:c,a or epsilon:s,e,r");
  bounds_cmd->add_option("--t0", bounds.t0, "Exploration rounds (default: threshold)");
  bounds_cmd->add_option("--tmax", bounds.tmax, "Last t (default 1000 T0)");
  bounds_cmd->add_option("--points", bounds.points, "Curve points");
  bounds_cmd->add_option("--out", bounds.out, "CSV path (default stdout)");

  ScheduleOptions sched;
  auto* sched_cmd = app.add_subcommand("schedule", "Episode boundaries T_k");
  sched_cmd->add_option("--theorem", sched.theorem, "spa, fpa or vcg");
  sched_cmd->add_option("--n", sched.n, "Bidders");
  sched_cmd->add_option("--H", sched.h, "Grid resolution");
  sched_cmd->add_option("--tau", sched.tau, "Thickness (default 1/H^(n-1))");
  sched_cmd->add_option("--gamma", sched.gamma, "Gamma schedule");
  sched_cmd->add_option("--t0", sched.t0, "First boundary (default: threshold)");
  sched_cmd->add_option("--horizon", sched.horizon, "Stop after this round");
  sched_cmd->add_option("--levels", sched.levels, "Maximum number of levels");
  sched_cmd->add_option("--out", sched.out, "CSV path (default stdout)");

  ComplianceOptions comp;
  auto* comp_cmd = app.add_subcommand("compliance", "Check a play log against a gamma schedule");
  comp_cmd->add_option("--play-log", comp.play_log, "play.jsonl from simulate --play-log")
      ->required()
      ->check(CLI::ExistingFile);
  comp_cmd->add_option("--gamma", comp.gamma,
                       "Gamma schedule (default: gamma registered in each record)");
  comp_cmd->add_option("--out", comp.out, "CSV path (default stdout)");
  comp_cmd->add_flag("--fail-on-violation", comp.fail_on_violation,
                     "Exit with status 3 when violations are found");

  ReportOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Rebuild a report from a trajectory log");
  rep_cmd->add_option("--config", rep.config, "Config the log was produced with")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--trajectory", rep.trajectory, "trajectory.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--out", rep.out, "Output directory");
  rep_cmd->add_option("--format", rep.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  rep_cmd->add_option("--window", rep.window, "Report window");
  rep_cmd->add_flag("--overwrite", rep.overwrite, "Replace an existing output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return RunSimulate(sim, args, false);
    if (rollout->parsed()) return RunSimulate(sim, args, true);
    if (oracle_cmd->parsed()) return RunOracle(oracle);
    if (bounds_cmd->parsed()) return RunBounds(bounds);
    if (sched_cmd->parsed()) return RunSchedule(sched);
    if (comp_cmd->parsed()) return RunCompliance(comp);
    if (rep_cmd->parsed()) return RunReport(rep, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
