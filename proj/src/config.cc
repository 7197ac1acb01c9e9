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

#include "bidlearn/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bidlearn/errors.h"

namespace bidlearn {
namespace {

namespace pt = boost::property_tree;

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(std::string_view raw, const std::string& where) {
  const std::string s = Trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(where + ": malformed number '" + s + "'");
  }
  return value;
}

bool ParseBool(std::string_view raw, const std::string& where) {
  const std::string s = Trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(where + ": expected true or false, got '" + s + "'");
}

std::vector<double> ParseList(std::string_view raw, const std::string& where) {
  std::vector<double> out;
  std::string s(raw);
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(ParseNumber<double>(item, where));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string JoinNums(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += Num(xs[i]);
  }
  return s;
}

// Section reader that remembers which keys were consumed.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree)
      : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> Raw(const std::string& key) {
    used_.insert(key);
    if (tree_ == nullptr) return std::nullopt;
    auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return Trim(*v);
  }
  std::string Where(const std::string& key) const { return "[" + name_ + "] " + key; }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (auto v = Raw(key)) out = ParseNumber<T>(*v, Where(key));
  }
  void ReadBool(const std::string& key, bool& out) {
    if (auto v = Raw(key)) out = ParseBool(*v, Where(key));
  }

  void RejectUnknown() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, child] : *tree_) {
      if (!used_.count(key)) {
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

void ReadLearner(Section& s, LearnerSpec& spec) {
  if (auto v = s.Raw("policy")) spec.policy.kind = ParsePolicyKind(*v);
  if (auto v = s.Raw("feedback")) spec.feedback = ParseFeedbackMode(*v);
  s.Read("epsilon_start", spec.policy.epsilon.start);
  s.Read("epsilon_end", spec.policy.epsilon.end);
  s.Read("anneal_rounds", spec.policy.epsilon.anneal_rounds);
  s.Read("eta", spec.policy.eta);
  if (auto v = s.Raw("eta_target")) {
    if (v->empty() || *v == "none") {
      spec.policy.eta_target.reset();
    } else {
      spec.policy.eta_target = GammaSchedule::Parse(*v);
    }
  }
  s.Read("exp3_mixing", spec.policy.exp3_mixing);
  s.Read("ucb_c", spec.policy.ucb_c);
  s.RejectUnknown();
}

void WriteLearner(std::ostream& os, const std::string& header,
                  const LearnerSpec& spec) {
  const PolicySpec& p = spec.policy;
  os << "[" << header << "]\n"
     << "policy = " << PolicyName(p.kind) << '\n'
     << "feedback = " << FeedbackName(spec.feedback) << '\n'
     << "epsilon_start = " << Num(p.epsilon.start) << '\n'
     << "epsilon_end = " << Num(p.epsilon.end) << '\n'
     << "anneal_rounds = " << p.epsilon.anneal_rounds << '\n'
     << "eta = " << Num(p.eta) << '\n'
     << "eta_target = " << (p.eta_target ? p.eta_target->description() : "none")
     << '\n'
     << "exp3_mixing = " << Num(p.exp3_mixing) << '\n'
     << "ucb_c = " << Num(p.ucb_c) << "\n\n";
}

// Index suffix of "name.<i>", or nullopt.
std::optional<int> IndexedSection(const std::string& key,
                                  const std::string& prefix) {
  if (key.rfind(prefix + ".", 0) != 0) return std::nullopt;
  return ParseNumber<int>(key.substr(prefix.size() + 1), "section [" + key + "]");
}

}  // namespace

std::vector<std::uint64_t> ParseSeeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::string s(text);
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = Trim(item);
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(ParseNumber<std::uint64_t>(item, "seeds"));
      continue;
    }
    const auto lo = ParseNumber<std::uint64_t>(item.substr(0, dots), "seeds");
    const auto hi = ParseNumber<std::uint64_t>(item.substr(dots + 2), "seeds");
    if (hi < lo) throw ConfigError("seeds: empty range '" + item + "'");
    if (hi - lo >= 1000000) throw ConfigError("seeds: range too large");
    for (auto x = lo; x <= hi; ++x) seeds.push_back(x);
  }
  if (seeds.empty()) throw ConfigError("seeds: no seeds given");
  return seeds;
}

ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": line " + std::to_string(e.line()) + ": " +
                      e.message());
  }

  std::map<std::string, const pt::ptree*> sections;
  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(source + ": key '" + name + "' outside any section");
    }
    sections[name] = &child;
  }
  // read_ini drops sections without keys; they still have to be known names.
  static const pt::ptree kEmpty;
  {
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
      const auto first = line.find_first_not_of(" \t");
      const auto last = line.find_last_not_of(" \t\r");
      if (first == std::string::npos || line[first] != '[' || line[last] != ']') continue;
      const auto name = line.substr(first + 1, last - first - 1);
      const auto a = name.find_first_not_of(" \t");
      const auto b = name.find_last_not_of(" \t");
      if (a != std::string::npos) sections.try_emplace(name.substr(a, b - a + 1), &kEmpty);
    }
  }
  auto section = [&](const std::string& name) {
    auto it = sections.find(name);
    return Section(name, it == sections.end() ? nullptr : it->second);
  };

  ExperimentConfig cfg;
  SimulationConfig& sim = cfg.simulation;
  try {
    {
      Section s = section("simulation");
      s.Read("bidders", sim.num_bidders);
      s.Read("resolution", sim.resolution);
      s.Read("horizon", sim.horizon);
      s.Read("exploration_rounds", sim.exploration_rounds);
      s.Read("rollout_rounds", sim.rollout_rounds);
      s.Read("seed", sim.seed);
      s.Read("logging_cadence", sim.logging_cadence);
      s.ReadBool("fpa_theorem_pipeline", sim.fpa_theorem_pipeline);
      s.RejectUnknown();
    }
    {
      Section s = section("mechanism");
      std::string kind = "spa";
      if (auto v = s.Raw("kind")) kind = *v;
      const auto parsed = ParseMechanismKind(kind);
      auto multipliers = s.Raw("multipliers");
      if (parsed == MechanismKind::kMultiPositionVcg) {
        if (!multipliers) {
          throw ConfigError("[mechanism] multipliers is required for vcg");
        }
        sim.mechanism = Mechanism::MultiPositionVcg(
            ParseList(*multipliers, s.Where("multipliers")));
      } else {
        if (multipliers) {
          throw ConfigError("[mechanism] multipliers only applies to vcg");
        }
        sim.mechanism = parsed == MechanismKind::kFirstPrice
                            ? Mechanism::FirstPrice()
                            : Mechanism::SecondPrice();
      }
      s.RejectUnknown();
    }

    const ValueGrid grid(sim.resolution);
    std::optional<ValueDistribution> shared;
    {
      Section s = section("values");
      const auto prior = s.Raw("prior").value_or("uniform");
      auto pmf = s.Raw("pmf");
      if (prior == "pmf") {
        if (!pmf) throw ConfigError("[values] prior = pmf needs a pmf list");
        shared = ValueDistribution::FromPmf(grid, ParseList(*pmf, s.Where("pmf")));
      } else if (prior != "uniform") {
        throw ConfigError("[values] prior must be uniform or pmf");
      } else if (pmf) {
        throw ConfigError("[values] pmf given but prior = uniform");
      }
      s.RejectUnknown();
    }
    std::map<int, ValueDistribution> per_bidder;
    std::map<int, const pt::ptree*> learner_overrides;
    for (const auto& [name, child] : sections) {
      if (name == "simulation" || name == "mechanism" || name == "values" ||
          name == "learner" || name == "report" || name == "run") {
        continue;
      }
      if (auto i = IndexedSection(name, "values")) {
        if (*i < 0 || *i >= sim.num_bidders) {
          throw ConfigError("[" + name + "] bidder index out of range");
        }
        Section s(name, child);
        auto pmf = s.Raw("pmf");
        if (!pmf) throw ConfigError("[" + name + "] needs pmf");
        per_bidder.emplace(*i, ValueDistribution::FromPmf(
                                   grid, ParseList(*pmf, s.Where("pmf"))));
        s.RejectUnknown();
        continue;
      }
      if (auto i = IndexedSection(name, "learner")) {
        if (*i < 0 || *i >= sim.num_bidders) {
          throw ConfigError("[" + name + "] bidder index out of range");
        }
        learner_overrides[*i] = child;
        continue;
      }
      throw ConfigError("unknown section [" + name + "]");
    }
    if (shared || !per_bidder.empty()) {
      const auto base = shared.value_or(ValueDistribution::Uniform(grid));
      sim.distributions.assign(sim.num_bidders, base);
      for (auto& [i, d] : per_bidder) sim.distributions[i] = d;
    }

    LearnerSpec base;
    {
      Section s = section("learner");
      ReadLearner(s, base);
    }
    sim.learners = {base};
    if (!learner_overrides.empty()) {
      sim.learners.assign(sim.num_bidders, base);
      for (auto& [i, tree_ptr] : learner_overrides) {
        Section s("learner." + std::to_string(i), tree_ptr);
        ReadLearner(s, sim.learners[i]);
      }
    }
    {
      Section s = section("report");
      s.Read("window", cfg.report_window);
      s.RejectUnknown();
      if (cfg.report_window < 1) throw ConfigError("[report] window must be >= 1");
    }
    {
      Section s = section("run");
      if (auto v = s.Raw("seeds")) cfg.seeds = ParseSeeds(*v);
      s.RejectUnknown();
    }
    sim.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return ParseExperimentConfig(text.str(), path.string());
}

std::string ResolvedConfigText(const ExperimentConfig& config) {
  const SimulationConfig& sim = config.simulation;
  std::ostringstream os;
  os << "[simulation]\n"
     << "bidders = " << sim.num_bidders << '\n'
     << "resolution = " << sim.resolution << '\n'
     << "horizon = " << sim.horizon << '\n'
     << "exploration_rounds = " << sim.exploration_rounds << '\n'
     << "rollout_rounds = " << sim.rollout_rounds << '\n'
     << "seed = " << sim.seed << '\n'
     << "logging_cadence = " << sim.logging_cadence << '\n'
     << "fpa_theorem_pipeline = " << (sim.fpa_theorem_pipeline ? "true" : "false")
     << "\n\n";
  os << "[mechanism]\nkind = " << MechanismName(sim.mechanism.kind()) << '\n';
  if (sim.mechanism.kind() == MechanismKind::kMultiPositionVcg) {
    os << "multipliers = " << JoinNums(sim.mechanism.multipliers()) << '\n';
  }
  os << '\n';
  if (sim.distributions.empty()) {
    os << "[values]\nprior = uniform\n\n";
  } else {
    for (std::size_t i = 0; i < sim.distributions.size(); ++i) {
      os << "[values." << i << "]\npmf = "
         << JoinNums(sim.distributions[i].pmf()) << "\n\n";
    }
  }
  if (sim.learners.size() == 1) {
    WriteLearner(os, "learner", sim.learners[0]);
  } else {
    WriteLearner(os, "learner", sim.learners[0]);
    for (std::size_t i = 0; i < sim.learners.size(); ++i) {
      WriteLearner(os, "learner." + std::to_string(i), sim.learners[i]);
    }
  }
  os << "[report]\nwindow = " << config.report_window << "\n\n";
  if (!config.seeds.empty()) {
    os << "[run]\nseeds = ";
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      os << (i ? "," : "") << config.seeds[i];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace bidlearn
