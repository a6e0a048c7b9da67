// Copyright 2026 The SAA-inc Authors. All rights reserved.
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

// Command-line driver: gen, predict, run, analyze, selftest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "saa/harness.h"
#include "tools/selftest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = "out";
  std::optional<std::int64_t> iters;
  std::optional<double> time;
  int jobs = 1;
};

std::string IndexedName(const char* stem, int id) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05d.json", stem, id);
  return buf;
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw saa::ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw saa::ConfigError(path.string() + ": " + e.what());
  }
}

// The config is the --config file when given, else the one `gen` stored in
// the output directory, else the defaults. Command-line flags win.
saa::ExperimentConfig ResolveConfig(const GlobalFlags& flags) {
  saa::ExperimentConfig config;
  const fs::path stored = fs::path(flags.out) / "config.json";
  if (!flags.config.empty()) {
    config = saa::ExperimentConfig::Load(flags.config);
  } else if (fs::exists(stored)) {
    config = saa::ExperimentConfig::Load(stored);
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.iters) {
    config.iterations = *flags.iters;
    config.seconds.reset();
  }
  if (flags.time) {
    config.seconds = *flags.time;
    if (!flags.iters) config.iterations.reset();
  }
  config.Validate();
  return config;
}

std::vector<saa::Instance> LoadInstances(const fs::path& dir) {
  std::vector<saa::Instance> out;
  for (int id = 0;; ++id) {
    const fs::path p = dir / "instances" / IndexedName("instance", id);
    if (!fs::exists(p)) break;
    out.push_back(saa::Instance::FromJson(ReadJson(p)));
  }
  if (out.empty()) {
    throw saa::ConfigError("no instances under " + (dir / "instances").string() +
                           "; run gen first");
  }
  return out;
}

std::vector<saa::InstancePredictions> LoadPredictions(
    const fs::path& dir, const std::vector<saa::Instance>& instances) {
  std::vector<saa::InstancePredictions> out;
  for (const saa::Instance& inst : instances) {
    const fs::path p = dir / "predictions" / IndexedName("predictions", inst.id);
    if (!fs::exists(p)) {
      throw saa::ConfigError("missing " + p.string() + "; run predict first");
    }
    out.push_back(saa::InstancePredictions::FromJson(ReadJson(p)));
  }
  return out;
}

int RunGen(const GlobalFlags& flags) {
  const saa::ExperimentConfig config = ResolveConfig(flags);
  const fs::path out = flags.out;
  fs::create_directories(out / "instances");
  WriteJson(out / "config.json", config.ToJson());
  std::vector<json> docs(config.instances);
  saa::ParallelFor(config.instances, flags.jobs, [&](int id) {
    docs[id] = saa::GenerateInstance(config, id).ToJson();
  });
  for (int id = 0; id < config.instances; ++id) {
    WriteJson(out / "instances" / IndexedName("instance", id), docs[id]);
  }
  std::cout << "wrote " << config.instances << " instances to "
            << (out / "instances").string() << "\n";
  return kExitOk;
}

int RunPredict(const GlobalFlags& flags) {
  const saa::ExperimentConfig config = ResolveConfig(flags);
  const fs::path out = flags.out;
  const std::vector<saa::Instance> instances = LoadInstances(out);
  fs::create_directories(out / "predictions");
  std::vector<json> docs(instances.size());
  saa::ParallelFor(static_cast<int>(instances.size()), flags.jobs, [&](int k) {
    docs[k] = saa::ComputePredictions(config, instances[k]).ToJson();
  });
  for (std::size_t k = 0; k < instances.size(); ++k) {
    WriteJson(out / "predictions" / IndexedName("predictions", instances[k].id),
              docs[k]);
  }
  std::cout << "wrote " << instances.size() << " prediction caches\n";
  return kExitOk;
}

int RunMatch(const GlobalFlags& flags, const std::string& matchup,
             const std::vector<std::string>& labels,
             const std::string& results_name) {
  const saa::ExperimentConfig config = ResolveConfig(flags);
  const fs::path out = flags.out;
  const std::vector<saa::Instance> instances = LoadInstances(out);
  const auto predictions = LoadPredictions(out, instances);
  const int n = config.game.num_bidders;
  std::vector<saa::Composition> compositions;
  if (!matchup.empty()) {
    const auto comma = matchup.find(',');
    if (comma == std::string::npos) {
      throw saa::ConfigError("--matchup expects A,B");
    }
    const std::string a = matchup.substr(0, comma);
    const std::string b = matchup.substr(comma + 1);
    for (const std::string& s : {a, b}) {
      if (!saa::IsKnownStrategy(s)) {
        throw saa::ConfigError("unknown strategy: " + s);
      }
    }
    std::vector<int> counts;
    for (int k = 0; k <= n; ++k) counts.push_back(k);
    compositions = saa::MatchupCompositions(a, b, n, counts);
  }
  for (const std::string& label : labels) {
    compositions.push_back(saa::ParseComposition(label));
  }
  if (compositions.empty()) {
    throw saa::ConfigError("run needs --matchup or --composition");
  }
  for (const saa::Composition& c : compositions) {
    if (static_cast<int>(c.size()) != n) {
      throw saa::ConfigError("composition " + saa::CompositionLabel(c) +
                             " does not have " + std::to_string(n) + " seats");
    }
  }
  const saa::MatchupResults results =
      saa::RunMatchups(config, instances, predictions, compositions, flags.jobs);
  saa::WriteResultsCsv(results.rows, out / results_name);
  std::ofstream skipped(out / "skipped.csv", std::ios::binary);
  skipped << "instance_id,composition,reason\n";
  for (const saa::SkippedCell& s : results.skipped) {
    skipped << s.instance_id << ',' << s.composition << ",\"" << s.reason
            << "\"\n";
  }
  std::cout << "played " << results.played << " cells, skipped "
            << results.skipped.size() << "; rows in "
            << (out / results_name).string() << "\n";
  return kExitOk;
}

void WriteIndicatorRow(std::ostream& out, const std::string& composition,
                       const std::string& strategy,
                       const saa::Indicators& ind) {
  out << composition << ',' << strategy << ',' << ind.uses << ','
      << ind.expected_utility << ',' << ind.utility_half_width << ','
      << ind.expected_exposure << ',' << ind.exposure_frequency << ','
      << ind.average_price_per_item << ',' << ind.uses_without_items << ','
      << ind.ratio_items_won << '\n';
}

int RunAnalyze(const GlobalFlags& flags, const std::string& results_name) {
  const saa::ExperimentConfig config = ResolveConfig(flags);
  const fs::path out = flags.out;
  const auto rows = saa::ReadResultsCsv(out / results_name);
  const int n = config.game.num_bidders;
  const int m = config.game.num_items;

  std::ofstream ind(out / "indicators.csv", std::ios::binary);
  ind.precision(10);
  ind << "composition,strategy,uses,expected_utility,utility_half_width,"
         "expected_exposure,exposure_frequency,average_price_per_item,"
         "uses_without_items,ratio_items_won\n";
  std::vector<std::string> compositions;
  std::set<std::string> strategies;
  for (const saa::ResultRow& r : rows) {
    if (compositions.empty() || compositions.back() != r.composition) {
      if (std::find(compositions.begin(), compositions.end(), r.composition) ==
          compositions.end()) {
        compositions.push_back(r.composition);
      }
    }
    strategies.insert(r.strategy);
  }
  for (const std::string& label : compositions) {
    std::vector<saa::ResultRow> group;
    for (const saa::ResultRow& r : rows) {
      if (r.composition == label) group.push_back(r);
    }
    std::set<std::string> here;
    for (const saa::ResultRow& r : group) here.insert(r.strategy);
    for (const std::string& s : here) {
      WriteIndicatorRow(ind, label, s, saa::ComputeIndicators(group, s, m));
    }
  }

  json report = json::object();
  if (strategies.size() == 2) {
    const std::string a = *strategies.begin();
    const std::string b = *std::next(strategies.begin());
    const saa::EmpiricalGame game = saa::AnalyzeEmpiricalGame(rows, a, b, n);
    report["empirical_game"] = game.ToJson();
    const saa::MatchupReport mr = saa::ReportMatchup(rows, a, b, n, m);
    auto pack = [](const saa::Indicators& x) {
      return json{{"uses", x.uses},
                  {"expected_utility", x.expected_utility},
                  {"expected_exposure", x.expected_exposure},
                  {"exposure_frequency", x.exposure_frequency},
                  {"average_price_per_item", x.average_price_per_item},
                  {"ratio_items_won", x.ratio_items_won}};
    };
    report["mixed_compositions"] = {{a, pack(mr.a_mixed)},
                                    {b, pack(mr.b_mixed)}};
    std::ofstream plot(out / "plot_empirical_game.dat", std::ios::binary);
    plot.precision(10);
    plot << "# x=copies_of_" << a << " y=expected_utility series=strategy\n";
    for (int k = 0; k <= n; ++k) {
      if (game.a_payoff[k]) plot << k << ' ' << *game.a_payoff[k] << ' ' << a << '\n';
      if (game.b_payoff[k]) plot << k << ' ' << *game.b_payoff[k] << ' ' << b << '\n';
    }
  }
  report["rows"] = rows.size();
  WriteJson(out / "analysis.json", report);
  std::cout << "wrote " << (out / "indicators.csv").string() << " and "
            << (out / "analysis.json").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous ascending auction experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "Master seed");
  // A missing file is reported as a config error, not a usage error.
  app.add_option("--config", flags.config, "Experiment config (JSON)");
  app.add_option("--out", flags.out, "Output directory");
  auto* iters = app.add_option("--iters", flags.iters,
                               "Search iterations per decision");
  app.add_option("--time", flags.time, "Search seconds per decision")
      ->excludes(iters);
  app.add_option("--jobs", flags.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "Generate auction instances");
  auto* predict =
      app.add_subcommand("predict", "Compute offline price predictions");
  auto* run = app.add_subcommand("run", "Play matchups");
  std::string matchup;
  std::vector<std::string> labels;
  std::string results_name = "results.csv";
  run->add_option("--matchup", matchup,
                  "A,B: every composition of the two strategies");
  run->add_option("--composition", labels,
                  "Explicit composition such as sdsms+sb+sb");
  run->add_option("--results", results_name, "Results file name");
  auto* analyze = app.add_subcommand("analyze", "Indicators and games");
  analyze->add_option("--results", results_name, "Results file name");
  auto* selftest = app.add_subcommand("selftest", "Run invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return RunGen(flags);
    if (*predict) return RunPredict(flags);
    if (*run) return RunMatch(flags, matchup, labels, results_name);
    if (*analyze) return RunAnalyze(flags, results_name);
    if (*selftest) {
      return saa::tools::RunSelfTest(std::cout, flags.seed.value_or(1))
                 ? kExitOk
                 : kExitRuntime;
    }
  } catch (const saa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
