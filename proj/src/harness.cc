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

#include "saa/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "saa/search.h"

#ifndef SAA_PRESETS_PATH
#define SAA_PRESETS_PATH "config/presets.json"
#endif

namespace saa {
namespace {

using nlohmann::json;

constexpr double kZ95TwoSided = 1.959963984540054;

json TableToJson(std::span<const double> table) {
  json out = json::object();
  for (std::size_t x = 1; x < table.size(); ++x) {
    out[std::to_string(x)] = table[x];
  }
  return out;
}

std::vector<double> TableFromJson(const json& j, int num_items) {
  std::vector<double> table(NumBundles(num_items), 0.0);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t used = 0;
    unsigned long bits = 0;
    try {
      bits = std::stoul(it.key(), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it.key().size()) {
      throw ConfigError("bad bitmask key: " + it.key());
    }
    const ItemSet x(static_cast<std::uint32_t>(bits));
    if (!x.FitsIn(num_items) || x.empty()) {
      throw ConfigError("item set out of range: " + it.key());
    }
    table[x.bits()] = it.value().get<double>();
  }
  return table;
}

json GameToJson(const GameConfig& game) {
  return {{"num_bidders", game.num_bidders},
          {"num_items", game.num_items},
          {"epsilon", game.epsilon},
          {"max_rounds", game.max_rounds}};
}

GameConfig GameFromJson(const json& j) {
  GameConfig game;
  game.num_bidders = j.at("num_bidders").get<int>();
  game.num_items = j.at("num_items").get<int>();
  game.epsilon = j.at("epsilon").get<double>();
  game.max_rounds = j.value("max_rounds", 0);
  return game;
}

std::uint64_t LabelHash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class NoBidStrategy : public Strategy {
 public:
  ItemSet Bid(const Observation&) override { return ItemSet(); }
};

class RandomStrategy : public Strategy {
 public:
  explicit RandomStrategy(std::uint64_t seed) : rng_(seed) {}
  ItemSet Bid(const Observation& obs) override {
    const std::vector<ItemSet> legal = LegalActions(
        *obs.config, *obs.state, obs.bidder, obs.own_type->budget);
    return legal[rng_.UniformInt(legal.size())];
  }

 private:
  Rng rng_;
};

class SbStrategy : public Strategy {
 public:
  ItemSet Bid(const Observation& obs) override {
    return SbBid(*obs.config, *obs.state, obs.bidder, *obs.own_type);
  }
};

std::optional<DeciderKind> SearchKind(const std::string& name) {
  if (name == "expect_sms") return DeciderKind::kExpectation;
  if (name == "dsms") return DeciderKind::kDsms;
  if (name == "sdsms") return DeciderKind::kSdsms;
  if (name == "csms") return DeciderKind::kCsms;
  return std::nullopt;
}

}  // namespace

double Presets::Alpha(const std::string& strategy, double eta) const {
  auto it = alpha.find(strategy);
  if (it == alpha.end() || eta_levels.empty()) return 0.0;
  std::size_t best = 0;
  for (std::size_t k = 1; k < eta_levels.size(); ++k) {
    if (std::abs(eta_levels[k] - eta) < std::abs(eta_levels[best] - eta)) {
      best = k;
    }
  }
  return it->second.at(best);
}

int Presets::MaxActions(const std::string& strategy) const {
  auto it = max_actions.find(strategy);
  return it == max_actions.end() ? default_max_actions : it->second;
}

Presets Presets::FromJson(const json& j) {
  Presets p;
  try {
    p.eta_levels = j.at("eta_levels").get<std::vector<double>>();
    for (auto it = j.at("alpha").begin(); it != j.at("alpha").end(); ++it) {
      p.alpha[it.key()] = it.value().get<std::vector<double>>();
      if (p.alpha[it.key()].size() != p.eta_levels.size()) {
        throw ConfigError("preset row " + it.key() +
                          " does not match eta_levels");
      }
    }
    const json& acts = j.at("max_actions");
    for (auto it = acts.begin(); it != acts.end(); ++it) {
      if (it.key() == "default") {
        p.default_max_actions = it.value().get<int>();
      } else {
        p.max_actions[it.key()] = it.value().get<int>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad presets: ") + e.what());
  }
  return p;
}

Presets Presets::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open presets file " + path.string());
  try {
    return FromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Presets Presets::Default() {
  static const Presets presets = Load(SAA_PRESETS_PATH);
  return presets;
}

void ExperimentConfig::Validate() const {
  try {
    game.Validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(eta_v) || !in_unit(eta_b)) {
    throw ConfigError("eta_v and eta_b must lie in [0, 1]");
  }
  if (instances < 1) throw ConfigError("instance count must be at least 1");
  if (!(max_surplus > 0.0)) throw ConfigError("V must be positive");
  if (!(b_min >= 0.0 && b_max > b_min)) {
    throw ConfigError("budget range must satisfy 0 <= b_min < b_max");
  }
  if (moment_samples < 2) throw ConfigError("moment_samples must be >= 2");
  if (!iterations && !seconds) {
    throw ConfigError("one of iterations or seconds must be set");
  }
  if ((iterations && *iterations < 1) || (seconds && !(*seconds > 0.0))) {
    throw ConfigError("search limits must be positive");
  }
  if (deltas.empty()) throw ConfigError("deltas must not be empty");
  if (scpd_samples < 1) throw ConfigError("scpd_samples must be >= 1");
}

SearchBudget ExperimentConfig::Budget() const {
  return SearchBudget{iterations, seconds};
}

json ExperimentConfig::ToJson() const {
  json j = {{"num_bidders", game.num_bidders},
            {"num_items", game.num_items},
            {"epsilon", game.epsilon},
            {"max_rounds", game.max_rounds},
            {"eta_v", eta_v},
            {"eta_b", eta_b},
            {"max_surplus", max_surplus},
            {"b_min", b_min},
            {"b_max", b_max},
            {"instances", instances},
            {"seed", seed},
            {"moment_samples", moment_samples},
            {"deltas", deltas},
            {"scpd_samples", scpd_samples},
            {"infer_budgets", infer_budgets},
            {"rotate_seats", rotate_seats},
            {"sims_per_iter", prediction.sims_per_iter},
            {"damping", prediction.damping},
            {"tolerance", prediction.tolerance},
            {"max_iters", prediction.max_iters},
            {"edpe_type_samples", edpe.type_samples},
            {"edpe_max_iters", edpe.max_iters}};
  j["iterations"] = iterations ? json(*iterations) : json(nullptr);
  j["seconds"] = seconds ? json(*seconds) : json(nullptr);
  json alpha = json::object();
  for (const auto& [k, v] : presets.alpha) alpha[k] = v;
  json acts = {{"default", presets.default_max_actions}};
  for (const auto& [k, v] : presets.max_actions) acts[k] = v;
  j["presets"] = {{"eta_levels", presets.eta_levels},
                  {"alpha", alpha},
                  {"max_actions", acts}};
  return j;
}

ExperimentConfig ExperimentConfig::FromJson(const json& j,
                                            const std::filesystem::path& base) {
  ExperimentConfig c;
  try {
    c.game.num_bidders = j.value("num_bidders", c.game.num_bidders);
    c.game.num_items = j.value("num_items", c.game.num_items);
    c.game.epsilon = j.value("epsilon", c.game.epsilon);
    c.game.max_rounds = j.value("max_rounds", c.game.max_rounds);
    c.eta_v = j.value("eta_v", c.eta_v);
    c.eta_b = j.value("eta_b", c.eta_b);
    c.max_surplus = j.value("max_surplus", c.max_surplus);
    c.b_min = j.value("b_min", c.b_min);
    c.b_max = j.value("b_max", c.b_max);
    c.instances = j.value("instances", c.instances);
    c.seed = j.value("seed", c.seed);
    c.moment_samples = j.value("moment_samples", c.moment_samples);
    if (j.contains("iterations")) {
      c.iterations = j["iterations"].is_null()
                         ? std::nullopt
                         : std::optional(j["iterations"].get<std::int64_t>());
    }
    if (j.contains("seconds")) {
      c.seconds = j["seconds"].is_null()
                      ? std::nullopt
                      : std::optional(j["seconds"].get<double>());
    }
    c.deltas = j.value("deltas", c.deltas);
    c.scpd_samples = j.value("scpd_samples", c.scpd_samples);
    c.infer_budgets = j.value("infer_budgets", c.infer_budgets);
    c.rotate_seats = j.value("rotate_seats", c.rotate_seats);
    c.prediction.sims_per_iter =
        j.value("sims_per_iter", c.prediction.sims_per_iter);
    c.prediction.damping = j.value("damping", c.prediction.damping);
    c.prediction.tolerance = j.value("tolerance", c.prediction.tolerance);
    c.prediction.max_iters = j.value("max_iters", c.prediction.max_iters);
    c.edpe.type_samples = j.value("edpe_type_samples", c.edpe.type_samples);
    c.edpe.max_iters = j.value("edpe_max_iters", c.edpe.max_iters);
    if (j.contains("presets")) {
      const json& p = j["presets"];
      c.presets = p.is_string() ? Presets::Load(base / p.get<std::string>())
                                : Presets::FromJson(p);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return FromJson(j, path.parent_path());
}

Instance GenerateInstance(const ExperimentConfig& config, int id) {
  config.Validate();
  Instance inst;
  inst.id = id;
  inst.seed = DeriveSeed(config.seed, {static_cast<std::uint64_t>(id)});
  inst.game = config.game;
  inst.eta_v = config.eta_v;
  inst.eta_b = config.eta_b;
  inst.max_surplus = config.max_surplus;
  inst.b_min = config.b_min;
  inst.b_max = config.b_max;
  inst.moment_samples = config.moment_samples;
  const int n = config.game.num_bidders;
  for (int i = 0; i < n; ++i) {
    const auto stream = [&](std::uint64_t k) {
      return Rng(DeriveSeed(inst.seed, {static_cast<std::uint64_t>(i), k}));
    };
    Rng anchors = stream(0);
    Rng budget_law = stream(1);
    Rng true_values = stream(2);
    Rng true_budget = stream(3);
    Rng moments = stream(4);
    TypeDistribution dist;
    dist.values = GenerateComplementarity(config.game.num_items, config.eta_v,
                                          config.max_surplus, anchors);
    dist.budget = GenerateBudgetDistribution(config.eta_b, config.b_min,
                                             config.b_max, budget_law);
    inst.true_types.push_back(SampleType(dist, true_values, true_budget));
    inst.moments.push_back(
        EstimateMoments(dist, config.moment_samples, moments));
    inst.distributions.push_back(std::move(dist));
  }
  return inst;
}

json Instance::ToJson() const {
  json bidders = json::array();
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    const TypeDistribution& d = distributions[i];
    const TypeMoments& mo = moments[i];
    bidders.push_back(
        {{"anchors", TableToJson(d.values.anchors)},
         {"budget_law", {d.budget.lower, d.budget.upper}},
         {"true_type",
          {{"values", TableToJson(true_types[i].values.table())},
           {"budget", true_types[i].budget}}},
         {"moments",
          {{"value_mean", mo.value_mean},
           {"value_variance", mo.value_variance},
           {"budget_mean", mo.budget_mean},
           {"budget_variance", mo.budget_variance}}}});
  }
  return {{"id", id},
          {"seed", seed},
          {"game", GameToJson(game)},
          {"eta_v", eta_v},
          {"eta_b", eta_b},
          {"max_surplus", max_surplus},
          {"b_min", b_min},
          {"b_max", b_max},
          {"moment_samples", moment_samples},
          {"moment_workers", 1},
          {"bidders", std::move(bidders)}};
}

Instance Instance::FromJson(const json& j) {
  Instance inst;
  try {
    inst.id = j.at("id").get<int>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.game = GameFromJson(j.at("game"));
    inst.game.Validate();
    inst.eta_v = j.at("eta_v").get<double>();
    inst.eta_b = j.at("eta_b").get<double>();
    inst.max_surplus = j.at("max_surplus").get<double>();
    inst.b_min = j.at("b_min").get<double>();
    inst.b_max = j.at("b_max").get<double>();
    inst.moment_samples = j.at("moment_samples").get<int>();
    const int m = inst.game.num_items;
    const json& bidders = j.at("bidders");
    if (bidders.size() != static_cast<std::size_t>(inst.game.num_bidders)) {
      throw ConfigError("instance bidder count mismatch");
    }
    for (const json& b : bidders) {
      TypeDistribution d;
      d.values.num_items = m;
      d.values.eta_v = inst.eta_v;
      d.values.max_surplus = inst.max_surplus;
      d.values.anchors = TableFromJson(b.at("anchors"), m);
      const auto law = b.at("budget_law").get<std::vector<double>>();
      if (law.size() != 2) throw ConfigError("budget_law needs two bounds");
      d.budget.lower = law[0];
      d.budget.upper = law[1];
      BidderType t;
      t.values = ValueFunction(
          m, TableFromJson(b.at("true_type").at("values"), m));
      t.values.Validate();
      t.budget = b.at("true_type").at("budget").get<double>();
      TypeMoments mo;
      const json& jm = b.at("moments");
      mo.value_mean = jm.at("value_mean").get<std::vector<double>>();
      mo.value_variance = jm.at("value_variance").get<std::vector<double>>();
      mo.budget_mean = jm.at("budget_mean").get<double>();
      mo.budget_variance = jm.at("budget_variance").get<double>();
      if (mo.value_mean.size() != NumBundles(m) ||
          mo.value_variance.size() != NumBundles(m)) {
        throw ConfigError("moment table size mismatch");
      }
      inst.distributions.push_back(std::move(d));
      inst.true_types.push_back(std::move(t));
      inst.moments.push_back(std::move(mo));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad instance: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad instance: ") + e.what());
  }
  return inst;
}

json InstancePredictions::ToJson() const {
  return {{"instance_id", instance_id},
          {"epe", epe},
          {"epe_iterations", epe_iterations},
          {"epe_converged", epe_converged},
          {"edpe", edpe},
          {"scpd_samples", scpd_samples}};
}

InstancePredictions InstancePredictions::FromJson(const json& j) {
  InstancePredictions p;
  try {
    p.instance_id = j.at("instance_id").get<int>();
    p.epe = j.at("epe").get<PricePrediction>();
    p.epe_iterations = j.at("epe_iterations").get<int>();
    p.epe_converged = j.at("epe_converged").get<bool>();
    p.edpe = j.at("edpe").get<PricePrediction>();
    p.scpd_samples =
        j.at("scpd_samples").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad prediction cache: ") + e.what());
  }
  return p;
}

InstancePredictions ComputePredictions(const ExperimentConfig& config,
                                       const Instance& instance) {
  InstancePredictions out;
  out.instance_id = instance.id;
  std::vector<BidderType> expected;
  for (const TypeMoments& mo : instance.moments) {
    expected.push_back(ExpectationType(mo));
  }
  SelfConfirmingResult sc = SelfConfirmingPointPrices(
      instance.game, expected, config.prediction,
      DeriveSeed(instance.seed, {100}));
  out.epe = std::move(sc.prices);
  out.epe_iterations = sc.iterations;
  out.epe_converged = sc.converged;
  out.scpd_samples = std::move(sc.samples);
  out.edpe = EdpePrices(instance.game, instance.distributions, config.edpe,
                        DeriveSeed(instance.seed, {101}));
  return out;
}

const std::vector<std::string>& StrategyNames() {
  static const std::vector<std::string> names = {
      "none", "sb",         "epe",  "edpe",  "scpd",
      "expect_sms", "dsms", "sdsms", "csms", "random"};
  return names;
}

bool IsKnownStrategy(const std::string& name) {
  const auto& names = StrategyNames();
  return std::find(names.begin(), names.end(), name) != names.end();
}

DeciderSetup MakeDeciderSetup(const Instance& instance, int seat,
                              DeciderKind kind) {
  DeciderSetup setup;
  setup.config = instance.game;
  setup.bidder = seat;
  setup.own_type = instance.true_types[seat];
  setup.moments = instance.moments;
  for (const TypeDistribution& d : instance.distributions) {
    setup.budgets.push_back(d.budget);
  }
  if (kind == DeciderKind::kCsms) setup.true_types = instance.true_types;
  setup.prediction_seed =
      DeriveSeed(instance.seed, {200, static_cast<std::uint64_t>(seat)});
  return setup;
}

std::unique_ptr<Strategy> MakeStrategy(const std::string& name,
                                       const ExperimentConfig& config,
                                       const Instance& instance,
                                       const InstancePredictions& predictions,
                                       int seat, std::uint64_t seed) {
  if (name == "none") return std::make_unique<NoBidStrategy>();
  if (name == "random") return std::make_unique<RandomStrategy>(seed);
  if (name == "sb") return std::make_unique<SbStrategy>();
  if (name == "epe") {
    return std::make_unique<PerceivedPriceStrategy>(predictions.epe);
  }
  if (name == "edpe") {
    return std::make_unique<PerceivedPriceStrategy>(predictions.edpe);
  }
  if (name == "scpd") {
    return std::make_unique<ScpdStrategy>(
        PriceDistribution::FromSamples(predictions.scpd_samples),
        config.scpd_samples, seed);
  }
  const std::optional<DeciderKind> kind = SearchKind(name);
  if (!kind) throw ConfigError("unknown strategy: " + name);
  DeciderSetup setup = MakeDeciderSetup(instance, seat, *kind);
  DeciderParams params;
  params.alpha = config.presets.Alpha(name, instance.eta_v);
  params.max_actions = config.presets.MaxActions(name);
  params.budget = config.Budget();
  params.deltas = config.deltas;
  params.infer_budgets = config.infer_budgets;
  params.prediction = config.prediction;
  return std::make_unique<SmsStrategy>(*kind, std::move(setup),
                                       std::move(params), seed);
}

std::string CompositionLabel(const Composition& composition) {
  std::string out;
  for (std::size_t s = 0; s < composition.size(); ++s) {
    if (s) out += '+';
    out += composition[s];
  }
  return out;
}

Composition ParseComposition(const std::string& label) {
  Composition out;
  std::stringstream in(label);
  std::string token;
  while (std::getline(in, token, '+')) {
    if (!IsKnownStrategy(token)) {
      throw ConfigError("unknown strategy in composition: " + token);
    }
    out.push_back(token);
  }
  if (out.empty()) throw ConfigError("empty composition");
  return out;
}

std::vector<Composition> MatchupCompositions(const std::string& a,
                                             const std::string& b,
                                             int num_bidders,
                                             const std::vector<int>& counts) {
  std::vector<Composition> out;
  for (int k : counts) {
    if (k < 0 || k > num_bidders) {
      throw ConfigError("composition count out of range");
    }
    Composition c(num_bidders, b);
    std::fill(c.begin(), c.begin() + k, a);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ResultRow> PlayComposition(const ExperimentConfig& config,
                                       const Instance& instance,
                                       const InstancePredictions& predictions,
                                       const Composition& composition) {
  const int n = instance.game.num_bidders;
  if (composition.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("composition size does not match the bidder count");
  }
  const std::string label = CompositionLabel(composition);
  const std::uint64_t cell = LabelHash(label);
  const int shift = config.rotate_seats ? instance.id % n : 0;
  std::vector<std::string> seat_strategy(n);
  std::vector<std::unique_ptr<Strategy>> owned;
  std::vector<Strategy*> strategies;
  for (int s = 0; s < n; ++s) {
    seat_strategy[s] = composition[(s + shift) % n];
    owned.push_back(MakeStrategy(
        seat_strategy[s], config, instance, predictions, s,
        DeriveSeed(config.seed, {static_cast<std::uint64_t>(instance.id), cell,
                                 static_cast<std::uint64_t>(s)})));
    strategies.push_back(owned.back().get());
  }
  Rng engine(DeriveSeed(config.seed, {static_cast<std::uint64_t>(instance.id),
                                      cell, 1ULL << 32}));
  const Outcome outcome =
      PlayOut(instance.game, instance.true_types, strategies, engine);
  std::vector<ResultRow> rows;
  for (int s = 0; s < n; ++s) {
    ResultRow row;
    row.instance_id = instance.id;
    row.composition = label;
    row.seat = s;
    row.strategy = seat_strategy[s];
    row.utility = outcome.utilities[s];
    row.exposed = outcome.utilities[s] < 0.0;
    row.items_won = outcome.allocation[s].size();
    long long ticks = 0;
    outcome.allocation[s].ForEach(
        [&](int j) { ticks += outcome.final_prices[j]; });
    row.spend = instance.game.epsilon * static_cast<double>(ticks);
    row.rounds = outcome.rounds;
    rows.push_back(std::move(row));
  }
  return rows;
}

void ParallelFor(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

MatchupResults RunMatchups(const ExperimentConfig& config,
                           const std::vector<Instance>& instances,
                           const std::vector<InstancePredictions>& predictions,
                           const std::vector<Composition>& compositions,
                           int jobs) {
  if (predictions.size() != instances.size()) {
    throw ConfigError("one prediction cache per instance is required");
  }
  const int cells = static_cast<int>(compositions.size() * instances.size());
  std::vector<std::vector<ResultRow>> rows(cells);
  std::vector<std::optional<std::string>> failures(cells);
  ParallelFor(cells, jobs, [&](int k) {
    const std::size_t c = k / instances.size();
    const std::size_t i = k % instances.size();
    try {
      rows[k] = PlayComposition(config, instances[i], predictions[i],
                                compositions[c]);
    } catch (const SearchBudgetError& e) {
      failures[k] = e.what();
    } catch (const NonTerminationError& e) {
      failures[k] = e.what();
    }
  });
  MatchupResults out;
  out.played = cells;
  for (int k = 0; k < cells; ++k) {
    if (failures[k]) {
      const std::size_t c = k / instances.size();
      const std::size_t i = k % instances.size();
      out.skipped.push_back(
          {instances[i].id, CompositionLabel(compositions[c]), *failures[k]});
      continue;
    }
    for (ResultRow& r : rows[k]) out.rows.push_back(std::move(r));
  }
  return out;
}

void WriteResultsCsv(const std::vector<ResultRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "instance_id,composition,seat,strategy,utility,exposed,items_won,"
         "spend,rounds\n";
  for (const ResultRow& r : rows) {
    out << r.instance_id << ',' << r.composition << ',' << r.seat << ','
        << r.strategy << ',' << FormatDouble(r.utility) << ','
        << (r.exposed ? 1 : 0) << ',' << r.items_won << ','
        << FormatDouble(r.spend) << ',' << r.rounds << '\n';
  }
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::vector<ResultRow> ReadResultsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string token;
    while (std::getline(ls, token, ',')) f.push_back(token);
    if (f.size() != 9) {
      throw std::runtime_error(path.string() + ": malformed row: " + line);
    }
    ResultRow r;
    r.instance_id = std::stoi(f[0]);
    r.composition = f[1];
    r.seat = std::stoi(f[2]);
    r.strategy = f[3];
    r.utility = std::stod(f[4]);
    r.exposed = f[5] == "1";
    r.items_won = std::stoi(f[6]);
    r.spend = std::stod(f[7]);
    r.rounds = std::stoi(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

Indicators ComputeIndicators(const std::vector<ResultRow>& rows,
                             const std::string& strategy, int num_items) {
  Indicators ind;
  double sum_u = 0.0, sum_u2 = 0.0, losses = 0.0, spend = 0.0, ratio = 0.0;
  std::int64_t exposed = 0, items = 0;
  for (const ResultRow& r : rows) {
    if (!strategy.empty() && r.strategy != strategy) continue;
    ++ind.uses;
    sum_u += r.utility;
    sum_u2 += r.utility * r.utility;
    losses += std::min(0.0, r.utility);
    if (r.utility < 0.0) ++exposed;
    if (r.items_won == 0) {
      ++ind.uses_without_items;
    } else {
      spend += r.spend;
      items += r.items_won;
    }
    ratio += static_cast<double>(r.items_won) / num_items;
  }
  if (ind.uses == 0) return ind;
  const double n = static_cast<double>(ind.uses);
  ind.expected_utility = sum_u / n;
  ind.expected_exposure = -losses / n;
  ind.exposure_frequency = static_cast<double>(exposed) / n;
  ind.ratio_items_won = ratio / n;
  ind.average_price_per_item =
      items > 0 ? spend / static_cast<double>(items) : 0.0;
  if (ind.uses > 1) {
    const double var =
        std::max(0.0, (sum_u2 - n * ind.expected_utility *
                                    ind.expected_utility) / (n - 1.0));
    ind.utility_half_width = kZ95TwoSided * std::sqrt(var / n);
    const double p = ind.exposure_frequency;
    ind.exposure_half_width = kZ95TwoSided * std::sqrt(p * (1.0 - p) / n);
  }
  return ind;
}

namespace {

int CountOf(const std::string& label, const std::string& a) {
  const Composition c = ParseComposition(label);
  return static_cast<int>(std::count(c.begin(), c.end(), a));
}

// Mean of the same-named fields of two indicator sets.
Indicators Average(const Indicators& x, const Indicators& y) {
  Indicators out;
  out.uses = x.uses + y.uses;
  out.expected_utility = 0.5 * (x.expected_utility + y.expected_utility);
  out.utility_half_width =
      0.5 * std::hypot(x.utility_half_width, y.utility_half_width);
  out.expected_exposure = 0.5 * (x.expected_exposure + y.expected_exposure);
  out.exposure_frequency = 0.5 * (x.exposure_frequency + y.exposure_frequency);
  out.exposure_half_width =
      0.5 * std::hypot(x.exposure_half_width, y.exposure_half_width);
  out.average_price_per_item =
      0.5 * (x.average_price_per_item + y.average_price_per_item);
  out.uses_without_items = x.uses_without_items + y.uses_without_items;
  out.ratio_items_won = 0.5 * (x.ratio_items_won + y.ratio_items_won);
  return out;
}

}  // namespace

MatchupReport ReportMatchup(const std::vector<ResultRow>& rows,
                            const std::string& a, const std::string& b,
                            int num_bidders, int num_items) {
  MatchupReport report;
  report.a = a;
  report.b = b;
  std::map<int, std::vector<ResultRow>> by_count;
  for (const ResultRow& r : rows) {
    const Composition c = ParseComposition(r.composition);
    const bool only_ab = std::all_of(c.begin(), c.end(), [&](const auto& s) {
      return s == a || s == b;
    });
    if (!only_ab || static_cast<int>(c.size()) != num_bidders) continue;
    by_count[CountOf(r.composition, a)].push_back(r);
  }
  for (const auto& [k, group] : by_count) {
    if (k > 0) report.a_by_count[k] = ComputeIndicators(group, a, num_items);
    if (k < num_bidders) {
      report.b_by_count[k] = ComputeIndicators(group, b, num_items);
    }
  }
  auto mixed = [&](const std::map<int, Indicators>& m) {
    // The two compositions with one and n - 1 copies of A.
    auto lo = m.find(1), hi = m.find(num_bidders - 1);
    if (lo != m.end() && hi != m.end()) {
      return lo == hi ? lo->second : Average(lo->second, hi->second);
    }
    if (lo != m.end()) return lo->second;
    if (hi != m.end()) return hi->second;
    return Indicators{};
  };
  report.a_mixed = mixed(report.a_by_count);
  report.b_mixed = mixed(report.b_by_count);
  return report;
}

namespace {

PairedTest SummarizeDifferences(const std::vector<double>& d) {
  PairedTest t;
  t.pairs = static_cast<std::int64_t>(d.size());
  if (d.empty()) return t;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double delta = d[k] - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (d[k] - mean);
  }
  t.mean = mean;
  if (d.size() > 1) {
    const double var = m2 / static_cast<double>(d.size() - 1);
    t.standard_error = std::sqrt(var / static_cast<double>(d.size()));
  }
  return t;
}

// Utility at (instance, seat) for the composition with `label`.
std::map<std::pair<int, int>, const ResultRow*> IndexRows(
    const std::vector<ResultRow>& rows, const std::string& label) {
  std::map<std::pair<int, int>, const ResultRow*> out;
  for (const ResultRow& r : rows) {
    if (r.composition == label) out[{r.instance_id, r.seat}] = &r;
  }
  return out;
}

PairedTest DeviationGainImpl(const std::vector<ResultRow>& rows,
                             const std::string& deviant,
                             const std::string& incumbent, int n) {
  const auto base_rows =
      IndexRows(rows, CompositionLabel(Composition(n, incumbent)));
  std::vector<double> diffs;
  std::map<std::string, bool> single_deviant;
  for (const ResultRow& r : rows) {
    if (r.strategy != deviant) continue;
    auto [it, fresh] = single_deviant.try_emplace(r.composition, false);
    if (fresh) {
      const Composition c = ParseComposition(r.composition);
      it->second =
          static_cast<int>(c.size()) == n &&
          std::count(c.begin(), c.end(), deviant) == 1 &&
          std::count(c.begin(), c.end(), incumbent) == n - 1;
    }
    if (!it->second) continue;
    auto base = base_rows.find({r.instance_id, r.seat});
    if (base == base_rows.end()) continue;
    diffs.push_back(r.utility - base->second->utility);
  }
  return SummarizeDifferences(diffs);
}

}  // namespace

PairedTest DeviationGain(const std::vector<ResultRow>& rows,
                         const std::string& a, const std::string& b,
                         int num_bidders) {
  return DeviationGainImpl(rows, a, b, num_bidders);
}

json EmpiricalGame::ToJson() const {
  auto opt = [](const std::vector<std::optional<double>>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x ? json(*x) : json(nullptr));
    return out;
  };
  auto test = [](const PairedTest& t) {
    return json{{"pairs", t.pairs},
                {"mean", t.mean},
                {"standard_error", t.standard_error},
                {"lower_95", t.lower_bound()}};
  };
  return {{"a", a},
          {"b", b},
          {"num_bidders", num_bidders},
          {"a_payoff_by_count", opt(a_payoff)},
          {"b_payoff_by_count", opt(b_payoff)},
          {"deviation_to_a", test(deviation_to_a)},
          {"deviation_to_b", test(deviation_to_b)},
          {"all_a_is_equilibrium", all_a_is_equilibrium},
          {"all_b_is_equilibrium", all_b_is_equilibrium}};
}

EmpiricalGame AnalyzeEmpiricalGame(const std::vector<ResultRow>& rows,
                                   const std::string& a, const std::string& b,
                                   int num_bidders) {
  EmpiricalGame g;
  g.a = a;
  g.b = b;
  g.num_bidders = num_bidders;
  g.a_payoff.assign(num_bidders + 1, std::nullopt);
  g.b_payoff.assign(num_bidders + 1, std::nullopt);
  for (int k = 0; k <= num_bidders; ++k) {
    Composition c(num_bidders, b);
    std::fill(c.begin(), c.begin() + k, a);
    const std::string label = CompositionLabel(c);
    double sa = 0.0, sb = 0.0;
    int na = 0, nb = 0;
    for (const ResultRow& r : rows) {
      if (r.composition != label) continue;
      if (r.strategy == a) {
        sa += r.utility;
        ++na;
      } else if (r.strategy == b) {
        sb += r.utility;
        ++nb;
      }
    }
    if (na > 0) g.a_payoff[k] = sa / na;
    if (nb > 0) g.b_payoff[k] = sb / nb;
  }
  if (a == b) {
    g.all_a_is_equilibrium = g.all_b_is_equilibrium = true;
    return g;
  }
  g.deviation_to_a = DeviationGainImpl(rows, a, b, num_bidders);
  g.deviation_to_b = DeviationGainImpl(rows, b, a, num_bidders);
  g.all_a_is_equilibrium = !(g.deviation_to_b.pairs > 1 &&
                             g.deviation_to_b.lower_bound() > 0.0);
  g.all_b_is_equilibrium = !(g.deviation_to_a.pairs > 1 &&
                             g.deviation_to_a.lower_bound() > 0.0);
  return g;
}

double TwoProportionZ(std::int64_t hits1, std::int64_t n1, std::int64_t hits2,
                      std::int64_t n2) {
  if (n1 <= 0 || n2 <= 0) return 0.0;
  const double p1 = static_cast<double>(hits1) / n1;
  const double p2 = static_cast<double>(hits2) / n2;
  const double pooled = static_cast<double>(hits1 + hits2) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) +
                               1.0 / static_cast<double>(n2)));
  if (se == 0.0) return 0.0;
  return (p2 - p1) / se;
}

}  // namespace saa
