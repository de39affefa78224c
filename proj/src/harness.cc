// Copyright 2026 The Authors.
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

#include "blockcache/harness.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "blockcache/det_online.h"
#include "blockcache/dual.h"
#include "blockcache/frac_online.h"
#include "blockcache/rounding.h"

namespace blockcache {
namespace {

constexpr double kCertificateSlack = 1e-6;
// Statistical slack on the Monte-Carlo comparison against the rounding bound.
constexpr double kMonteCarloSlack = 1.10;

Check MakeCheck(std::string name, bool passed, std::string detail = "") {
  return {std::move(name), passed, std::move(detail)};
}

std::string Num(double x) { return FormatDouble(x); }

std::string Compare(double lhs, const char* op, double rhs) {
  return Num(lhs) + " " + op + " " + Num(rhs);
}

void AddTraceCheck(const Instance& instance, const PolicyTrace& trace,
                   std::vector<Check>& checks) {
  const auto error = VerifyTrace(instance, trace);
  checks.push_back(MakeCheck("trace_feasible", !error, error.value_or("")));
}

// Oracle value for the summary; records a note when the DP is out of reach.
void AttachOracle(const ExperimentConfig& config, CostModel model,
                  RunSummary& summary) {
  try {
    summary.oracle =
        OptimalOffline(config.instance, model, config.offline_cache()).cost;
  } catch (const IntractableInstance& e) {
    summary.note = std::string("oracle omitted: ") + e.what();
    return;
  } catch (const InvalidInstance& e) {
    summary.note = std::string("oracle omitted: ") + e.what();
    return;
  }
  if (*summary.oracle > 0.0) summary.ratio = summary.cost / *summary.oracle;
}

void RunDet(const ExperimentConfig& config, RunArtifacts& out) {
  const Instance& inst = config.instance;
  RunSummary& s = out.summary;
  DeterministicRun run = RunDeterministic(inst);
  s.cost = run.primal_cost;
  AddTraceCheck(inst, run.trace, s.checks);
  s.checks.push_back(MakeCheck(
      "cost_matches_trace",
      std::fabs(run.trace.eviction_cost() - run.primal_cost) <= 1e-9,
      Compare(run.trace.eviction_cost(), "==", run.primal_cost)));
  const double violation = run.ledger.MaxViolation(inst);
  s.checks.push_back(MakeCheck("dual_feasible", violation <= 1e-9,
                               "max A - c = " + Num(violation)));
  const double dual = run.ledger.objective();
  s.checks.push_back(MakeCheck("primal_le_k_dual",
                               s.cost <= inst.k * dual + kCertificateSlack,
                               Compare(s.cost, "<=", inst.k * dual)));
  AttachOracle(config, CostModel::kEviction, s);
  if (s.oracle) {
    s.checks.push_back(MakeCheck("dual_le_oracle",
                                 dual <= *s.oracle + kCertificateSlack,
                                 Compare(dual, "<=", *s.oracle)));
    if (config.offline_cache() == inst.k) {
      s.checks.push_back(MakeCheck("cost_le_k_oracle",
                                   s.cost <= inst.k * *s.oracle + 1e-9,
                                   Compare(s.cost, "<=", inst.k * *s.oracle)));
    }
  }
  if (!s.bound) s.bound = inst.k;
  out.certificate = DualCertificateToJson(run.ledger, run.primal_cost);
  out.trace = std::move(run.trace);
}

void FractionalChecks(const ExperimentConfig& config, const FractionalRun& run,
                      RunSummary& s) {
  const Instance& inst = config.instance;
  const auto failure =
      FirstInfeasibleStep(inst, run.phi.increments(), config.tolerance);
  s.checks.push_back(MakeCheck(
      "feasible_every_step", !failure,
      failure ? "tau " + std::to_string(failure->tau) + " slack " +
                    Num(failure->slack)
              : ""));
  const double violation = run.ledger.MaxViolation(inst);
  s.checks.push_back(MakeCheck("dual_feasible", violation <= 1e-9,
                               "max A - c = " + Num(violation)));
  const double primal = run.phi.Cost(inst);
  const double rhs = FractionalRatioBound(inst) * run.ledger.objective();
  s.checks.push_back(MakeCheck("primal_le_bound_dual",
                               primal <= rhs + kCertificateSlack,
                               Compare(primal, "<=", rhs)));
}

void RunFrac(const ExperimentConfig& config, RunArtifacts& out) {
  const Instance& inst = config.instance;
  RunSummary& s = out.summary;
  FractionalRun run = RunFractional(inst);
  s.cost = run.phi.Cost(inst);
  FractionalChecks(config, run, s);
  AttachOracle(config, CostModel::kEviction, s);
  if (s.oracle) {
    s.checks.push_back(
        MakeCheck("dual_le_oracle",
                  run.ledger.objective() <= *s.oracle + kCertificateSlack,
                  Compare(run.ledger.objective(), "<=", *s.oracle)));
  }
  if (!s.bound) s.bound = FractionalRatioBound(inst);
  out.certificate = DualCertificateToJson(run.ledger, s.cost);
  (*out.certificate)["ratio_bound"] = Round12(FractionalRatioBound(inst));
  out.increments = run.phi.increments();
}

void RunFracRound(const ExperimentConfig& config, RunArtifacts& out) {
  const Instance& inst = config.instance;
  RunSummary& s = out.summary;
  FractionalRun run = RunFractional(inst);
  FractionalChecks(config, run, s);
  const StructuredStream stream =
      StructureStream(inst, run.phi.increments());
  const FractionalTrajectory z = stream.Trajectory(inst);
  bool x_ok = true;
  for (const auto& row : z.missing) {
    for (double x : row) x_ok &= (x <= 0.5 || x == 1.0);
  }
  s.checks.push_back(MakeCheck("structured_x_half_or_one", x_ok));
  const auto structured_failure =
      FirstInfeasibleStep(inst, stream.phi.increments(), config.tolerance);
  s.checks.push_back(MakeCheck("structured_feasible", !structured_failure));
  const FractionalCosts costs = ComputeFractionalCosts(inst, z);
  const double fetch_bound = FetchCostBound(inst, costs);
  s.checks.push_back(MakeCheck("fetch_le_beta_evict_plus_blocks",
                               costs.fetch <= fetch_bound + 1e-9,
                               Compare(costs.fetch, "<=", fetch_bound)));

  MonteCarloSummary mc = RunMonteCarlo(inst, stream, config.seeds, true);
  std::string bad;
  for (std::size_t i = 0; i < mc.traces.size() && bad.empty(); ++i) {
    if (auto e = VerifyTrace(inst, mc.traces[i])) {
      bad = "seed " + std::to_string(mc.seeds[i]) + ": " + *e;
    }
  }
  s.checks.push_back(MakeCheck("rounded_traces_feasible", bad.empty(), bad));
  s.checks.push_back(
      MakeCheck("mean_cost_le_bound", mc.mean_cost <= kMonteCarloSlack * mc.bound_rhs,
                Compare(mc.mean_cost, "<=", kMonteCarloSlack * mc.bound_rhs)));
  s.cost = mc.mean_cost;
  AttachOracle(config, CostModel::kEviction, s);
  std::ostringstream note;
  if (!s.note.empty()) note << s.note << "; ";
  note << "structured/raw cost "
       << Num(stream.raw_cost > 0 ? stream.Cost(inst) / stream.raw_cost : 0.0);
  s.note = note.str();
  out.monte_carlo = MonteCarloToJson(mc);
  out.increments = stream.phi.increments();
  if (!mc.traces.empty()) out.trace = std::move(mc.traces.front());
}

void RunBicriteria(const ExperimentConfig& config, RunArtifacts& out) {
  const Instance& inst = config.instance;
  RunSummary& s = out.summary;
  const bool fetch = config.algorithm == Algorithm::kBicriteriaFetch;
  const RequestIndex index(inst);
  const FractionalRun run = RunFractional(inst);
  // The raw output only satisfies the integral-set check, so the rounding
  // input is the structured stream, which is repaired to per-step coverage.
  const FractionalTrajectory raw = TrajectoryFromSolution(run.phi, index);
  const bool raw_ok =
      !NaiveLpCheck(inst, raw.missing, FetchFlow(inst, raw.missing), -1);
  s.note = std::string("raw fractional per-step coverage ") +
           (raw_ok ? "holds" : "violated");
  const StructuredStream stream = StructureStream(inst, run.phi.increments());
  const FractionalTrajectory z = stream.Trajectory(inst);
  const FractionalCosts frac = ComputeFractionalCosts(inst, z);
  PolicyTrace trace;
  try {
    trace = fetch ? BicriteriaRoundFetch(inst, z) : BicriteriaRoundEvict(inst, z);
  } catch (const InfeasibleFractional& e) {
    s.checks.push_back(MakeCheck("fractional_input_feasible", false, e.what()));
    return;
  }
  AddTraceCheck(inst, trace, s.checks);
  s.checks.push_back(MakeCheck("space_le_2k",
                               trace.peak_occupancy() <= 2 * inst.k,
                               std::to_string(trace.peak_occupancy())));
  if (fetch) {
    s.cost = trace.fetching_cost();
    s.checks.push_back(MakeCheck("cost_le_2_fractional",
                                 s.cost <= 2.0 * frac.fetch + 1e-9,
                                 Compare(s.cost, "<=", 2.0 * frac.fetch)));
  } else {
    // Clearing the starting cache is free fractionally but not integrally.
    double start_cost = 0.0;
    const BlockMap blocks(inst);
    std::vector<bool> seen(inst.num_blocks(), false);
    for (PageId p : inst.initial_cache) {
      if (!seen[blocks.block_of(p)]) start_cost += inst.costs[blocks.block_of(p)];
      seen[blocks.block_of(p)] = true;
    }
    s.cost = trace.eviction_cost();
    const double rhs = 2.0 * frac.evict + start_cost;
    s.checks.push_back(MakeCheck("cost_le_2_fractional",
                                 s.cost <= rhs + 1e-9,
                                 Compare(s.cost, "<=", rhs)));
  }
  AttachOracle(config, fetch ? CostModel::kFetching : CostModel::kEviction, s);
  out.trace = std::move(trace);
}

void RunOpt(const ExperimentConfig& config, RunArtifacts& out) {
  RunSummary& s = out.summary;
  OptResult opt =
      OptimalOffline(config.instance, config.model, config.offline_cache());
  s.cost = opt.cost;
  s.oracle = opt.cost;
  if (opt.cost > 0.0) s.ratio = 1.0;
  AddTraceCheck(config.instance, opt.witness, s.checks);
  out.trace = std::move(opt.witness);
}

std::string CsvCell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "";
}

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDet: return "det";
    case Algorithm::kFrac: return "frac";
    case Algorithm::kFracRound: return "frac+round";
    case Algorithm::kBicriteriaFetch: return "bicriteria-fetch";
    case Algorithm::kBicriteriaEvict: return "bicriteria-evict";
    case Algorithm::kOpt: return "opt";
  }
  return "";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kDet, Algorithm::kFrac, Algorithm::kFracRound,
                      Algorithm::kBicriteriaFetch, Algorithm::kBicriteriaEvict,
                      Algorithm::kOpt}) {
    if (AlgorithmName(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view CostModelName(CostModel model) {
  return model == CostModel::kEviction ? "evict" : "fetch";
}

std::optional<CostModel> ParseCostModel(std::string_view name) {
  if (name == "evict") return CostModel::kEviction;
  if (name == "fetch") return CostModel::kFetching;
  return std::nullopt;
}

void ExperimentConfig::Validate() const {
  const bool evict = model == CostModel::kEviction;
  switch (algorithm) {
    case Algorithm::kDet:
    case Algorithm::kFrac:
    case Algorithm::kFracRound:
    case Algorithm::kBicriteriaEvict:
      if (!evict) {
        throw ConfigError(std::string(AlgorithmName(algorithm)) +
                          " runs in the eviction cost model only");
      }
      break;
    case Algorithm::kBicriteriaFetch:
      if (evict) {
        throw ConfigError("bicriteria-fetch runs in the fetching cost model");
      }
      break;
    case Algorithm::kOpt:
      break;
  }
  if (algorithm == Algorithm::kFracRound && seeds.empty()) {
    throw ConfigError("frac+round needs at least one seed");
  }
  if (h < 0 || h > instance.k) {
    throw ConfigError("h must lie in [1, k]");
  }
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

bool RunSummary::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

std::optional<double> HkLowerBound(int k, int h, int beta) {
  if (h < 1 || h > k - beta + 1) return std::nullopt;
  return static_cast<double>(k + (beta - 1) * (h - 1)) / (k - h + 1);
}

RunArtifacts RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  RunArtifacts out;
  RunSummary& s = out.summary;
  s.instance = config.instance_name;
  s.algorithm = AlgorithmName(config.algorithm);
  s.model = CostModelName(config.model);
  s.k = config.instance.k;
  s.h = config.offline_cache();
  s.beta = config.instance.beta();
  s.seeds = config.seeds;
  if (s.h < s.k) s.bound = HkLowerBound(s.k, s.h, s.beta);
  switch (config.algorithm) {
    case Algorithm::kDet: RunDet(config, out); break;
    case Algorithm::kFrac: RunFrac(config, out); break;
    case Algorithm::kFracRound: RunFracRound(config, out); break;
    case Algorithm::kBicriteriaFetch:
    case Algorithm::kBicriteriaEvict: RunBicriteria(config, out); break;
    case Algorithm::kOpt: RunOpt(config, out); break;
  }
  return out;
}

Json SummaryToJson(const RunSummary& s) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(Round12(*v)) : Json(nullptr);
  };
  Json doc;
  doc["instance"] = s.instance;
  doc["algorithm"] = s.algorithm;
  doc["model"] = s.model;
  doc["k"] = s.k;
  doc["h"] = s.h;
  doc["beta"] = s.beta;
  doc["cost"] = Round12(s.cost);
  doc["oracle"] = opt(s.oracle);
  doc["ratio"] = opt(s.ratio);
  doc["bound"] = opt(s.bound);
  doc["seeds"] = s.seeds;
  Json checks = Json::array();
  for (const Check& c : s.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed},
                      {"detail", c.detail}});
  }
  doc["checks"] = std::move(checks);
  doc["note"] = s.note;
  doc["passed"] = s.passed();
  return doc;
}

RunSummary SummaryFromJson(const Json& doc) {
  auto opt = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    if (!doc.at(key).is_number()) {
      throw FormatError(std::string("field '") + key + "' must be a number");
    }
    return doc.at(key).get<double>();
  };
  RunSummary s;
  try {
    s.instance = doc.at("instance").get<std::string>();
    s.algorithm = doc.at("algorithm").get<std::string>();
    s.model = doc.at("model").get<std::string>();
    s.k = doc.value("k", 0);
    s.h = doc.value("h", 0);
    s.beta = doc.value("beta", 0);
    s.cost = doc.at("cost").get<double>();
    if (doc.contains("seeds")) {
      s.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (doc.contains("checks")) {
      for (const auto& c : doc.at("checks")) {
        s.checks.push_back({c.at("name").get<std::string>(),
                            c.at("passed").get<bool>(),
                            c.value("detail", std::string())});
      }
    }
    s.note = doc.value("note", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad summary: ") + e.what());
  }
  s.oracle = opt("oracle");
  s.ratio = opt("ratio");
  s.bound = opt("bound");
  return s;
}

std::string ReportCsv(std::vector<RunSummary> summaries) {
  std::stable_sort(summaries.begin(), summaries.end(),
                   [](const RunSummary& a, const RunSummary& b) {
                     return std::tie(a.instance, a.algorithm, a.model) <
                            std::tie(b.instance, b.algorithm, b.model);
                   });
  std::ostringstream out;
  out << "instance,algorithm,model,cost,oracle,ratio,bound,pass/fail\n";
  for (const RunSummary& s : summaries) {
    out << CsvQuote(s.instance) << ',' << CsvQuote(s.algorithm) << ','
        << CsvQuote(s.model) << ',' << FormatDouble(s.cost) << ','
        << CsvCell(s.oracle) << ',' << CsvCell(s.ratio) << ','
        << CsvCell(s.bound) << ',' << (s.passed() ? "pass" : "fail") << '\n';
  }
  return out.str();
}

Figure1Fixture MakeFigure1Fixture() {
  Figure1Fixture fx;
  Instance& inst = fx.instance;
  inst.n = 8;
  inst.k = 4;
  inst.blocks = {{0, 1, 2}, {3, 4, 5, 6}, {7}};
  inst.costs = {1.0, 1.0, 1.0};
  // Pages 3 and 7 are requested again after the flushes; page 8 at tau.
  inst.requests = {0, 1, 2, 3, 4, 5, 6, 2, 6, 7};
  inst.Validate();
  fx.first = {0, 8};
  fx.second = {1, 9};
  fx.tau = 10;
  return fx;
}

VerifyReport VerifyFigure1() {
  const Figure1Fixture fx = MakeFigure1Fixture();
  const RequestIndex index(fx.instance);
  const CoverFunction f(index);
  const int nb = fx.instance.num_blocks();
  FlushSet first(nb), second(nb), both(nb);
  first.Insert(fx.first);
  second.Insert(fx.second);
  both.Insert(fx.first);
  both.Insert(fx.second);
  VerifyReport report;
  auto expect = [&](std::string name, int got, int want) {
    report.checks.push_back(MakeCheck(
        std::move(name), got == want,
        "got " + std::to_string(got) + ", want " + std::to_string(want)));
  };
  expect("f(B1,t1)", f.Value(first, fx.tau), 2);
  expect("f(B2,t2)", f.Value(second, fx.tau), 3);
  expect("f(union)", f.Value(both, fx.tau), 4);
  expect("marginal(B2,t2 | B1,t1)", f.Marginal(first, fx.second, fx.tau), 2);
  return report;
}

PropertyTally SampleCoverProperties(const Instance& instance, int samples,
                                    std::mt19937_64& rng) {
  const RequestIndex index(instance);
  const CoverFunction f(index);
  const int nb = instance.num_blocks();
  std::vector<Flush> universe;
  for (BlockId b = 0; b < nb; ++b) {
    for (Time t = 0; t <= instance.T(); ++t) universe.push_back({b, t});
  }
  std::uniform_int_distribution<Time> pick_tau(1, instance.T());
  std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
  std::bernoulli_distribution in_s(0.3), in_extra(0.3);
  PropertyTally tally;
  for (int i = 0; i < samples; ++i) {
    const Time tau = pick_tau(rng);
    FlushSet s(nb), bigger(nb);
    std::vector<Flush> extra;
    for (const Flush& v : universe) {
      if (in_s(rng)) {
        s.Insert(v);
        bigger.Insert(v);
      } else if (in_extra(rng)) {
        extra.push_back(v);
      }
    }
    for (const Flush& v : extra) bigger.Insert(v);
    const Flush v = universe[pick(rng)];
    ++tally.samples;
    if (f.Marginal(s, v, tau) < f.Marginal(bigger, v, tau)) {
      ++tally.submodularity_violations;
    }
    if (f.Value(s, tau) > f.Value(bigger, tau)) ++tally.monotonicity_violations;
  }
  return tally;
}

PropertyTally RunPropertySuite(int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyTally total;
  for (int i = 0; i < samples; ++i) {
    RandomInstanceParams p;
    p.n = std::uniform_int_distribution<int>(2, 9)(rng);
    p.k = std::uniform_int_distribution<int>(1, p.n - 1)(rng);
    p.beta = std::uniform_int_distribution<int>(1, std::min(p.k, 3))(rng);
    p.T = std::uniform_int_distribution<int>(1, 10)(rng);
    p.seed = rng();
    const Instance inst = GenRandom(p);
    const PropertyTally one = SampleCoverProperties(inst, 1, rng);
    total.samples += one.samples;
    total.submodularity_violations += one.submodularity_violations;
    total.monotonicity_violations += one.monotonicity_violations;
  }
  return total;
}

std::optional<StepFailure> FirstInfeasibleStep(const Instance& instance,
                                               std::span<const Increment> log,
                                               double tolerance) {
  const RequestIndex index(instance);
  const CoverFunction f(index);
  for (Time tau = 1; tau <= instance.T(); ++tau) {
    const FractionalSolution phi =
        FractionalSolution::Replay(instance.num_blocks(), log, tau);
    const FeasibilityResult r = CheckFeasible(f, phi, tau, tolerance);
    if (!r.feasible) return StepFailure{tau, r.slack};
  }
  return std::nullopt;
}

VerifyReport VerifyInstance(const Instance& instance, int samples,
                            std::uint64_t seed, bool exhaustive) {
  VerifyReport report;
  try {
    instance.Validate();
    report.checks.push_back(MakeCheck("instance_valid", true));
  } catch (const InvalidInstance& e) {
    report.checks.push_back(MakeCheck("instance_valid", false, e.what()));
    return report;
  }
  std::mt19937_64 rng(seed);
  const PropertyTally tally = SampleCoverProperties(instance, samples, rng);
  report.checks.push_back(MakeCheck(
      "submodularity", tally.submodularity_violations == 0,
      std::to_string(tally.submodularity_violations) + " violations in " +
          std::to_string(tally.samples)));
  report.checks.push_back(MakeCheck(
      "monotonicity", tally.monotonicity_violations == 0,
      std::to_string(tally.monotonicity_violations) + " violations in " +
          std::to_string(tally.samples)));
  const FractionalRun run = RunFractional(instance);
  const VerifyReport log = VerifyIncrementLog(
      instance, run.phi.increments(), kFeasibilityTolerance, exhaustive);
  report.checks.insert(report.checks.end(), log.checks.begin(),
                       log.checks.end());
  return report;
}

VerifyReport VerifyPolicyTrace(const Instance& instance,
                               const PolicyTrace& trace) {
  VerifyReport report;
  AddTraceCheck(instance, trace, report.checks);
  return report;
}

VerifyReport VerifyIncrementLog(const Instance& instance,
                                std::span<const Increment> log,
                                double tolerance, bool exhaustive) {
  VerifyReport report;
  std::map<Flush, double> value;
  std::string bad;
  Time last_tau = 0;
  for (std::size_t i = 0; i < log.size() && bad.empty(); ++i) {
    const Increment& inc = log[i];
    const std::string at = "record " + std::to_string(i + 1) + ": ";
    if (inc.tau < last_tau) bad = at + "tau decreases";
    else if (inc.tau < 1 || inc.tau > instance.T()) bad = at + "tau out of range";
    else if (inc.flush.block < 0 || inc.flush.block >= instance.num_blocks())
      bad = at + "block out of range";
    else if (inc.flush.time < 1 || inc.flush.time > inc.tau)
      bad = at + "flush time outside [1, tau]";
    else if (!(inc.delta > 0.0)) bad = at + "non-positive delta";
    else if (inc.phi_after > 1.0 + 1e-9) bad = at + "phi exceeds 1";
    else if (std::fabs(value[inc.flush] + inc.delta - inc.phi_after) >
             1e-9 * std::max(1.0, inc.phi_after) + 1e-12 &&
             inc.phi_after != 1.0)
      bad = at + "phi_after does not match the accumulated deltas";
    last_tau = std::max(last_tau, inc.tau);
    value[inc.flush] = inc.phi_after;
  }
  report.checks.push_back(MakeCheck("log_monotone_causal", bad.empty(), bad));
  if (!bad.empty()) return report;

  const auto failure = FirstInfeasibleStep(instance, log, tolerance);
  report.checks.push_back(MakeCheck(
      "feasible_every_step", !failure,
      failure ? "tau " + std::to_string(failure->tau) + " slack " +
                    Num(failure->slack)
              : ""));
  if (exhaustive) {
    const RequestIndex index(instance);
    const CoverFunction f(index);
    constexpr int kMaxUniverse = 20;
    int checked = 0;
    std::string violated;
    for (Time tau = 1; tau <= instance.T() && violated.empty(); ++tau) {
      if (instance.num_blocks() * (tau + 1) > kMaxUniverse) break;
      const FractionalSolution phi =
          FractionalSolution::Replay(instance.num_blocks(), log, tau);
      if (ExhaustiveCheck(f, phi, tau, kMaxUniverse, tolerance)) {
        violated = "tau " + std::to_string(tau);
      }
      ++checked;
    }
    report.checks.push_back(MakeCheck(
        "exhaustive_constraints", violated.empty(),
        violated.empty() ? std::to_string(checked) + " steps enumerated"
                         : violated));
  }
  return report;
}

PolicyTrace ReplayRoundedTrace(const Instance& instance, std::uint64_t seed) {
  const FractionalRun run = RunFractional(instance);
  const StructuredStream stream =
      StructureStream(instance, run.phi.increments());
  return RandomizedRound(instance, stream, seed).trace;
}

}  // namespace blockcache
