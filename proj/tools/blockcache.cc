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

// Command-line front end: gen, run, verify, report.
// Exit codes: 0 pass, 1 verification failure, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blockcache/harness.h"
#include "blockcache/instance.h"
#include "blockcache/io.h"

namespace {

using namespace blockcache;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct GenOptions {
  std::string output;
  int beta = 2;
  int rounds = 1;
  int repeats = 4;
  std::string direction = "evict-heavy";
  RandomInstanceParams random;
  std::string costs = "unit";
};

struct RunOptions {
  std::string instance;
  std::string name;
  std::string algorithm = "det";
  std::string model = "evict";
  std::vector<std::uint64_t> seeds;
  int num_seeds = 0;
  std::uint64_t seed_base = 1;
  int h = 0;
  double tol = kFeasibilityTolerance;
  std::string trace, increments, certificate, summary, monte_carlo;
};

struct VerifyOptions {
  bool figure1 = false;
  bool exhaustive = false;
  int property_suite = 0;
  std::string instance, trace, increments;
  int capacity = 0;
  std::optional<std::uint64_t> replay_seed;
  int samples = 1000;
  std::uint64_t seed = 1;
  double tol = kFeasibilityTolerance;
};

struct ReportOptions {
  std::vector<std::string> summaries;
  std::string output;
};

void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

template <typename Writer>
void EmitStream(const std::string& path, Writer write) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  write(out);
}

int Gen(const std::string& kind, const GenOptions& o) {
  Instance inst;
  if (kind == "gap") {
    inst = GenGapInstance(o.beta, o.rounds);
  } else if (kind == "beta-off") {
    if (o.direction != "evict-heavy" && o.direction != "fetch-heavy") {
      std::cerr << "--direction must be evict-heavy or fetch-heavy\n";
      return kUsage;
    }
    inst = GenBetaOff(o.beta, o.repeats,
                      o.direction == "evict-heavy"
                          ? BetaOffDirection::kEvictHeavy
                          : BetaOffDirection::kFetchHeavy);
  } else {
    RandomInstanceParams p = o.random;
    p.beta = o.beta;
    if (o.costs == "unit") {
      p.cost_profile = CostProfile::kUnit;
    } else if (o.costs == "log-uniform") {
      p.cost_profile = CostProfile::kLogUniform;
    } else {
      std::cerr << "--costs must be unit or log-uniform\n";
      return kUsage;
    }
    inst = GenRandom(p);
  }
  inst.Validate();
  Emit(o.output, InstanceToJson(inst).dump(2) + "\n");
  return kPass;
}

int Run(const RunOptions& o) {
  ExperimentConfig config;
  config.instance = LoadInstance(o.instance);
  config.instance_name = o.name.empty() ? o.instance : o.name;
  const auto algorithm = ParseAlgorithm(o.algorithm);
  const auto model = ParseCostModel(o.model);
  if (!algorithm || !model) {
    std::cerr << "unknown algorithm or cost model\n";
    return kUsage;
  }
  config.algorithm = *algorithm;
  config.model = *model;
  config.seeds = o.seeds;
  for (int i = 0; i < o.num_seeds; ++i) config.seeds.push_back(o.seed_base + i);
  config.h = o.h;
  config.tolerance = o.tol;
  const RunArtifacts out = RunExperiment(config);
  if (!o.trace.empty() && out.trace) {
    EmitStream(o.trace, [&](std::ostream& s) { WriteTrace(s, *out.trace); });
  }
  if (!o.increments.empty()) {
    EmitStream(o.increments,
               [&](std::ostream& s) { WriteIncrements(s, out.increments); });
  }
  if (!o.certificate.empty() && out.certificate) {
    WriteJsonFile(o.certificate, *out.certificate);
  }
  if (!o.monte_carlo.empty() && out.monte_carlo) {
    WriteJsonFile(o.monte_carlo, *out.monte_carlo);
  }
  Emit(o.summary, SummaryToJson(out.summary).dump(2) + "\n");
  for (const Check& c : out.summary.checks) {
    if (!c.passed) std::cerr << "FAIL " << c.name << ": " << c.detail << '\n';
  }
  return out.summary.passed() ? kPass : kFail;
}

int PrintReport(const VerifyReport& report) {
  for (const Check& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
  }
  return report.passed() ? kPass : kFail;
}

int Verify(const VerifyOptions& o) {
  VerifyReport report;
  if (o.figure1) {
    const VerifyReport fig = VerifyFigure1();
    report.checks.insert(report.checks.end(), fig.checks.begin(),
                         fig.checks.end());
  }
  if (o.property_suite > 0) {
    const PropertyTally t = RunPropertySuite(o.property_suite, o.seed);
    report.checks.push_back({"submodularity", t.submodularity_violations == 0,
                             std::to_string(t.submodularity_violations) +
                                 " violations in " + std::to_string(t.samples)});
    report.checks.push_back({"monotonicity", t.monotonicity_violations == 0,
                             std::to_string(t.monotonicity_violations) +
                                 " violations in " + std::to_string(t.samples)});
  }
  if (!o.instance.empty()) {
    const Json doc = ReadJsonFile(o.instance);
    Instance inst;
    try {
      inst = InstanceFromJson(doc);
    } catch (const InvalidInstance& e) {
      report.checks.push_back({"instance_valid", false, e.what()});
      return PrintReport(report);
    }
    VerifyReport part;
    if (!o.trace.empty()) {
      std::ifstream in(o.trace);
      if (!in) throw FormatError("cannot open " + o.trace);
      const PolicyTrace trace = ReadTrace(in, o.capacity ? o.capacity : inst.k);
      part = VerifyPolicyTrace(inst, trace);
      if (o.replay_seed) {
        std::ostringstream want, got;
        WriteTrace(want, ReplayRoundedTrace(inst, *o.replay_seed));
        WriteTrace(got, trace);
        part.checks.push_back({"replay_identical", want.str() == got.str(),
                               "seed " + std::to_string(*o.replay_seed)});
      }
    } else if (!o.increments.empty()) {
      std::ifstream in(o.increments);
      if (!in) throw FormatError("cannot open " + o.increments);
      const std::vector<Increment> log = ReadIncrements(in);
      part = VerifyIncrementLog(inst, log, o.tol, o.exhaustive);
    } else {
      part = VerifyInstance(inst, o.samples, o.seed, o.exhaustive);
    }
    report.checks.insert(report.checks.end(), part.checks.begin(),
                         part.checks.end());
  }
  if (report.checks.empty()) {
    std::cerr << "nothing to verify: pass --figure1, --property-suite or "
                 "--instance\n";
    return kUsage;
  }
  return PrintReport(report);
}

int Report(const ReportOptions& o) {
  std::vector<RunSummary> summaries;
  for (const std::string& path : o.summaries) {
    summaries.push_back(SummaryFromJson(ReadJsonFile(path)));
  }
  Emit(o.output, ReportCsv(std::move(summaries)));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-aware caching laboratory"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write an instance file");
  gen_cmd->require_subcommand(1);
  auto* gen_gap = gen_cmd->add_subcommand("gap", "Integrality-gap family");
  gen_gap->add_option("--beta", gen.beta, "Block size")->required();
  gen_gap->add_option("--rounds", gen.rounds, "Rounds")->required();
  auto* gen_off = gen_cmd->add_subcommand(
      "beta-off", "Eviction/fetching separation family");
  gen_off->add_option("--beta", gen.beta, "Block size")->required();
  gen_off->add_option("--L", gen.repeats, "Repetitions of each round");
  gen_off->add_option("--direction", gen.direction,
                      "evict-heavy or fetch-heavy");
  auto* gen_rand = gen_cmd->add_subcommand("random", "Random instance");
  gen_rand->add_option("--n", gen.random.n, "Pages")->required();
  gen_rand->add_option("--k", gen.random.k, "Cache size")->required();
  gen_rand->add_option("--beta", gen.beta, "Maximum block size")->required();
  gen_rand->add_option("--T", gen.random.T, "Requests")->required();
  gen_rand->add_option("--seed", gen.random.seed, "RNG seed");
  gen_rand->add_option("--costs", gen.costs, "unit or log-uniform");
  gen_rand->add_option("--delta", gen.random.delta, "Cost aspect ratio");
  for (auto* sub : {gen_gap, gen_off, gen_rand}) {
    sub->add_option("-o,--output", gen.output, "Output file (default stdout)");
  }

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm");
  run_cmd->set_help_flag("--help", "Print this help message and exit");
  run_cmd->add_option("--instance", run.instance, "Instance file")->required();
  run_cmd->add_option("--name", run.name, "Instance label in the summary");
  run_cmd->add_option("--algorithm", run.algorithm,
                      "det | frac | frac+round | bicriteria-fetch | "
                      "bicriteria-evict | opt");
  run_cmd->add_option("--model", run.model, "evict or fetch");
  run_cmd->add_option("--seeds", run.seeds, "Seeds")->delimiter(',');
  run_cmd->add_option("--num-seeds", run.num_seeds,
                      "Append seeds seed-base .. seed-base + N - 1");
  run_cmd->add_option("--seed-base", run.seed_base, "First generated seed");
  run_cmd->add_option("--h", run.h, "Offline cache size (default k)");
  run_cmd->add_option("--tol", run.tol, "Feasibility tolerance");
  run_cmd->add_option("--trace", run.trace, "Trace output (JSON lines)");
  run_cmd->add_option("--increments", run.increments,
                      "Increment log output (JSON lines)");
  run_cmd->add_option("--certificate", run.certificate,
                      "Dual certificate output");
  run_cmd->add_option("--montecarlo", run.monte_carlo,
                      "Monte-Carlo summary output");
  run_cmd->add_option("--summary", run.summary,
                      "Summary output (default stdout)");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  verify_cmd->add_flag("--figure1", verify.figure1, "Check the f_tau fixture");
  verify_cmd->add_option("--property-suite", verify.property_suite,
                         "Random submodularity/monotonicity samples");
  verify_cmd->add_option("--instance", verify.instance, "Instance file");
  verify_cmd->add_option("--trace", verify.trace, "Trace file to check");
  verify_cmd->add_option("--capacity", verify.capacity,
                         "Trace cache capacity (default k)");
  verify_cmd->add_option("--replay-seed", verify.replay_seed,
                         "Compare against the frac+round trace for a seed");
  verify_cmd->add_option("--increments", verify.increments,
                         "Increment log to replay");
  verify_cmd->add_flag("--exhaustive", verify.exhaustive,
                       "Enumerate all constraints on tiny instances");
  verify_cmd->add_option("--samples", verify.samples,
                         "Property samples on --instance");
  verify_cmd->add_option("--seed", verify.seed, "Sampling seed");
  verify_cmd->add_option("--tol", verify.tol, "Feasibility tolerance");

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Tabulate summaries as CSV");
  report_cmd->add_option("summaries", report.summaries, "Summary files")
      ->required();
  report_cmd->add_option("-o,--output", report.output,
                         "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) {
      const std::string kind = *gen_gap ? "gap" : *gen_off ? "beta-off" : "random";
      return Gen(kind, gen);
    }
    if (*run_cmd) return Run(run);
    if (*verify_cmd) return Verify(verify);
    if (*report_cmd) return Report(report);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IntractableInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
