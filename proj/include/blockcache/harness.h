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

// Experiment orchestration shared by the command-line tool and the test
// suites: configuration, run summaries, verification suites and reports.

#ifndef BLOCKCACHE_HARNESS_H_
#define BLOCKCACHE_HARNESS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockcache/instance.h"
#include "blockcache/io.h"
#include "blockcache/oracle.h"
#include "blockcache/submodular.h"
#include "blockcache/trace.h"

namespace blockcache {

enum class Algorithm {
  kDet,
  kFrac,
  kFracRound,
  kBicriteriaFetch,
  kBicriteriaEvict,
  kOpt,
};

std::string_view AlgorithmName(Algorithm algorithm);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);
std::string_view CostModelName(CostModel model);
std::optional<CostModel> ParseCostModel(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string instance_name;
  Instance instance;
  Algorithm algorithm = Algorithm::kDet;
  CostModel model = CostModel::kEviction;
  std::vector<std::uint64_t> seeds;
  int h = 0;  // offline cache size; 0 means k
  double tolerance = kFeasibilityTolerance;

  int offline_cache() const { return h == 0 ? instance.k : h; }
  // Throws ConfigError for invalid algorithm/model pairs, missing seeds or
  // an out-of-range h.
  void Validate() const;
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RunSummary {
  std::string instance;
  std::string algorithm;
  std::string model;
  int k = 0;
  int h = 0;
  int beta = 0;
  double cost = 0.0;
  std::optional<double> oracle;
  std::optional<double> ratio;
  // Guarantee the ratio is compared against: the (h,k) lower bound when it
  // applies, else the algorithm's proven factor.
  std::optional<double> bound;
  std::vector<std::uint64_t> seeds;
  std::vector<Check> checks;
  std::string note;

  bool passed() const;
};

struct RunArtifacts {
  RunSummary summary;
  std::optional<PolicyTrace> trace;
  std::vector<Increment> increments;
  std::optional<Json> certificate;
  std::optional<Json> monte_carlo;
};

RunArtifacts RunExperiment(const ExperimentConfig& config);

// (k + (beta-1)(h-1)) / (k - h + 1), defined for 1 <= h <= k - beta + 1.
std::optional<double> HkLowerBound(int k, int h, int beta);

Json SummaryToJson(const RunSummary& summary);
RunSummary SummaryFromJson(const Json& doc);

// Columns: instance, algorithm, model, cost, oracle, ratio, bound, pass/fail.
// Rows are sorted by (instance, algorithm, model); absent values stay empty.
std::string ReportCsv(std::vector<RunSummary> summaries);

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const;
};

// Eight pages in three blocks where f_tau({(B1,t1)}) = 2,
// f_tau({(B2,t2)}) = 3 and the union reaches the cap n - k = 4.
struct Figure1Fixture {
  Instance instance;
  Flush first;
  Flush second;
  Time tau = 0;
};
Figure1Fixture MakeFigure1Fixture();
VerifyReport VerifyFigure1();

struct PropertyTally {
  int samples = 0;
  int submodularity_violations = 0;
  int monotonicity_violations = 0;
};

// Random (S subset of S', v, tau) draws on one instance.
PropertyTally SampleCoverProperties(const Instance& instance, int samples,
                                    std::mt19937_64& rng);
// One fresh small random instance per sample.
PropertyTally RunPropertySuite(int samples, std::uint64_t seed);

// First step whose maximal-integral constraint fails when the log is
// replayed, with the slack there.
struct StepFailure {
  Time tau = 0;
  double slack = 0.0;
};
std::optional<StepFailure> FirstInfeasibleStep(
    const Instance& instance, std::span<const Increment> log,
    double tolerance = kFeasibilityTolerance);

VerifyReport VerifyInstance(const Instance& instance, int samples,
                            std::uint64_t seed, bool exhaustive);
VerifyReport VerifyPolicyTrace(const Instance& instance,
                               const PolicyTrace& trace);
VerifyReport VerifyIncrementLog(const Instance& instance,
                                std::span<const Increment> log,
                                double tolerance, bool exhaustive);

// The rounded trace that `run --algorithm frac+round` produces for `seed`.
PolicyTrace ReplayRoundedTrace(const Instance& instance, std::uint64_t seed);

}  // namespace blockcache

#endif  // BLOCKCACHE_HARNESS_H_
