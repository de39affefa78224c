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

#ifndef BLOCKCACHE_ROUNDING_H_
#define BLOCKCACHE_ROUNDING_H_

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "blockcache/instance.h"
#include "blockcache/oracle.h"
#include "blockcache/submodular.h"
#include "blockcache/trace.h"

namespace blockcache {

class InfeasibleFractional : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StructuredStep {
  std::vector<Increment> increments;  // emitted at this step
  std::vector<double> x;              // per page, after this step's emissions
};

struct StructuringStats {
  int bucket_emissions = 0;
  int half_round_flushes = 0;   // raw x reached 1/2
  int threshold_flushes = 0;    // structured x landed in (1/2, 1)
  int repair_flushes = 0;       // maximal-integral constraint still short
};

// Causal structured version of a monotone-incremental solution: every
// nonzero coordinate is at least 1/(4k^2) and every x_p^t lies in
// [0, 1/2] or equals 1.
struct StructuredStream {
  int num_blocks = 0;
  FractionalSolution phi;
  std::vector<StructuredStep> steps;  // steps[tau], tau in [1, T]; [0] empty
  double raw_cost = 0.0;
  StructuringStats stats;

  double Cost(const Instance& instance) const { return phi.Cost(instance); }
  // The structured solution as it stood at the end of step tau.
  FractionalSolution SolutionAt(Time tau) const;
  // x_p^t as seen online, with x^0 = 1 for every page and the least
  // eviction flow consistent with it.
  FractionalTrajectory Trajectory(const Instance& instance) const;
};

// Per step: apply the raw increments; flush a whole block when a page's raw
// missing fraction reaches 1/2; release per-block buffered mass once it
// reaches 1/(4k^2), doubled and capped at 1, at the latest buffered flush
// time; flush a whole block if a structured x lands in (1/2, 1); and flush
// greedily while the maximal-integral constraint at tau is violated.
StructuredStream StructureStream(const Instance& instance,
                                 std::span<const Increment> raw);

// ln(4 k^2 beta Delta).
double RoundingGamma(const Instance& instance);

struct RoundingRun {
  PolicyTrace trace;
  double gamma = 0.0;
  int sampled_flushes = 0;
  int alteration_flushes = 0;
};

// Online randomized rounding with alterations for the eviction model. Each
// structured increment delta of a flush of B triggers an independent coin
// with probability min(1, gamma * delta); heads evicts {p in B : x_p > 0}.
// Then p_tau is fetched and, while the cache overflows, the block holding
// the cached page with the largest x (lowest block id on ties) loses its
// pages with x > 0.
RoundingRun RandomizedRound(const Instance& instance,
                            const StructuredStream& stream,
                            std::uint64_t seed);

// f_tau(R) for R drawn by keeping each (B, t), t in [1, tau], with
// probability min(1, gamma * phi_B^t); time-0 flushes are always kept.
int SampleRoundedCover(const CoverFunction& f, const FractionalSolution& phi,
                       Time tau, double gamma, std::mt19937_64& rng);

// Deterministic rounding against the fetching cost: evict p once
// x_p^t > 1/2; on a miss fetch every page of B(p_t) with x <= 1/2.
// Uses at most 2k slots and at most twice the fractional fetching cost.
PolicyTrace BicriteriaRoundFetch(const Instance& instance,
                                 const FractionalTrajectory& z);

// Eviction-cost counterpart: fetch p_t on a miss; once a cached page is
// mostly evicted fractionally (x_p^t > 1/2) drop its whole block (keeping
// p_t). Uses at most 2k slots and at most twice the fractional eviction
// cost of z.evict.
PolicyTrace BicriteriaRoundEvict(const Instance& instance,
                                 const FractionalTrajectory& z);

struct DerandomizedRun {
  FractionalTrajectory average;
  PolicyTrace trace;
  double mean_fetch_cost = 0.0;
};

// Averages cache indicators across an ensemble of policies on one instance
// and rounds the average with BicriteriaRoundFetch.
DerandomizedRun DerandomizeEnsemble(const Instance& instance,
                                    std::span<const PolicyTrace> policies);

struct MonteCarloSummary {
  std::vector<std::uint64_t> seeds;
  double mean_cost = 0.0;
  double stderr_cost = 0.0;
  double gamma = 0.0;
  double c_structured = 0.0;
  double bound_rhs = 0.0;  // (gamma + 2) c(structured) + sum_B c_B
  std::vector<PolicyTrace> traces;
};

// Runs RandomizedRound once per seed (in parallel; results ordered by seed
// position) and summarizes the eviction costs.
MonteCarloSummary RunMonteCarlo(const Instance& instance,
                                const StructuredStream& stream,
                                std::span<const std::uint64_t> seeds,
                                bool keep_traces = false);

}  // namespace blockcache

#endif  // BLOCKCACHE_ROUNDING_H_
