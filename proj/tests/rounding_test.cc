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

#include "blockcache/rounding.h"

#include <cmath>
#include <random>

#include "blockcache/det_online.h"
#include "blockcache/frac_online.h"
#include "blockcache/harness.h"
#include "gtest/gtest.h"
#include "testing_util.h"

namespace blockcache {
namespace {

Instance Singletons(int n, int k, std::vector<PageId> requests) {
  Instance inst;
  inst.n = n;
  inst.k = k;
  for (PageId p = 0; p < n; ++p) inst.blocks.push_back({p});
  inst.costs.assign(n, 1.0);
  inst.requests = std::move(requests);
  return inst;
}

Instance RandomInstance(std::uint64_t seed, int n = 12, int k = 6,
                        int beta = 2, int T = 60) {
  RandomInstanceParams p;
  p.n = n;
  p.k = k;
  p.beta = beta;
  p.T = T;
  p.seed = seed;
  return GenRandom(p);
}

TEST(GammaTest, NaturalLog) {
  Instance inst;
  inst.n = 8;
  inst.k = 4;
  inst.blocks = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
  inst.costs.assign(4, 1.0);
  inst.requests = {0};
  EXPECT_NEAR(RoundingGamma(inst), std::log(128.0), 1e-15);
  EXPECT_NEAR(RoundingGamma(inst), 4.8520, 1e-4);
}

TEST(StructureStreamTest, BuffersSmallIncrements) {
  const Instance inst = Singletons(2, 2, std::vector<PageId>(10, 0));
  std::vector<Increment> raw;
  const double small = 1.0 / (32.0 * inst.k * inst.k);
  double phi = 0.0;
  for (Time tau = 1; tau <= 8; ++tau) {
    phi += small;
    raw.push_back({tau, {1, 1}, small, phi});
  }
  const StructuredStream s = StructureStream(inst, raw);
  for (Time tau = 1; tau <= 7; ++tau) EXPECT_TRUE(s.steps[tau].increments.empty());
  ASSERT_EQ(s.steps[8].increments.size(), 1u);
  EXPECT_EQ(s.steps[8].increments[0].flush, (Flush{1, 1}));
  EXPECT_GE(s.steps[8].increments[0].delta, 1.0 / (4.0 * inst.k * inst.k));
  EXPECT_DOUBLE_EQ(s.phi.value({1, 1}), 2.0 * 8 * small);
  EXPECT_EQ(s.stats.bucket_emissions, 1);
}

TEST(StructureStreamTest, HalfReachedBecomesFullFlush) {
  const Instance inst = Singletons(2, 2, {0, 1, 1, 1});
  const std::vector<Increment> raw = {{2, {0, 2}, 0.5, 0.5}};
  const StructuredStream s = StructureStream(inst, raw);
  EXPECT_EQ(s.phi.value({0, 2}), 1.0);
  EXPECT_EQ(s.steps[2].x[0], 1.0);
  EXPECT_EQ(s.stats.half_round_flushes, 1);
}

TEST(StructureStreamTest, IntegralInputPassesThrough) {
  const Instance inst = Singletons(2, 1, {0, 1, 0, 1});
  const FractionalRun run = RunFractional(inst);
  const StructuredStream s = StructureStream(inst, run.phi.increments());
  EXPECT_EQ(s.phi.values(), run.phi.values());
  EXPECT_DOUBLE_EQ(s.Cost(inst), run.phi.Cost(inst));
}

TEST(StructureStreamTest, RejectsAcausalLog) {
  const Instance inst = Singletons(2, 1, {0, 1, 0});
  const std::vector<Increment> future = {{2, {0, 3}, 0.5, 0.5}};
  EXPECT_THROW(StructureStream(inst, future), std::invalid_argument);
  const std::vector<Increment> unordered = {{3, {0, 2}, 0.1, 0.1},
                                            {2, {1, 2}, 0.1, 0.1}};
  EXPECT_THROW(StructureStream(inst, unordered), std::invalid_argument);
}

TEST(StructureStreamTest, InvariantsOnRandomRuns) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = RandomInstance(seed, 10, 4, 3, 40);
    const RequestIndex index(inst);
    const CoverFunction f(index);
    const FractionalRun run = RunFractional(inst);
    const StructuredStream s = StructureStream(inst, run.phi.increments());
    const double floor = 1.0 / (4.0 * inst.k * inst.k);
    for (const auto& [flush, v] : s.phi.values()) {
      if (v > 0.0) EXPECT_GE(v, floor - 1e-12);
    }
    for (Time tau = 1; tau <= inst.T(); ++tau) {
      for (double x : s.steps[tau].x) EXPECT_TRUE(x <= 0.5 || x == 1.0) << x;
      EXPECT_TRUE(CheckFeasible(f, s.SolutionAt(tau), tau).feasible);
      EXPECT_EQ(s.steps[tau].x[inst.request(tau)], 0.0);
    }
    // Causal: structuring a prefix of the log reproduces the prefix.
    const Time cut = inst.T() / 2;
    std::vector<Increment> prefix;
    for (const Increment& inc : run.phi.increments()) {
      if (inc.tau <= cut) prefix.push_back(inc);
    }
    Instance head = inst;
    head.requests.resize(cut);
    const StructuredStream p = StructureStream(head, prefix);
    for (Time tau = 1; tau <= cut; ++tau) {
      EXPECT_EQ(p.steps[tau].x, s.steps[tau].x);
    }
    const FractionalCosts costs = ComputeFractionalCosts(inst, s.Trajectory(inst));
    EXPECT_LE(costs.fetch, FetchCostBound(inst, costs) + 1e-9);
  }
}

TEST(RandomizedRoundTest, FeasibleDeterministicAndResident) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = RandomInstance(100 + seed);
    const FractionalRun run = RunFractional(inst);
    const StructuredStream s = StructureStream(inst, run.phi.increments());
    const RoundingRun a = RandomizedRound(inst, s, seed);
    const RoundingRun b = RandomizedRound(inst, s, seed);
    ASSERT_FALSE(VerifyTrace(inst, a.trace).has_value());
    EXPECT_LE(a.trace.peak_occupancy(), inst.k);
    ASSERT_EQ(a.trace.steps.size(), b.trace.steps.size());
    for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
      EXPECT_EQ(a.trace.steps[i].cache, b.trace.steps[i].cache);
    }
    std::vector<bool> prev(inst.n, false);
    for (Time t = 1; t <= inst.T(); ++t) {
      const auto& x = s.steps[t].x;
      const std::vector<bool> now = CacheMask(inst.n, a.trace.steps[t - 1].cache);
      for (PageId p = 0; p < inst.n; ++p) {
        if (prev[p] && !now[p]) EXPECT_GT(x[p], 0.0);
        const bool ever = testing::LastRequest(inst, p, t) >= 0;
        if (x[p] == 0.0 && ever) EXPECT_TRUE(now[p]) << "t=" << t << " p=" << p;
      }
      prev = now;
    }
  }
}

TEST(RandomizedRoundTest, ClampedProbabilityAlwaysFires) {
  // gamma = ln(4 * 4 * 1) > 2.7, so a structured increment of 0.5 fires
  // with probability min(1, gamma * 0.5) = 1 under every seed.
  const Instance inst = Singletons(3, 2, {0, 1, 0, 1, 2, 2});
  const std::vector<Increment> raw = {{5, {0, 4}, 0.5, 0.5}};
  const StructuredStream s = StructureStream(inst, raw);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RoundingRun r = RandomizedRound(inst, s, seed);
    EXPECT_EQ(std::count(r.trace.steps[4].cache.begin(),
                         r.trace.steps[4].cache.end(), 0),
              0);
  }
}

TEST(MonteCarloTest, OrderedBySeedAndReproducible) {
  const Instance inst = RandomInstance(7);
  const FractionalRun run = RunFractional(inst);
  const StructuredStream s = StructureStream(inst, run.phi.increments());
  std::vector<std::uint64_t> seeds(16);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 1000 + i;
  const MonteCarloSummary a = RunMonteCarlo(inst, s, seeds, true);
  const MonteCarloSummary b = RunMonteCarlo(inst, s, seeds, false);
  EXPECT_EQ(a.mean_cost, b.mean_cost);
  EXPECT_EQ(a.stderr_cost, b.stderr_cost);
  ASSERT_EQ(a.traces.size(), seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const RoundingRun one = RandomizedRound(inst, s, seeds[i]);
    EXPECT_EQ(one.trace.eviction_cost(), a.traces[i].eviction_cost());
  }
  EXPECT_DOUBLE_EQ(a.bound_rhs, (a.gamma + 2.0) * a.c_structured +
                                    inst.total_block_cost());
}

TEST(CoverageTest, SampledCoverNearDemand) {
  const Instance inst = RandomInstance(9);
  const RequestIndex index(inst);
  const CoverFunction f(index);
  const FractionalRun run = RunFractional(inst);
  const StructuredStream s = StructureStream(inst, run.phi.increments());
  const double gamma = RoundingGamma(inst);
  std::mt19937_64 rng(3);
  for (Time tau : {10, 30, 60}) {
    const FractionalSolution phi = s.SolutionAt(tau);
    double sum = 0.0, sq = 0.0;
    const int samples = 300;
    for (int i = 0; i < samples; ++i) {
      const double v = SampleRoundedCover(f, phi, tau, gamma, rng);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / samples;
    const double se = std::sqrt(std::max(0.0, sq / samples - mean * mean) / samples);
    EXPECT_GE(mean, (inst.n - inst.k) * (1.0 - std::exp(-gamma)) - 3 * se);
  }
}

TEST(BicriteriaFetchTest, ThresholdIsStrict) {
  const Instance inst = Singletons(3, 2, {0, 1, 1});
  FractionalTrajectory z;
  z.missing = {{1, 1, 1}, {0, 1, 1}, {0.6, 0, 1}, {0.6, 0, 1}};
  PolicyTrace t = BicriteriaRoundFetch(inst, z);
  EXPECT_EQ(t.steps[1].cache, (std::vector<PageId>{1}));
  z.missing[2][0] = z.missing[3][0] = 0.5;
  t = BicriteriaRoundFetch(inst, z);
  EXPECT_EQ(t.steps[1].cache, (std::vector<PageId>{0, 1}));
}

TEST(BicriteriaFetchTest, MissFetchesLowPagesOfBlock) {
  Instance inst;
  inst.n = 4;
  inst.k = 3;
  inst.blocks = {{0, 1, 2}, {3}};
  inst.costs = {1.0, 1.0};
  inst.requests = {0, 3};
  FractionalTrajectory z;
  z.missing = {{1, 1, 1, 1}, {0, 0.2, 0.9, 1}, {0, 0.2, 0.9, 0}};
  const PolicyTrace t = BicriteriaRoundFetch(inst, z);
  EXPECT_EQ(t.steps[0].cache, (std::vector<PageId>{0, 1}));
  EXPECT_EQ(t.steps[0].fetched, (std::vector<PageId>{0, 1}));
  EXPECT_DOUBLE_EQ(t.fetching_cost(), 2.0);
}

TEST(BicriteriaFetchTest, RejectsInfeasibleInput) {
  const Instance inst = Singletons(2, 1, {0, 1});
  FractionalTrajectory z;
  z.missing = {{1, 1}, {0, 0}, {1, 0}};
  EXPECT_THROW(BicriteriaRoundFetch(inst, z), InfeasibleFractional);
  z.missing = {{1, 1}, {0, 1}};
  EXPECT_THROW(BicriteriaRoundFetch(inst, z), InfeasibleFractional);
}

TEST(BicriteriaFetchTest, GapSolutionWithinFactorTwo) {
  const Instance inst = GenGapInstance(4, 6);
  const FractionalTrajectory z = GapFractionalSolution(4, 6);
  const PolicyTrace t = BicriteriaRoundFetch(inst, z);
  EXPECT_FALSE(VerifyTrace(inst, t).has_value());
  EXPECT_LE(t.peak_occupancy(), 14);
  EXPECT_LE(t.fetching_cost(), 2.0 * ComputeFractionalCosts(inst, z).fetch + 1e-9);
}

TEST(BicriteriaTest, RandomFractionalRuns) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = RandomInstance(200 + seed, 14, 5, 3, 50);
    const FractionalRun run = RunFractional(inst);
    const StructuredStream s = StructureStream(inst, run.phi.increments());
    const FractionalTrajectory z = s.Trajectory(inst);
    const FractionalCosts costs = ComputeFractionalCosts(inst, z);
    const PolicyTrace fetch = BicriteriaRoundFetch(inst, z);
    EXPECT_FALSE(VerifyTrace(inst, fetch).has_value());
    EXPECT_LE(fetch.peak_occupancy(), 2 * inst.k);
    EXPECT_LE(fetch.fetching_cost(), 2.0 * costs.fetch + 1e-9);
    const PolicyTrace evict = BicriteriaRoundEvict(inst, z);
    EXPECT_FALSE(VerifyTrace(inst, evict).has_value());
    EXPECT_LE(evict.peak_occupancy(), 2 * inst.k);
    EXPECT_LE(evict.eviction_cost(), 2.0 * costs.evict + 1e-9);
  }
}

TEST(BicriteriaEvictTest, LowResidencyEvictsWholeBlock) {
  Instance inst;
  inst.n = 4;
  inst.k = 3;
  inst.blocks = {{0, 1}, {2, 3}};
  inst.costs = {1.0, 1.0};
  inst.requests = {0, 1, 2, 2};
  FractionalTrajectory z;
  // Page 0 drops to 40% residency at t = 4.
  z.missing = {{1, 1, 1, 1}, {0, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 0, 1},
               {0.6, 0, 0, 1}};
  z.evict = EvictFlow(inst, z.missing);
  PolicyTrace t = BicriteriaRoundEvict(inst, z);
  EXPECT_EQ(t.steps[3].cache, (std::vector<PageId>{2}));
  EXPECT_DOUBLE_EQ(t.eviction_cost(), 1.0);
  z.missing[4][0] = 0.5;
  z.evict = EvictFlow(inst, z.missing);
  t = BicriteriaRoundEvict(inst, z);
  EXPECT_EQ(t.steps[3].cache, (std::vector<PageId>{0, 1, 2}));
  EXPECT_EQ(t.eviction_cost(), 0.0);
}

TEST(BicriteriaEvictTest, BetaOffOracleInput) {
  const Instance inst = GenBetaOff(2, 4, BetaOffDirection::kEvictHeavy);
  const OptResult opt = OptEviction(inst);
  const FractionalTrajectory z = TrajectoryFromTrace(inst, opt.witness);
  const PolicyTrace t = BicriteriaRoundEvict(inst, z);
  EXPECT_FALSE(VerifyTrace(inst, t).has_value());
  EXPECT_LE(t.peak_occupancy(), 2 * inst.k);
  EXPECT_LE(t.eviction_cost(), 2.0 * ComputeFractionalCosts(inst, z).evict + 1e-9);
}

TEST(DerandomizeTest, SingleAndRepeatedTrace) {
  const Instance inst = RandomInstance(11);
  const DeterministicRun det = RunDeterministic(inst);
  const std::vector<PolicyTrace> one = {det.trace};
  const DerandomizedRun a = DerandomizeEnsemble(inst, one);
  EXPECT_LE(a.trace.fetching_cost(), 2.0 * det.trace.fetching_cost() + 1e-9);
  EXPECT_LE(a.trace.peak_occupancy(), 2 * inst.k);
  for (const auto& row : a.average.missing) {
    for (double x : row) EXPECT_TRUE(x == 0.0 || x == 1.0);
  }
  const std::vector<PolicyTrace> two = {det.trace, det.trace};
  const DerandomizedRun b = DerandomizeEnsemble(inst, two);
  EXPECT_EQ(b.average.missing, a.average.missing);
  EXPECT_EQ(b.trace.fetching_cost(), a.trace.fetching_cost());
  EXPECT_THROW(DerandomizeEnsemble(inst, {}), std::invalid_argument);
}

TEST(DerandomizeTest, RandomizedEnsemble) {
  const Instance inst = RandomInstance(12);
  const FractionalRun run = RunFractional(inst);
  const StructuredStream s = StructureStream(inst, run.phi.increments());
  std::vector<std::uint64_t> seeds(30);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
  const MonteCarloSummary mc = RunMonteCarlo(inst, s, seeds, true);
  const DerandomizedRun d = DerandomizeEnsemble(inst, mc.traces);
  EXPECT_FALSE(VerifyTrace(inst, d.trace).has_value());
  EXPECT_LE(d.trace.peak_occupancy(), 2 * inst.k);
  EXPECT_LE(d.trace.fetching_cost(), 2.0 * d.mean_fetch_cost + 1e-6);
}

}  // namespace
}  // namespace blockcache
