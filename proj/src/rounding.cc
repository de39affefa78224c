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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "blockcache/det_online.h"

namespace blockcache {

FractionalSolution StructuredStream::SolutionAt(Time tau) const {
  return FractionalSolution::Replay(num_blocks, phi.increments(), tau);
}

FractionalTrajectory StructuredStream::Trajectory(
    const Instance& instance) const {
  FractionalTrajectory z;
  z.missing.assign(steps.size(), std::vector<double>(instance.n, 1.0));
  for (std::size_t t = 1; t < steps.size(); ++t) z.missing[t] = steps[t].x;
  z.evict = EvictFlow(instance, z.missing);
  return z;
}

StructuredStream StructureStream(const Instance& instance,
                                 std::span<const Increment> raw) {
  const RequestIndex index(instance);
  const CoverFunction cover(index);
  const int nb = instance.num_blocks();
  const double min_mass = 1.0 / (4.0 * instance.k * instance.k);

  StructuredStream out;
  out.num_blocks = nb;
  out.phi = FractionalSolution::Initial(nb);
  out.steps.resize(instance.T() + 1);
  FractionalSolution raw_phi = FractionalSolution::Initial(nb);
  std::vector<double> bucket(nb, 0.0);
  std::vector<Time> latest(nb, 0);

  auto x_hat = [&](PageId p, Time tau) {
    return XFromPhi(out.phi, index, p, tau);
  };
  std::size_t next = 0;
  for (Time tau = 1; tau <= instance.T(); ++tau) {
    const std::size_t log_start = out.phi.increments().size();
    auto full_flush = [&](BlockId b) {
      out.phi.RaiseToOne(tau, {b, tau});
      bucket[b] = 0.0;
    };

    for (; next < raw.size() && raw[next].tau <= tau; ++next) {
      const Increment& inc = raw[next];
      if (inc.tau < tau || inc.flush.time > tau || !(inc.delta > 0.0)) {
        throw std::invalid_argument("raw increment log is not causal");
      }
      if (inc.flush.time == 0) continue;
      raw_phi.Increase(tau, inc.flush, inc.delta);
      bucket[inc.flush.block] += inc.delta;
      latest[inc.flush.block] = std::max(latest[inc.flush.block],
                                         inc.flush.time);
    }

    for (PageId p = 0; p < instance.n; ++p) {
      if (XFromPhi(raw_phi, index, p, tau) >= 0.5 && x_hat(p, tau) < 1.0) {
        full_flush(index.block_of(p));
        ++out.stats.half_round_flushes;
      }
    }

    for (BlockId b = 0; b < nb; ++b) {
      if (bucket[b] < min_mass) continue;
      const Flush at{b, latest[b]};
      const double current = out.phi.value(at);
      if (current + 2.0 * bucket[b] >= 1.0) {
        out.phi.RaiseToOne(tau, at);
      } else {
        out.phi.Increase(tau, at, 2.0 * bucket[b]);
      }
      bucket[b] = 0.0;
      ++out.stats.bucket_emissions;
    }

    for (PageId p = 0; p < instance.n; ++p) {
      const double x = x_hat(p, tau);
      if (x > 0.5 && x < 1.0) {
        full_flush(index.block_of(p));
        ++out.stats.threshold_flushes;
      }
    }

    while (!CheckFeasible(cover, out.phi, tau).feasible) {
      const CoverView view(cover, out.phi.integral(), tau);
      BlockId best = 0;
      int best_gain = -1;
      for (BlockId b = 0; b < nb; ++b) {
        const int gain = view.Marginal({b, tau});
        if (gain > best_gain) {
          best = b;
          best_gain = gain;
        }
      }
      if (best_gain < 1) {
        throw InternalContradiction("structured constraint cannot be repaired");
      }
      full_flush(best);
      ++out.stats.repair_flushes;
    }

    StructuredStep& step = out.steps[tau];
    const auto& log = out.phi.increments();
    step.increments.assign(log.begin() + log_start, log.end());
    step.x.resize(instance.n);
    for (PageId p = 0; p < instance.n; ++p) step.x[p] = x_hat(p, tau);
  }
  if (next != raw.size()) {
    throw std::invalid_argument("raw increment log extends past T");
  }
  out.raw_cost = raw_phi.Cost(instance);
  return out;
}

double RoundingGamma(const Instance& instance) {
  const double k = instance.k;
  return std::log(4.0 * k * k * instance.beta() * instance.aspect_ratio());
}

RoundingRun RandomizedRound(const Instance& instance,
                            const StructuredStream& stream,
                            std::uint64_t seed) {
  const BlockMap blocks(instance);
  RoundingRun run;
  run.gamma = RoundingGamma(instance);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<bool> cache(instance.n, false);
  int occupancy = 0;
  TraceBuilder builder(instance, instance.k, cache);

  for (Time tau = 1; tau <= instance.T(); ++tau) {
    const StructuredStep& step = stream.steps[tau];
    auto evict_positive = [&](BlockId b) {
      bool any = false;
      for (PageId p : instance.blocks[b]) {
        if (cache[p] && step.x[p] > 0.0) {
          cache[p] = false;
          --occupancy;
          any = true;
        }
      }
      return any;
    };

    std::vector<bool> heads(instance.num_blocks(), false);
    for (const Increment& inc : step.increments) {
      if (coin(rng) < std::min(1.0, run.gamma * inc.delta)) {
        heads[inc.flush.block] = true;
      }
    }
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      if (heads[b] && evict_positive(b)) ++run.sampled_flushes;
    }

    const PageId requested = instance.request(tau);
    if (!cache[requested]) {
      cache[requested] = true;
      ++occupancy;
    }
    while (occupancy > instance.k) {
      PageId victim = -1;
      for (PageId p = 0; p < instance.n; ++p) {
        if (!cache[p] || !(step.x[p] > 0.0)) continue;
        if (victim < 0 || step.x[p] > step.x[victim] ||
            (step.x[p] == step.x[victim] &&
             blocks.block_of(p) < blocks.block_of(victim))) {
          victim = p;
        }
      }
      if (victim < 0) {
        throw InternalContradiction("overflowing cache has no evictable block");
      }
      evict_positive(blocks.block_of(victim));
      ++run.alteration_flushes;
    }
    builder.Step(cache);
  }
  run.trace = std::move(builder).Finish();
  return run;
}

int SampleRoundedCover(const CoverFunction& f, const FractionalSolution& phi,
                       Time tau, double gamma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  FlushSet r = FlushSet::WithTimeZero(f.index().instance().num_blocks());
  for (const auto& [flush, v] : phi.values()) {
    if (flush.time < 1 || flush.time > tau) continue;
    if (coin(rng) < std::min(1.0, gamma * v)) r.Insert(flush);
  }
  return f.Value(r, tau);
}

namespace {

void RequireTrajectoryShape(const Instance& instance,
                            const FractionalTrajectory& z) {
  if (static_cast<int>(z.missing.size()) != instance.T() + 1) {
    throw InfeasibleFractional("trajectory must have T + 1 rows");
  }
  for (const auto& row : z.missing) {
    if (static_cast<int>(row.size()) != instance.n) {
      throw InfeasibleFractional("trajectory row must have n entries");
    }
  }
}

}  // namespace

PolicyTrace BicriteriaRoundFetch(const Instance& instance,
                                 const FractionalTrajectory& z) {
  RequireTrajectoryShape(instance, z);
  if (auto v = NaiveLpCheck(instance, z.missing, FetchFlow(instance, z.missing),
                            -1)) {
    throw InfeasibleFractional("fractional solution infeasible: " +
                               v->Describe());
  }
  const BlockMap blocks(instance);
  std::vector<bool> cache = CacheMask(instance.n, instance.initial_cache);
  TraceBuilder builder(instance, 2 * instance.k, cache);
  for (Time t = 1; t <= instance.T(); ++t) {
    const auto& x = z.missing[t];
    for (PageId p = 0; p < instance.n; ++p) {
      if (cache[p] && x[p] > 0.5) cache[p] = false;
    }
    const PageId requested = instance.request(t);
    if (!cache[requested]) {
      for (PageId p : instance.blocks[blocks.block_of(requested)]) {
        if (x[p] <= 0.5) cache[p] = true;
      }
    }
    builder.Step(cache);
  }
  return std::move(builder).Finish();
}

PolicyTrace BicriteriaRoundEvict(const Instance& instance,
                                 const FractionalTrajectory& z) {
  RequireTrajectoryShape(instance, z);
  const BlockFlow flow = z.evict.size() == z.missing.size()
                             ? z.evict
                             : EvictFlow(instance, z.missing);
  if (auto v = NaiveLpCheck(instance, z.missing, flow, +1)) {
    throw InfeasibleFractional("fractional solution infeasible: " +
                               v->Describe());
  }
  const BlockMap blocks(instance);
  std::vector<bool> cache = CacheMask(instance.n, instance.initial_cache);
  TraceBuilder builder(instance, 2 * instance.k, cache);
  for (Time t = 1; t <= instance.T(); ++t) {
    const auto& x = z.missing[t];
    const PageId requested = instance.request(t);
    cache[requested] = true;
    for (PageId p = 0; p < instance.n; ++p) {
      if (!cache[p] || !(x[p] > 0.5)) continue;
      for (PageId q : instance.blocks[blocks.block_of(p)]) {
        if (q != requested) cache[q] = false;
      }
    }
    builder.Step(cache);
  }
  return std::move(builder).Finish();
}

DerandomizedRun DerandomizeEnsemble(const Instance& instance,
                                    std::span<const PolicyTrace> policies) {
  if (policies.empty()) throw std::invalid_argument("empty ensemble");
  DerandomizedRun run;
  run.average.missing.assign(instance.T() + 1,
                             std::vector<double>(instance.n, 0.0));
  const double weight = 1.0 / static_cast<double>(policies.size());
  for (const PolicyTrace& trace : policies) {
    if (static_cast<int>(trace.steps.size()) != instance.T()) {
      throw std::invalid_argument("ensemble trace length differs from T");
    }
    std::vector<bool> in = CacheMask(instance.n, trace.start);
    for (Time t = 0; t <= instance.T(); ++t) {
      if (t > 0) in = CacheMask(instance.n, trace.steps[t - 1].cache);
      for (PageId p = 0; p < instance.n; ++p) {
        if (!in[p]) run.average.missing[t][p] += weight;
      }
    }
    run.mean_fetch_cost += trace.fetching_cost() * weight;
  }
  run.average.evict = EvictFlow(instance, run.average.missing);
  run.trace = BicriteriaRoundFetch(instance, run.average);
  return run;
}

MonteCarloSummary RunMonteCarlo(const Instance& instance,
                                const StructuredStream& stream,
                                std::span<const std::uint64_t> seeds,
                                bool keep_traces) {
  MonteCarloSummary summary;
  summary.seeds.assign(seeds.begin(), seeds.end());
  summary.gamma = RoundingGamma(instance);
  summary.c_structured = stream.Cost(instance);
  summary.bound_rhs = (summary.gamma + 2.0) * summary.c_structured +
                      instance.total_block_cost();
  const std::size_t count = seeds.size();
  std::vector<double> costs(count, 0.0);
  std::vector<PolicyTrace> traces(keep_traces ? count : 0);
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          RoundingRun run = RandomizedRound(instance, stream, seeds[i]);
          costs[i] = run.trace.eviction_cost();
          if (keep_traces) traces[i] = std::move(run.trace);
        }
      });
    }
  }
  if (count > 0) {
    double sum = 0.0;
    for (double c : costs) sum += c;
    summary.mean_cost = sum / count;
    double var = 0.0;
    for (double c : costs) var += (c - summary.mean_cost) * (c - summary.mean_cost);
    summary.stderr_cost =
        count > 1 ? std::sqrt(var / (count - 1) / count) : 0.0;
  }
  summary.traces = std::move(traces);
  return summary;
}

}  // namespace blockcache
