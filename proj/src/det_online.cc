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

#include "blockcache/det_online.h"

#include <cassert>
#include <limits>

namespace blockcache {

TightIncrease NextTightIncrease(std::span<const DualCandidate> candidates) {
  const DualCandidate* best = nullptr;
  double best_delta = std::numeric_limits<double>::infinity();
  for (const DualCandidate& c : candidates) {
    if (c.rate < 1) continue;
    const double delta = std::max(0.0, (c.cost - c.mass) / c.rate);
    if (delta < best_delta ||
        (delta == best_delta && c.flush < best->flush)) {
      best = &c;
      best_delta = delta;
    }
  }
  if (best == nullptr) {
    throw InternalContradiction("no dual constraint with positive rate");
  }
  return {best->flush, best_delta};
}

DeterministicRun RunDeterministic(const Instance& instance) {
  const RequestIndex index(instance);
  const CoverFunction cover(index);
  DeterministicRun run;
  run.flushes = FlushSet::WithTimeZero(instance.num_blocks());
  std::vector<bool> cache(instance.n, false);
  int occupancy = 0;
  TraceBuilder builder(instance, instance.k, cache);

  for (Time tau = 1; tau <= instance.T(); ++tau) {
    const PageId requested = instance.request(tau);
    if (!cache[requested]) {
      cache[requested] = true;
      ++occupancy;
    }
    if (occupancy > instance.k) {
      const CoverView view(cover, run.flushes, tau);
      DualRecord record{tau, run.flushes.Snapshot(), 0.0, view.demand(), {}};
      std::vector<DualCandidate> candidates;
      for (Flush f : AliveFlushes(index, tau)) {
        const int rate = view.Marginal(f);
        if (rate < 1) continue;
        candidates.push_back(
            {f, rate, run.ledger.mass(f), instance.costs[f.block]});
        record.rates.emplace_back(f, rate);
      }
      const TightIncrease step = NextTightIncrease(candidates);
      record.y = step.delta_y;
      run.ledger.Raise(std::move(record));
      const BlockId b = step.flush.block;
      run.ledger.SetMass(step.flush, instance.costs[b]);

      for (PageId p : instance.blocks[b]) {
        if (p != requested && cache[p]) {
          cache[p] = false;
          --occupancy;
        }
      }
      run.flushes.Insert({b, tau});
      run.primal_cost += instance.costs[b];
      assert(occupancy <= instance.k);
    }
    builder.Step(cache);
  }
  run.trace = std::move(builder).Finish();
  return run;
}

}  // namespace blockcache
