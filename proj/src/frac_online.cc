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

#include "blockcache/frac_online.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "blockcache/det_online.h"

namespace blockcache {

double PhiClosedForm(double mass, double cost, int k, int beta) {
  if (mass <= 0.0) return 0.0;
  if (mass >= cost) return 1.0;
  const double kb = static_cast<double>(k) * beta;
  return std::expm1(std::log1p(kb) * mass / cost) / kb;
}

FractionalEvent SolveEvent(std::span<const DualCandidate> candidates,
                           double target, int k, int beta) {
  const TightIncrease tight = NextTightIncrease(candidates);
  auto g = [&](double y) {
    double sum = 0.0;
    for (const DualCandidate& c : candidates) {
      if (c.rate > 0) {
        sum += c.rate * PhiClosedForm(c.mass + c.rate * y, c.cost, k, beta);
      }
    }
    return sum;
  };
  // A tie between the two events counts as a tightening so the flush is
  // snapped to 1 and joins S.
  if (g(tight.delta_y) <= target * (1.0 + 1e-12)) {
    return {tight.delta_y, EventKind::kFlushTightened, tight.flush};
  }
  double lo = 0.0, hi = tight.delta_y;
  while (hi - lo > 1e-12 * hi) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    (g(mid) >= target ? hi : lo) = mid;
  }
  return {hi, EventKind::kPrimalSatisfied, {}};
}

double FractionalRatioBound(const Instance& instance) {
  return 2.0 * std::log1p(static_cast<double>(instance.k) * instance.beta());
}

FractionalRun RunFractional(const Instance& instance) {
  const RequestIndex index(instance);
  const CoverFunction cover(index);
  const int k = instance.k;
  const int beta = instance.beta();
  FractionalRun run;
  run.phi = FractionalSolution::Initial(instance.num_blocks());

  for (Time tau = 1; tau <= instance.T(); ++tau) {
    const std::vector<Flush> alive = AliveFlushes(index, tau);
    // Each pass either satisfies the constraint or grows S, and f_tau(S)
    // grows with S, so the loop is bounded by n - k passes plus one.
    for (int pass = 0; pass <= cover.cap() + 1; ++pass) {
      const FlushSet& s = run.phi.integral();
      const CoverView view(cover, s, tau);
      const int demand = view.demand();
      if (demand == 0) break;

      double lhs = 0.0;
      for (const auto& [f, v] : run.phi.values()) {
        if (v > 0.0 && f.time <= tau) lhs += view.Marginal(f) * v;
      }
      if (lhs >= demand - kFeasibilityTolerance) break;

      DualRecord record{tau, s.Snapshot(), 0.0, demand, {}};
      std::vector<DualCandidate> candidates;
      double moving = 0.0;
      [[maybe_unused]] double alive_rate = 0.0;
      for (Flush f : alive) {
        const int rate = view.Marginal(f);
        alive_rate += rate;
        if (rate < 1) continue;
        candidates.push_back({f, rate, run.ledger.mass(f),
                              instance.costs[f.block]});
        record.rates.emplace_back(f, rate);
        moving += rate * run.phi.value(f);
      }
      assert(alive_rate / (static_cast<double>(k) * beta) <= demand + 1e-9);

      const FractionalEvent event =
          SolveEvent(candidates, demand - (lhs - moving), k, beta);
      record.y = event.delta_y;
      run.ledger.Raise(std::move(record));
      ++run.events;

      for (const DualCandidate& c : candidates) {
        if (event.kind == EventKind::kFlushTightened &&
            c.flush == event.tightened) {
          run.ledger.SetMass(c.flush, c.cost);
          run.phi.RaiseToOne(tau, c.flush);
          continue;
        }
        const double before = run.phi.value(c.flush);
        const double after =
            PhiClosedForm(run.ledger.mass(c.flush), c.cost, k, beta);
        if (after > before) run.phi.Increase(tau, c.flush, after - before);
      }
    }
  }
  return run;
}

}  // namespace blockcache
