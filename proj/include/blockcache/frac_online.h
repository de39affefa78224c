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

#ifndef BLOCKCACHE_FRAC_ONLINE_H_
#define BLOCKCACHE_FRAC_ONLINE_H_

#include <span>

#include "blockcache/dual.h"
#include "blockcache/instance.h"
#include "blockcache/submodular.h"

namespace blockcache {

// Value of phi_B^t after its dual constraint has accumulated mass A under
// the rate law dphi/dy = ln(k beta + 1)/c_B * f * (phi + 1/(k beta)):
//   phi = (exp(ln(k beta + 1) * A / c_B) - 1) / (k beta).
// Exactly 0 at A = 0 and exactly 1 at A = c_B.
double PhiClosedForm(double mass, double cost, int k, int beta);

enum class EventKind { kPrimalSatisfied, kFlushTightened };

struct FractionalEvent {
  double delta_y = 0.0;
  EventKind kind = EventKind::kPrimalSatisfied;
  Flush tightened;  // valid for kFlushTightened
};

// Advances y until either sum_i rate_i * phi_i(y) reaches `target` or the
// first dual constraint becomes tight, whichever comes first. The root is
// bracketed in [0, min tightening increase] and bisected to relative
// precision 1e-12 (the upper end is returned, so the target is met).
// Candidates with rate 0 never move.
FractionalEvent SolveEvent(std::span<const DualCandidate> candidates,
                           double target, int k, int beta);

struct FractionalRun {
  FractionalSolution phi;
  DualLedger ledger;
  int events = 0;
};

// Monotone-incremental fractional algorithm for the eviction cost model.
// While the maximal-integral constraint (S, tau) is violated, raises y over
// the alive flushes per the exponential rate law; flushes whose dual
// constraint tightens reach phi = 1 and join S.
FractionalRun RunFractional(const Instance& instance);

// Competitive factor between primal and dual: 2 ln(k beta + 1).
double FractionalRatioBound(const Instance& instance);

}  // namespace blockcache

#endif  // BLOCKCACHE_FRAC_ONLINE_H_
