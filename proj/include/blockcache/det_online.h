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

#ifndef BLOCKCACHE_DET_ONLINE_H_
#define BLOCKCACHE_DET_ONLINE_H_

#include <span>
#include <stdexcept>
#include <vector>

#include "blockcache/dual.h"
#include "blockcache/instance.h"
#include "blockcache/submodular.h"
#include "blockcache/trace.h"

namespace blockcache {

// Raised when the dual search finds no constraint to tighten, which the
// analysis rules out for an overflowing cache.
class InternalContradiction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TightIncrease {
  Flush flush;
  double delta_y = 0.0;
};

// Smallest increase of y that makes one candidate's dual constraint tight:
// min over rate >= 1 of (c - A) / rate. Ties go to the lowest (block, t).
TightIncrease NextTightIncrease(std::span<const DualCandidate> candidates);

struct DeterministicRun {
  PolicyTrace trace;
  FlushSet flushes;  // time-0 flushes followed by performed ones
  DualLedger ledger;
  double primal_cost = 0.0;
};

// The k-competitive primal-dual online algorithm for the eviction cost
// model. Starts from an empty cache: the time-0 flushes clear any initial
// contents for free. On overflow it raises y_S^tau over the alive flushes
// until one dual constraint is tight, then flushes that block at tau
// (keeping the requested page).
DeterministicRun RunDeterministic(const Instance& instance);

}  // namespace blockcache

#endif  // BLOCKCACHE_DET_ONLINE_H_
