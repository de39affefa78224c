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

#ifndef BLOCKCACHE_DUAL_H_
#define BLOCKCACHE_DUAL_H_

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "blockcache/instance.h"
#include "blockcache/submodular.h"

namespace blockcache {

// One raised dual variable y_S^tau. S is identified by a snapshot of the
// algorithm's monotone flush set.
struct DualRecord {
  Time tau = 0;
  std::size_t snapshot = 0;
  double y = 0.0;
  int coefficient = 0;  // n - k - f_tau(S), always >= 1
  // Flushes whose dual constraint grew, with their rate f_tau((B,t)|S).
  std::vector<std::pair<Flush, int>> rates;
};

// Sparse dual bookkeeping: accumulated mass A(B,t) for every flush that ever
// had a nonzero rate, the raised variables, and the dual objective.
class DualLedger {
 public:
  double mass(Flush f) const;
  void Raise(DualRecord record);
  // Pins A(f) to an exact value; used when a constraint becomes tight.
  void SetMass(Flush f, double value) { mass_[f] = value; }

  double objective() const { return objective_; }
  const std::map<Flush, double>& masses() const { return mass_; }
  const std::vector<DualRecord>& records() const { return records_; }

  // max over tracked (B,t) of A(B,t) - c_B.
  double MaxViolation(const Instance& instance) const;

 private:
  std::map<Flush, double> mass_;
  std::vector<DualRecord> records_;
  double objective_ = 0.0;
};

// max over all (B,t), t in [1,T], of sum_records f_tau((B,t)|S) y - c_B, with
// coefficients recomputed from the flush-set snapshots rather than read from
// the ledger. `flushes` must be the set whose prefixes the records refer to.
double MaxDualViolationAllFlushes(const CoverFunction& f,
                                  const DualLedger& ledger,
                                  const FlushSet& flushes);

// A dual constraint that could become tight while y grows.
struct DualCandidate {
  Flush flush;
  int rate = 0;        // f_tau((B,t)|S)
  double mass = 0.0;   // A(B,t)
  double cost = 0.0;   // c_B
};

}  // namespace blockcache

#endif  // BLOCKCACHE_DUAL_H_
