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

#include "blockcache/dual.h"

#include <algorithm>
#include <limits>

namespace blockcache {

double DualLedger::mass(Flush f) const {
  auto it = mass_.find(f);
  return it == mass_.end() ? 0.0 : it->second;
}

void DualLedger::Raise(DualRecord record) {
  for (const auto& [flush, rate] : record.rates) {
    if (rate > 0) mass_[flush] += rate * record.y;
  }
  objective_ += record.coefficient * record.y;
  records_.push_back(std::move(record));
}

double DualLedger::MaxViolation(const Instance& instance) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [f, a] : mass_) {
    worst = std::max(worst, a - instance.costs[f.block]);
  }
  return worst;
}

double MaxDualViolationAllFlushes(const CoverFunction& f,
                                  const DualLedger& ledger,
                                  const FlushSet& flushes) {
  const Instance& inst = f.index().instance();
  const int T = inst.T();
  std::vector<double> mass(static_cast<std::size_t>(inst.num_blocks()) * (T + 1),
                           0.0);
  for (const DualRecord& rec : ledger.records()) {
    const FlushSet s = flushes.Prefix(rec.snapshot);
    const CoverView view(f, s, rec.tau);
    for (BlockId b = 0; b < inst.num_blocks(); ++b) {
      for (Time t = 1; t <= rec.tau; ++t) {
        mass[b * (T + 1) + t] += view.Marginal({b, t}) * rec.y;
      }
    }
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (BlockId b = 0; b < inst.num_blocks(); ++b) {
    for (Time t = 1; t <= T; ++t) {
      worst = std::max(worst, mass[b * (T + 1) + t] - inst.costs[b]);
    }
  }
  return worst;
}

}  // namespace blockcache
