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

#ifndef BLOCKCACHE_TRACE_H_
#define BLOCKCACHE_TRACE_H_

#include <optional>
#include <string>
#include <vector>

#include "blockcache/instance.h"

namespace blockcache {

struct TraceStep {
  Time t = 0;
  std::vector<Flush> flushes;    // blocks that lost at least one page
  std::vector<PageId> fetched;   // pages that entered the cache
  std::vector<PageId> cache;     // sorted contents after the step
  double evict_cost_cum = 0.0;
  double fetch_cost_cum = 0.0;
};

// A per-step record of an integral cache policy. Events and costs are derived
// from consecutive cache states: removing any subset of a block in one step
// costs c_B in the eviction model, adding any subset costs c_B in the
// fetching model.
struct PolicyTrace {
  int capacity = 0;
  std::vector<PageId> start;  // contents entering step 1
  std::vector<TraceStep> steps;

  double eviction_cost() const {
    return steps.empty() ? 0.0 : steps.back().evict_cost_cum;
  }
  double fetching_cost() const {
    return steps.empty() ? 0.0 : steps.back().fetch_cost_cum;
  }
  // Largest cache occupancy over all steps.
  int peak_occupancy() const;
};

class TraceBuilder {
 public:
  TraceBuilder(const Instance& instance, int capacity,
               const std::vector<bool>& start);

  // Records the cache contents at the end of the next step.
  void Step(const std::vector<bool>& cache);
  PolicyTrace Finish() &&;

 private:
  const Instance* instance_;
  BlockMap blocks_;
  std::vector<bool> current_;
  PolicyTrace trace_;
};

std::vector<bool> CacheMask(int n, const std::vector<PageId>& pages);

// Checks one trace against its instance: the requested page is cached, the
// capacity bound holds, and the recorded events and costs match the cache
// transitions. Returns a message naming the first failing step.
std::optional<std::string> VerifyTrace(const Instance& instance,
                                       const PolicyTrace& trace);

}  // namespace blockcache

#endif  // BLOCKCACHE_TRACE_H_
