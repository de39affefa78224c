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

#include "blockcache/trace.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace blockcache {
namespace {

struct Transition {
  std::vector<Flush> flushes;
  std::vector<PageId> fetched;
  double evict_cost = 0.0;
  double fetch_cost = 0.0;
};

Transition Diff(const Instance& inst, const BlockMap& blocks, Time t,
                const std::vector<bool>& prev, const std::vector<bool>& next) {
  Transition tr;
  std::set<BlockId> evicted, loaded;
  for (PageId p = 0; p < inst.n; ++p) {
    if (prev[p] && !next[p]) evicted.insert(blocks.block_of(p));
    if (!prev[p] && next[p]) {
      loaded.insert(blocks.block_of(p));
      tr.fetched.push_back(p);
    }
  }
  for (BlockId b : evicted) {
    tr.flushes.push_back({b, t});
    tr.evict_cost += inst.costs[b];
  }
  for (BlockId b : loaded) tr.fetch_cost += inst.costs[b];
  return tr;
}

std::vector<PageId> Members(const std::vector<bool>& mask) {
  std::vector<PageId> out;
  for (PageId p = 0; p < static_cast<PageId>(mask.size()); ++p) {
    if (mask[p]) out.push_back(p);
  }
  return out;
}

bool Near(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b));
}

}  // namespace

int PolicyTrace::peak_occupancy() const {
  std::size_t peak = start.size();
  for (const auto& s : steps) peak = std::max(peak, s.cache.size());
  return static_cast<int>(peak);
}

std::vector<bool> CacheMask(int n, const std::vector<PageId>& pages) {
  std::vector<bool> mask(n, false);
  for (PageId p : pages) mask[p] = true;
  return mask;
}

TraceBuilder::TraceBuilder(const Instance& instance, int capacity,
                           const std::vector<bool>& start)
    : instance_(&instance), blocks_(instance), current_(start) {
  trace_.capacity = capacity;
  trace_.start = Members(start);
}

void TraceBuilder::Step(const std::vector<bool>& cache) {
  const Time t = static_cast<Time>(trace_.steps.size()) + 1;
  Transition tr = Diff(*instance_, blocks_, t, current_, cache);
  TraceStep step;
  step.t = t;
  step.flushes = std::move(tr.flushes);
  step.fetched = std::move(tr.fetched);
  step.cache = Members(cache);
  step.evict_cost_cum = trace_.eviction_cost() + tr.evict_cost;
  step.fetch_cost_cum = trace_.fetching_cost() + tr.fetch_cost;
  trace_.steps.push_back(std::move(step));
  current_ = cache;
}

PolicyTrace TraceBuilder::Finish() && { return std::move(trace_); }

std::optional<std::string> VerifyTrace(const Instance& instance,
                                       const PolicyTrace& trace) {
  const BlockMap blocks(instance);
  if (static_cast<int>(trace.steps.size()) != instance.T()) {
    return "trace has " + std::to_string(trace.steps.size()) +
           " steps, instance has " + std::to_string(instance.T());
  }
  std::vector<bool> prev = CacheMask(instance.n, trace.start);
  double evict = 0.0, fetch = 0.0;
  Time expected = 0;
  for (const TraceStep& step : trace.steps) {
    const std::string at = "step " + std::to_string(step.t) + ": ";
    if (step.t != ++expected) return at + "out of order";
    for (PageId p : step.cache) {
      if (p < 0 || p >= instance.n) return at + "page id out of range";
    }
    const std::vector<bool> next = CacheMask(instance.n, step.cache);
    if (!next[instance.request(step.t)]) {
      return at + "requested page " +
             std::to_string(instance.request(step.t) + 1) + " not cached";
    }
    if (static_cast<int>(step.cache.size()) > trace.capacity) {
      return at + "cache holds " + std::to_string(step.cache.size()) +
             " pages, capacity " + std::to_string(trace.capacity);
    }
    const Transition tr = Diff(instance, blocks, step.t, prev, next);
    if (tr.flushes != step.flushes) return at + "flush events do not match";
    std::vector<PageId> fetched = step.fetched;
    std::sort(fetched.begin(), fetched.end());
    if (tr.fetched != fetched) return at + "fetch events do not match";
    evict += tr.evict_cost;
    fetch += tr.fetch_cost;
    if (!Near(step.evict_cost_cum, evict)) return at + "eviction cost drift";
    if (!Near(step.fetch_cost_cum, fetch)) return at + "fetching cost drift";
    prev = next;
  }
  return std::nullopt;
}

}  // namespace blockcache
