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

#include "blockcache/instance.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace blockcache {

int Instance::beta() const {
  std::size_t b = 0;
  for (const auto& block : blocks) b = std::max(b, block.size());
  return static_cast<int>(b);
}

double Instance::aspect_ratio() const {
  if (costs.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
  return *hi / *lo;
}

double Instance::total_block_cost() const {
  double total = 0.0;
  for (double c : costs) total += c;
  return total;
}

void Instance::Validate() const {
  auto fail = [](const std::string& what) { throw InvalidInstance(what); };
  if (n < 1) fail("page count must be positive");
  if (k < 1) fail("cache size must be positive");
  if (k > n) fail("cache size exceeds page count");
  if (blocks.empty()) fail("no blocks");
  if (costs.size() != blocks.size()) fail("one cost per block required");
  std::vector<int> seen(n, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) fail("block " + std::to_string(b + 1) + " is empty");
    for (PageId p : blocks[b]) {
      if (p < 0 || p >= n) fail("block page id out of range");
      if (seen[p]++) fail("page " + std::to_string(p + 1) + " in two blocks");
    }
    if (!(costs[b] > 0.0) || !std::isfinite(costs[b])) {
      fail("block " + std::to_string(b + 1) + " cost must be positive");
    }
  }
  for (PageId p = 0; p < n; ++p) {
    if (!seen[p]) fail("page " + std::to_string(p + 1) + " in no block");
  }
  if (beta() > k) fail("block size exceeds cache size");
  for (PageId p : requests) {
    if (p < 0 || p >= n) fail("request page id out of range");
  }
  std::vector<int> cached(n, 0);
  for (PageId p : initial_cache) {
    if (p < 0 || p >= n) fail("initial cache page id out of range");
    if (cached[p]++) fail("initial cache lists a page twice");
  }
  if (static_cast<int>(initial_cache.size()) > k) {
    fail("initial cache larger than k");
  }
}

BlockMap::BlockMap(const Instance& instance) : block_of_(instance.n, -1) {
  for (BlockId b = 0; b < instance.num_blocks(); ++b) {
    for (PageId p : instance.blocks[b]) block_of_[p] = b;
  }
}

RequestIndex::RequestIndex(const Instance& instance)
    : instance_(&instance),
      blocks_(instance),
      stride_(instance.n),
      last_(static_cast<std::size_t>(instance.T() + 1) * instance.n, kNever),
      pages_seen_(instance.T() + 1, 0) {
  std::vector<bool> seen(instance.n, false);
  int distinct = 0;
  for (Time t = 1; t <= instance.T(); ++t) {
    std::copy_n(last_.begin() + (t - 1) * stride_, stride_,
                last_.begin() + t * stride_);
    const PageId p = instance.request(t);
    last_[t * stride_ + p] = t;
    if (!seen[p]) {
      seen[p] = true;
      ++distinct;
    }
    pages_seen_[t] = distinct;
  }
}

std::optional<Time> RequestIndex::last_request(PageId p, Time t) const {
  const Time r = last_[t * stride_ + p];
  if (r == kNever) return std::nullopt;
  return r;
}

std::vector<Flush> AliveFlushes(const RequestIndex& index, Time tau) {
  const Instance& inst = index.instance();
  std::vector<Flush> alive;
  for (BlockId b = 0; b < inst.num_blocks(); ++b) {
    const std::size_t first = alive.size();
    for (PageId p : inst.blocks[b]) {
      const auto r = index.last_request(p, tau);
      if (r && *r + 1 <= tau) alive.push_back({b, *r + 1});
    }
    std::sort(alive.begin() + first, alive.end());
    alive.erase(std::unique(alive.begin() + first, alive.end()), alive.end());
  }
  return alive;
}

Instance GenGapInstance(int beta, int rounds) {
  if (beta < 2) throw InvalidInstance("gap instance needs beta >= 2");
  if (rounds < 1) throw InvalidInstance("gap instance needs rounds >= 1");
  Instance inst;
  inst.n = 2 * beta;
  inst.k = 2 * beta - 1;
  inst.blocks.assign(2, {});
  for (PageId p = 0; p < beta; ++p) {
    inst.blocks[0].push_back(p);
    inst.blocks[1].push_back(beta + p);
  }
  inst.costs.assign(2, 1.0);
  for (int r = 0; r < rounds; ++r) {
    for (PageId p = 0; p < inst.n; ++p) inst.requests.push_back(p);
  }
  inst.Validate();
  return inst;
}

Instance GenBetaOff(int beta, int repeats, BetaOffDirection direction) {
  if (beta < 2) throw InvalidInstance("beta-off instance needs beta >= 2");
  if (repeats < 1) throw InvalidInstance("beta-off instance needs L >= 1");
  Instance inst;
  inst.n = 2 * beta * beta;
  inst.k = beta * beta;
  for (BlockId b = 0; b < 2 * beta; ++b) {
    std::vector<PageId> block;
    for (int j = 0; j < beta; ++j) block.push_back(b * beta + j);
    inst.blocks.push_back(std::move(block));
  }
  inst.costs.assign(2 * beta, 1.0);
  // Blocks [0, beta) are P, [beta, 2 beta) are Q.
  const bool evict_heavy = direction == BetaOffDirection::kEvictHeavy;
  for (BlockId b = evict_heavy ? 0 : beta; b < (evict_heavy ? beta : 2 * beta);
       ++b) {
    for (PageId p : inst.blocks[b]) inst.initial_cache.push_back(p);
  }
  for (int i = 1; i <= beta; ++i) {
    std::vector<PageId> round;
    for (BlockId b = 0; b < beta; ++b) {
      // P block: the first beta - i pages, or the remaining i pages.
      for (int j = 0; j < beta; ++j) {
        if ((j < beta - i) == evict_heavy) round.push_back(b * beta + j);
      }
    }
    for (BlockId q = 0; q < beta; ++q) {
      if ((q < i) == evict_heavy) {
        for (PageId p : inst.blocks[beta + q]) round.push_back(p);
      }
    }
    for (int rep = 0; rep < repeats; ++rep) {
      inst.requests.insert(inst.requests.end(), round.begin(), round.end());
    }
  }
  inst.Validate();
  return inst;
}

Instance GenRandom(const RandomInstanceParams& params) {
  if (params.n < 1 || params.k < 1 || params.beta < 1 || params.T < 1) {
    throw InvalidInstance("random instance parameters must be positive");
  }
  if (params.k > params.n) throw InvalidInstance("k > n");
  if (params.beta > params.k) throw InvalidInstance("beta > k");
  if (params.cost_profile == CostProfile::kLogUniform && !(params.delta >= 1)) {
    throw InvalidInstance("aspect ratio must be >= 1");
  }
  std::mt19937_64 rng(params.seed);
  Instance inst;
  inst.n = params.n;
  inst.k = params.k;
  std::vector<PageId> pages(params.n);
  for (PageId p = 0; p < params.n; ++p) pages[p] = p;
  std::shuffle(pages.begin(), pages.end(), rng);
  std::uniform_int_distribution<int> block_size(1, params.beta);
  for (std::size_t next = 0; next < pages.size();) {
    const std::size_t size =
        std::min<std::size_t>(block_size(rng), pages.size() - next);
    std::vector<PageId> block(pages.begin() + next,
                              pages.begin() + next + size);
    std::sort(block.begin(), block.end());
    inst.blocks.push_back(std::move(block));
    next += size;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t b = 0; b < inst.blocks.size(); ++b) {
    inst.costs.push_back(params.cost_profile == CostProfile::kUnit
                             ? 1.0
                             : std::exp(unit(rng) * std::log(params.delta)));
  }
  std::uniform_int_distribution<PageId> page(0, params.n - 1);
  for (int t = 0; t < params.T; ++t) inst.requests.push_back(page(rng));
  inst.Validate();
  return inst;
}

}  // namespace blockcache
