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

#ifndef BLOCKCACHE_INSTANCE_H_
#define BLOCKCACHE_INSTANCE_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockcache {

// Pages and blocks are 0-based inside the library; files use 1-based ids.
using PageId = int;
using BlockId = int;
// Time steps run 1..T. Time 0 is the free "clear the cache" step.
using Time = int;

class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The eviction event (B, t): every cached page of block B is dropped at t.
struct Flush {
  BlockId block = 0;
  Time time = 0;

  friend auto operator<=>(const Flush&, const Flush&) = default;
};

struct Instance {
  int n = 0;  // page count
  int k = 0;  // cache size
  std::vector<std::vector<PageId>> blocks;
  std::vector<double> costs;  // one per block
  std::vector<PageId> requests;  // requests[t - 1] is p_t
  std::vector<PageId> initial_cache;

  int T() const { return static_cast<int>(requests.size()); }
  int num_blocks() const { return static_cast<int>(blocks.size()); }
  PageId request(Time t) const { return requests[t - 1]; }

  // Largest block size.
  int beta() const;
  // c_max / c_min over blocks.
  double aspect_ratio() const;
  double total_block_cost() const;

  // Throws InvalidInstance describing the first broken invariant.
  void Validate() const;
};

// Block membership lookup built once per instance.
class BlockMap {
 public:
  explicit BlockMap(const Instance& instance);
  BlockId block_of(PageId p) const { return block_of_[p]; }

 private:
  std::vector<BlockId> block_of_;
};

// Last-request table r(p, t). "Never requested" is std::nullopt, never a
// number.
class RequestIndex {
 public:
  explicit RequestIndex(const Instance& instance);

  std::optional<Time> last_request(PageId p, Time t) const;
  // Number of distinct pages requested in [1, t].
  int pages_seen(Time t) const { return pages_seen_[t]; }
  BlockId block_of(PageId p) const { return blocks_.block_of(p); }
  const Instance& instance() const { return *instance_; }

 private:
  static constexpr Time kNever = -1;
  const Instance* instance_;
  BlockMap blocks_;
  int stride_;
  std::vector<Time> last_;  // (T + 1) rows of n entries
  std::vector<int> pages_seen_;
};

// All flushes (B, t) with t = r(p, tau) + 1 <= tau for some p in B, sorted.
std::vector<Flush> AliveFlushes(const RequestIndex& index, Time tau);

// Integrality-gap family: two blocks of size beta, k = 2 beta - 1, each round
// requests all of B1 then all of B2.
Instance GenGapInstance(int beta, int rounds);

enum class BetaOffDirection { kEvictHeavy, kFetchHeavy };

// Construction separating optimal eviction and fetching costs by a factor of
// beta: 2 beta^2 pages, 2 beta blocks, k = beta^2, beta rounds each repeated
// `repeats` times. The evict-heavy variant starts with the P blocks cached;
// the fetch-heavy variant requests the complement and starts with Q cached.
Instance GenBetaOff(int beta, int repeats, BetaOffDirection direction);

enum class CostProfile { kUnit, kLogUniform };

struct RandomInstanceParams {
  int n = 0;
  int k = 0;
  int beta = 1;
  int T = 1;
  CostProfile cost_profile = CostProfile::kUnit;
  double delta = 1.0;  // max/min cost ratio for kLogUniform
  std::uint64_t seed = 0;
};

Instance GenRandom(const RandomInstanceParams& params);

}  // namespace blockcache

#endif  // BLOCKCACHE_INSTANCE_H_
