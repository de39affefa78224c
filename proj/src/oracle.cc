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

#include "blockcache/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace blockcache {
namespace {

using Mask = std::uint64_t;

double Binomial(int n, int r) {
  double v = 1.0;
  for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
  return v;
}

struct Node {
  double cost;
  Mask parent;
};

}  // namespace

OptResult OptimalOffline(const Instance& instance, CostModel model, int h) {
  if (h <= 0) h = instance.k;
  if (instance.n > 62) throw IntractableInstance("DP supports n <= 62");
  if (Binomial(instance.n, std::min(h, instance.n)) * instance.T() > 1e6) {
    throw IntractableInstance("C(n, h) * T exceeds 1e6; exact DP refused");
  }
  if (static_cast<int>(instance.initial_cache.size()) > h) {
    throw InvalidInstance("initial cache larger than offline cache size");
  }
  const BlockMap blocks(instance);
  std::vector<Mask> block_mask(instance.num_blocks(), 0);
  for (BlockId b = 0; b < instance.num_blocks(); ++b) {
    for (PageId p : instance.blocks[b]) block_mask[b] |= Mask{1} << p;
  }
  auto block_cost = [&](Mask pages) {
    double c = 0.0;
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      if (pages & block_mask[b]) c += instance.costs[b];
    }
    return c;
  };

  Mask start = 0;
  for (PageId p : instance.initial_cache) start |= Mask{1} << p;
  std::vector<std::unordered_map<Mask, Node>> layers(instance.T() + 1);
  layers[0].emplace(start, Node{0.0, 0});

  for (Time t = 1; t <= instance.T(); ++t) {
    const PageId p = instance.request(t);
    const Mask bit = Mask{1} << p;
    auto& layer = layers[t];
    auto relax = [&](Mask next, double cost, Mask parent) {
      if (std::popcount(next) > h) return;
      auto [it, inserted] = layer.try_emplace(next, Node{cost, parent});
      if (!inserted && (cost < it->second.cost ||
                        (cost == it->second.cost && parent < it->second.parent))) {
        it->second = {cost, parent};
      }
    };
    for (const auto& [prev, node] : layers[t - 1]) {
      const Mask evictable = prev & ~bit;
      // Fetch options: eviction model loads only p_t (loads are free, so
      // early loads never help); the fetching model may batch other pages of
      // B(p_t) into the same fetch.
      std::vector<std::pair<Mask, double>> loads;
      if (prev & bit) {
        loads.emplace_back(0, 0.0);
      } else if (model == CostModel::kEviction) {
        loads.emplace_back(bit, 0.0);
      } else {
        const BlockId b = blocks.block_of(p);
        const Mask pool = block_mask[b] & ~prev & ~bit;
        for (Mask g = pool;; g = (g - 1) & pool) {
          loads.emplace_back(bit | g, instance.costs[b]);
          if (g == 0) break;
        }
      }
      for (Mask e = evictable;; e = (e - 1) & evictable) {
        const double evict_cost =
            model == CostModel::kEviction ? block_cost(e) : 0.0;
        for (const auto& [load, load_cost] : loads) {
          relax((prev & ~e) | load, node.cost + evict_cost + load_cost, prev);
        }
        if (e == 0) break;
      }
    }
  }

  const auto& last = layers[instance.T()];
  Mask best = start;
  double best_cost = 0.0;
  bool found = instance.T() == 0;
  for (const auto& [mask, node] : last) {
    if (!found || node.cost < best_cost ||
        (node.cost == best_cost && mask < best)) {
      best = mask;
      best_cost = node.cost;
      found = true;
    }
  }
  std::vector<Mask> path(instance.T() + 1);
  path[instance.T()] = best;
  for (Time t = instance.T(); t >= 1; --t) {
    path[t - 1] = layers[t].at(path[t]).parent;
  }
  auto to_bools = [&](Mask m) {
    std::vector<bool> v(instance.n, false);
    for (PageId q = 0; q < instance.n; ++q) v[q] = (m >> q) & 1;
    return v;
  };
  TraceBuilder builder(instance, h, to_bools(start));
  for (Time t = 1; t <= instance.T(); ++t) builder.Step(to_bools(path[t]));
  return {best_cost, std::move(builder).Finish()};
}

BlockFlow EvictFlow(const Instance& instance,
                    const std::vector<std::vector<double>>& missing) {
  BlockFlow flow(missing.size(), std::vector<double>(instance.num_blocks()));
  for (std::size_t t = 1; t < missing.size(); ++t) {
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      for (PageId p : instance.blocks[b]) {
        flow[t][b] = std::max(flow[t][b], missing[t][p] - missing[t - 1][p]);
      }
    }
  }
  return flow;
}

BlockFlow FetchFlow(const Instance& instance,
                    const std::vector<std::vector<double>>& missing) {
  BlockFlow flow(missing.size(), std::vector<double>(instance.num_blocks()));
  for (std::size_t t = 1; t < missing.size(); ++t) {
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      for (PageId p : instance.blocks[b]) {
        flow[t][b] = std::max(flow[t][b], missing[t - 1][p] - missing[t][p]);
      }
    }
  }
  return flow;
}

FractionalTrajectory TrajectoryFromSolution(const FractionalSolution& phi,
                                            const RequestIndex& index) {
  const Instance& inst = index.instance();
  FractionalTrajectory z;
  z.missing.assign(inst.T() + 1, std::vector<double>(inst.n, 1.0));
  z.evict.assign(inst.T() + 1, std::vector<double>(inst.num_blocks(), 0.0));
  for (Time t = 1; t <= inst.T(); ++t) {
    for (PageId p = 0; p < inst.n; ++p) {
      z.missing[t][p] = XFromPhi(phi, index, p, t);
    }
  }
  for (const auto& [f, v] : phi.values()) {
    if (f.time >= 1 && f.time <= inst.T()) z.evict[f.time][f.block] = v;
  }
  return z;
}

FractionalTrajectory TrajectoryFromTrace(const Instance& instance,
                                         const PolicyTrace& trace) {
  FractionalTrajectory z;
  z.missing.assign(trace.steps.size() + 1,
                   std::vector<double>(instance.n, 1.0));
  for (PageId p : trace.start) z.missing[0][p] = 0.0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    for (PageId p : trace.steps[i].cache) z.missing[i + 1][p] = 0.0;
  }
  z.evict = EvictFlow(instance, z.missing);
  return z;
}

FractionalCosts ComputeFractionalCosts(const Instance& instance,
                                       const FractionalTrajectory& z) {
  FractionalCosts costs;
  const BlockFlow fetch = FetchFlow(instance, z.missing);
  for (std::size_t t = 1; t < z.missing.size(); ++t) {
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      costs.evict += instance.costs[b] * z.evict[t][b];
      costs.fetch += instance.costs[b] * fetch[t][b];
    }
  }
  return costs;
}

double FetchCostBound(const Instance& instance, const FractionalCosts& costs) {
  return instance.beta() * (costs.evict + instance.total_block_cost());
}

std::string NaiveLpViolation::Describe() const {
  const std::string at = "t=" + std::to_string(t) + ": ";
  switch (kind) {
    case Kind::kRange:
      return at + "value outside [0,1]" +
             (id >= 0 ? " for page " + std::to_string(id + 1) : "");
    case Kind::kRequestedMissing:
      return at + "requested page " + std::to_string(id + 1) +
             " has x = " + std::to_string(amount);
    case Kind::kFlow:
      return at + "block flow below change of page " + std::to_string(id + 1) +
             " by " + std::to_string(amount);
    case Kind::kCapacity:
      return at + "sum of x short of n - k by " + std::to_string(amount);
  }
  return at;
}

std::optional<NaiveLpViolation> NaiveLpCheck(
    const Instance& instance, const std::vector<std::vector<double>>& missing,
    const BlockFlow& phi, int sigma, double tolerance) {
  using Kind = NaiveLpViolation::Kind;
  const BlockMap blocks(instance);
  auto in_range = [&](double v) {
    return v >= -tolerance && v <= 1.0 + tolerance;
  };
  for (PageId p = 0; p < instance.n; ++p) {
    if (!in_range(missing[0][p])) return NaiveLpViolation{Kind::kRange, 0, p, 0};
  }
  for (Time t = 1; t <= instance.T(); ++t) {
    double total = 0.0;
    for (PageId p = 0; p < instance.n; ++p) {
      if (!in_range(missing[t][p])) {
        return NaiveLpViolation{Kind::kRange, t, p, missing[t][p]};
      }
      total += missing[t][p];
    }
    for (BlockId b = 0; b < instance.num_blocks(); ++b) {
      if (!in_range(phi[t][b])) return NaiveLpViolation{Kind::kRange, t, -1, 0};
    }
    const PageId req = instance.request(t);
    if (missing[t][req] > tolerance) {
      return NaiveLpViolation{Kind::kRequestedMissing, t, req, missing[t][req]};
    }
    for (PageId p = 0; p < instance.n; ++p) {
      const double need = sigma * (missing[t][p] - missing[t - 1][p]);
      const double have = phi[t][blocks.block_of(p)];
      if (have < need - tolerance) {
        return NaiveLpViolation{Kind::kFlow, t, p, need - have};
      }
    }
    const double short_by = (instance.n - instance.k) - total;
    if (short_by > tolerance) {
      return NaiveLpViolation{Kind::kCapacity, t, -1, short_by};
    }
  }
  return std::nullopt;
}

FractionalTrajectory GapFractionalSolution(int beta, int rounds) {
  if (beta < 2) throw InvalidInstance("gap solution needs beta >= 2");
  if (rounds < 0) throw InvalidInstance("rounds must be nonnegative");
  const int n = 2 * beta;
  const int T = n * rounds;
  FractionalTrajectory z;
  z.missing.assign(T + 1, std::vector<double>(n, 1.0));
  for (Time t = 1; t <= T; ++t) {
    const PageId requested = (t - 1) % n;
    const int hot = requested < beta ? 0 : 1;
    for (PageId p = 0; p < n; ++p) {
      z.missing[t][p] = (p < beta ? 0 : 1) == hot ? 0.0 : 1.0 / beta;
    }
  }
  Instance shape;
  shape.n = n;
  shape.blocks.assign(2, {});
  for (PageId p = 0; p < beta; ++p) {
    shape.blocks[0].push_back(p);
    shape.blocks[1].push_back(beta + p);
  }
  z.evict = EvictFlow(shape, z.missing);
  return z;
}

}  // namespace blockcache
