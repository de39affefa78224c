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

// Reference oracles for tests. Everything here is recomputed from the
// definitions, without the library's indices or solvers.

#ifndef BLOCKCACHE_TESTS_TESTING_UTIL_H_
#define BLOCKCACHE_TESTS_TESTING_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "blockcache/dual.h"
#include "blockcache/instance.h"

namespace blockcache::testing {

inline int BlockOf(const Instance& inst, PageId p) {
  for (int b = 0; b < inst.num_blocks(); ++b) {
    for (PageId q : inst.blocks[b]) {
      if (q == p) return b;
    }
  }
  return -1;
}

// Last request of p in [1, tau], or -1 for never.
inline Time LastRequest(const Instance& inst, PageId p, Time tau) {
  for (Time t = tau; t >= 1; --t) {
    if (inst.request(t) == p) return t;
  }
  return -1;
}

// Number of pages p with a flush (B(p), t) in s, r(p,tau) < t <= tau.
inline int NaiveMissing(const Instance& inst, const std::vector<Flush>& s,
                        Time tau) {
  int missing = 0;
  for (PageId p = 0; p < inst.n; ++p) {
    const Time r = LastRequest(inst, p, tau);
    const int b = BlockOf(inst, p);
    for (const Flush& f : s) {
      if (f.block == b && f.time <= tau && (r < 0 || r < f.time)) {
        ++missing;
        break;
      }
    }
  }
  return missing;
}

inline int NaiveCover(const Instance& inst, const std::vector<Flush>& s,
                      Time tau) {
  return std::min(inst.n - inst.k, NaiveMissing(inst, s, tau));
}

// Cheapest flush set over {(B,t): t >= 1} that, together with the free
// time-0 flushes, keeps at least n - k pages missing at every step.
inline double BruteForceOptEvict(const Instance& inst) {
  std::vector<Flush> universe;
  for (int b = 0; b < inst.num_blocks(); ++b) {
    for (Time t = 1; t <= inst.T(); ++t) universe.push_back({b, t});
  }
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << universe.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<Flush> s;
    double cost = 0.0;
    for (int b = 0; b < inst.num_blocks(); ++b) s.push_back({b, 0});
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (mask >> i & 1) {
        s.push_back(universe[i]);
        cost += inst.costs[universe[i].block];
      }
    }
    if (cost >= best) continue;
    bool feasible = true;
    for (Time tau = 1; tau <= inst.T() && feasible; ++tau) {
      feasible = NaiveMissing(inst, s, tau) >= inst.n - inst.k;
    }
    if (feasible) best = cost;
  }
  return best;
}

// Calls fn(parts) for every set partition of {0..n-1} into at most
// max_parts blocks of size at most max_size, blocks in first-element order.
inline void ForEachPartition(
    int n, int max_parts, int max_size,
    const std::function<void(const std::vector<std::vector<PageId>>&)>& fn) {
  std::vector<std::vector<PageId>> parts;
  std::function<void(PageId)> rec = [&](PageId p) {
    if (p == n) {
      fn(parts);
      return;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (static_cast<int>(parts[i].size()) < max_size) {
        parts[i].push_back(p);
        rec(p + 1);
        parts[i].pop_back();
      }
    }
    if (static_cast<int>(parts.size()) < max_parts) {
      parts.push_back({p});
      rec(p + 1);
      parts.pop_back();
    }
  };
  rec(0);
}

// Calls fn(requests, distinct) for every request string of length T in
// first-appearance canonical form.
inline void ForEachRequestString(
    int T, int max_pages,
    const std::function<void(const std::vector<PageId>&, int)>& fn) {
  std::vector<PageId> seq;
  std::function<void(int)> rec = [&](int distinct) {
    if (static_cast<int>(seq.size()) == T) {
      fn(seq, distinct);
      return;
    }
    for (PageId p = 0; p <= std::min(distinct, max_pages - 1); ++p) {
      seq.push_back(p);
      rec(std::max(distinct, p + 1));
      seq.pop_back();
    }
  };
  rec(0);
}

// Every unit-cost instance with n <= max_n pages (all requested, plus at
// most one page never requested), k <= max_k, at most max_blocks blocks and
// T <= max_T, up to relabeling of pages.
inline void ForEachSmallInstance(int max_n, int max_k, int max_blocks,
                                 int max_T,
                                 const std::function<void(const Instance&)>& fn) {
  for (int T = 1; T <= max_T; ++T) {
    ForEachRequestString(T, max_n, [&](const std::vector<PageId>& req,
                                       int distinct) {
      for (int n = distinct; n <= std::min(max_n, distinct + 1); ++n) {
        for (int k = 1; k <= std::min(max_k, n); ++k) {
          ForEachPartition(n, max_blocks, k, [&](const auto& parts) {
            Instance inst;
            inst.n = n;
            inst.k = k;
            inst.blocks = parts;
            inst.costs.assign(parts.size(), 1.0);
            inst.requests = req;
            fn(inst);
          });
        }
      }
    });
  }
}

// phi of `flush` obtained by integrating
// d phi / dy = ln(k beta + 1) / c * rate * (phi + 1 / (k beta))
// with classical RK4 over every dual record that raised it.
inline double IntegratePhi(const DualLedger& ledger, Flush flush, double cost,
                           int k, int beta, double step) {
  const double kb = static_cast<double>(k) * beta;
  const double eta = std::log1p(kb) / cost;
  double phi = 0.0;
  for (const DualRecord& r : ledger.records()) {
    int rate = 0;
    for (const auto& [f, q] : r.rates) {
      if (f == flush) rate = q;
    }
    if (rate == 0 || r.y <= 0.0) continue;
    auto deriv = [&](double z) { return eta * rate * (z + 1.0 / kb); };
    const long steps = std::max<long>(1, std::lround(std::ceil(r.y / step)));
    const double h = r.y / steps;
    for (long i = 0; i < steps; ++i) {
      const double k1 = deriv(phi);
      const double k2 = deriv(phi + 0.5 * h * k1);
      const double k3 = deriv(phi + 0.5 * h * k2);
      const double k4 = deriv(phi + h * k3);
      phi += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return phi;
}

inline Instance SmallRandomInstance(std::mt19937_64& rng, int max_n,
                                    int max_T) {
  RandomInstanceParams p;
  p.n = std::uniform_int_distribution<int>(2, max_n)(rng);
  p.k = std::uniform_int_distribution<int>(1, p.n - 1)(rng);
  p.beta = std::uniform_int_distribution<int>(1, std::min(p.k, 3))(rng);
  p.T = std::uniform_int_distribution<int>(1, max_T)(rng);
  p.seed = rng();
  return GenRandom(p);
}

}  // namespace blockcache::testing

#endif  // BLOCKCACHE_TESTS_TESTING_UTIL_H_
