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

#ifndef BLOCKCACHE_ORACLE_H_
#define BLOCKCACHE_ORACLE_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockcache/instance.h"
#include "blockcache/submodular.h"
#include "blockcache/trace.h"

namespace blockcache {

enum class CostModel { kEviction, kFetching };

class IntractableInstance : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct OptResult {
  double cost = 0.0;
  PolicyTrace witness;
};

// Exact offline optimum by dynamic programming over cache contents, starting
// from the instance's initial cache with an offline cache of size h (h <= 0
// means k). Every eviction (resp. fetch) at steps >= 1 is charged.
// Requires C(n, h) * T <= 1e6 and n <= 62.
OptResult OptimalOffline(const Instance& instance, CostModel model, int h = 0);
inline OptResult OptEviction(const Instance& instance, int h = 0) {
  return OptimalOffline(instance, CostModel::kEviction, h);
}
inline OptResult OptFetching(const Instance& instance, int h = 0) {
  return OptimalOffline(instance, CostModel::kFetching, h);
}

// Per-page missing fractions x_p^t for t in [0, T] and per-block eviction
// flow phi_B^t (row 0 unused). Row t of `missing` has n entries.
struct FractionalTrajectory {
  std::vector<std::vector<double>> missing;
  std::vector<std::vector<double>> evict;
};

using BlockFlow = std::vector<std::vector<double>>;

// Per step and block: max over pages of the increase (eviction) or the
// decrease (fetching) of x_p.
BlockFlow EvictFlow(const Instance& instance,
                    const std::vector<std::vector<double>>& missing);
BlockFlow FetchFlow(const Instance& instance,
                    const std::vector<std::vector<double>>& missing);

// x from phi via XFromPhi, with every page missing at time 0.
FractionalTrajectory TrajectoryFromSolution(const FractionalSolution& phi,
                                            const RequestIndex& index);
// 0/1 trajectory of an integral policy.
FractionalTrajectory TrajectoryFromTrace(const Instance& instance,
                                         const PolicyTrace& trace);

struct FractionalCosts {
  double evict = 0.0;  // sum c_B phi_B^t
  double fetch = 0.0;  // sum c_B * block fetch flow
};

FractionalCosts ComputeFractionalCosts(const Instance& instance,
                                       const FractionalTrajectory& z);

// beta * (c_evict + sum_B c_B): the bound on fractional fetching cost in
// terms of eviction cost.
double FetchCostBound(const Instance& instance, const FractionalCosts& costs);

struct NaiveLpViolation {
  enum class Kind { kRange, kRequestedMissing, kFlow, kCapacity };
  Kind kind = Kind::kRange;
  Time t = 0;
  int id = -1;  // page for kRange/kRequestedMissing/kFlow, -1 otherwise
  double amount = 0.0;

  std::string Describe() const;
};

// Checks the per-page LP: x_{p_t}^t = 0, phi_B^t >= sigma (x_p^t - x_p^{t-1})
// for p in B, sum_p x_p^t >= n - k, and all values in [0, 1]. sigma = +1 for
// the eviction model, -1 for fetching. Returns the first violation.
std::optional<NaiveLpViolation> NaiveLpCheck(
    const Instance& instance, const std::vector<std::vector<double>>& missing,
    const BlockFlow& phi, int sigma, double tolerance = 1e-9);

// Fractional solution on the integrality-gap family: both blocks held to
// extent (beta-1)/beta, with the block being requested held fully.
FractionalTrajectory GapFractionalSolution(int beta, int rounds);

}  // namespace blockcache

#endif  // BLOCKCACHE_ORACLE_H_
