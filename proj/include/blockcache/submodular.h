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

#ifndef BLOCKCACHE_SUBMODULAR_H_
#define BLOCKCACHE_SUBMODULAR_H_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "blockcache/instance.h"

namespace blockcache {

inline constexpr double kFeasibilityTolerance = 1e-9;

// A monotone set of flushes. Every block keeps its flush times sorted so that
// "is there a flush of B in (lo, hi]" is a binary search. Insertion order is
// kept so a snapshot of the set is just a prefix length.
class FlushSet {
 public:
  FlushSet() = default;
  explicit FlushSet(int num_blocks) : times_(num_blocks) {}

  // The set {(B, 0) : B} that clears the cache for free.
  static FlushSet WithTimeZero(int num_blocks);

  bool Insert(Flush f);
  bool contains(Flush f) const;
  std::size_t size() const { return order_.size(); }
  const std::vector<Flush>& insertion_order() const { return order_; }

  // Snapshot handle: the set as it was when size() == snapshot.
  std::size_t Snapshot() const { return order_.size(); }
  FlushSet Prefix(std::size_t snapshot) const;

  // True iff some (block, t) in the set has lo < t <= hi; an empty `lo`
  // means minus infinity.
  bool CoversWindow(BlockId block, std::optional<Time> lo, Time hi) const;

 private:
  std::vector<std::vector<Time>> times_;
  std::vector<Flush> order_;
};

// f_tau(S) = min(n - k, #pages missing at tau under S), bound to one instance.
class CoverFunction {
 public:
  explicit CoverFunction(const RequestIndex& index) : index_(&index) {}

  bool IsMissing(const FlushSet& s, PageId p, Time tau) const;
  int MissingCount(const FlushSet& s, Time tau) const;
  int Value(const FlushSet& s, Time tau) const;
  // f_tau(S + v) - f_tau(S).
  int Marginal(const FlushSet& s, Flush v, Time tau) const;
  int cap() const;

  const RequestIndex& index() const { return *index_; }

 private:
  const RequestIndex* index_;
};

// Missing-page state of one (S, tau) pair, for repeated marginal queries.
class CoverView {
 public:
  CoverView(const CoverFunction& f, const FlushSet& s, Time tau);

  int value() const { return std::min(cap_, missing_count_); }
  // n - k - f_tau(S), the right-hand side of the constraint (S, tau).
  int demand() const { return cap_ - value(); }
  int Marginal(Flush v) const;

 private:
  const RequestIndex* index_;
  Time tau_;
  int cap_;
  std::vector<bool> missing_;
  int missing_count_ = 0;
};

struct Increment {
  Time tau = 0;  // step at which the increase was applied
  Flush flush;
  double delta = 0.0;
  double phi_after = 0.0;
};

// Sparse primal vector phi over flushes with its append-only increment log.
// Values never decrease; the integral set holds the flushes at exactly 1.
class FractionalSolution {
 public:
  FractionalSolution() = default;
  // Time-0 flushes at value 1 and in the integral set; nothing logged.
  static FractionalSolution Initial(int num_blocks);
  // Rebuilds a solution from an increment log, keeping entries applied at
  // steps <= up_to. Values are restored from phi_after, so replay is exact.
  static FractionalSolution Replay(int num_blocks,
                                   std::span<const Increment> log,
                                   Time up_to);

  double value(Flush f) const;
  // Adds delta > 0 at step tau. Values within 1e-12 of 1 snap to 1.
  void Increase(Time tau, Flush f, double delta);
  // Raises f to exactly 1 at step tau (no-op when already 1).
  void RaiseToOne(Time tau, Flush f);

  // Sum of phi_B^u over lo < u <= hi (lo empty: all u <= hi).
  double WindowMass(BlockId block, std::optional<Time> lo, Time hi) const;
  // Sum over t >= 1 of c_B phi_B^t.
  double Cost(const Instance& instance) const;

  const std::map<Flush, double>& values() const { return values_; }
  const std::vector<Increment>& increments() const { return log_; }
  const FlushSet& integral() const { return integral_; }

 private:
  std::map<Flush, double> values_;
  std::vector<Increment> log_;
  FlushSet integral_;
};

// sum_{(B,t)} f_tau((B,t)|S) phi_B^t - (n - k - f_tau(S)); negative means the
// constraint (S, tau) is violated.
double ConstraintSlack(const CoverFunction& f, const FractionalSolution& phi,
                       const FlushSet& s, Time tau);

struct FeasibilityResult {
  bool feasible = true;
  double slack = 0.0;
  // The maximal-integral set when the check failed.
  std::optional<FlushSet> violated;
};

// Checks the maximal-integral constraint S = {(B,t) : phi_B^t = 1} at tau.
FeasibilityResult CheckFeasible(const CoverFunction& f,
                                const FractionalSolution& phi, Time tau,
                                double tolerance = kFeasibilityTolerance);

// Enumerates every S over flushes with time <= tau and returns a violated
// one, if any. Exponential: refuses universes over `max_universe` flushes.
std::optional<FlushSet> ExhaustiveCheck(const CoverFunction& f,
                                        const FractionalSolution& phi,
                                        Time tau, int max_universe = 20,
                                        double tolerance =
                                            kFeasibilityTolerance);

// Fractional amount by which page p is missing at t:
// 1 if never requested, else min(1, sum_{u = r(p,t)+1}^{t} phi_{B(p)}^u).
double XFromPhi(const FractionalSolution& phi, const RequestIndex& index,
                PageId p, Time t);

}  // namespace blockcache

#endif  // BLOCKCACHE_SUBMODULAR_H_
