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

#include "blockcache/submodular.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace blockcache {

FlushSet FlushSet::WithTimeZero(int num_blocks) {
  FlushSet s(num_blocks);
  for (BlockId b = 0; b < num_blocks; ++b) s.Insert({b, 0});
  return s;
}

bool FlushSet::Insert(Flush f) {
  auto& times = times_[f.block];
  auto it = std::lower_bound(times.begin(), times.end(), f.time);
  if (it != times.end() && *it == f.time) return false;
  times.insert(it, f.time);
  order_.push_back(f);
  return true;
}

bool FlushSet::contains(Flush f) const {
  const auto& times = times_[f.block];
  return std::binary_search(times.begin(), times.end(), f.time);
}

FlushSet FlushSet::Prefix(std::size_t snapshot) const {
  FlushSet s(static_cast<int>(times_.size()));
  for (std::size_t i = 0; i < snapshot && i < order_.size(); ++i) {
    s.Insert(order_[i]);
  }
  return s;
}

bool FlushSet::CoversWindow(BlockId block, std::optional<Time> lo,
                            Time hi) const {
  const auto& times = times_[block];
  auto it = lo ? std::upper_bound(times.begin(), times.end(), *lo)
               : times.begin();
  return it != times.end() && *it <= hi;
}

bool CoverFunction::IsMissing(const FlushSet& s, PageId p, Time tau) const {
  return s.CoversWindow(index_->block_of(p), index_->last_request(p, tau),
                        tau);
}

int CoverFunction::MissingCount(const FlushSet& s, Time tau) const {
  int count = 0;
  for (PageId p = 0; p < index_->instance().n; ++p) {
    if (IsMissing(s, p, tau)) ++count;
  }
  return count;
}

int CoverFunction::cap() const {
  return index_->instance().n - index_->instance().k;
}

int CoverFunction::Value(const FlushSet& s, Time tau) const {
  return std::min(cap(), MissingCount(s, tau));
}

int CoverFunction::Marginal(const FlushSet& s, Flush v, Time tau) const {
  return CoverView(*this, s, tau).Marginal(v);
}

CoverView::CoverView(const CoverFunction& f, const FlushSet& s, Time tau)
    : index_(&f.index()),
      tau_(tau),
      cap_(f.cap()),
      missing_(f.index().instance().n, false) {
  for (PageId p = 0; p < static_cast<PageId>(missing_.size()); ++p) {
    if (f.IsMissing(s, p, tau)) {
      missing_[p] = true;
      ++missing_count_;
    }
  }
}

int CoverView::Marginal(Flush v) const {
  if (v.time > tau_) return 0;
  int extra = 0;
  for (PageId p : index_->instance().blocks[v.block]) {
    if (missing_[p]) continue;
    const auto r = index_->last_request(p, tau_);
    if (!r || *r < v.time) ++extra;
  }
  return std::min(cap_, missing_count_ + extra) - value();
}

FractionalSolution FractionalSolution::Initial(int num_blocks) {
  FractionalSolution phi;
  phi.integral_ = FlushSet::WithTimeZero(num_blocks);
  for (BlockId b = 0; b < num_blocks; ++b) phi.values_[{b, 0}] = 1.0;
  return phi;
}

FractionalSolution FractionalSolution::Replay(int num_blocks,
                                             std::span<const Increment> log,
                                             Time up_to) {
  FractionalSolution phi = Initial(num_blocks);
  for (const Increment& inc : log) {
    if (inc.tau > up_to) continue;
    phi.values_[inc.flush] = inc.phi_after;
    phi.log_.push_back(inc);
    if (inc.phi_after == 1.0) phi.integral_.Insert(inc.flush);
  }
  return phi;
}

double FractionalSolution::value(Flush f) const {
  auto it = values_.find(f);
  return it == values_.end() ? 0.0 : it->second;
}

void FractionalSolution::Increase(Time tau, Flush f, double delta) {
  if (!(delta > 0.0)) return;
  double& v = values_[f];
  double after = v + delta;
  assert(after <= 1.0 + 1e-9);
  if (after >= 1.0 - 1e-12) after = 1.0;
  log_.push_back({tau, f, after - v, after});
  v = after;
  if (after == 1.0) integral_.Insert(f);
}

void FractionalSolution::RaiseToOne(Time tau, Flush f) {
  double& v = values_[f];
  if (v < 1.0) {
    log_.push_back({tau, f, 1.0 - v, 1.0});
    v = 1.0;
  }
  integral_.Insert(f);
}

double FractionalSolution::WindowMass(BlockId block, std::optional<Time> lo,
                                      Time hi) const {
  auto it = values_.lower_bound({block, lo ? *lo + 1 : 0});
  double mass = 0.0;
  for (; it != values_.end() && it->first.block == block &&
         it->first.time <= hi;
       ++it) {
    mass += it->second;
  }
  return mass;
}

double FractionalSolution::Cost(const Instance& instance) const {
  double cost = 0.0;
  for (const auto& [f, v] : values_) {
    if (f.time >= 1) cost += instance.costs[f.block] * v;
  }
  return cost;
}

double ConstraintSlack(const CoverFunction& f, const FractionalSolution& phi,
                       const FlushSet& s, Time tau) {
  const CoverView view(f, s, tau);
  if (view.demand() == 0) return 0.0;
  double lhs = 0.0;
  for (const auto& [flush, v] : phi.values()) {
    if (v > 0.0 && flush.time <= tau) lhs += view.Marginal(flush) * v;
  }
  return lhs - view.demand();
}

FeasibilityResult CheckFeasible(const CoverFunction& f,
                                const FractionalSolution& phi, Time tau,
                                double tolerance) {
  FeasibilityResult result;
  result.slack = ConstraintSlack(f, phi, phi.integral(), tau);
  if (result.slack < -tolerance) {
    result.feasible = false;
    result.violated = phi.integral();
  }
  return result;
}

std::optional<FlushSet> ExhaustiveCheck(const CoverFunction& f,
                                        const FractionalSolution& phi,
                                        Time tau, int max_universe,
                                        double tolerance) {
  const int num_blocks = f.index().instance().num_blocks();
  std::vector<Flush> universe;
  for (BlockId b = 0; b < num_blocks; ++b) {
    for (Time t = 0; t <= tau; ++t) universe.push_back({b, t});
  }
  if (static_cast<int>(universe.size()) > max_universe) {
    throw std::invalid_argument("exhaustive check universe too large");
  }
  const std::uint64_t subsets = std::uint64_t{1} << universe.size();
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    FlushSet s(num_blocks);
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (mask >> i & 1) s.Insert(universe[i]);
    }
    if (ConstraintSlack(f, phi, s, tau) < -tolerance) return s;
  }
  return std::nullopt;
}

double XFromPhi(const FractionalSolution& phi, const RequestIndex& index,
                PageId p, Time t) {
  const auto r = index.last_request(p, t);
  if (!r) return 1.0;
  return std::min(1.0, phi.WindowMass(index.block_of(p), r, t));
}

}  // namespace blockcache
