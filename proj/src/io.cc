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

#include "blockcache/io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

namespace blockcache {
namespace {

template <typename T>
T Field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw FormatError(std::string("missing field '") + name + "'");
  }
  try {
    return doc.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field '") + name + "' has the wrong type");
  }
}

std::vector<int> OneBased(const std::vector<int>& ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(id + 1);
  return out;
}

std::vector<int> ZeroBased(const std::vector<int>& ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(id - 1);
  return out;
}

Json Parse(const std::string& line, std::size_t number) {
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("line " + std::to_string(number) + ": " + e.what());
  }
}

}  // namespace

double Round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

Json InstanceToJson(const Instance& instance) {
  Json doc;
  doc["version"] = 1;
  doc["n"] = instance.n;
  doc["k"] = instance.k;
  Json blocks = Json::array();
  for (const auto& b : instance.blocks) blocks.push_back(OneBased(b));
  doc["blocks"] = std::move(blocks);
  Json costs = Json::array();
  for (double c : instance.costs) costs.push_back(Round12(c));
  doc["costs"] = std::move(costs);
  doc["requests"] = OneBased(instance.requests);
  doc["initial_cache"] = OneBased(instance.initial_cache);
  return doc;
}

Instance InstanceFromJson(const Json& doc) {
  if (Field<int>(doc, "version") != 1) {
    throw FormatError("unsupported instance version");
  }
  Instance inst;
  inst.n = Field<int>(doc, "n");
  inst.k = Field<int>(doc, "k");
  for (const auto& b : Field<std::vector<std::vector<int>>>(doc, "blocks")) {
    inst.blocks.push_back(ZeroBased(b));
  }
  inst.costs = Field<std::vector<double>>(doc, "costs");
  inst.requests = ZeroBased(Field<std::vector<int>>(doc, "requests"));
  inst.initial_cache =
      doc.contains("initial_cache")
          ? ZeroBased(Field<std::vector<int>>(doc, "initial_cache"))
          : std::vector<int>{};
  inst.Validate();
  return inst;
}

void WriteTrace(std::ostream& out, const PolicyTrace& trace) {
  Json head;
  head["t"] = 0;
  head["flushes"] = Json::array();
  head["fetched"] = Json::array();
  head["cache"] = OneBased(trace.start);
  head["evict_cost_cum"] = 0.0;
  head["fetch_cost_cum"] = 0.0;
  out << head.dump() << '\n';
  for (const TraceStep& step : trace.steps) {
    Json rec;
    rec["t"] = step.t;
    Json flushes = Json::array();
    for (const Flush& f : step.flushes) {
      flushes.push_back({f.block + 1, f.time});
    }
    rec["flushes"] = std::move(flushes);
    rec["fetched"] = OneBased(step.fetched);
    rec["cache"] = OneBased(step.cache);
    rec["evict_cost_cum"] = Round12(step.evict_cost_cum);
    rec["fetch_cost_cum"] = Round12(step.fetch_cost_cum);
    out << rec.dump() << '\n';
  }
}

PolicyTrace ReadTrace(std::istream& in, int capacity) {
  PolicyTrace trace;
  trace.capacity = capacity;
  std::string line;
  std::size_t number = 0;
  bool have_start = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const Json rec = Parse(line, number);
    TraceStep step;
    step.t = Field<int>(rec, "t");
    for (const auto& f : Field<std::vector<std::vector<int>>>(rec, "flushes")) {
      if (f.size() != 2) throw FormatError("flush must be [block, t]");
      step.flushes.push_back({f[0] - 1, f[1]});
    }
    step.fetched = ZeroBased(Field<std::vector<int>>(rec, "fetched"));
    step.cache = ZeroBased(Field<std::vector<int>>(rec, "cache"));
    std::sort(step.cache.begin(), step.cache.end());
    step.evict_cost_cum = Field<double>(rec, "evict_cost_cum");
    step.fetch_cost_cum = Field<double>(rec, "fetch_cost_cum");
    if (!have_start) {
      if (step.t != 0) throw FormatError("trace must start with a t = 0 record");
      trace.start = std::move(step.cache);
      have_start = true;
      continue;
    }
    trace.steps.push_back(std::move(step));
  }
  if (!have_start) throw FormatError("empty trace");
  return trace;
}

void WriteIncrements(std::ostream& out, const std::vector<Increment>& log) {
  for (const Increment& inc : log) {
    Json rec;
    rec["tau"] = inc.tau;
    rec["block"] = inc.flush.block + 1;
    rec["t"] = inc.flush.time;
    rec["delta"] = Round12(inc.delta);
    rec["phi_after"] = Round12(inc.phi_after);
    out << rec.dump() << '\n';
  }
}

std::vector<Increment> ReadIncrements(std::istream& in) {
  std::vector<Increment> log;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const Json rec = Parse(line, number);
    Increment inc;
    inc.tau = Field<int>(rec, "tau");
    inc.flush = {Field<int>(rec, "block") - 1, Field<int>(rec, "t")};
    inc.delta = Field<double>(rec, "delta");
    inc.phi_after = Field<double>(rec, "phi_after");
    log.push_back(inc);
  }
  return log;
}

Json DualCertificateToJson(const DualLedger& ledger, double primal_cost) {
  Json doc;
  doc["primal_cost"] = Round12(primal_cost);
  doc["dual_objective"] = Round12(ledger.objective());
  Json records = Json::array();
  for (const DualRecord& r : ledger.records()) {
    Json rec;
    rec["tau"] = r.tau;
    rec["snapshot"] = r.snapshot;
    rec["y"] = Round12(r.y);
    rec["coefficient"] = r.coefficient;
    Json rates = Json::array();
    for (const auto& [f, rate] : r.rates) {
      rates.push_back({f.block + 1, f.time, rate});
    }
    rec["rates"] = std::move(rates);
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  Json masses = Json::array();
  for (const auto& [f, a] : ledger.masses()) {
    masses.push_back({f.block + 1, f.time, Round12(a)});
  }
  doc["masses"] = std::move(masses);
  return doc;
}

Json MonteCarloToJson(const MonteCarloSummary& summary) {
  Json doc;
  doc["seeds"] = summary.seeds;
  doc["mean_cost"] = Round12(summary.mean_cost);
  doc["stderr"] = Round12(summary.stderr_cost);
  doc["gamma"] = Round12(summary.gamma);
  doc["c_structured"] = Round12(summary.c_structured);
  doc["bound_rhs"] = Round12(summary.bound_rhs);
  return doc;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

Instance LoadInstance(const std::string& path) {
  return InstanceFromJson(ReadJsonFile(path));
}

void SaveInstance(const std::string& path, const Instance& instance) {
  WriteJsonFile(path, InstanceToJson(instance));
}

}  // namespace blockcache
