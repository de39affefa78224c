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

// File formats. Page and block ids are 1-based on disk and 0-based in
// memory; floats are written with 12 significant digits.

#ifndef BLOCKCACHE_IO_H_
#define BLOCKCACHE_IO_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockcache/dual.h"
#include "blockcache/instance.h"
#include "blockcache/rounding.h"
#include "blockcache/submodular.h"
#include "blockcache/trace.h"
#include "json.hpp"

namespace blockcache {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rounds to 12 significant digits so the shortest round-trip form is short.
double Round12(double x);
std::string FormatDouble(double x);

Json InstanceToJson(const Instance& instance);
// Throws FormatError on malformed documents and InvalidInstance when the
// decoded instance fails validation.
Instance InstanceFromJson(const Json& doc);

// Traces are JSON lines. A leading t = 0 record holds the starting cache.
void WriteTrace(std::ostream& out, const PolicyTrace& trace);
PolicyTrace ReadTrace(std::istream& in, int capacity);

void WriteIncrements(std::ostream& out, const std::vector<Increment>& log);
std::vector<Increment> ReadIncrements(std::istream& in);

Json DualCertificateToJson(const DualLedger& ledger, double primal_cost);

Json MonteCarloToJson(const MonteCarloSummary& summary);

Json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const Json& doc);
Instance LoadInstance(const std::string& path);
void SaveInstance(const std::string& path, const Instance& instance);

}  // namespace blockcache

#endif  // BLOCKCACHE_IO_H_
