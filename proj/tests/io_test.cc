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

#include <fstream>
#include <sstream>

#include "blockcache/det_online.h"
#include "blockcache/frac_online.h"
#include "gtest/gtest.h"

namespace blockcache {
namespace {

Instance Sample() {
  Instance inst;
  inst.n = 5;
  inst.k = 2;
  inst.blocks = {{0, 1}, {2}, {3, 4}};
  inst.costs = {1.0, 0.1, 2.5};
  inst.requests = {0, 2, 3, 1, 4};
  inst.initial_cache = {4};
  return inst;
}

TEST(Round12Test, TwelveSignificantDigits) {
  EXPECT_EQ(FormatDouble(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(FormatDouble(2.0), "2");
  EXPECT_EQ(Round12(0.1 + 0.2), 0.3);
  EXPECT_EQ(FormatDouble(123456789.123456789), "123456789.123");
}

TEST(InstanceJsonTest, RoundTripIsOneBased) {
  const Instance inst = Sample();
  const Json doc = InstanceToJson(inst);
  EXPECT_EQ(doc["version"], 1);
  EXPECT_EQ(doc["blocks"][0], Json::array({1, 2}));
  EXPECT_EQ(doc["requests"][0], 1);
  EXPECT_EQ(doc["initial_cache"], Json::array({5}));
  const Instance back = InstanceFromJson(doc);
  EXPECT_EQ(back.blocks, inst.blocks);
  EXPECT_EQ(back.costs, inst.costs);
  EXPECT_EQ(back.requests, inst.requests);
  EXPECT_EQ(back.initial_cache, inst.initial_cache);
  EXPECT_EQ(InstanceToJson(back).dump(), doc.dump());
}

TEST(InstanceJsonTest, InitialCacheOptional) {
  Json doc = InstanceToJson(Sample());
  doc.erase("initial_cache");
  EXPECT_TRUE(InstanceFromJson(doc).initial_cache.empty());
}

TEST(InstanceJsonTest, RejectsMalformedDocuments) {
  Json doc = InstanceToJson(Sample());
  Json bad = doc;
  bad["version"] = 2;
  EXPECT_THROW(InstanceFromJson(bad), FormatError);
  bad = doc;
  bad.erase("k");
  EXPECT_THROW(InstanceFromJson(bad), FormatError);
  bad = doc;
  bad["n"] = "five";
  EXPECT_THROW(InstanceFromJson(bad), FormatError);
  bad = doc;
  bad["requests"] = Json::array({1, 9});
  EXPECT_THROW(InstanceFromJson(bad), InvalidInstance);
  bad = doc;
  bad["requests"] = Json::array({0});
  EXPECT_THROW(InstanceFromJson(bad), InvalidInstance);
}

TEST(TraceIoTest, RoundTrip) {
  const Instance inst = Sample();
  const DeterministicRun run = RunDeterministic(inst);
  std::stringstream ss;
  WriteTrace(ss, run.trace);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            R"({"t":0,"flushes":[],"fetched":[],"cache":[],)"
            R"("evict_cost_cum":0.0,"fetch_cost_cum":0.0})");
  const PolicyTrace back = ReadTrace(ss, inst.k);
  EXPECT_EQ(back.start, run.trace.start);
  ASSERT_EQ(back.steps.size(), run.trace.steps.size());
  for (std::size_t i = 0; i < back.steps.size(); ++i) {
    EXPECT_EQ(back.steps[i].t, run.trace.steps[i].t);
    EXPECT_EQ(back.steps[i].cache, run.trace.steps[i].cache);
    EXPECT_EQ(back.steps[i].fetched, run.trace.steps[i].fetched);
    EXPECT_EQ(back.steps[i].flushes, run.trace.steps[i].flushes);
  }
  EXPECT_FALSE(VerifyTrace(inst, back).has_value());
  std::stringstream again;
  WriteTrace(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(TraceIoTest, RejectsMalformedTraces) {
  std::stringstream empty;
  EXPECT_THROW(ReadTrace(empty, 2), FormatError);
  std::stringstream no_start(
      R"({"t":1,"flushes":[],"fetched":[1],"cache":[1],"evict_cost_cum":0,"fetch_cost_cum":1})");
  EXPECT_THROW(ReadTrace(no_start, 2), FormatError);
  std::stringstream garbage("{not json\n");
  EXPECT_THROW(ReadTrace(garbage, 2), FormatError);
  std::stringstream bad_flush(
      R"({"t":0,"flushes":[[1]],"fetched":[],"cache":[],"evict_cost_cum":0,"fetch_cost_cum":0})");
  EXPECT_THROW(ReadTrace(bad_flush, 2), FormatError);
}

TEST(IncrementIoTest, RoundTripRoundsTo12Digits) {
  const Instance inst = Sample();
  const FractionalRun run = RunFractional(inst);
  std::stringstream ss;
  WriteIncrements(ss, run.phi.increments());
  const std::vector<Increment> back = ReadIncrements(ss);
  ASSERT_EQ(back.size(), run.phi.increments().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const Increment& a = run.phi.increments()[i];
    EXPECT_EQ(back[i].tau, a.tau);
    EXPECT_EQ(back[i].flush, a.flush);
    EXPECT_EQ(back[i].delta, Round12(a.delta));
    EXPECT_NEAR(back[i].phi_after, a.phi_after, 1e-11);
  }
  std::stringstream one;
  WriteIncrements(one, {{3, {1, 2}, 1.0 / 3.0, 0.5}});
  EXPECT_EQ(one.str(),
            "{\"tau\":3,\"block\":2,\"t\":2,\"delta\":0.333333333333,"
            "\"phi_after\":0.5}\n");
  std::stringstream bad("{\"tau\":1}\n");
  EXPECT_THROW(ReadIncrements(bad), FormatError);
}

TEST(CertificateJsonTest, Fields) {
  const Instance inst = Sample();
  const FractionalRun run = RunFractional(inst);
  const Json doc = DualCertificateToJson(run.ledger, run.phi.Cost(inst));
  EXPECT_EQ(doc["primal_cost"], Round12(run.phi.Cost(inst)));
  EXPECT_EQ(doc["dual_objective"], Round12(run.ledger.objective()));
  EXPECT_EQ(doc["records"].size(), run.ledger.records().size());
  for (const auto& m : doc["masses"]) {
    EXPECT_GE(m[0].get<int>(), 1);
    EXPECT_LE(m[0].get<int>(), inst.num_blocks());
  }
}

TEST(MonteCarloJsonTest, Fields) {
  MonteCarloSummary s;
  s.seeds = {1, 2};
  s.mean_cost = 2.0 / 3.0;
  s.gamma = 1.5;
  const Json doc = MonteCarloToJson(s);
  EXPECT_EQ(doc.dump(),
            R"({"seeds":[1,2],"mean_cost":0.666666666667,"stderr":0.0,)"
            R"("gamma":1.5,"c_structured":0.0,"bound_rhs":0.0})");
}

TEST(FileIoTest, MissingAndMalformedFiles) {
  EXPECT_THROW(ReadJsonFile("/nonexistent/x.json"), FormatError);
  const std::string path = ::testing::TempDir() + "/bad.json";
  {
    std::ofstream out(path);
    out << "{\"version\": 1,";
  }
  EXPECT_THROW(LoadInstance(path), FormatError);
  const std::string good = ::testing::TempDir() + "/good.json";
  SaveInstance(good, Sample());
  EXPECT_EQ(LoadInstance(good).requests, Sample().requests);
}

}  // namespace
}  // namespace blockcache
