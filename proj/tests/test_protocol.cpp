// tests/test_protocol.cpp

// Copyright 2026 The IRS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <numeric>

#include <doctest.h>
#include <json.hpp>

#include "irs/protocol.hpp"

using namespace irs;

namespace {

ProtocolConfig synthetic_config(ProtocolMode mode) {
  ProtocolConfig c;
  c.mode = mode;
  c.synthetic = {.num_ids = 40, .dim = 16, .view_shift_scale = 0.5, .noise_scale = 0.3, .seed = 1};
  return c;
}

}  // namespace

TEST_CASE("update schedule") {
  const auto s = update_schedule(10, 3);
  CHECK(s == std::vector<std::size_t>{4, 3, 3});
  CHECK(std::accumulate(s.begin(), s.end(), std::size_t{0}) == 10);
  CHECK(update_schedule(5, 5) == std::vector<std::size_t>(5, 1));
  CHECK_THROWS_AS(update_schedule(3, 4), Error);
  CHECK_THROWS_AS(update_schedule(3, 0), Error);
}

TEST_CASE("config json round trip and digest") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kActive);
  c.seeds = {3, 4};
  c.strategies = {Strategy::kDensity};
  c.kernel = KernelKind::kRbf;
  c.bandwidth = 2.0;
  const ProtocolConfig r = ProtocolConfig::from_json(c.to_json());
  CHECK(r.to_json() == c.to_json());
  CHECK(r.digest() == c.digest());
  CHECK(r.digest().size() == 16);
  c.lambda = 0.2;
  CHECK(r.digest() != c.digest());
  CHECK_THROWS_AS(ProtocolConfig::from_json({{"mode", "nope"}}), Error);
  CHECK_THROWS_AS(ProtocolConfig::from_json({{"seeds", nlohmann::json::array()}}), Error);
  CHECK_THROWS_AS(ProtocolConfig::from_json({{"split_ratio", 1.5}}), Error);
  CHECK(ProtocolConfig::from_json({{"num_seeds", 10}}).seeds.size() == 10);
}

TEST_CASE("batch protocol aggregates seeds") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kBatch);
  c.seeds = {0, 1, 2};
  const ProtocolReport r = run_protocol(c);
  REQUIRE(r.per_seed.size() == 3);
  double sum = 0;
  for (const auto& s : r.per_seed) sum += s.result.rank1();
  CHECK(r.mean_rank1 == doctest::Approx(sum / 3));
  CHECK(r.mean_cmc.size() == 20);
  CHECK(r.mean_cmc.back() == doctest::Approx(1.0));
  const auto j = r.to_json();
  CHECK(j.contains("config_digest"));
  CHECK(j["per_seed"].size() == 3);
  CHECK(j.contains("mAP"));
}

TEST_CASE("noise-free synthetic data is matched perfectly") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kBatch);
  c.synthetic.view_shift_scale = 0;
  c.synthetic.noise_scale = 0;
  for (auto coding : {CodingScheme::kOneHot, CodingScheme::kFda}) {
    c.coding = coding;
    CHECK(run_protocol(c).mean_rank1 == 1.0);
  }
}

TEST_CASE("incremental protocol tracks the batch baseline") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kIncremental);
  c.start_ids = 4;
  c.updates = 7;
  const ProtocolReport r = run_protocol(c);
  REQUIRE(r.per_seed.size() == 1);
  const SeedReport& s = r.per_seed[0];
  CHECK(s.update_times_ms.size() == 7);
  CHECK(s.batch_times_ms.size() == 7);
  CHECK(s.p_relative_difference < 1e-9);
  CHECK(s.rankings_identical);
  CHECK(r.update_times_ms.size() == 7);
  CHECK(r.to_json().contains("alt_seconds"));

  c.kernel = KernelKind::kRbf;
  const ProtocolReport k = run_protocol(c);
  CHECK(k.per_seed[0].p_relative_difference < 1e-8);
  CHECK(k.per_seed[0].rankings_identical);
}

TEST_CASE("active protocol emits one row per strategy and checkpoint") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kActive);
  c.seeds = {0, 1};
  c.strategies = {Strategy::kJointE2, Strategy::kRandom, Strategy::kDensity};
  c.budget = 8;
  c.seed_ids = 3;
  c.checkpoints = {2, 4, 6, 8};
  std::size_t sessions = 0;
  const ProtocolReport r = run_protocol(
      c, [&](Strategy, std::uint64_t, const LabelingSession& s, const std::vector<StepRecord>& log) {
        ++sessions;
        CHECK(s.annotations() == 8);
        CHECK(log.size() >= 8);
      });
  CHECK(sessions == 6);
  REQUIRE(r.checkpoints.size() == 12);
  for (const auto& row : r.checkpoints) {
    CHECK(row.rank1_per_seed.size() == 2);
    CHECK(row.mean_cmc.size() > 0);
  }
  CHECK(r.checkpoints[3].labels == 8);
}

TEST_CASE("active checkpoints beyond the budget are dropped") {
  ProtocolConfig c = synthetic_config(ProtocolMode::kActive);
  c.strategies = {Strategy::kRandom};
  c.budget = 4;
  c.seed_ids = 3;
  c.checkpoints = {2, 4, 6, 8};
  const ProtocolReport r = run_protocol(c);
  REQUIRE(r.checkpoints.size() == 2);
  CHECK(r.checkpoints[1].labels == 4);

  c.checkpoints = {10};
  const ProtocolReport only = run_protocol(c);
  REQUIRE(only.checkpoints.size() == 1);
  CHECK(only.checkpoints[0].labels == 4);
}

TEST_CASE("cmc csv") {
  CHECK(cmc_csv({0.5, 1.0}) == "rank,value\n1,0.5\n2,1\n");
}
