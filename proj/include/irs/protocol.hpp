// include/irs/protocol.hpp

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

#ifndef IRS_PROTOCOL_HPP_
#define IRS_PROTOCOL_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irs/active.hpp"
#include "irs/coding.hpp"
#include "irs/dataset.hpp"
#include "irs/evaluation.hpp"
#include "irs/regression.hpp"

namespace irs {

enum class ProtocolMode { kBatch, kIncremental, kActive };

/// Experiment description. Parsed from JSON, e.g.
///   {"mode": "incremental", "synthetic": {"num_ids": 200, "d": 200},
///    "seeds": [0, 1], "start_ids": 10, "updates": 151}
struct ProtocolConfig {
  ProtocolMode mode = ProtocolMode::kBatch;
  std::optional<std::string> manifest;
  SyntheticSpec synthetic;
  std::vector<std::uint64_t> seeds = {0};
  double split_ratio = 0.5;
  double lambda = kDefaultLambda;
  CodingScheme coding = CodingScheme::kOneHot;
  std::optional<KernelKind> kernel;  // nullopt: primal linear model
  std::optional<double> bandwidth;   // nullopt: median heuristic
  bool single_shot = false;
  Label probe_cam = 1;
  Label gallery_cam = 2;

  // kIncremental: start with start_ids identities, then spread the remaining
  // training identities over `updates` sequential updates. When
  // batch_baseline is set, the model is also re-fitted from scratch at every
  // step for comparison.
  std::size_t start_ids = 10;
  std::size_t updates = 0;  // 0: one identity per update
  bool batch_baseline = true;

  // kActive
  std::vector<Strategy> strategies = {Strategy::kJointE2, Strategy::kRandom};
  std::size_t budget = 200;
  std::size_t seed_ids = 10;
  std::vector<std::size_t> checkpoints = {50, 100, 150, 200};
  GalleryScope scope = GalleryScope::kUnlabeled;
  std::size_t extra_anchors = 0;

  static ProtocolConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON dump, hex.
  std::string digest() const;
};

struct EvalResult {
  CmcCurve cmc;
  double map = 0.0;
  std::size_t num_probes = 0;
  double rank1() const { return cmc.values.empty() ? 0.0 : cmc.values[0]; }
};

/// Ranks the test split's probe-camera samples against its gallery-camera
/// samples (optionally one random gallery image per identity).
EvalResult evaluate_split(const EmbeddingModel& model, const FeatureMatrix& fm, const SplitSpec& split,
                          bool single_shot = false);

/// Fits a batch model on the train split.
EmbeddingModel fit_batch(const FeatureMatrix& train, CodingScheme coding, double lambda,
                         std::optional<KernelKind> kernel, std::optional<double> bandwidth,
                         std::uint64_t seed = 0);

struct SeedReport {
  std::uint64_t seed = 0;
  EvalResult result;
  double alt_seconds = 0.0;
  // kIncremental
  double batch_alt_seconds = 0.0;
  double p_relative_difference = 0.0;
  bool rankings_identical = true;
  std::vector<double> update_times_ms;
  std::vector<double> batch_times_ms;
};

struct CheckpointRow {
  Strategy strategy = Strategy::kJointE2;
  std::size_t labels = 0;
  std::vector<double> rank1_per_seed;
  std::vector<double> map_per_seed;
  std::vector<double> mean_cmc;
  double mean_rank1 = 0.0;
  double mean_map = 0.0;
};

struct ProtocolReport {
  std::string config_digest;
  ProtocolMode mode = ProtocolMode::kBatch;
  std::vector<SeedReport> per_seed;
  std::vector<double> mean_cmc;
  double mean_rank1 = 0.0;
  double map = 0.0;
  double alt_seconds = 0.0;
  double batch_alt_seconds = 0.0;
  std::vector<double> update_times_ms;
  std::vector<CheckpointRow> checkpoints;  // kActive

  nlohmann::json to_json() const;
};

/// Called once per finished active-learning session.
using SessionHook = std::function<void(Strategy, std::uint64_t seed, const LabelingSession&,
                                       const std::vector<StepRecord>&)>;

ProtocolReport run_protocol(const ProtocolConfig& config, const SessionHook& hook = {});

/// Identity schedule for the incremental protocol: `updates` chunk sizes
/// summing to `total`, larger chunks first.
std::vector<std::size_t> update_schedule(std::size_t total, std::size_t updates);

/// CMC curve as "rank,value" CSV lines.
std::string cmc_csv(const std::vector<double>& curve);

}  // namespace irs

#endif  // IRS_PROTOCOL_HPP_
