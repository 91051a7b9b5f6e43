// include/irs/active.hpp

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

#ifndef IRS_ACTIVE_HPP_
#define IRS_ACTIVE_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irs/common.hpp"
#include "irs/dataset.hpp"
#include "irs/evaluation.hpp"
#include "irs/incremental.hpp"

namespace irs {

enum class Strategy { kJointE2, kRandom, kDensity };
Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

/// Which gallery samples the discrepancy and uncertainty criteria range over.
enum class GalleryScope { kUnlabeled, kAll };

struct ActiveConfig {
  Strategy strategy = Strategy::kJointE2;
  std::size_t budget = 200;
  std::size_t seed_ids = 10;
  std::uint64_t seed = 0;
  double lambda = kDefaultLambda;
  GalleryScope scope = GalleryScope::kUnlabeled;
  std::size_t density_k = 5;
  Label probe_cam = 1;
  Label gallery_cam = 2;

  // Kernel sessions learn in a lifted space spanned by a fixed anchor set:
  // the seed samples plus up to `extra_anchors` random pool samples.
  std::optional<KernelKind> kernel;
  std::optional<double> bandwidth;  // nullopt: median heuristic over anchors
  std::size_t extra_anchors = 0;

  // Annotator failures are retried this many times before the session aborts.
  int max_retries = 2;
};

/// Raw per-probe criteria, aligned with LabelingSession::probe_pool().
struct Criteria {
  Vector diversity;    // min squared model distance to labeled same-view samples
  Vector discrepancy;  // min squared model distance to the gallery scope
  Vector uncertainty;  // entropy of softmax(-squared distance) over the gallery scope
};

/// One loop iteration, as written to the JSON-lines session log.
struct StepRecord {
  std::size_t step = 0;
  Index probe_index = 0;
  std::optional<Index> gallery_index;  // nullopt: annotator skipped
  std::string chosen_by;
  std::optional<std::size_t> true_match_rank;
  std::optional<double> epsilon1, epsilon2, epsilon3;
  double update_ms = 0.0;
};

std::string to_json_line(const StepRecord& r);
StepRecord step_from_json_line(const std::string& line);

class AnnotatorError : public Error {
 public:
  using Error::Error;
};

/// What the annotator is shown: the selected probe and the unlabeled gallery
/// ranked against it (order holds dataset column indices).
struct AnnotationRequest {
  Index probe_index = 0;
  const RankList* ranking = nullptr;
};

/// Returns the gallery column judged to be the true match, or nullopt to skip.
/// Throws AnnotatorError on a transient failure.
using Annotator = std::function<std::optional<Index>(const AnnotationRequest&)>;

/// Ground-truth annotator: the highest-ranked gallery candidate sharing the
/// probe's identity label, regardless of its rank.
Annotator oracle_annotator(const FeatureMatrix& pool);

/// Applies a labeled batch to the state. The default is update_labeled().
using ModelUpdater =
    std::function<void(IncrementalState&, const Matrix& Xp, std::span<const Label> labels)>;
ModelUpdater default_updater();

/// Divides by the maximum; an all-zero vector stays zero.
Vector normalize_by_max(const Vector& v);

// Raw selection criteria for embedded probe rows against embedded reference
// rows. All use squared Euclidean distance.
/// Minimum distance to the labelled probes; zero when none are labelled.
Vector diversity_scores(const Matrix& probes, const Matrix& labeled);
/// Minimum distance to the gallery.
Vector discrepancy_scores(const Matrix& probes, const Matrix& gallery);
/// Natural-log entropy of softmax(-distance) over a gallery of at least two.
Vector uncertainty_scores(const Matrix& probes, const Matrix& gallery);
/// Row-wise entropy of softmax(-d2).
Vector entropy_of_rows(const Matrix& d2);

class LabelingSession {
 public:
  /// Seeds the model with `seed_ids` random identities (all of their pool
  /// samples labeled) and leaves every other pool sample unlabeled.
  LabelingSession(FeatureMatrix pool, ActiveConfig config);

  const ActiveConfig& config() const { return config_; }
  const FeatureMatrix& pool() const { return pool_; }
  /// Pool samples in the learning space (lifted for kernel sessions).
  const Matrix& space() const { return space_; }
  const IncrementalState& state() const { return state_; }
  const std::vector<Index>& probe_pool() const { return probe_pool_; }
  const std::vector<Index>& gallery_pool() const { return gallery_pool_; }
  const std::vector<Index>& labeled_probes() const { return labeled_probes_; }
  const std::vector<Index>& labeled_gallery() const { return labeled_gallery_; }
  const std::vector<Label>& seed_identities() const { return seed_identities_; }
  std::size_t annotations() const { return annotations_; }
  std::size_t steps() const { return steps_; }
  std::size_t budget_left() const { return config_.budget - annotations_; }
  bool finished() const {
    return annotations_ >= config_.budget || probe_pool_.empty() || gallery_pool_.empty();
  }

  /// Maps raw samples into the learning space.
  Matrix to_space(const Matrix& raw) const;
  /// Current model applicable to raw samples (kernel sessions return a kernel
  /// model over the anchors).
  EmbeddingModel model() const;

  Criteria score() const;
  Vector score_diversity() const;
  Vector score_discrepancy() const;
  Vector score_uncertainty() const;

  /// Column index of the next probe to annotate under the configured
  /// strategy. Consumes randomness for kRandom.
  Index select_next();

  /// Unlabeled gallery ranked against a pool column by matching distance.
  RankList rank_candidates(Index probe) const;

  /// Records the annotation (or skip) for `probe` and updates the model.
  /// Also fills in criteria values when they were computed at selection time.
  StepRecord annotate(Index probe, std::optional<Index> gallery, const std::string& chosen_by,
                      const ModelUpdater& updater = default_updater());

  /// Criteria of the last select_next() call for the selected probe.
  const std::optional<std::array<double, 3>>& last_criteria() const { return last_criteria_; }

 private:
  Matrix embedded_space() const;
  std::vector<Index> gallery_scope() const;
  Index select_density(const Matrix& emb) const;

  FeatureMatrix pool_;
  ActiveConfig config_;
  std::optional<KernelLift> lift_;
  Matrix space_;
  IncrementalState state_;
  Rng rng_;
  std::vector<Index> probe_pool_, gallery_pool_;
  std::vector<Index> labeled_probes_, labeled_gallery_;
  std::vector<Label> seed_identities_;
  Label next_label_ = 1;
  std::size_t annotations_ = 0;
  std::size_t steps_ = 0;
  std::optional<std::array<double, 3>> last_criteria_;
  std::optional<Index> last_selected_;
};

/// Called after every step with the session and the record just produced.
using StepObserver = std::function<void(const LabelingSession&, const StepRecord&)>;

/// Select, rank, annotate, update until the budget is spent or the probe pool
/// is empty.
std::vector<StepRecord> run_session(LabelingSession& session, const Annotator& annotator,
                                    const ModelUpdater& updater = default_updater(),
                                    const StepObserver& observer = {});

}  // namespace irs

#endif  // IRS_ACTIVE_HPP_
