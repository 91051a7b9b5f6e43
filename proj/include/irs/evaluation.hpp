// include/irs/evaluation.hpp

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

#ifndef IRS_EVALUATION_HPP_
#define IRS_EVALUATION_HPP_

#include <optional>
#include <span>
#include <vector>

#include "irs/common.hpp"
#include "irs/dataset.hpp"
#include "irs/regression.hpp"

namespace irs {

/// Gallery positions for one probe, nearest first. Equal distances are
/// ordered by ascending gallery index.
struct RankList {
  Index probe = 0;
  std::vector<Index> order;
  std::vector<double> distances;  // aligned with order, non-decreasing
};

RankList rank_by_distances(Index probe, std::span<const double> distances);
RankList rank_by_distances(Index probe, const RowVector& distances);

/// One RankList per row of a probes x gallery distance matrix.
std::vector<RankList> rank_matrix(const Matrix& distances);

RankList rank_gallery(const EmbeddingModel& model, const Vector& probe, const Matrix& gallery);
std::vector<RankList> rank_all(const EmbeddingModel& model, const Matrix& probes,
                               const Matrix& gallery);

/// Probes x gallery matrix of unsquared embedded distances.
Matrix distance_matrix(const EmbeddingModel& model, const Matrix& probes, const Matrix& gallery);

struct CmcCurve {
  std::vector<double> values;  // values[k]: fraction matched within rank k+1

  /// 1-based rank accessor.
  double at(std::size_t rank) const { return values.at(rank - 1); }
};

/// Rank (1-based) of the first true match in each list.
std::vector<std::size_t> first_match_ranks(std::span<const RankList> lists,
                                           std::span<const Label> probe_ids,
                                           std::span<const Label> gallery_ids);

CmcCurve cmc(std::span<const RankList> lists, std::span<const Label> probe_ids,
             std::span<const Label> gallery_ids);

/// Mean over probes of the average precision of each ranked list; every true
/// match in the gallery counts.
double mean_ap(std::span<const RankList> lists, std::span<const Label> probe_ids,
               std::span<const Label> gallery_ids);

/// Mean of the embedded distances over all cross pairs of the two sets.
double multishot_distance(const EmbeddingModel& model, const Matrix& probe_set,
                          const Matrix& gallery_set);

/// Identity-level distances for multi-shot matching.
struct GroupedDistances {
  std::vector<Label> probe_ids;
  std::vector<Label> gallery_ids;
  Matrix distances;  // probe_ids.size() x gallery_ids.size()
};
GroupedDistances multishot_distance_matrix(const EmbeddingModel& model, const FeatureMatrix& probes,
                                           const FeatureMatrix& gallery);

/// Min-max normalises each matrix over its entries, then sums with weights
/// (equal by default). A constant matrix contributes zeros.
Matrix fuse_scores(std::span<const Matrix> matrices,
                   std::optional<std::span<const double>> weights = std::nullopt);

/// Keeps one randomly chosen column per identity (single-shot gallery).
std::vector<Index> single_shot_columns(const FeatureMatrix& fm, std::span<const Index> columns,
                                       std::uint64_t seed);

}  // namespace irs

#endif  // IRS_EVALUATION_HPP_
