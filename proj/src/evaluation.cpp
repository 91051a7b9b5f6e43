// src/evaluation.cpp

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

#include "irs/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

namespace irs {

RankList rank_by_distances(Index probe, std::span<const double> distances) {
  if (distances.empty()) throw Error("cannot rank an empty gallery");
  RankList r;
  r.probe = probe;
  r.order.resize(distances.size());
  std::iota(r.order.begin(), r.order.end(), Index{0});
  std::sort(r.order.begin(), r.order.end(), [&](Index a, Index b) {
    const double da = distances[static_cast<std::size_t>(a)];
    const double db = distances[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  });
  r.distances.reserve(distances.size());
  for (Index g : r.order) r.distances.push_back(distances[static_cast<std::size_t>(g)]);
  return r;
}

RankList rank_by_distances(Index probe, const RowVector& distances) {
  return rank_by_distances(probe,
                           std::span<const double>(distances.data(), static_cast<std::size_t>(distances.size())));
}

std::vector<RankList> rank_matrix(const Matrix& distances) {
  std::vector<RankList> out;
  out.reserve(static_cast<std::size_t>(distances.rows()));
  for (Index i = 0; i < distances.rows(); ++i) {
    const RowVector row = distances.row(i);
    out.push_back(rank_by_distances(i, row));
  }
  return out;
}

Matrix distance_matrix(const EmbeddingModel& model, const Matrix& probes, const Matrix& gallery) {
  if (gallery.cols() == 0) throw Error("cannot rank an empty gallery");
  return distances(embed(model, probes), embed(model, gallery));
}

RankList rank_gallery(const EmbeddingModel& model, const Vector& probe, const Matrix& gallery) {
  const Matrix d = distance_matrix(model, probe, gallery);
  const RowVector row = d.row(0);
  return rank_by_distances(0, row);
}

std::vector<RankList> rank_all(const EmbeddingModel& model, const Matrix& probes,
                               const Matrix& gallery) {
  return rank_matrix(distance_matrix(model, probes, gallery));
}

namespace {

void check_lists(std::span<const RankList> lists, std::span<const Label> probe_ids,
                 std::span<const Label> gallery_ids) {
  if (lists.size() != probe_ids.size()) throw Error("one rank list per probe required");
  for (const auto& l : lists) {
    if (l.order.size() != gallery_ids.size()) throw Error("rank list length != gallery size");
  }
}

}  // namespace

std::vector<std::size_t> first_match_ranks(std::span<const RankList> lists,
                                           std::span<const Label> probe_ids,
                                           std::span<const Label> gallery_ids) {
  check_lists(lists, probe_ids, gallery_ids);
  std::vector<std::size_t> ranks;
  ranks.reserve(lists.size());
  for (std::size_t p = 0; p < lists.size(); ++p) {
    std::size_t found = 0;
    for (std::size_t k = 0; k < lists[p].order.size(); ++k) {
      if (gallery_ids[static_cast<std::size_t>(lists[p].order[k])] == probe_ids[p]) {
        found = k + 1;
        break;
      }
    }
    if (found == 0) throw Error("probe id " + std::to_string(probe_ids[p]) + " absent from gallery");
    ranks.push_back(found);
  }
  return ranks;
}

CmcCurve cmc(std::span<const RankList> lists, std::span<const Label> probe_ids,
             std::span<const Label> gallery_ids) {
  const auto ranks = first_match_ranks(lists, probe_ids, gallery_ids);
  std::vector<double> hits(gallery_ids.size(), 0.0);
  for (std::size_t r : ranks) hits[r - 1] += 1.0;
  CmcCurve c;
  c.values.resize(gallery_ids.size());
  double acc = 0.0;
  const double n = static_cast<double>(std::max<std::size_t>(ranks.size(), 1));
  for (std::size_t k = 0; k < hits.size(); ++k) {
    acc += hits[k];
    c.values[k] = acc / n;
  }
  return c;
}

double mean_ap(std::span<const RankList> lists, std::span<const Label> probe_ids,
               std::span<const Label> gallery_ids) {
  check_lists(lists, probe_ids, gallery_ids);
  if (lists.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < lists.size(); ++p) {
    double hits = 0.0, ap = 0.0;
    for (std::size_t k = 0; k < lists[p].order.size(); ++k) {
      if (gallery_ids[static_cast<std::size_t>(lists[p].order[k])] == probe_ids[p]) {
        hits += 1.0;
        ap += hits / static_cast<double>(k + 1);
      }
    }
    if (hits == 0.0) throw Error("probe id " + std::to_string(probe_ids[p]) + " absent from gallery");
    total += ap / hits;
  }
  return total / static_cast<double>(lists.size());
}

double multishot_distance(const EmbeddingModel& model, const Matrix& probe_set,
                          const Matrix& gallery_set) {
  if (probe_set.cols() == 0 || gallery_set.cols() == 0) throw Error("multishot: empty set");
  return distance_matrix(model, probe_set, gallery_set).mean();
}

GroupedDistances multishot_distance_matrix(const EmbeddingModel& model, const FeatureMatrix& probes,
                                           const FeatureMatrix& gallery) {
  GroupedDistances out;
  out.probe_ids = probes.distinct_ids();
  out.gallery_ids = gallery.distinct_ids();
  const Matrix full = distance_matrix(model, probes.data(), gallery.data());
  auto group = [](const FeatureMatrix& fm, const std::vector<Label>& ids) {
    std::map<Label, Index> pos;
    for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<Index>(i);
    Matrix avg = Matrix::Zero(static_cast<Index>(ids.size()), fm.size());
    Vector count = Vector::Zero(static_cast<Index>(ids.size()));
    for (Index j = 0; j < fm.size(); ++j) {
      avg(pos[fm.ids()[j]], j) = 1.0;
      count(pos[fm.ids()[j]]) += 1.0;
    }
    return Matrix(count.cwiseInverse().asDiagonal() * avg);
  };
  out.distances = group(probes, out.probe_ids) * full * group(gallery, out.gallery_ids).transpose();
  return out;
}

Matrix fuse_scores(std::span<const Matrix> matrices, std::optional<std::span<const double>> weights) {
  if (matrices.empty()) throw Error("fuse_scores: no matrices");
  if (weights && weights->size() != matrices.size()) throw Error("fuse_scores: weight count mismatch");
  const Index rows = matrices[0].rows(), cols = matrices[0].cols();
  Matrix out = Matrix::Zero(rows, cols);
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    const Matrix& m = matrices[k];
    if (m.rows() != rows || m.cols() != cols) throw Error("fuse_scores: shape mismatch");
    const double w = weights ? (*weights)[k] : 1.0;
    const double lo = m.minCoeff(), hi = m.maxCoeff();
    if (!(hi > lo)) {
      spdlog::warn("fuse_scores: matrix {} is constant; it contributes zeros", k);
      continue;
    }
    out += w * ((m.array() - lo) / (hi - lo)).matrix();
  }
  return out;
}

std::vector<Index> single_shot_columns(const FeatureMatrix& fm, std::span<const Index> columns,
                                       std::uint64_t seed) {
  std::map<Label, std::vector<Index>> by_id;
  std::vector<Label> order;
  for (Index c : columns) {
    auto& v = by_id[fm.ids()[c]];
    if (v.empty()) order.push_back(fm.ids()[c]);
    v.push_back(c);
  }
  Rng rng(seed);
  std::vector<Index> out;
  out.reserve(order.size());
  for (Label l : order) {
    const auto& v = by_id[l];
    out.push_back(v[rng.below(v.size())]);
  }
  return out;
}

}  // namespace irs
