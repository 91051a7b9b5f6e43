// tests/test_evaluation.cpp

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

#include <algorithm>

#include <doctest.h>

#include "irs/evaluation.hpp"
#include "test_support.hpp"

using namespace irs;
using irs::testing::random_matrix;

namespace {

// Hand-built rank list whose true match for probe id 1 sits at the given
// 1-based ranks; the other positions hold id 0.
RankList list_with_hits(std::size_t size, std::vector<std::size_t> hit_ranks,
                        std::vector<Label>& gallery_ids) {
  gallery_ids.assign(size, 0);
  RankList r;
  for (std::size_t k = 0; k < size; ++k) {
    r.order.push_back(static_cast<Index>(k));
    r.distances.push_back(static_cast<double>(k));
  }
  for (std::size_t h : hit_ranks) gallery_ids[h - 1] = 1;
  return r;
}

EmbeddingModel identity_model(Index d) {
  EmbeddingModel m;
  m.P = Matrix::Identity(d, d);
  return m;
}

}  // namespace

TEST_CASE("probe itself ranks first") {
  Rng rng(1);
  const Matrix gallery = random_matrix(4, 10, rng);
  const RankList r = rank_gallery(identity_model(4), gallery.col(6), gallery);
  CHECK(r.order[0] == 6);
  CHECK(r.distances[0] == 0.0);
  CHECK(std::is_sorted(r.distances.begin(), r.distances.end()));
  CHECK_THROWS_AS(rank_gallery(identity_model(4), gallery.col(0), Matrix(4, 0)), Error);
}

TEST_CASE("ties resolve by ascending gallery index") {
  const std::vector<double> d{0.7, 0.5, 0.5};
  const RankList r = rank_by_distances(0, d);
  CHECK(r.order == std::vector<Index>{1, 2, 0});
  const std::vector<double> same(5, 1.0);
  CHECK(rank_by_distances(0, same).order == std::vector<Index>{0, 1, 2, 3, 4});
}

TEST_CASE("gallery permutation keeps the distance multiset") {
  Rng rng(2);
  const Matrix gallery = random_matrix(3, 8, rng);
  const Vector probe = random_matrix(3, 1, rng);
  std::vector<Index> perm{3, 1, 7, 0, 5, 2, 6, 4};
  Matrix shuffled(3, 8);
  for (Index j = 0; j < 8; ++j) shuffled.col(j) = gallery.col(perm[static_cast<std::size_t>(j)]);
  const RankList a = rank_gallery(identity_model(3), probe, gallery);
  const RankList b = rank_gallery(identity_model(3), probe, shuffled);
  CHECK(a.distances == b.distances);
}

TEST_CASE("cmc from known first-match ranks") {
  // Probe p has its single true match at rank r_p in a gallery of four.
  const std::vector<std::size_t> ranks{1, 3, 2};
  const std::vector<Label> probe_ids{10, 20, 30};
  const std::vector<Label> gallery_ids{10, 20, 30, 40};
  std::vector<RankList> lists;
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<double> d(4, 1.0);
    d[p] = 0.0;
    // Move the true match to position ranks[p] by making earlier items closer.
    RankList r;
    std::vector<Index> others;
    for (Index g = 0; g < 4; ++g)
      if (g != static_cast<Index>(p)) others.push_back(g);
    for (std::size_t k = 0, o = 0; k < 4; ++k) {
      r.order.push_back(k + 1 == ranks[p] ? static_cast<Index>(p) : others[o++]);
      r.distances.push_back(static_cast<double>(k));
    }
    lists.push_back(r);
  }
  const CmcCurve c = cmc(lists, probe_ids, gallery_ids);
  REQUIRE(c.values.size() == 4);
  CHECK(c.values[0] == doctest::Approx(1.0 / 3));
  CHECK(c.values[1] == doctest::Approx(2.0 / 3));
  CHECK(c.values[2] == 1.0);
  CHECK(c.values[3] == 1.0);
  CHECK(first_match_ranks(lists, probe_ids, gallery_ids) == ranks);
}

TEST_CASE("missing probe identity is an error") {
  const std::vector<Label> probe_ids{5};
  const std::vector<Label> gallery_ids{1, 2};
  const std::vector<RankList> lists{rank_by_distances(0, std::vector<double>{0.1, 0.2})};
  CHECK_THROWS_AS(cmc(lists, probe_ids, gallery_ids), Error);
  CHECK_THROWS_AS(mean_ap(lists, probe_ids, gallery_ids), Error);
}

TEST_CASE("average precision") {
  std::vector<Label> gallery_ids;
  const std::vector<Label> probe{1};
  std::vector<RankList> lists{list_with_hits(5, {1, 3}, gallery_ids)};
  CHECK(mean_ap(lists, probe, gallery_ids) == doctest::Approx(0.83333).epsilon(1e-5));
  lists = {list_with_hits(5, {1}, gallery_ids)};
  CHECK(mean_ap(lists, probe, gallery_ids) == 1.0);
  for (std::size_t k = 1; k <= 6; ++k) {
    lists = {list_with_hits(6, {k}, gallery_ids)};
    CHECK(mean_ap(lists, probe, gallery_ids) == doctest::Approx(1.0 / static_cast<double>(k)));
  }
}

TEST_CASE("random instances: monotone cmc and single-match mAP bound") {
  Rng rng(3);
  const Index n = 100;
  std::vector<Label> ids;
  for (Index i = 0; i < n; ++i) ids.push_back(i);
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = rng.uniform();
  const auto lists = rank_matrix(d);
  const CmcCurve c = cmc(lists, ids, ids);
  CHECK(std::is_sorted(c.values.begin(), c.values.end()));
  CHECK(c.values.back() == 1.0);
  double inv = 0;
  for (std::size_t r : first_match_ranks(lists, ids, ids)) inv += 1.0 / static_cast<double>(r);
  CHECK(mean_ap(lists, ids, ids) == doctest::Approx(inv / n));
}

TEST_CASE("multishot averaging") {
  Rng rng(4);
  const EmbeddingModel m = identity_model(3);
  const Matrix a = random_matrix(3, 1, rng), b = random_matrix(3, 1, rng), c = random_matrix(3, 1, rng);
  CHECK(multishot_distance(m, a, c) == doctest::Approx((a - c).norm()));
  Matrix ab(3, 2);
  ab << a, b;
  CHECK(multishot_distance(m, ab, c) == doctest::Approx(0.5 * ((a - c).norm() + (b - c).norm())));
  Matrix aab(3, 3);
  aab << a, a, b;
  CHECK(multishot_distance(m, aab, c) ==
        doctest::Approx((2 * (a - c).norm() + (b - c).norm()) / 3));
  CHECK_THROWS_AS(multishot_distance(m, Matrix(3, 0), c), Error);

  Matrix pdata(3, 3), gdata(3, 2);
  pdata << a, b, c;
  gdata << b, c;
  const FeatureMatrix probes(pdata, {1, 1, 2}, {1, 1, 1});
  const FeatureMatrix gallery(gdata, {1, 2}, {2, 2});
  const GroupedDistances g = multishot_distance_matrix(m, probes, gallery);
  CHECK(g.probe_ids == std::vector<Label>{1, 2});
  CHECK(g.distances(0, 1) == doctest::Approx(multishot_distance(m, ab, c)));
  CHECK(g.distances(1, 0) == doctest::Approx((c - b).norm()));
}

TEST_CASE("score fusion") {
  Rng rng(5);
  Matrix a(4, 6), flat = Matrix::Constant(4, 6, 2.5);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 6; ++j) a(i, j) = rng.uniform();
  auto orders = [](const Matrix& m) {
    std::vector<std::vector<Index>> o;
    for (const auto& r : rank_matrix(m)) o.push_back(r.order);
    return o;
  };
  const std::vector<Matrix> self{a, a};
  CHECK(orders(fuse_scores(self)) == orders(a));
  const std::vector<Matrix> with_flat{a, flat};
  CHECK(orders(fuse_scores(with_flat)) == orders(a));
  const Matrix b = (3.0 * a.array() + 7.0).matrix();
  const std::vector<Matrix> agree{a, b};
  CHECK(orders(fuse_scores(agree)) == orders(a));
  // Per-matrix affine rescaling is removed by the normalisation.
  Matrix c(4, 6);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 6; ++j) c(i, j) = rng.uniform();
  const std::vector<Matrix> ac{a, c}, ac_scaled{(a.array() * 10 - 4).matrix(), c};
  CHECK((fuse_scores(ac) - fuse_scores(ac_scaled)).norm() < 1e-12);
  const std::vector<double> w{1.0, 0.0};
  CHECK(orders(fuse_scores(ac, std::span<const double>(w))) == orders(a));
  const std::vector<Matrix> bad{a, Matrix::Zero(3, 6)};
  CHECK_THROWS_AS(fuse_scores(bad), Error);
}

TEST_CASE("single-shot gallery selection") {
  const FeatureMatrix fm(Matrix::Zero(2, 6), {1, 1, 2, 2, 2, 3}, {2, 2, 2, 2, 2, 2});
  const std::vector<Index> cols{0, 1, 2, 3, 4, 5};
  const auto a = single_shot_columns(fm, cols, 9);
  CHECK(a.size() == 3);
  CHECK(a == single_shot_columns(fm, cols, 9));
  CHECK(fm.ids()[a[0]] == 1);
  CHECK(fm.ids()[a[1]] == 2);
  CHECK(a[2] == 5);
}
