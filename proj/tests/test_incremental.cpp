// tests/test_incremental.cpp

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

#include <doctest.h>

#include "irs/coding.hpp"
#include "irs/incremental.hpp"
#include "irs/regression.hpp"
#include "test_support.hpp"

using namespace irs;
using irs::testing::random_matrix;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// Plain batch ridge solution on everything seen so far, straight from the
// normal equations.
Matrix batch_p(const Matrix& X, const Matrix& Y, double lambda) {
  Matrix t = X * X.transpose();
  t.diagonal().array() += lambda;
  return t.inverse() * X * Y;
}

std::vector<Label> class_ids(Index n, Index c, Label offset = 1) {
  std::vector<Label> ids;
  for (Index i = 0; i < n; ++i) ids.push_back(offset + i % c);
  return ids;
}

}  // namespace

TEST_CASE("scalar initial state") {
  const std::vector<Label> ids{1};
  const IncrementalState s = IncrementalState::init(scalar(1.0), onehot(ids), 0.1);
  CHECK(s.Tinv()(0, 0) == doctest::Approx(0.90909).epsilon(1e-5));
  CHECK(s.P()(0, 0) == doctest::Approx(1.0 / 1.1));
}

TEST_CASE("init without updates equals the batch fit") {
  Rng rng(1);
  const Matrix X = random_matrix(5, 8, rng);
  const TargetCoding Y = onehot(class_ids(8, 3));
  const IncrementalState s = IncrementalState::init(X, Y, 0.1);
  CHECK((s.P() - fit_linear(X, Y.Y, 0.1).P).norm() < 1e-10);
}

TEST_CASE("init validation") {
  const std::vector<Label> none;
  CHECK_THROWS_AS(IncrementalState::init(Matrix(3, 0), onehot(none), 0.1), Error);
  const std::vector<Label> ids{1};
  CHECK_THROWS_AS(IncrementalState::init(scalar(1.0), onehot(ids), 0.0), Error);
}

TEST_CASE("scalar walk-through") {
  const std::vector<Label> ids{1};
  IncrementalState s = IncrementalState::init(scalar(1.0), onehot(ids), 0.1);
  s.update(scalar(2.0), scalar(1.0));
  // Direct inverse of 1.1 + 2*2.
  CHECK(s.Tinv()(0, 0) == doctest::Approx(1.0 / 5.1).epsilon(1e-12));
  CHECK(s.Tinv()(0, 0) == doctest::Approx(0.19608).epsilon(1e-4));
  CHECK(s.P()(0, 0) == doctest::Approx(3.0 / 5.1).epsilon(1e-12));
  CHECK(s.n_seen() == 2);
  CHECK(s.update_count() == 1);
}

TEST_CASE("sequential updates track the batch solution") {
  Rng rng(2);
  const Index d = 12;
  Matrix X = random_matrix(d, 4, rng);
  std::vector<Label> labels = class_ids(4, 2);
  IncrementalState s = IncrementalState::init(X, onehot(labels), 0.1);
  for (int step = 0; step < 30; ++step) {
    const Index np = 1 + rng.below(4);
    const Matrix Xp = random_matrix(d, np, rng);
    std::vector<Label> lp;
    for (Index i = 0; i < np; ++i) lp.push_back(static_cast<Label>(1 + rng.below(2 + step / 3)));
    s.update_labeled(Xp, lp);
    Matrix grown(d, X.cols() + np);
    grown << X, Xp;
    X = grown;
    labels.insert(labels.end(), lp.begin(), lp.end());
  }
  // Batch targets in the state's registry order.
  Matrix Y = Matrix::Zero(X.cols(), static_cast<Index>(s.classes().size()));
  for (std::size_t i = 0; i < labels.size(); ++i) Y(static_cast<Index>(i), s.classes().column(labels[i])) = 1;
  CHECK(relative_frobenius(s.P(), batch_p(X, Y, 0.1)) < 1e-9);

  Matrix t = X * X.transpose();
  t.diagonal().array() += 0.1;
  const Matrix I = Matrix::Identity(d, d);
  CHECK(relative_frobenius(s.Tinv() * t, I) < 1e-7);
}

TEST_CASE("repeating an already labelled sample is a valid update") {
  Rng rng(3);
  const Matrix X = random_matrix(4, 6, rng);
  const std::vector<Label> ids = class_ids(6, 3);
  IncrementalState s = IncrementalState::init(X, onehot(ids), 0.1);
  const std::vector<Label> again{ids[2]};
  s.update_labeled(X.col(2), again);
  Matrix all(4, 7);
  all << X, X.col(2);
  std::vector<Label> all_ids = ids;
  all_ids.push_back(ids[2]);
  CHECK(relative_frobenius(s.P(), batch_p(all, onehot(all_ids).Y, 0.1)) < 1e-10);
}

TEST_CASE("new classes append zero columns before the data term") {
  Rng rng(4);
  const Matrix X = random_matrix(3, 4, rng);
  IncrementalState s = IncrementalState::init(X, onehot(class_ids(4, 2)), 0.1);
  const Matrix before = s.P();
  const std::vector<Label> fresh{9};
  s.update(Matrix(3, 0), Matrix(0, 3), fresh);
  CHECK(s.P().cols() == 3);
  CHECK(s.P().leftCols(2) == before);
  CHECK(s.P().col(2).isZero());
  CHECK(s.classes().column(9) == 2);
}

TEST_CASE("update validation") {
  Rng rng(5);
  IncrementalState s = IncrementalState::init(random_matrix(3, 2, rng), onehot(class_ids(2, 2)), 0.1);
  CHECK_THROWS_AS(s.update(random_matrix(4, 1, rng), Matrix::Zero(1, 2)), Error);
  CHECK_THROWS_AS(s.update(random_matrix(3, 1, rng), Matrix::Zero(1, 3)), Error);
  const std::vector<Label> dup{1};
  CHECK_THROWS_AS(s.update(random_matrix(3, 1, rng), Matrix::Zero(1, 3), dup), Error);
  CHECK_THROWS_AS(IncrementalState().update(random_matrix(3, 1, rng), Matrix::Zero(1, 2)), Error);
}

TEST_CASE("rank-one passes match the chunk update") {
  Rng rng(6);
  const Index d = 1000;
  const Matrix X0 = random_matrix(d, 5, rng);
  const TargetCoding Y0 = onehot(class_ids(5, 5));
  IncrementalState a = IncrementalState::init(X0, Y0, 0.1);
  IncrementalState b = a;
  const Matrix Xp = random_matrix(d, 3, rng);
  Matrix Yp = Matrix::Zero(3, 6);
  Yp(0, 0) = Yp(1, 5) = Yp(2, 2) = 1;
  const std::vector<Label> fresh{42};
  CHECK(IncrementalState::use_rank_one_path(3, d));
  a.update_rank_one(Xp, Yp, fresh);
  b.update(Xp, Yp, fresh);
  CHECK(relative_frobenius(a.P(), b.P()) < 1e-8);
  CHECK(relative_frobenius(a.Tinv(), b.Tinv()) < 1e-8);
  CHECK(a.update_count() == b.update_count());
}

TEST_CASE("path policy") {
  CHECK_FALSE(IncrementalState::use_rank_one_path(500, 100));
  CHECK(IncrementalState::use_rank_one_path(1, 50));
  CHECK_FALSE(IncrementalState::use_rank_one_path(1, 49));
  CHECK_FALSE(IncrementalState::use_rank_one_path(33, 5000));

  Rng rng(7);
  const Matrix X0 = random_matrix(4, 3, rng);
  const TargetCoding Y0 = onehot(class_ids(3, 3));
  IncrementalState a = IncrementalState::init(X0, Y0, 0.1), b = a;
  const Matrix x = random_matrix(4, 1, rng);
  Matrix y = Matrix::Zero(1, 3);
  y(0, 1) = 1;
  a.update_rank_one(x, y);
  b.update(x, y);
  CHECK(relative_frobenius(a.P(), b.P()) < 1e-12);
}

TEST_CASE("state model is a linear embedding") {
  Rng rng(8);
  const IncrementalState s = IncrementalState::init(random_matrix(3, 4, rng), onehot(class_ids(4, 2)), 0.1);
  const EmbeddingModel m = s.model();
  CHECK(m.kind == ModelKind::kLinear);
  CHECK(m.P == s.P());
  CHECK(m.solver.method == "woodbury");
}

TEST_CASE("kernel lift") {
  Rng rng(9);
  const Matrix anchors = random_matrix(5, 4, rng);
  const KernelLift lift(anchors, Kernel{KernelKind::kRbf, 1.5});
  const Matrix lifted = lift.apply(anchors);
  CHECK(lift.dim() == 4);
  for (Index i = 0; i < 4; ++i) CHECK(lifted(i, i) == 1.0);
  const Matrix x = random_matrix(5, 3, rng);
  CHECK(lift.apply(x) == lift.apply(x));
  CHECK_THROWS_AS(KernelLift(Matrix(5, 0), Kernel{}), Error);
}

TEST_CASE("incremental learning in the lifted space matches a batch solve there") {
  Rng rng(10);
  const Matrix seed = random_matrix(6, 5, rng);
  const KernelLift lift(seed, Kernel{KernelKind::kLinear, 1.0});
  std::vector<Label> labels = class_ids(5, 5);
  IncrementalState s = IncrementalState::init(lift.apply(seed), onehot(labels), 0.1);
  Matrix raw = seed;
  for (int step = 0; step < 10; ++step) {
    const Matrix x = random_matrix(6, 2, rng);
    const std::vector<Label> l{static_cast<Label>(10 + step), static_cast<Label>(10 + step)};
    s.update_labeled(lift.apply(x), l);
    Matrix grown(6, raw.cols() + 2);
    grown << raw, x;
    raw = grown;
    labels.insert(labels.end(), l.begin(), l.end());
  }
  const EmbeddingModel batch = fit_linear(lift.apply(raw), onehot(labels).Y, 0.1);
  CHECK(relative_frobenius(s.P(), batch.P) < 1e-9);
}
