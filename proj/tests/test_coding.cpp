// tests/test_coding.cpp

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

using namespace irs;

TEST_CASE("onehot rows") {
  const std::vector<Label> ids{1, 2, 1};
  const TargetCoding t = onehot(ids, 2);
  Matrix expected(3, 2);
  expected << 1, 0, 0, 1, 1, 0;
  CHECK(t.Y == expected);
  CHECK(t.classes.labels() == std::vector<Label>{1, 2});
}

TEST_CASE("onehot pads unused columns") {
  const std::vector<Label> ids{7};
  const TargetCoding t = onehot(ids, 3);
  CHECK(t.Y.rows() == 1);
  CHECK(t.Y.cols() == 3);
  CHECK(t.Y(0, 0) == 1.0);
  CHECK(t.Y(0, 1) == 0.0);
  CHECK(t.Y(0, 2) == 0.0);
}

TEST_CASE("onehot column sums are class counts") {
  const std::vector<Label> ids{4, 4, 9, 4, 2, 9};
  const TargetCoding t = onehot(ids);
  REQUIRE(t.width() == 3);
  const RowVector sums = t.Y.colwise().sum();
  CHECK(sums(t.classes.column(4)) == 3.0);
  CHECK(sums(t.classes.column(9)) == 2.0);
  CHECK(sums(t.classes.column(2)) == 1.0);
}

TEST_CASE("width smaller than class count is rejected") {
  const std::vector<Label> ids{1, 2, 3};
  CHECK_THROWS_AS(onehot(ids, 2), Error);
  CHECK_THROWS_AS(fda(ids, 2), Error);
}

TEST_CASE("fda values") {
  const std::vector<Label> ids{1, 1, 2};
  const TargetCoding t = fda(ids, 2);
  CHECK(t.Y(0, 0) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(t.Y(1, 0) == doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(t.Y(2, 1) == 1.0);
  CHECK(t.Y(0, 1) == 0.0);
  CHECK(t.Y(2, 0) == 0.0);
}

TEST_CASE("fda equals onehot with singleton classes") {
  const std::vector<Label> ids{5, 3, 8, 1};
  CHECK(fda(ids, 6).Y == onehot(ids, 6).Y);
}

TEST_CASE("fda is scaled onehot for balanced classes") {
  const std::vector<Label> ids{1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3};
  const Matrix a = fda(ids).Y;
  const Matrix b = onehot(ids).Y / 2.0;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("random coding is seeded and shared within a class") {
  const std::vector<Label> ids{1, 2, 1, 3};
  const TargetCoding a = random_coding(ids, 5, 11);
  const TargetCoding b = random_coding(ids, 5, 11);
  CHECK(a.Y == b.Y);
  CHECK(a.Y.row(0) == a.Y.row(2));
  CHECK(a.Y.row(0) != a.Y.row(1));
  CHECK(random_coding(ids, 5, 12).Y != a.Y);
  const std::vector<Label> same{4, 4};
  const TargetCoding c = random_coding(same, 3, 0);
  CHECK(c.Y.row(0) == c.Y.row(1));
  CHECK(a.Y.minCoeff() >= 0.0);
  CHECK(a.Y.maxCoeff() < 1.0);
}

TEST_CASE("scheme names") {
  for (auto s : {CodingScheme::kOneHot, CodingScheme::kFda, CodingScheme::kRandom}) {
    CHECK(parse_coding(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_coding("ecoc"), Error);
}

TEST_CASE("class registry keeps first-seen order") {
  ClassRegistry reg;
  CHECK(reg.add(10) == 0);
  CHECK(reg.add(3) == 1);
  CHECK(reg.add(10) == 0);
  CHECK(reg.size() == 2);
  CHECK(reg.column(3) == 1);
  CHECK_THROWS_AS(reg.column(99), Error);
}
