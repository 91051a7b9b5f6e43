// tests/test_dataset.cpp

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

#include <fstream>
#include <set>

#include <doctest.h>

#include "irs/dataset.hpp"
#include "test_support.hpp"

using namespace irs;
using irs::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv manifest with three samples") {
  TempDir tmp;
  write(tmp / "f.csv", "1,2,3,4\n5,6,7,8\n9,10,11,12\n");
  write(tmp / "m.json",
        R"({"features":"f.csv","format":"csv","d":4,"n":3,"ids":[1,1,2],"cams":[1,2,1]})");
  const Dataset ds = load_features(tmp / "m.json");
  CHECK(ds.features.size() == 3);
  CHECK(ds.features.dim() == 4);
  CHECK(ds.features.data()(3, 2) == 12.0);
  CHECK(ds.features.ids() == std::vector<Label>{1, 1, 2});
}

TEST_CASE("csv with a NaN cell is rejected with its position") {
  TempDir tmp;
  write(tmp / "f.csv", "1,2\nnan,4\n");
  write(tmp / "m.json", R"({"features":"f.csv","format":"csv","d":2,"n":2,"ids":[1,2],"cams":[1,2]})");
  CHECK(error_of([&] { load_features(tmp / "m.json"); }) == "non-finite value at (2,1)");
}

TEST_CASE("binary payload shorter than its header") {
  TempDir tmp;
  Rng rng(1);
  write_f64le_file(tmp / "f.f64", irs::testing::random_matrix(3, 4, rng));
  // Patch the column count from 4 to 5.
  {
    std::fstream f(tmp / "f.f64", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(12);
    const std::uint32_t cols = 5;
    f.write(reinterpret_cast<const char*>(&cols), 4);
  }
  CHECK(error_of([&] { read_f64le_file(tmp / "f.f64"); }) == "payload truncated");
}

TEST_CASE("f64le round trip and trailing bytes") {
  TempDir tmp;
  Rng rng(2);
  const Matrix m = irs::testing::random_matrix(5, 7, rng);
  write_f64le_file(tmp / "a.f64", m);
  CHECK(read_f64le_file(tmp / "a.f64") == m);
  std::ofstream(tmp / "a.f64", std::ios::app | std::ios::binary) << 'x';
  CHECK(error_of([&] { read_f64le_file(tmp / "a.f64"); }) == "trailing bytes after payload");
  write(tmp / "b.f64", "NOTMAGIC");
  CHECK(error_of([&] { read_f64le_file(tmp / "b.f64"); }).starts_with("bad magic"));
}

TEST_CASE("manifest errors") {
  TempDir tmp;
  CHECK(error_of([&] { load_features(tmp / "nope.json"); }).find("nope.json") != std::string::npos);
  write(tmp / "f.csv", "1,2\n3,4\n");
  write(tmp / "m.json", R"({"features":"f.csv","format":"csv","d":3,"n":2,"ids":[1,2],"cams":[1,2]})");
  CHECK_THROWS_AS(load_features(tmp / "m.json"), Error);
  write(tmp / "m.json", R"({"features":"f.csv","format":"csv","d":2,"n":2,"ids":[1],"cams":[1,2]})");
  CHECK_THROWS_AS(load_features(tmp / "m.json"), Error);
  write(tmp / "m.json", R"({"features":"f.csv","format":"csv","d":2,"n":2,"ids":[1,2]})");
  CHECK(error_of([&] { load_features(tmp / "m.json"); }) == "manifest missing field 'cams'");
}

TEST_CASE("label files, images and preprocessing") {
  TempDir tmp;
  write(tmp / "f.csv", "3,4\n0,2\n");
  write(tmp / "labels.txt", "id,cam\n7,1\n8,2\n");
  write(tmp / "m.json", R"({"features":"f.csv","format":"csv","d":2,"n":2,
      "ids":"labels.txt","cams":"labels.txt","images":["a.png","b.png"],"preprocess":["l2"]})");
  const Dataset ds = load_features(tmp / "m.json");
  CHECK(ds.features.ids() == std::vector<Label>{7, 8});
  CHECK(ds.features.cams() == std::vector<Label>{1, 2});
  CHECK(ds.images.size() == 2);
  CHECK(ds.images[0] == (tmp / "a.png").string());
  CHECK(ds.features.data()(0, 0) == doctest::Approx(0.6));
  CHECK(ds.features.data()(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("write_dataset round trips in both formats") {
  TempDir tmp;
  Dataset ds;
  ds.name = "s";
  ds.features = gen_synthetic({.num_ids = 4, .imgs_per_id_per_cam = 2, .dim = 3});
  write_dataset(tmp / "a.json", ds, FeatureFormat::kF64le);
  write_dataset(tmp / "b.json", ds, FeatureFormat::kCsv);
  const Dataset a = load_features(tmp / "a.json");
  const Dataset b = load_features(tmp / "b.json");
  CHECK(a.features.data() == ds.features.data());
  CHECK(a.features.ids() == ds.features.ids());
  CHECK(b.features.cams() == ds.features.cams());
  CHECK((b.features.data() - ds.features.data()).norm() < 1e-12);
}

TEST_CASE("split sizes and determinism") {
  SyntheticSpec spec{.num_ids = 632, .dim = 2};
  const FeatureMatrix big = gen_synthetic(spec);
  const SplitSpec s = make_split(big, 0.5, 3);
  CHECK(s.train_ids.size() == 316);
  CHECK(s.test_ids.size() == 316);
  for (Label id : s.train_ids) CHECK(s.test_ids.count(id) == 0);

  const FeatureMatrix two = gen_synthetic({.num_ids = 2, .dim = 2});
  const SplitSpec t = make_split(two, 0.5, 0);
  CHECK(t.train_ids.size() == 1);
  CHECK(t.test_ids.size() == 1);

  const SplitSpec again = make_split(big, 0.5, 3);
  CHECK(again.train_ids == s.train_ids);
  CHECK(make_split(big, 0.5, 4).train_ids != s.train_ids);
  CHECK_THROWS_AS(make_split(big, 1.0, 0), Error);
}

TEST_CASE("synthetic generator shape") {
  const FeatureMatrix fm = gen_synthetic({.num_ids = 10, .imgs_per_id_per_cam = 2, .dim = 8});
  CHECK(fm.size() == 40);
  CHECK(fm.dim() == 8);
  CHECK(fm.distinct_ids().size() == 10);
  for (Label c : fm.cams()) CHECK((c == 1 || c == 2));
}

TEST_CASE("zero noise makes same-camera images identical") {
  const FeatureMatrix fm =
      gen_synthetic({.num_ids = 5, .imgs_per_id_per_cam = 2, .dim = 6, .noise_scale = 0.0, .seed = 9});
  for (Label id = 1; id <= 5; ++id) {
    const auto cols = columns_where(fm, {id}, 1);
    REQUIRE(cols.size() == 2);
    CHECK(fm.sample(cols[0]) == fm.sample(cols[1]));
  }
}

TEST_CASE("zero noise and zero shift makes views identical") {
  const FeatureMatrix fm = gen_synthetic(
      {.num_ids = 6, .dim = 4, .view_shift_scale = 0.0, .noise_scale = 0.0, .seed = 2});
  for (Label id = 1; id <= 6; ++id) {
    const auto a = columns_where(fm, {id}, 1);
    const auto b = columns_where(fm, {id}, 2);
    CHECK(fm.sample(a[0]) == fm.sample(b[0]));
  }
}

TEST_CASE("feature matrix validation and selection") {
  Matrix m(2, 2);
  m << 1, 2, 3, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(FeatureMatrix(m, {1, 2}, {1, 2}), Error);
  m(1, 1) = 0;
  const FeatureMatrix fm(m, {1, 2}, {1, 2});
  const std::vector<Index> cols{1};
  const FeatureMatrix s = fm.select(cols);
  CHECK(s.size() == 1);
  CHECK(s.ids()[0] == 2);
  const FeatureMatrix c = FeatureMatrix::concat(fm, s);
  CHECK(c.size() == 3);
  CHECK(c.data()(0, 2) == 2.0);
}
