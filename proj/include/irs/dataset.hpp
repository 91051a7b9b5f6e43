// include/irs/dataset.hpp

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

#ifndef IRS_DATASET_HPP_
#define IRS_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "irs/common.hpp"

namespace irs {

/// Samples stored one per column: data is d x n. Every sample carries an
/// identity label and a camera label. Values are validated on construction
/// (finite, label counts match) and never change afterwards.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(Matrix data, std::vector<Label> ids, std::vector<Label> cams);

  const Matrix& data() const { return data_; }
  const std::vector<Label>& ids() const { return ids_; }
  const std::vector<Label>& cams() const { return cams_; }

  Index dim() const { return data_.rows(); }
  Index size() const { return data_.cols(); }
  bool empty() const { return data_.cols() == 0; }

  auto sample(Index i) const { return data_.col(i); }

  /// Columns in the given order (duplicates allowed).
  FeatureMatrix select(std::span<const Index> columns) const;

  /// Horizontal concatenation; dims must agree.
  static FeatureMatrix concat(const FeatureMatrix& a, const FeatureMatrix& b);

  /// Distinct identity labels in first-appearance order.
  std::vector<Label> distinct_ids() const;

 private:
  Matrix data_;
  std::vector<Label> ids_;
  std::vector<Label> cams_;
};

/// Optional per-dataset extras carried alongside the features.
struct Dataset {
  std::string name;
  FeatureMatrix features;
  std::vector<std::string> images;  // thumbnail paths, empty when absent
};

struct SplitSpec {
  std::set<Label> train_ids;
  std::set<Label> test_ids;
  Label probe_cam = 1;
  Label gallery_cam = 2;
  std::uint64_t seed = 0;
};

struct SyntheticSpec {
  int num_ids = 10;
  int imgs_per_id_per_cam = 1;
  int dim = 8;
  double view_shift_scale = 1.0;
  double noise_scale = 0.1;
  std::uint64_t seed = 0;
};

enum class FeatureFormat { kCsv, kF64le };

/// Loads a JSON manifest and the feature file it references. Relative paths
/// inside the manifest resolve against the manifest's directory.
Dataset load_features(const std::filesystem::path& manifest_path);

/// Writes features (and labels) next to the manifest and the manifest itself.
/// Label arrays are written inline.
void write_dataset(const std::filesystem::path& manifest_path, const Dataset& ds,
                   FeatureFormat format);

/// Raw "f64le" feature file: magic "IRSFEAT1", u32 rows, u32 cols, then
/// rows*cols little-endian doubles, column-major.
void write_f64le(std::ostream& out, const Matrix& m);
Matrix read_f64le(std::istream& in);
void write_f64le_file(const std::filesystem::path& path, const Matrix& m);
Matrix read_f64le_file(const std::filesystem::path& path);

/// One sample per row, comma separated.
Matrix read_csv_features(const std::filesystem::path& path);

/// Random identity partition; train gets round(ratio * c) identities, clamped
/// so that both sides are nonempty.
SplitSpec make_split(const FeatureMatrix& fm, double ratio, std::uint64_t seed,
                     Label probe_cam = 1, Label gallery_cam = 2);

/// Columns whose identity is in `ids` and camera equals `cam`, in storage
/// order.
std::vector<Index> columns_where(const FeatureMatrix& fm, const std::set<Label>& ids,
                                 Label cam);

/// Two-camera synthetic data. Draw order from Rng(seed): view-shift vector
/// (d normals), then one base vector per identity (d normals each), then the
/// per-sample noise in column order. Columns are ordered identity-major, then
/// camera (1, 2), then image. Identity labels are 1..num_ids.
FeatureMatrix gen_synthetic(const SyntheticSpec& spec);

/// Unit L2 norm per column; the only preprocessing op a manifest can request.
FeatureMatrix l2_normalize(const FeatureMatrix& fm);

}  // namespace irs

#endif  // IRS_DATASET_HPP_
