// include/irs/coding.hpp

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

#ifndef IRS_CODING_HPP_
#define IRS_CODING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "irs/common.hpp"

namespace irs {

enum class CodingScheme { kOneHot, kFda, kRandom };

CodingScheme parse_coding(const std::string& name);
std::string to_string(CodingScheme s);

/// Maps identity labels to target columns in first-registration order.
class ClassRegistry {
 public:
  ClassRegistry() = default;
  explicit ClassRegistry(std::span<const Label> labels_in_order);

  /// Returns the column for `label`, registering it if new.
  Index add(Label label);
  bool contains(Label label) const { return col_.count(label) != 0; }
  Index column(Label label) const;
  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }

 private:
  std::vector<Label> labels_;
  std::unordered_map<Label, Index> col_;
};

/// Regression targets, one row per sample.
struct TargetCoding {
  Matrix Y;  // n x m
  ClassRegistry classes;
  CodingScheme scheme = CodingScheme::kOneHot;
  std::uint64_t seed = 0;

  Index width() const { return Y.cols(); }
};

/// One unit axis per class. m == 0 means "number of distinct labels".
TargetCoding onehot(std::span<const Label> ids, Index m = 0);

/// As onehot but the nonzero entry is 1/sqrt(n_i), n_i the class size.
TargetCoding fda(std::span<const Label> ids, Index m = 0);

/// One uniform [0,1) vector per class, drawn in registration order.
TargetCoding random_coding(std::span<const Label> ids, Index m, std::uint64_t seed);

TargetCoding make_coding(CodingScheme scheme, std::span<const Label> ids, Index m = 0,
                         std::uint64_t seed = 0);

}  // namespace irs

#endif  // IRS_CODING_HPP_
