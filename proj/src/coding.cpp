// src/coding.cpp

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

#include "irs/coding.hpp"

namespace irs {

CodingScheme parse_coding(const std::string& name) {
  if (name == "onehot") return CodingScheme::kOneHot;
  if (name == "fda") return CodingScheme::kFda;
  if (name == "random") return CodingScheme::kRandom;
  throw Error("unknown coding scheme: " + name);
}

std::string to_string(CodingScheme s) {
  switch (s) {
    case CodingScheme::kOneHot: return "onehot";
    case CodingScheme::kFda: return "fda";
    case CodingScheme::kRandom: return "random";
  }
  return "?";
}

ClassRegistry::ClassRegistry(std::span<const Label> labels_in_order) {
  for (Label l : labels_in_order) add(l);
}

Index ClassRegistry::add(Label label) {
  auto it = col_.find(label);
  if (it != col_.end()) return it->second;
  const auto c = static_cast<Index>(labels_.size());
  labels_.push_back(label);
  col_.emplace(label, c);
  return c;
}

Index ClassRegistry::column(Label label) const {
  auto it = col_.find(label);
  if (it == col_.end()) throw Error("unregistered class label " + std::to_string(label));
  return it->second;
}

namespace {

Index resolve_width(const ClassRegistry& reg, Index m) {
  const auto c = static_cast<Index>(reg.size());
  if (m == 0) return c;
  if (m < c) {
    throw Error("coding width m=" + std::to_string(m) + " is smaller than the " +
                std::to_string(c) + " distinct identities");
  }
  return m;
}

TargetCoding axis_coding(std::span<const Label> ids, Index m, bool fda_scale) {
  TargetCoding tc;
  tc.classes = ClassRegistry(ids);
  tc.scheme = fda_scale ? CodingScheme::kFda : CodingScheme::kOneHot;
  const Index width = resolve_width(tc.classes, m);
  std::vector<double> counts(tc.classes.size(), 0.0);
  for (Label l : ids) counts[tc.classes.column(l)] += 1.0;
  tc.Y = Matrix::Zero(static_cast<Index>(ids.size()), width);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Index c = tc.classes.column(ids[i]);
    tc.Y(static_cast<Index>(i), c) = fda_scale ? 1.0 / std::sqrt(counts[c]) : 1.0;
  }
  return tc;
}

}  // namespace

TargetCoding onehot(std::span<const Label> ids, Index m) { return axis_coding(ids, m, false); }

TargetCoding fda(std::span<const Label> ids, Index m) { return axis_coding(ids, m, true); }

TargetCoding random_coding(std::span<const Label> ids, Index m, std::uint64_t seed) {
  TargetCoding tc;
  tc.classes = ClassRegistry(ids);
  tc.scheme = CodingScheme::kRandom;
  tc.seed = seed;
  const Index width = m == 0 ? static_cast<Index>(tc.classes.size()) : m;
  if (width < 1) throw Error("random coding needs m >= 1");
  Rng rng(seed);
  Matrix codes(static_cast<Index>(tc.classes.size()), width);
  for (Index r = 0; r < codes.rows(); ++r) {
    for (Index c = 0; c < width; ++c) codes(r, c) = rng.uniform();
  }
  tc.Y.resize(static_cast<Index>(ids.size()), width);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    tc.Y.row(static_cast<Index>(i)) = codes.row(tc.classes.column(ids[i]));
  }
  return tc;
}

TargetCoding make_coding(CodingScheme scheme, std::span<const Label> ids, Index m,
                         std::uint64_t seed) {
  switch (scheme) {
    case CodingScheme::kOneHot: return onehot(ids, m);
    case CodingScheme::kFda: return fda(ids, m);
    case CodingScheme::kRandom: return random_coding(ids, m, seed);
  }
  throw Error("bad coding scheme");
}

}  // namespace irs
