// include/irs/incremental.hpp

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

#ifndef IRS_INCREMENTAL_HPP_
#define IRS_INCREMENTAL_HPP_

#include <span>

#include "irs/coding.hpp"
#include "irs/common.hpp"
#include "irs/dataset.hpp"
#include "irs/regression.hpp"

namespace irs {

/// Running solution of the ridge objective under streaming data.
///
/// Holds T^{-1} = (lambda I + sum x x^T)^{-1} and the current projection P. No
/// training samples are retained: every update reads only the incoming batch.
/// Each update costs O(d^2 n') instead of a full O(d^2 n + d^3) re-solve.
class IncrementalState {
 public:
  IncrementalState() = default;

  /// T0 = X0 X0^T + lambda I, P0 = T0^{-1} X0 Y0. Requires lambda > 0 and a
  /// nonempty X0.
  static IncrementalState init(const Matrix& X0, const TargetCoding& Y0, double lambda);
  static IncrementalState init(const FeatureMatrix& X0, const TargetCoding& Y0, double lambda);

  /// Restores a state verbatim (checkpoint loading).
  static IncrementalState restore(Matrix tinv, Matrix p, ClassRegistry classes, double lambda,
                                  Index n_seen, Index update_count);

  /// Woodbury chunk update with new samples Xp (d x n') and targets Yp
  /// (n' x (m + new_classes.size())). New classes are appended to the registry
  /// and P gains one zero column for each before the data term is added.
  void update(const Matrix& Xp, const Matrix& Yp, std::span<const Label> new_classes = {});

  /// Same result as update(), but applies n' sequential rank-one updates when
  /// the batch is small relative to d (see use_rank_one_path()).
  void update_auto(const Matrix& Xp, const Matrix& Yp, std::span<const Label> new_classes = {});

  /// Forces the sequential rank-one path.
  void update_rank_one(const Matrix& Xp, const Matrix& Yp,
                       std::span<const Label> new_classes = {});

  /// One-hot targets built from labels; unseen labels become new classes in
  /// first-appearance order. Dispatches through update_auto().
  void update_labeled(const Matrix& Xp, std::span<const Label> labels);

  /// Per-sample path when n' <= d/50 and n' <= 32.
  static bool use_rank_one_path(Index n_new, Index dim);

  const Matrix& Tinv() const { return tinv_; }
  const Matrix& P() const { return p_; }
  const ClassRegistry& classes() const { return classes_; }
  double lambda() const { return lambda_; }
  Index n_seen() const { return n_seen_; }
  Index update_count() const { return update_count_; }
  Index dim() const { return tinv_.rows(); }

  /// Immutable linear model for the current P.
  EmbeddingModel model() const;

 private:
  void check_batch(const Matrix& Xp, const Matrix& Yp, std::span<const Label> new_classes) const;
  void register_classes(std::span<const Label> new_classes);
  void resymmetrize();

  Matrix tinv_;
  Matrix p_;
  ClassRegistry classes_;
  double lambda_ = kDefaultLambda;
  Index n_seen_ = 0;
  Index update_count_ = 0;
};

/// Maps raw samples to their kernel values against a fixed anchor set, so that
/// the linear incremental update can run in a space of fixed dimension n_a.
class KernelLift {
 public:
  KernelLift(Matrix anchors, Kernel kernel);

  /// n_a x n: column j holds k(x_j, anchor_i) over i.
  Matrix apply(const Matrix& X) const;
  FeatureMatrix apply(const FeatureMatrix& X) const;

  Index dim() const { return anchors_.cols(); }
  const Matrix& anchors() const { return anchors_; }
  const Kernel& kernel() const { return kernel_; }

 private:
  Matrix anchors_;
  Kernel kernel_;
};

}  // namespace irs

#endif  // IRS_INCREMENTAL_HPP_
