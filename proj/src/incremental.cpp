// src/incremental.cpp

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

#include "irs/incremental.hpp"

#include <algorithm>
#include <unordered_set>

namespace irs {

IncrementalState IncrementalState::init(const Matrix& X0, const TargetCoding& Y0, double lambda) {
  if (!(lambda > 0.0)) throw Error("incremental init requires lambda > 0");
  if (X0.cols() == 0 || X0.rows() == 0) throw Error("incremental init requires a nonempty seed set");
  if (Y0.Y.rows() != X0.cols()) throw Error("incremental init: X0/Y0 sample count mismatch");
  if (static_cast<Index>(Y0.classes.size()) != Y0.Y.cols()) {
    throw Error("incremental init: target width must equal the number of registered classes");
  }
  IncrementalState s;
  const Index d = X0.rows();
  Matrix t = X0 * X0.transpose();
  t.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(t);
  if (llt.info() != Eigen::Success) throw Error("incremental init: T0 not positive definite");
  s.tinv_ = llt.solve(Matrix::Identity(d, d));
  s.resymmetrize();
  s.p_ = s.tinv_ * (X0 * Y0.Y);
  s.classes_ = Y0.classes;
  s.lambda_ = lambda;
  s.n_seen_ = X0.cols();
  return s;
}

IncrementalState IncrementalState::init(const FeatureMatrix& X0, const TargetCoding& Y0,
                                        double lambda) {
  return init(X0.data(), Y0, lambda);
}

IncrementalState IncrementalState::restore(Matrix tinv, Matrix p, ClassRegistry classes,
                                           double lambda, Index n_seen, Index update_count) {
  if (tinv.rows() != tinv.cols() || p.rows() != tinv.rows()) throw Error("restore: shape mismatch");
  if (static_cast<Index>(classes.size()) != p.cols()) throw Error("restore: registry/P width mismatch");
  IncrementalState s;
  s.tinv_ = std::move(tinv);
  s.p_ = std::move(p);
  s.classes_ = std::move(classes);
  s.lambda_ = lambda;
  s.n_seen_ = n_seen;
  s.update_count_ = update_count;
  return s;
}

bool IncrementalState::use_rank_one_path(Index n_new, Index dim) {
  return n_new * 50 <= dim && n_new <= 32;
}

void IncrementalState::check_batch(const Matrix& Xp, const Matrix& Yp,
                                   std::span<const Label> new_classes) const {
  if (tinv_.size() == 0) throw Error("update on an uninitialised state");
  if (Xp.rows() != dim()) {
    throw Error("update: sample dim " + std::to_string(Xp.rows()) + " != model dim " +
                std::to_string(dim()));
  }
  if (Yp.rows() != Xp.cols()) throw Error("update: Xp/Yp sample count mismatch");
  const auto expected = static_cast<Index>(classes_.size() + new_classes.size());
  if (Yp.cols() != expected) {
    throw Error("update: target width " + std::to_string(Yp.cols()) + " != registered (" +
                std::to_string(classes_.size()) + ") + new (" + std::to_string(new_classes.size()) +
                ") classes");
  }
  std::unordered_set<Label> fresh;
  for (Label l : new_classes) {
    if (classes_.contains(l) || !fresh.insert(l).second) {
      throw Error("update: class " + std::to_string(l) + " is already registered");
    }
  }
}

void IncrementalState::register_classes(std::span<const Label> new_classes) {
  if (new_classes.empty()) return;
  for (Label l : new_classes) classes_.add(l);
  const Index old = p_.cols();
  p_.conservativeResize(Eigen::NoChange, static_cast<Index>(classes_.size()));
  p_.rightCols(p_.cols() - old).setZero();
}

void IncrementalState::resymmetrize() {
  Matrix sym = 0.5 * (tinv_ + tinv_.transpose());
  tinv_.swap(sym);
}

void IncrementalState::update(const Matrix& Xp, const Matrix& Yp, std::span<const Label> new_classes) {
  check_batch(Xp, Yp, new_classes);
  register_classes(new_classes);
  const Index np = Xp.cols();
  if (np == 0) return;

  const Matrix k = tinv_ * Xp;  // d x n'
  Matrix s = Xp.transpose() * k;
  s.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw Error("update: I + X'^T T^{-1} X' not positive definite");
  // K S^{-1}; S is symmetric. Note T_{t+1}^{-1} X' = K S^{-1} as well.
  const Matrix ks = llt.solve(k.transpose()).transpose();

  tinv_.noalias() -= ks * k.transpose();
  const Matrix xtp = Xp.transpose() * p_;
  p_.noalias() -= ks * xtp;
  p_.noalias() += ks * Yp;
  resymmetrize();
  n_seen_ += np;
  ++update_count_;
}

void IncrementalState::update_rank_one(const Matrix& Xp, const Matrix& Yp,
                                       std::span<const Label> new_classes) {
  check_batch(Xp, Yp, new_classes);
  register_classes(new_classes);
  const Index np = Xp.cols();
  if (np == 0) return;
  for (Index i = 0; i < np; ++i) {
    const auto x = Xp.col(i);
    const Vector k = tinv_ * x;
    const double s = 1.0 + x.dot(k);
    tinv_.noalias() -= (k / s) * k.transpose();
    const RowVector resid = Yp.row(i) - x.transpose() * p_;
    p_.noalias() += (k / s) * resid;
    resymmetrize();
  }
  n_seen_ += np;
  ++update_count_;
}

void IncrementalState::update_auto(const Matrix& Xp, const Matrix& Yp,
                                   std::span<const Label> new_classes) {
  if (use_rank_one_path(Xp.cols(), dim())) {
    update_rank_one(Xp, Yp, new_classes);
  } else {
    update(Xp, Yp, new_classes);
  }
}

void IncrementalState::update_labeled(const Matrix& Xp, std::span<const Label> labels) {
  if (static_cast<Index>(labels.size()) != Xp.cols()) throw Error("update: label count mismatch");
  std::vector<Label> fresh;
  std::unordered_set<Label> seen;
  for (Label l : labels) {
    if (!classes_.contains(l) && seen.insert(l).second) fresh.push_back(l);
  }
  const auto width = static_cast<Index>(classes_.size() + fresh.size());
  Matrix yp = Matrix::Zero(Xp.cols(), width);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Index col;
    if (classes_.contains(labels[i])) {
      col = classes_.column(labels[i]);
    } else {
      col = static_cast<Index>(classes_.size()) +
            static_cast<Index>(std::find(fresh.begin(), fresh.end(), labels[i]) - fresh.begin());
    }
    yp(static_cast<Index>(i), col) = 1.0;
  }
  update_auto(Xp, yp, fresh);
}

EmbeddingModel IncrementalState::model() const {
  EmbeddingModel m;
  m.kind = ModelKind::kLinear;
  m.lambda = lambda_;
  m.P = p_;
  m.solver = {"woodbury", dim()};
  return m;
}

KernelLift::KernelLift(Matrix anchors, Kernel kernel)
    : anchors_(std::move(anchors)), kernel_(kernel) {
  if (anchors_.cols() == 0) throw Error("kernel lift: anchor set is empty");
  if (kernel_.kind == KernelKind::kRbf && !(kernel_.bandwidth > 0.0)) {
    throw Error("kernel lift: bandwidth must be positive");
  }
}

Matrix KernelLift::apply(const Matrix& X) const {
  return kernel_.gram(anchors_, X);
}

FeatureMatrix KernelLift::apply(const FeatureMatrix& X) const {
  return FeatureMatrix(apply(X.data()), X.ids(), X.cams());
}

}  // namespace irs
