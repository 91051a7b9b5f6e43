// src/regression.cpp

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

#include "irs/regression.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include <spdlog/spdlog.h>

namespace irs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_targets(const Matrix& X, const Matrix& Y, double lambda) {
  if (Y.rows() != X.cols()) {
    throw Error("dimension mismatch: X has " + std::to_string(X.cols()) + " samples, Y has " +
                std::to_string(Y.rows()) + " rows");
  }
  if (!(lambda >= 0.0)) throw Error("lambda must be nonnegative");
}

}  // namespace

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double bandwidth) {
  if (!(bandwidth > 0.0)) throw Error("RBF bandwidth must be positive");
  if (a.rows() != b.rows()) throw Error("kernel: dimension mismatch");
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  Matrix k = squared_distances(a.transpose(), b.transpose());
  return (-gamma * k.array()).exp().matrix();
}

Matrix Kernel::gram(const Matrix& a, const Matrix& b) const {
  if (kind == KernelKind::kLinear) {
    if (a.rows() != b.rows()) throw Error("kernel: dimension mismatch");
    return a.transpose() * b;
  }
  return rbf_kernel(a, b, bandwidth);
}

double median_bandwidth(const Matrix& x) {
  const Index n = x.cols();
  if (n < 2) throw Error("median bandwidth needs at least two samples");
  Matrix d = distances(x.transpose(), x.transpose());
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) v.push_back(d(i, j));
  }
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double med = *mid;
  if (v.size() % 2 == 0) med = 0.5 * (med + *std::max_element(v.begin(), mid));
  if (!(med > 0.0)) throw Error("median bandwidth is zero (duplicate samples)");
  return med;
}

Matrix symmetric_pinv(const Matrix& a, double scale, Index* rank) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const Vector& mu = es.eigenvalues();
  const double cutoff = mu.cwiseAbs().maxCoeff() * scale * kEps;
  Vector inv = Vector::Zero(mu.size());
  Index r = 0;
  for (Index i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i)) > cutoff) {
      inv(i) = 1.0 / mu(i);
      ++r;
    }
  }
  if (rank) *rank = r;
  const Matrix& u = es.eigenvectors();
  return u * inv.asDiagonal() * u.transpose();
}

EmbeddingModel fit_linear(const Matrix& X, const Matrix& Y, double lambda) {
  check_targets(X, Y, lambda);
  EmbeddingModel model;
  model.kind = ModelKind::kLinear;
  model.lambda = lambda;
  const Index d = X.rows();
  Matrix t = X * X.transpose();
  t.diagonal().array() += lambda;
  const Matrix xy = X * Y;
  if (lambda > 0.0) {
    Eigen::LLT<Matrix> llt(t);
    if (llt.info() != Eigen::Success) throw Error("Cholesky factorisation failed");
    model.P = llt.solve(xy);
    model.solver = {"cholesky", d};
  } else {
    Index r = 0;
    const double scale = static_cast<double>(std::max(d, X.cols()));
    model.P = symmetric_pinv(t, scale, &r) * xy;
    model.solver = {"pinv", r};
    if (r < d) spdlog::warn("fit_linear: X X^T is rank deficient (effective rank {} of {})", r, d);
  }
  return model;
}

EmbeddingModel fit_linear(const FeatureMatrix& X, const TargetCoding& Y, double lambda) {
  return fit_linear(X.data(), Y.Y, lambda);
}

EmbeddingModel fit_kernel(const Matrix& X, const Matrix& Y, double lambda, const Kernel& kernel) {
  check_targets(X, Y, lambda);
  EmbeddingModel model;
  model.kind = ModelKind::kKernel;
  model.lambda = lambda;
  model.kernel = kernel;
  model.anchors = X;
  const Matrix k = kernel.gram(X, X);
  Matrix a = k * k.transpose() + lambda * k;
  a = 0.5 * (a + a.transpose());
  Index r = 0;
  const double scale = static_cast<double>(std::max(X.rows(), X.cols()));
  model.Q = symmetric_pinv(a, scale, &r) * (k * Y);
  model.solver = {"pinv", r};
  if (r < X.cols()) {
    spdlog::info("fit_kernel: system matrix effective rank {} of {}", r, X.cols());
  }
  return model;
}

EmbeddingModel fit_kernel(const FeatureMatrix& X, const TargetCoding& Y, double lambda,
                          const Kernel& kernel) {
  return fit_kernel(X.data(), Y.Y, lambda, kernel);
}

Matrix embed(const EmbeddingModel& model, const Matrix& X) {
  if (X.rows() != model.input_dim()) {
    throw Error("embed: input has d=" + std::to_string(X.rows()) + ", model expects d=" +
                std::to_string(model.input_dim()));
  }
  if (model.kind == ModelKind::kLinear) return X.transpose() * model.P;
  return model.kernel.gram(X, model.anchors) * model.Q;
}

double match_distance(std::span<const double> e1, std::span<const double> e2) {
  if (e1.size() != e2.size()) throw Error("match_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < e1.size(); ++i) {
    const double t = e1[i] - e2[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double match_distance(const RowVector& e1, const RowVector& e2) {
  return match_distance(std::span<const double>(e1.data(), static_cast<std::size_t>(e1.size())),
                        std::span<const double>(e2.data(), static_cast<std::size_t>(e2.size())));
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw Error("distances: width mismatch");
  // Explicit differences: coincident rows give exactly zero.
  Matrix d(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j) {
    d.col(j) = (a.rowwise() - b.row(j)).rowwise().squaredNorm();
  }
  return d;
}

Matrix distances(const Matrix& a, const Matrix& b) { return squared_distances(a, b).cwiseSqrt(); }

FdaSolution fda_solve(const Matrix& X, std::span<const Label> ids, double lambda) {
  if (static_cast<std::size_t>(X.cols()) != ids.size()) throw Error("fda_solve: label count mismatch");
  if (!(lambda >= 0.0)) throw Error("lambda must be nonnegative");
  const Index d = X.rows();

  // Scatter matrices from class centroids (the 1/n factor cancels).
  std::map<Label, std::pair<Vector, double>> classes;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, fresh] = classes.try_emplace(ids[i], Vector::Zero(d), 0.0);
    it->second.first += X.col(static_cast<Index>(i));
    it->second.second += 1.0;
  }
  if (classes.size() < 2) throw Error("fda_solve needs at least two classes");
  Matrix sb = Matrix::Zero(d, d);
  for (auto& [label, acc] : classes) {
    const Vector u = acc.first / acc.second;
    sb.noalias() += acc.second * u * u.transpose();
  }
  Matrix st = X * X.transpose();
  st.diagonal().array() += lambda;

  // Whiten by (S_t + lambda I)^{+1/2} restricted to its range, then solve the
  // symmetric problem there.
  Eigen::SelfAdjointEigenSolver<Matrix> te(st);
  if (te.info() != Eigen::Success) throw Error("fda_solve: eigen-solver failure");
  const Vector& mu = te.eigenvalues();
  const double cutoff = mu.cwiseAbs().maxCoeff() * static_cast<double>(std::max(d, X.cols())) * kEps;
  std::vector<Index> keep;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > cutoff) keep.push_back(i);
  }
  Matrix w(d, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    w.col(static_cast<Index>(k)) = te.eigenvectors().col(keep[k]) / std::sqrt(mu(keep[k]));
  }
  Matrix b = w.transpose() * sb * w;
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> be(b);
  if (be.info() != Eigen::Success) throw Error("fda_solve: eigen-solver failure");

  const Vector& alpha = be.eigenvalues();  // ascending
  const double amax = alpha.size() ? alpha.maxCoeff() : 0.0;
  std::vector<Index> order;
  for (Index i = alpha.size() - 1; i >= 0; --i) {
    if (alpha(i) > amax * 1e-10 && alpha(i) > 0.0) order.push_back(i);
  }
  if (order.size() > classes.size() - 1) {
    throw Error("fda_solve: between-class rank exceeds c-1; is X zero-centred?");
  }
  FdaSolution sol;
  sol.G.resize(d, static_cast<Index>(order.size()));
  sol.eigvals.resize(static_cast<Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double a = alpha(order[k]);
    sol.G.col(static_cast<Index>(k)) = std::sqrt(a) * (w * be.eigenvectors().col(order[k]));
    sol.eigvals(static_cast<Index>(k)) = a;
  }
  return sol;
}

}  // namespace irs
