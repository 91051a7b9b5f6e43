// include/irs/regression.hpp

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

#ifndef IRS_REGRESSION_HPP_
#define IRS_REGRESSION_HPP_

#include <span>
#include <string>

#include "irs/coding.hpp"
#include "irs/common.hpp"
#include "irs/dataset.hpp"

namespace irs {

constexpr double kDefaultLambda = 0.1;

enum class KernelKind { kRbf, kLinear };

/// k(a, b) = exp(-||a - b||^2 / (2 h^2)) for kRbf, <a, b> for kLinear.
struct Kernel {
  KernelKind kind = KernelKind::kRbf;
  double bandwidth = 1.0;  // unused by kLinear

  /// Gram matrix between the columns of a and b: a.cols() x b.cols().
  Matrix gram(const Matrix& a, const Matrix& b) const;
};

/// RBF Gram matrix, columns are samples.
Matrix rbf_kernel(const Matrix& a, const Matrix& b, double bandwidth);
inline Matrix rbf_kernel(const FeatureMatrix& a, const FeatureMatrix& b, double bandwidth) {
  return rbf_kernel(a.data(), b.data(), bandwidth);
}

/// Median of the pairwise Euclidean distances between distinct columns.
double median_bandwidth(const Matrix& x);

enum class ModelKind { kLinear, kKernel };

struct SolverInfo {
  std::string method;        // "cholesky" or "pinv"
  Index effective_rank = 0;  // rank of the system matrix that was inverted
};

/// Learned projection onto the identity regression space.
struct EmbeddingModel {
  ModelKind kind = ModelKind::kLinear;
  double lambda = kDefaultLambda;
  Matrix P;  // d x m, linear models

  // Kernel models: embedding of x is k(x, anchors) * Q.
  Kernel kernel;
  Matrix anchors;  // d x n_a
  Matrix Q;        // n_a x m

  SolverInfo solver;

  Index input_dim() const { return kind == ModelKind::kLinear ? P.rows() : anchors.rows(); }
  Index width() const { return kind == ModelKind::kLinear ? P.cols() : Q.cols(); }
};

/// Minimiser of 1/2 ||X^T P - Y||_F^2 + lambda ||P||_F^2, i.e.
/// P = (X X^T + lambda I)^+ X Y. lambda > 0 is a Cholesky solve; lambda == 0
/// goes through a symmetric pseudo-inverse with cutoff
/// sigma_max * max(d, n) * eps, and a rank-deficient system is logged with its
/// effective rank.
EmbeddingModel fit_linear(const Matrix& X, const Matrix& Y, double lambda);
EmbeddingModel fit_linear(const FeatureMatrix& X, const TargetCoding& Y, double lambda);

/// Q = (K K^T + lambda K)^+ K Y with K the training Gram matrix. Always solved
/// through the pseudo-inverse since K may be singular.
EmbeddingModel fit_kernel(const Matrix& X, const Matrix& Y, double lambda, const Kernel& kernel);
EmbeddingModel fit_kernel(const FeatureMatrix& X, const TargetCoding& Y, double lambda,
                          const Kernel& kernel);

/// Embedded samples as rows: n x m.
Matrix embed(const EmbeddingModel& model, const Matrix& X);
inline Matrix embed(const EmbeddingModel& model, const FeatureMatrix& X) {
  return embed(model, X.data());
}

/// Unsquared Euclidean distance between two embedded rows. Ranking under it
/// is identical to ranking under the squared quadratic form
/// (x1 - x2)^T P P^T (x1 - x2).
double match_distance(std::span<const double> e1, std::span<const double> e2);
double match_distance(const RowVector& e1, const RowVector& e2);

/// Pairwise squared Euclidean distances between rows of a and rows of b.
Matrix squared_distances(const Matrix& a, const Matrix& b);
/// Unsquared version of the above.
Matrix distances(const Matrix& a, const Matrix& b);

/// Moore-Penrose inverse of a symmetric matrix via its eigendecomposition,
/// discarding eigenvalues with |mu| <= |mu|_max * scale * eps.
Matrix symmetric_pinv(const Matrix& a, double scale, Index* rank = nullptr);

/// Discriminant directions solving (S_t + lambda I)^+ S_b g = alpha g, with
/// S_t = sum x x^T and S_b = sum_j n_j u_j u_j^T built from class centroids.
/// Columns of G are scaled so that g^T (S_t + lambda I) g = alpha.
struct FdaSolution {
  Matrix G;        // d x q
  Vector eigvals;  // q, descending
};

/// Test-oracle grade. X must already be zero-centred.
FdaSolution fda_solve(const Matrix& X, std::span<const Label> ids, double lambda);

}  // namespace irs

#endif  // IRS_REGRESSION_HPP_
