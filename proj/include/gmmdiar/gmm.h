// Copyright 2026 The gmmdiar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GMMDIAR_GMM_H_
#define GMMDIAR_GMM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <vector>

#include "gmmdiar/common.h"

namespace gmmdiar {

inline constexpr double kVarianceFloor = 1e-6;

// Diagonal-covariance Gaussian mixture. Row m of `means` / `variances`
// belongs to component m.
template <typename Scalar>
struct GaussianMixture {
  Vector<Scalar> weights;
  Matrix<Scalar> means;
  Matrix<Scalar> variances;

  Eigen::Index n_components() const { return weights.size(); }
  Eigen::Index dim() const { return means.cols(); }
};

using GaussianMixtureD = GaussianMixture<double>;

// Free parameters: (M - 1) weights + M*d means + M*d variances.
template <typename Scalar>
Eigen::Index n_params(const GaussianMixture<Scalar>& model) {
  return model.n_components() * (2 * model.dim() + 1) - 1;
}

// n x M matrix of ln(w_m) + ln N(x_t; mu_m, diag var_m).
template <typename Scalar, typename Derived>
Matrix<Scalar> weighted_log_densities(const GaussianMixture<Scalar>& model,
                                      const Eigen::MatrixBase<Derived>& x) {
  if (x.cols() != model.dim()) throw Error(ErrorCode::kShapeMismatch, "data dim differs from model dim");
  const Eigen::Index n = x.rows();
  const Eigen::Index m_count = model.n_components();
  const Scalar log_2pi = std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  Matrix<Scalar> out(n, m_count);
  for (Eigen::Index m = 0; m < m_count; ++m) {
    const auto var = model.variances.row(m).array();
    const Scalar log_norm =
        std::log(model.weights[m]) - Scalar(0.5) * (Scalar(model.dim()) * log_2pi + var.log().sum());
    const RowVector<Scalar> inv_var = var.inverse().matrix();
    const Vector<Scalar> mahalanobis =
        ((x.rowwise() - model.means.row(m)).array().square().rowwise() * inv_var.array()).rowwise().sum();
    out.col(m) = (Scalar(-0.5) * mahalanobis.array() + log_norm).matrix();
  }
  return out;
}

// Row-wise log-sum-exp.
template <typename Scalar>
Vector<Scalar> log_sum_exp_rows(const Matrix<Scalar>& a) {
  const Eigen::Index cols = a.cols();
  Vector<Scalar> out(a.rows());
  std::vector<Scalar> terms(static_cast<std::size_t>(cols));
  for (Eigen::Index t = 0; t < a.rows(); ++t) {
    const Scalar* row = a.data() + t * cols;  // row-major
    const Scalar peak = *std::max_element(row, row + cols);
    if (!std::isfinite(peak)) {
      out[t] = peak;
      continue;
    }
    // Sorted accumulation so the result does not depend on component order.
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Scalar v = std::exp(row[j] - peak);
      std::size_t k = static_cast<std::size_t>(j);
      for (; k > 0 && terms[k - 1] > v; --k) terms[k] = terms[k - 1];
      terms[k] = v;
    }
    out[t] = peak + std::log(std::accumulate(terms.begin(), terms.end(), Scalar(0)));
  }
  return out;
}

template <typename Scalar, typename Derived>
Scalar log_likelihood(const GaussianMixture<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "log-likelihood of empty data");
  return log_sum_exp_rows(weighted_log_densities(model, x)).sum();
}

// Posterior component probabilities, n x M; each row sums to one.
template <typename Scalar, typename Derived>
Matrix<Scalar> responsibilities(const GaussianMixture<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  Matrix<Scalar> logp = weighted_log_densities(model, x);
  const Vector<Scalar> norm = log_sum_exp_rows(logp);
  return (logp.colwise() - norm).array().exp().matrix();
}

template <typename Scalar, typename Derived>
Scalar aic(const GaussianMixture<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return Scalar(2) * Scalar(n_params(model)) - Scalar(2) * log_likelihood(model, x);
}

template <typename Scalar, typename Derived>
Scalar bic(const GaussianMixture<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
  return Scalar(n_params(model)) * std::log(Scalar(x.rows())) - Scalar(2) * log_likelihood(model, x);
}

struct EmConfig {
  int max_iters = 200;
  double tol = 1e-4;
  std::uint64_t seed = 42;
  int n_init = 5;  // random-row restarts; the highest final likelihood wins
};

struct FitReport {
  std::vector<double> log_likelihood_trace;
  int n_iters = 0;  // M-steps performed
  bool converged = false;
  std::uint64_t seed = 0;  // seed of the winning restart
};

struct FitResult {
  GaussianMixtureD model;
  FitReport report;
};

// EM from M distinct seeded data rows, global per-dimension variances and
// uniform weights. Stops when the log-likelihood gain drops below tol.
FitResult fit_em(const MatrixXd& x, int n_components, const EmConfig& cfg = {});

enum class Criterion { kAic, kBic };

struct CurvePoint {
  int n_components = 0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
};

struct SelectionResult {
  int best_n_components = 0;
  std::vector<CurvePoint> curve;
  std::vector<FitResult> fits;  // one per candidate, ascending M
  const FitResult& best() const {
    return fits[static_cast<std::size_t>(best_n_components - curve.front().n_components)];
  }
};

// Fits every M in [m_lo, m_hi] (seed for M is DeriveSeed(cfg.seed, M)) and
// returns the criterion argmin; ties go to the smaller M.
SelectionResult select_n_components(const MatrixXd& x, int m_lo, int m_hi, Criterion criterion,
                                    const EmConfig& cfg = {}, int jobs = 1);

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

// Text format: "gmm v1 M d", weights, M mean rows, M variance rows.
void write_gmm(std::ostream& os, const GaussianMixtureD& model);
GaussianMixtureD read_gmm(std::istream& is);

// Throws unless weights lie on the simplex and variances respect the floor.
void validate(const GaussianMixtureD& model);

}  // namespace gmmdiar

#endif  // GMMDIAR_GMM_H_
