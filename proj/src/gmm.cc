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

#include "gmmdiar/gmm.h"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace gmmdiar {

namespace {

RowVectorXd BiasedVariance(const MatrixXd& x, const RowVectorXd& mean) {
  return (x.rowwise() - mean).array().square().colwise().mean().matrix();
}

std::vector<Eigen::Index> SampleDistinctRows(Eigen::Index n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

FitResult FitFromSeed(const MatrixXd& x, int n_components, const EmConfig& cfg, const RowVectorXd& global_var,
                      std::uint64_t seed) {
  const Eigen::Index d = x.cols();
  FitResult result;
  result.report.seed = seed;
  GaussianMixtureD& model = result.model;
  const auto m_count = static_cast<Eigen::Index>(n_components);
  model.weights = VectorXd::Constant(m_count, 1.0 / static_cast<double>(m_count));
  model.means.resize(m_count, d);
  model.variances = global_var.replicate(m_count, 1);
  const auto rows = SampleDistinctRows(x.rows(), n_components, seed);
  for (Eigen::Index m = 0; m < m_count; ++m) model.means.row(m) = x.row(rows[static_cast<std::size_t>(m)]);

  auto& trace = result.report.log_likelihood_trace;
  for (int iter = 0;; ++iter) {
    MatrixXd logp = weighted_log_densities(model, x);
    const VectorXd norm = log_sum_exp_rows(logp);
    const double ll = norm.sum();
    if (!std::isfinite(ll)) throw Error(ErrorCode::kNumerical, "EM log-likelihood is not finite");
    trace.push_back(ll);
    if (iter > 0 && ll - trace[trace.size() - 2] < cfg.tol) {
      result.report.converged = true;
      break;
    }
    if (iter == cfg.max_iters) break;

    // M x n, so each component's responsibilities are contiguous.
    const MatrixXd resp_t = (logp.colwise() - norm).array().exp().matrix().transpose();
    const VectorXd mass = resp_t.rowwise().sum();
    const MatrixXd weighted_sums = resp_t * x;
    for (Eigen::Index m = 0; m < m_count; ++m) {
      // A component with no mass keeps its previous mean and variance;
      // with zero weight it no longer affects the likelihood.
      if (mass[m] > 1e-12) {
        model.means.row(m) = weighted_sums.row(m) / mass[m];
        const RowVectorXd var =
            (resp_t.row(m) * (x.rowwise() - model.means.row(m)).array().square().matrix()) / mass[m];
        model.variances.row(m) = var.cwiseMax(kVarianceFloor);
      }
    }
    model.weights = mass / mass.sum();
    ++result.report.n_iters;
  }
  return result;
}

}  // namespace

FitResult fit_em(const MatrixXd& x, int n_components, const EmConfig& cfg) {
  const Eigen::Index n = x.rows();
  if (n_components < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one component");
  if (x.cols() < 1) throw Error(ErrorCode::kInvalidArgument, "data has no dimensions");
  if (n < n_components) {
    throw Error(ErrorCode::kInvalidArgument, "fewer rows (" + std::to_string(n) + ") than components (" +
                                                 std::to_string(n_components) + ")");
  }
  if (cfg.max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  if (cfg.n_init < 1) throw Error(ErrorCode::kInvalidArgument, "n_init must be >= 1");

  const RowVectorXd global_mean = x.colwise().mean();
  RowVectorXd global_var = BiasedVariance(x, global_mean);
  if ((global_var.array() < kVarianceFloor).any()) {
    Warn("zero-variance feature dimension; variance floored at 1e-6");
    global_var = global_var.cwiseMax(kVarianceFloor);
  }

  // One component converges to the same closed form from any start.
  const int restarts = n_components == 1 ? 1 : cfg.n_init;
  FitResult best = FitFromSeed(x, n_components, cfg, global_var, cfg.seed);
  for (int r = 1; r < restarts; ++r) {
    FitResult next = FitFromSeed(x, n_components, cfg, global_var, DeriveSeed(cfg.seed, static_cast<std::uint64_t>(r)));
    if (next.report.log_likelihood_trace.back() > best.report.log_likelihood_trace.back()) best = std::move(next);
  }
  return best;
}

SelectionResult select_n_components(const MatrixXd& x, int m_lo, int m_hi, Criterion criterion,
                                    const EmConfig& cfg, int jobs) {
  if (m_lo < 1 || m_hi < m_lo) throw Error(ErrorCode::kInvalidArgument, "invalid component range");
  if (x.rows() < m_hi) throw Error(ErrorCode::kInvalidArgument, "fewer rows than the largest candidate M");
  const auto count = static_cast<std::size_t>(m_hi - m_lo + 1);
  SelectionResult out;
  out.fits.resize(count);
  out.curve.resize(count);
  ParallelFor(count, jobs, [&](std::size_t i) {
    const int m = m_lo + static_cast<int>(i);
    EmConfig sub = cfg;
    sub.seed = DeriveSeed(cfg.seed, static_cast<std::uint64_t>(m));
    out.fits[i] = fit_em(x, m, sub);
    const double ll = log_likelihood(out.fits[i].model, x);
    const auto k = static_cast<double>(n_params(out.fits[i].model));
    out.curve[i] = CurvePoint{m, ll, 2.0 * k - 2.0 * ll, k * std::log(static_cast<double>(x.rows())) - 2.0 * ll};
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < count; ++i) {
    const double cur = criterion == Criterion::kAic ? out.curve[i].aic : out.curve[i].bic;
    const double top = criterion == Criterion::kAic ? out.curve[best].aic : out.curve[best].bic;
    if (cur < top) best = i;
  }
  out.best_n_components = out.curve[best].n_components;
  return out;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "n_components,aic,bic\n" << std::setprecision(17);
  for (const CurvePoint& p : curve) os << p.n_components << "," << p.aic << "," << p.bic << "\n";
}

void validate(const GaussianMixtureD& model) {
  if (model.n_components() < 1) throw Error(ErrorCode::kInvalidArgument, "model has no components");
  if (model.means.rows() != model.n_components() || model.variances.rows() != model.n_components() ||
      model.variances.cols() != model.dim()) {
    throw Error(ErrorCode::kShapeMismatch, "inconsistent model shapes");
  }
  if ((model.weights.array() < 0.0).any() || std::abs(model.weights.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "weights are not on the simplex");
  }
  if ((model.variances.array() < kVarianceFloor).any()) {
    throw Error(ErrorCode::kInvalidArgument, "variance below floor");
  }
}

void write_gmm(std::ostream& os, const GaussianMixtureD& model) {
  os << "gmm v1 " << model.n_components() << " " << model.dim() << "\n" << std::setprecision(17);
  auto put_row = [&os](const auto& row) {
    for (Eigen::Index i = 0; i < row.size(); ++i) os << (i ? " " : "") << row[i];
    os << "\n";
  };
  put_row(model.weights);
  for (Eigen::Index m = 0; m < model.n_components(); ++m) put_row(model.means.row(m));
  for (Eigen::Index m = 0; m < model.n_components(); ++m) put_row(model.variances.row(m));
}

GaussianMixtureD read_gmm(std::istream& is) {
  std::string magic, version;
  Eigen::Index m_count = 0, d = 0;
  if (!(is >> magic >> version >> m_count >> d) || magic != "gmm" || version != "v1" || m_count < 1 || d < 1) {
    throw Error(ErrorCode::kMalformedHeader, "expected 'gmm v1 M d' header");
  }
  GaussianMixtureD model;
  model.weights.resize(m_count);
  model.means.resize(m_count, d);
  model.variances.resize(m_count, d);
  for (Eigen::Index m = 0; m < m_count; ++m) is >> model.weights[m];
  for (Eigen::Index m = 0; m < m_count; ++m)
    for (Eigen::Index j = 0; j < d; ++j) is >> model.means(m, j);
  for (Eigen::Index m = 0; m < m_count; ++m)
    for (Eigen::Index j = 0; j < d; ++j) is >> model.variances(m, j);
  if (!is) throw Error(ErrorCode::kMalformedHeader, "truncated gmm body");
  validate(model);
  return model;
}

}  // namespace gmmdiar
