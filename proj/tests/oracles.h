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

// Independent reference computations used by the unit and acceptance
// tests. Nothing here calls into the library's numeric kernels.
#ifndef GMMDIAR_TESTS_ORACLES_H_
#define GMMDIAR_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

// X[k] = sum_n x[n] exp(-2 pi i k n / N), one-sided.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x, std::size_t n_fft) {
  std::vector<std::complex<double>> out(n_fft / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * n) % n_fft) / static_cast<double>(n_fft);
      acc += x[n] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> naive_dct_ii(const std::vector<double>& v, std::size_t n_out) {
  const std::size_t n = v.size();
  std::vector<double> c(n_out, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += v[i] * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) /
                             (2.0 * static_cast<double>(n)));
    }
    c[k] = (k == 0 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n))) * acc;
  }
  return c;
}

// Plain recursive-free edit distance over two token lists, computed with a
// rolling row.
inline int edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ln N(x; mu, var) for one diagonal Gaussian, summed term by term.
inline double log_gauss_diag(const std::vector<double>& x, const std::vector<double>& mu,
                             const std::vector<double>& var) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += -0.5 * std::log(2.0 * std::numbers::pi * var[i]) - 0.5 * (x[i] - mu[i]) * (x[i] - mu[i]) / var[i];
  }
  return acc;
}

}  // namespace oracle

#endif  // GMMDIAR_TESTS_ORACLES_H_
