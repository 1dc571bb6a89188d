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

#ifndef GMMDIAR_COMMON_H_
#define GMMDIAR_COMMON_H_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace gmmdiar {

// Row-major so that one frame (or one observation) is one contiguous row.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using RowVectorXd = RowVector<double>;

enum class ErrorCode {
  kFileNotFound,
  kUnsupportedFormat,
  kMalformedHeader,
  kEmptyInput,
  kInvalidArgument,
  kShapeMismatch,
  kNumerical,
  kConfig,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Warnings go to stderr unless a handler is installed. The handler is
// called under a lock, so it may be invoked from worker threads.
using WarningHandler = std::function<void(const std::string&)>;
void SetWarningHandler(WarningHandler handler);
void Warn(const std::string& message);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index must write
// only to its own output slot; results are then independent of `jobs`.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Deterministic child seed (splitmix64 finalizer over parent ^ salt).
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t salt);

}  // namespace gmmdiar

#endif  // GMMDIAR_COMMON_H_
