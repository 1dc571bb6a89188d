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

#include "gmmdiar/common.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace gmmdiar {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNumerical: return "Numerical";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

std::mutex& WarningMutex() {
  static std::mutex m;
  return m;
}

WarningHandler& Handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void SetWarningHandler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(WarningMutex());
  Handler() = std::move(handler);
}

void Warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(WarningMutex());
  if (Handler()) {
    Handler()(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t salt) {
  std::uint64_t z = parent ^ (salt * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gmmdiar
