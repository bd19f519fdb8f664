/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace sessrank {

// Broad failure classes. The CLI maps each one to its exit code.
enum class ErrorKind {
  kUsage,       // bad arguments or configuration
  kData,        // unreadable or inconsistent input data
  kDivergence,  // non-finite loss or gradient during training
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::kUsage, what);
}
inline Error data_error(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error divergence_error(const std::string& what) {
  return Error(ErrorKind::kDivergence, what);
}

}  // namespace sessrank
