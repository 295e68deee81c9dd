// Copyright 2026 The flaketype Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace flaketype {

// Maps onto the CLI exit codes: usage=1, data=2, internal=3.
enum class ErrorKind { kUsage = 1, kData = 2, kInternal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error data_error(const std::string& what) {
  return Error(ErrorKind::kData, what);
}
inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::kUsage, what);
}
inline Error internal_error(const std::string& what) {
  return Error(ErrorKind::kInternal, what);
}

}  // namespace flaketype
