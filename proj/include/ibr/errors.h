// Copyright 2026 The ibrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IBR_ERRORS_H_
#define IBR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ibr {

enum class ErrorKind {
  kEmptyNetwork,
  kInsufficientPlayers,
  kDegenerateGeometry,
  kAssignmentInfeasible,
  kUnreachableDestination,
  kInvalidTransition,
  kNotApplicable,
  kDomain,
  kInstanceTooLarge,
  kConfig,
  kShape,
  kConsistency,
};

const char* ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the sweep
// runner in particular) can record it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ibr

#endif  // IBR_ERRORS_H_
