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

#include "ibr/errors.h"

namespace ibr {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptyNetwork: return "empty-network";
    case ErrorKind::kInsufficientPlayers: return "insufficient-players";
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kAssignmentInfeasible: return "assignment-infeasible";
    case ErrorKind::kUnreachableDestination: return "unreachable-destination";
    case ErrorKind::kInvalidTransition: return "invalid-transition";
    case ErrorKind::kNotApplicable: return "not-applicable";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kInstanceTooLarge: return "instance-too-large";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kConsistency: return "consistency";
  }
  return "unknown";
}

}  // namespace ibr
