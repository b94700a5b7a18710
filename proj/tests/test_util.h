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

#ifndef IBR_TESTS_TEST_UTIL_H_
#define IBR_TESTS_TEST_UTIL_H_

#include <optional>
#include <vector>

#include "ibr/channel.h"
#include "ibr/errors.h"
#include "ibr/game.h"
#include "ibr/rng.h"

namespace ibr::testing {

// Runs f and returns the kind of the ibr::Error it throws.
template <typename F>
std::optional<ErrorKind> ThrownKind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// Abstract game with i.i.d. gains in (0, scale) and random destinations.
inline NetworkRealization RandomGainGame(Engine& rng, int n, int k,
                                         double scale = 1.0,
                                         double signal = 100.0) {
  std::vector<PlayerId> dest(n);
  for (PlayerId v = 0; v < n; ++v) {
    PlayerId d = static_cast<PlayerId>(UniformIndex(rng, n - 1));
    dest[v] = d >= v ? d + 1 : d;
  }
  std::vector<double> gain(static_cast<std::size_t>(n) * n);
  for (double& g : gain) g = scale * UniformUnit(rng);
  for (PlayerId v = 0; v < n; ++v) {
    gain[static_cast<std::size_t>(v) * n + v] = signal;
  }
  return NetworkRealization::FromGains(dest, std::vector<double>(n, 1.0),
                                       std::move(gain), k);
}

// Geometric game with the default experiment radio.
inline NetworkRealization GeoGame(int n, int k, std::uint64_t seed) {
  NetworkSpec spec;
  spec.n_players = n;
  spec.num_channels = k;
  return BuildRealization(spec, seed);
}

}  // namespace ibr::testing

#endif  // IBR_TESTS_TEST_UTIL_H_
