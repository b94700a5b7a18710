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

#include "ibr/rng.h"

namespace ibr {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix64(master);
  for (std::uint64_t k : keys) h = SplitMix64(h ^ SplitMix64(k));
  return h;
}

namespace {
Engine MakeEngine(std::uint64_t seed, Stream stream) {
  return Engine(DeriveSeed(seed, {static_cast<std::uint64_t>(stream)}));
}
}  // namespace

NetworkStreams::NetworkStreams(std::uint64_t network_seed)
    : placement(MakeEngine(network_seed, Stream::kPlacement)),
      destinations(MakeEngine(network_seed, Stream::kDestinations)),
      orientation(MakeEngine(network_seed, Stream::kOrientation)) {}

DynamicsStreams::DynamicsStreams(std::uint64_t run_seed)
    : initial(MakeEngine(run_seed, Stream::kInitialProfile)),
      schedule(MakeEngine(run_seed, Stream::kSchedule)),
      action(MakeEngine(run_seed, Stream::kAction)) {}

}  // namespace ibr
