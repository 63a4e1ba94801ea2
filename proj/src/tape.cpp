// Copyright 2026 The radiocast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "radiocast/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "radiocast/errors.hpp"
#include "radiocast/protocols.hpp"

namespace radiocast {

std::uint64_t RngTape::below(std::uint64_t bound) { return balls_into_bins_offset(bound, rng_); }

bool RngTape::coin() { return fair_coin(rng_); }

std::uint64_t RngTape::geometric(double continue_prob) { return sample_geo(continue_prob, rng_); }

ScriptedTape::ScriptedTape(Script script)
    : coins_(script.coins.begin(), script.coins.end()),
      uniforms_(script.uniforms.begin(), script.uniforms.end()),
      geometrics_(script.geometrics.begin(), script.geometrics.end()) {}

std::uint64_t ScriptedTape::below(std::uint64_t bound) {
  below_requests_.push_back(bound);
  if (uniforms_.empty()) throw std::out_of_range("scripted tape: no uniform draws left");
  const auto value = uniforms_.front();
  uniforms_.pop_front();
  if (value >= bound) throw InvalidParameter("scripted uniform draw not below its bound");
  return value;
}

bool ScriptedTape::coin() {
  if (coins_.empty()) throw std::out_of_range("scripted tape: no coins left");
  const bool value = coins_.front();
  coins_.pop_front();
  ++coins_used_;
  return value;
}

std::uint64_t ScriptedTape::geometric(double /*continue_prob*/) {
  if (geometrics_.empty()) throw std::out_of_range("scripted tape: no geometric draws left");
  const auto value = geometrics_.front();
  geometrics_.pop_front();
  if (value == 0) throw InvalidParameter("geometric draws start at 1");
  return value;
}

}  // namespace radiocast
