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

#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "radiocast/rng.hpp"

namespace radiocast {

/// Source of the three kinds of random decisions station protocols make.
/// Schedules are a pure function of (parameters, reception round, tape).
class RandomTape {
 public:
  virtual ~RandomTape() = default;

  /// Uniform integer in [0, bound); bound >= 1.
  virtual std::uint64_t below(std::uint64_t bound) = 0;
  virtual bool coin() = 0;
  /// Geometric variable on {1, 2, ...} with P(X > i) = continue_prob^i.
  virtual std::uint64_t geometric(double continue_prob) = 0;
};

/// Tape backed by a station's private random stream.
class RngTape final : public RandomTape {
 public:
  explicit RngTape(Rng rng) : rng_(std::move(rng)) {}

  std::uint64_t below(std::uint64_t bound) override;
  bool coin() override;
  std::uint64_t geometric(double continue_prob) override;

 private:
  Rng rng_;
};

/// Plays back fixed answers; throws std::out_of_range when a queue runs dry
/// and InvalidParameter when a scripted `below` answer is not below its bound.
class ScriptedTape final : public RandomTape {
 public:
  struct Script {
    std::vector<bool> coins;
    std::vector<std::uint64_t> uniforms;
    std::vector<std::uint64_t> geometrics;
  };

  explicit ScriptedTape(Script script);

  std::uint64_t below(std::uint64_t bound) override;
  bool coin() override;
  std::uint64_t geometric(double continue_prob) override;

  /// Bounds passed to every `below` call, in order.
  const std::vector<std::uint64_t>& below_requests() const { return below_requests_; }
  std::size_t coins_used() const { return coins_used_; }

 private:
  std::deque<bool> coins_;
  std::deque<std::uint64_t> uniforms_;
  std::deque<std::uint64_t> geometrics_;
  std::vector<std::uint64_t> below_requests_;
  std::size_t coins_used_ = 0;
};

}  // namespace radiocast
