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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radiocast/engine.hpp"
#include "radiocast/rng.hpp"
#include "radiocast/tape.hpp"

namespace radiocast {

// ---------------------------------------------------------------------------
// Sampling primitives
// ---------------------------------------------------------------------------

/// Geometric variable with CONTINUE probability q: P(X > i) = q^i for i >= 0,
/// so P(X = i) = q^(i-1) (1 - q) on {1, 2, ...}. Note that q is the chance of
/// going on, not of stopping. One uniform draw, inverse transform.
/// Throws InvalidParameter unless 0 <= q < 1.
std::uint64_t sample_geo(double q, Rng& rng);

/// Slot a Balls-into-Bins participant transmits in: uniform over [0, k).
std::uint64_t balls_into_bins_offset(std::uint64_t k, Rng& rng);

/// Offsets used by one Green-Decay(k) participant inside its k-round window:
/// always 0, then coins are flipped for offsets 1..k-1 and the first offset
/// whose coin shows 1 is used too. One or two offsets; requires k >= 2.
std::vector<std::uint64_t> green_decay_offsets(std::uint64_t k, RandomTape& tape);

// ---------------------------------------------------------------------------
// Integer helpers (all logarithms are base 2)
// ---------------------------------------------------------------------------

/// Smallest j with 2^j >= n (n >= 1).
std::uint32_t ceil_log2(std::uint64_t n);

/// Smallest j with log2(n) <= 2^j, i.e. ceil(log2 log2 n), for n >= 3.
std::uint32_t ceil_log2_log2(std::uint64_t n);

/// ceil(v) that treats values within 1e-9 (relative) of an integer as that
/// integer, so quantities that are integral in exact arithmetic are not
/// bumped up by floating-point noise.
std::uint64_t ceil_guarded(double v);

/// n^(1/phi), snapped to the nearest integer when within 1e-9 relative.
double real_root(std::uint64_t n, double phi);
/// ceil(n^(1/phi)) with the same guard.
std::uint64_t ceil_root(std::uint64_t n, double phi);

// ---------------------------------------------------------------------------
// Balls-into-Bins Broadcast with energy parameter phi
// ---------------------------------------------------------------------------

struct GgbParams {
  std::uint64_t n = 0;
  double phi = 0.0;
  double eps = 0.0;
  std::uint64_t a = 0;        // ceil(phi log n / (log n - phi log phi)): slots per phase
  std::uint64_t k = 0;        // 24 ceil(n^(1/phi)) + 1: rounds per slot
  std::uint64_t t_ph = 0;     // a k
  std::uint64_t repeats = 0;  // ceil(phi (1 + log(2/eps) / log n)): phases, and energy
  double continue_prob = 0.0; // phi / n^(1/phi)
  std::vector<std::string> warnings;
};

/// Requires n >= 4, phi >= 1, phi log phi < log n (otherwise `a` is undefined)
/// and 0 < eps < 1. Parameters outside phi < log n / log log n, or above
/// log n / (2 log log n), or with eps <= 2 n^-3 are accepted with a warning.
GgbParams ggb_params(std::uint64_t n, double phi, double eps);

/// One phase per repetition, back to back from the first multiple of t_ph
/// after `reception`. In each: x ~ Geo(continue_prob), skip (min(x, a) - 1)
/// slots, transmit once at a uniform offset of the next k-round slot.
StationSchedule ggb_build_schedule(const GgbParams& p, Round reception, RandomTape& tape);

// ---------------------------------------------------------------------------
// Green-Decay Broadcast
// ---------------------------------------------------------------------------

struct GbParams {
  std::uint64_t n = 0;
  std::uint64_t ll = 0;       // ceil(log log n): phases per epoch
  std::uint64_t k = 0;        // 24 ceil(log n) + 1
  std::uint64_t t_ph = 0;     // 3k
  std::uint64_t repeats = 0;  // 2 ceil(log n) + 2 phase windows
};

/// Requires n >= 4.
GbParams gb_params(std::uint64_t n);

/// Hard per-station cap: 1 + 3 (ceil(repeats / ll) + 1).
std::uint64_t gb_energy_bound(const GbParams& p);

/// Window [t, t + 3k) of phase index (t / 3k) mod ll is split into sub-slots
/// A, B, C of k rounds each. A newly informed station runs Balls-into-Bins in
/// A of its first window (or in B when that window has index 0), then draws
/// myPhase. Afterwards it runs Balls-into-Bins in B of every index-0 window,
/// redrawing myPhase there, and Green-Decay in C of the window whose index is
/// myPhase.
StationSchedule gb_build_schedule(const GbParams& p, Round reception, RandomTape& tape);

// ---------------------------------------------------------------------------
// Classic Decay-based broadcast (baseline)
// ---------------------------------------------------------------------------

struct DecayParams {
  std::uint64_t n = 0;
  std::uint64_t window = 0;   // 2 ceil(log n)
  std::uint64_t windows = 0;  // 2 ceil(log n)
};

/// Requires n >= 2.
DecayParams decay_params(std::uint64_t n);

/// Aligned windows of `window` rounds; in each the station transmits in the
/// first X rounds, X being the index of the first head (capped at the window).
StationSchedule decay_baseline_schedule(const DecayParams& p, Round reception, RandomTape& tape);

// ---------------------------------------------------------------------------
// Deterministic pattern
// ---------------------------------------------------------------------------

/// Transmits at reception + 1 + offset for each offset. No randomness, so
/// stations informed in the same round behave identically.
StationSchedule fixed_schedule(std::span<const std::uint64_t> offsets, Round reception);

// ---------------------------------------------------------------------------
// Protocol objects
// ---------------------------------------------------------------------------

class GgbProtocol final : public StationProtocol {
 public:
  explicit GgbProtocol(GgbParams params) : params_(std::move(params)) {}
  std::string name() const override { return "ggb"; }
  StationSchedule schedule(Round reception, RandomTape& tape) const override {
    return ggb_build_schedule(params_, reception, tape);
  }
  Round phase_length() const override { return static_cast<Round>(params_.t_ph); }
  std::optional<std::uint64_t> energy_bound() const override { return params_.repeats; }
  const GgbParams& params() const { return params_; }

 private:
  GgbParams params_;
};

class GbProtocol final : public StationProtocol {
 public:
  explicit GbProtocol(GbParams params) : params_(params) {}
  std::string name() const override { return "gb"; }
  StationSchedule schedule(Round reception, RandomTape& tape) const override {
    return gb_build_schedule(params_, reception, tape);
  }
  Round phase_length() const override { return static_cast<Round>(params_.t_ph); }
  std::optional<std::uint64_t> energy_bound() const override { return gb_energy_bound(params_); }
  const GbParams& params() const { return params_; }

 private:
  GbParams params_;
};

class DecayBaselineProtocol final : public StationProtocol {
 public:
  explicit DecayBaselineProtocol(DecayParams params) : params_(params) {}
  std::string name() const override { return "decay-baseline"; }
  StationSchedule schedule(Round reception, RandomTape& tape) const override {
    return decay_baseline_schedule(params_, reception, tape);
  }
  Round phase_length() const override { return static_cast<Round>(params_.window); }
  const DecayParams& params() const { return params_; }

 private:
  DecayParams params_;
};

class FixedPatternProtocol final : public StationProtocol {
 public:
  explicit FixedPatternProtocol(std::vector<std::uint64_t> offsets);
  std::string name() const override;
  StationSchedule schedule(Round reception, RandomTape&) const override {
    return fixed_schedule(offsets_, reception);
  }
  Round phase_length() const override;
  std::optional<std::uint64_t> energy_bound() const override { return offsets_.size(); }
  const std::vector<std::uint64_t>& offsets() const { return offsets_; }

 private:
  std::vector<std::uint64_t> offsets_;  // sorted, distinct
};

/// What a run needs to instantiate a protocol. `n` is the network size the
/// stations are told, which may differ from the real graph size.
struct ProtocolSpec {
  std::string name;  // "ggb", "gb", "decay-baseline" or "fixed:<o1,o2,...>"
  std::uint64_t n = 0;
  std::optional<double> phi;
  std::optional<double> eps;
};

/// Throws InvalidParameter on unknown names or missing/invalid parameters.
std::unique_ptr<StationProtocol> make_protocol(const ProtocolSpec& spec);

}  // namespace radiocast
