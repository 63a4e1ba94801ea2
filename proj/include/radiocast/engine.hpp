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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiocast/tape.hpp"
#include "radiocast/topology.hpp"

namespace radiocast {

/// Absolute round number. The originator holds the message from round -1.
using Round = std::int64_t;

inline constexpr Round kOriginReception = -1;

enum class RoundAction { Listen, Transmit };
enum class Feedback { Nothing, Received };

/// Every round a station will transmit in, fixed at the moment it is informed.
/// Protocols here never look at channel feedback after reception, so this is
/// the station's whole behavior.
struct StationSchedule {
  std::vector<Round> transmit_rounds;  // strictly ascending
  Round finish_round = kOriginReception;

  std::size_t energy() const { return transmit_rounds.size(); }
  friend bool operator==(const StationSchedule&, const StationSchedule&) = default;
};

/// Behavior shared by every station in a run.
class StationProtocol {
 public:
  virtual ~StationProtocol() = default;

  virtual std::string name() const = 0;

  /// Schedule of a station informed at `reception_round`. Every transmit
  /// round must be strictly greater than `reception_round`.
  virtual StationSchedule schedule(Round reception_round, RandomTape& tape) const = 0;

  /// Length of the protocol's alignment window, used to size default horizons.
  virtual Round phase_length() const = 0;

  /// Deterministic per-station cap on transmissions, when one exists.
  virtual std::optional<std::uint64_t> energy_bound() const { return std::nullopt; }
};

/// One simulated round that had at least one transmitter.
struct RoundLog {
  Round round = 0;
  std::vector<NodeId> transmitters;    // ascending
  std::vector<NodeId> newly_informed;  // ascending
  friend bool operator==(const RoundLog&, const RoundLog&) = default;
};

struct TrialResult {
  std::vector<std::optional<Round>> reception_round;  // nullopt: never informed
  std::vector<std::uint32_t> energy;                  // transmit actions per node
  std::optional<Round> completion_round;              // first round with everyone informed
  Round termination_round = 0;                        // last round any station was active
  bool success = false;
  std::uint64_t collision_rounds = 0;  // rounds where some listener heard >= 2 neighbors
  std::vector<RoundLog> rounds;        // filled only with TrialOptions::record_rounds

  std::uint32_t max_energy() const;
  double mean_energy() const;
  std::size_t informed_count() const;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct TrialOptions {
  Round max_rounds = 1'000'000;
  /// Jump over rounds in which nobody transmits. Turning it off runs the
  /// reference round-by-round loop; both must produce identical results.
  bool skip_idle = true;
  bool record_rounds = false;
  /// Optional line-oriented trace: "<round> tx=<ids> new=<ids>".
  std::ostream* trace = nullptr;
};

/// Channel rule: v receives iff it is not transmitting and exactly one of its
/// neighbors is. Collisions and silence are indistinguishable.
std::vector<Feedback> resolve_round(const Graph& g, std::span<const NodeId> transmitters);

/// Simulates one broadcast from `origin`. Station v draws from
/// derive_rng(seed, v). Rounds 0 .. max_rounds-1 are simulated; a run that
/// leaves nodes uninformed returns success = false.
/// Throws ProtocolViolation if a schedule transmits at or before its reception.
TrialResult run_trial(const Graph& g, const StationProtocol& protocol, NodeId origin,
                      std::uint64_t seed, const TrialOptions& options = {});

}  // namespace radiocast
