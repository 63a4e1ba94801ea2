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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiocast/engine.hpp"
#include "radiocast/topology.hpp"

namespace radiocast {

struct ExperimentConfig {
  std::string graph = "path:16";  // family spec, see make_graph
  std::uint64_t graph_seed = 1;
  bool resample_graph = false;  // draw a fresh graph for every trial
  std::string protocol = "gb";
  std::optional<std::uint64_t> n_param;  // n told to the stations; default: graph size
  std::optional<double> phi;
  std::optional<double> eps;
  NodeId origin = 0;
  std::uint64_t trials = 1;
  std::uint64_t base_seed = 1;
  Round max_rounds = 0;  // 0: default_max_rounds()

  // Execution details; not part of the config hash.
  std::string output_path;
  unsigned workers = 1;  // 0: RADIOCAST_WORKERS, else hardware concurrency
};

/// Canonical JSON of every field that affects results.
std::string canonical_config(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a/64 over canonical_config().
std::string config_hash(const ExperimentConfig& cfg);

/// 100 (D + ceil(log n)^2) phase_length rounds.
Round default_max_rounds(std::uint64_t n, std::uint32_t diameter, Round phase_length);

/// Worker count for `requested` (0 resolves RADIOCAST_WORKERS, then hardware).
unsigned resolve_workers(unsigned requested);

/// One row per trial.
struct ExperimentRecord {
  std::string config_hash;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  std::uint32_t diameter = 0;
  std::string protocol;
  std::optional<double> phi;
  std::optional<double> eps;
  bool success = false;
  std::optional<Round> completion_round;  // empty unless success
  Round termination_round = 0;
  std::uint32_t max_energy = 0;
  double mean_energy = 0.0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Sees every trial's full result. Called under a lock, in completion order.
using TrialObserver = std::function<void(std::uint64_t trial, const Graph& graph, const TrialResult& result)>;

/// Runs cfg.trials trials; trial i uses seed derive_seed(base_seed, i) and, when
/// resampling, graph seed derive_seed(graph_seed, i). The record list is
/// ordered by trial index and independent of the worker count.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, const TrialObserver& observer = {});

struct Aggregate {
  std::string config_hash;
  std::uint64_t n = 0;
  std::uint32_t diameter = 0;
  std::string protocol;
  std::optional<double> phi;
  std::optional<double> eps;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  std::optional<double> median_time;  // over successful trials
  std::optional<double> mean_time;
  std::optional<Round> p95_time;      // nearest rank
  std::uint32_t max_energy = 0;
};

Aggregate aggregate(std::span<const ExperimentRecord> records);

/// One aggregate per phi, in the given order, each from a full run_experiment
/// of `base` with that phi.
std::vector<Aggregate> sweep_phi(const ExperimentConfig& base, std::span<const double> phis,
                                 const TrialObserver& observer = {});

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Header plus one row per record, columns in ExperimentRecord order. Fields
/// with commas or quotes are quoted; absent values are empty fields.
std::string records_to_csv(std::span<const ExperimentRecord> records);
std::vector<ExperimentRecord> records_from_csv(std::string_view text);

void write_csv(std::span<const ExperimentRecord> records, const std::string& path);
std::vector<ExperimentRecord> read_csv(const std::string& path);

std::string aggregates_to_csv(std::span<const Aggregate> rows);
/// JSON array of {config_hash, n, D, protocol, phi, eps, trials, success_rate,
/// median_time, p95_time, max_energy}; absent values are null.
std::string aggregates_to_json(std::span<const Aggregate> rows);
void write_json(std::span<const Aggregate> rows, const std::string& path);

/// Writes text to path, throwing IoError with the path on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace radiocast
