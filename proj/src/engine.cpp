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

#include "radiocast/engine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <ostream>
#include <queue>

#include "radiocast/errors.hpp"

namespace radiocast {

std::uint32_t TrialResult::max_energy() const {
  return energy.empty() ? 0 : *std::max_element(energy.begin(), energy.end());
}

double TrialResult::mean_energy() const {
  if (energy.empty()) return 0.0;
  const auto total = std::accumulate(energy.begin(), energy.end(), std::uint64_t{0});
  return static_cast<double>(total) / static_cast<double>(energy.size());
}

std::size_t TrialResult::informed_count() const {
  return static_cast<std::size_t>(
      std::count_if(reception_round.begin(), reception_round.end(), [](const auto& r) { return r.has_value(); }));
}

std::vector<Feedback> resolve_round(const Graph& g, std::span<const NodeId> transmitters) {
  std::vector<std::uint32_t> hits(g.size(), 0);
  std::vector<char> sending(g.size(), 0);
  for (NodeId t : transmitters) {
    sending.at(t) = 1;
    for (NodeId w : g.neighbors(t)) ++hits[w];
  }
  std::vector<Feedback> out(g.size(), Feedback::Nothing);
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!sending[v] && hits[v] == 1) out[v] = Feedback::Received;
  }
  return out;
}

namespace {

void write_ids(std::ostream& os, const std::vector<NodeId>& ids) {
  if (ids.empty()) {
    os << '-';
    return;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
}

class Simulation {
 public:
  Simulation(const Graph& g, const StationProtocol& protocol, std::uint64_t seed, const TrialOptions& options)
      : g_(g),
        protocol_(protocol),
        seed_(seed),
        options_(options),
        schedules_(g.size()),
        cursor_(g.size(), 0),
        hits_(g.size(), 0),
        stamp_(g.size(), 0),
        sending_stamp_(g.size(), 0) {
    result_.reception_round.assign(g.size(), std::nullopt);
    result_.energy.assign(g.size(), 0);
  }

  void inform(NodeId v, Round round) {
    result_.reception_round[v] = round;
    ++informed_;
    RngTape tape(derive_rng(seed_, v));
    StationSchedule s = protocol_.schedule(round, tape);
    const auto& tx = s.transmit_rounds;
    if (!tx.empty() && tx.front() <= round) {
      throw ProtocolViolation(protocol_.name() + ": station " + std::to_string(v) + " informed at round " +
                              std::to_string(round) + " scheduled a transmission at round " +
                              std::to_string(tx.front()));
    }
    if (std::adjacent_find(tx.begin(), tx.end(), std::greater_equal<>()) != tx.end()) {
      throw ProtocolViolation(protocol_.name() + ": transmit rounds not strictly ascending");
    }
    if (!tx.empty() && s.finish_round < tx.back()) {
      throw ProtocolViolation(protocol_.name() + ": finish round precedes last transmission");
    }
    last_finish_ = std::max(last_finish_, s.finish_round);
    if (!tx.empty()) {
      ++pending_;
      if (options_.skip_idle) events_.emplace(tx.front(), v);
    }
    informed_list_.push_back(v);
    schedules_[v] = std::move(s);
  }

  TrialResult run(NodeId origin) {
    inform(origin, kOriginReception);
    if (options_.skip_idle) {
      run_event_loop();
    } else {
      run_round_loop();
    }
    finish();
    return std::move(result_);
  }

 private:
  using Event = std::pair<Round, NodeId>;

  bool all_informed() const { return informed_ == g_.size(); }

  // Advances v past round r; returns its next transmit round, if any.
  std::optional<Round> advance(NodeId v) {
    ++result_.energy[v];
    const auto& tx = schedules_[v].transmit_rounds;
    if (++cursor_[v] < tx.size()) return tx[cursor_[v]];
    --pending_;
    return std::nullopt;
  }

  void run_event_loop() {
    std::vector<NodeId> tx;
    while (!events_.empty()) {
      const Round r = events_.top().first;
      if (r >= options_.max_rounds) {
        truncated_ = true;
        return;
      }
      tx.clear();
      while (!events_.empty() && events_.top().first == r) {
        const NodeId v = events_.top().second;
        events_.pop();
        tx.push_back(v);
        if (auto next = advance(v)) events_.emplace(*next, v);
      }
      std::sort(tx.begin(), tx.end());
      process_round(r, tx);
    }
  }

  // Reference loop: visits every round and asks every informed station.
  void run_round_loop() {
    std::vector<NodeId> tx;
    for (Round r = 0; pending_ > 0; ++r) {
      if (r >= options_.max_rounds) {
        truncated_ = true;
        return;
      }
      tx.clear();
      const std::size_t active = informed_list_.size();
      for (std::size_t i = 0; i < active; ++i) {
        const NodeId v = informed_list_[i];
        const auto& rounds = schedules_[v].transmit_rounds;
        if (cursor_[v] < rounds.size() && rounds[cursor_[v]] == r) {
          tx.push_back(v);
          advance(v);
        }
      }
      std::sort(tx.begin(), tx.end());
      if (!tx.empty()) process_round(r, tx);
    }
  }

  void process_round(Round r, const std::vector<NodeId>& tx) {
    ++epoch_;
    for (NodeId t : tx) {
      const auto& rec = result_.reception_round[t];
      if (!rec || *rec >= r) {
        throw ProtocolViolation("station " + std::to_string(t) + " transmitted at round " + std::to_string(r) +
                                " without holding the message");
      }
      sending_stamp_[t] = epoch_;
    }
    touched_.clear();
    for (NodeId t : tx) {
      for (NodeId w : g_.neighbors(t)) {
        if (stamp_[w] != epoch_) {
          stamp_[w] = epoch_;
          hits_[w] = 0;
          touched_.push_back(w);
        }
        ++hits_[w];
      }
    }
    bool collided = false;
    newly_.clear();
    for (NodeId w : touched_) {
      if (sending_stamp_[w] == epoch_) continue;  // half-duplex
      if (hits_[w] >= 2) collided = true;
      if (hits_[w] == 1 && !result_.reception_round[w]) newly_.push_back(w);
    }
    if (collided) ++result_.collision_rounds;
    std::sort(newly_.begin(), newly_.end());
    for (NodeId v : newly_) inform(v, r);

    if (options_.trace) {
      *options_.trace << r << " tx=";
      write_ids(*options_.trace, tx);
      *options_.trace << " new=";
      write_ids(*options_.trace, newly_);
      *options_.trace << '\n';
    }
    if (options_.record_rounds) result_.rounds.push_back(RoundLog{r, tx, newly_});
  }

  void finish() {
    result_.success = all_informed();
    if (result_.success) {
      Round last = 0;
      for (const auto& rec : result_.reception_round) last = std::max(last, *rec);
      result_.completion_round = last;
    }
    Round end = std::max<Round>(last_finish_, 0);
    if (truncated_) end = options_.max_rounds - 1;
    result_.termination_round = std::min(end, options_.max_rounds - 1);
  }

  const Graph& g_;
  const StationProtocol& protocol_;
  std::uint64_t seed_;
  const TrialOptions& options_;

  std::vector<StationSchedule> schedules_;
  std::vector<std::size_t> cursor_;
  std::vector<NodeId> informed_list_;
  std::size_t informed_ = 0;
  std::size_t pending_ = 0;  // informed stations with transmissions left
  Round last_finish_ = kOriginReception;
  bool truncated_ = false;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;

  std::vector<std::uint32_t> hits_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::uint64_t> sending_stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<NodeId> touched_;
  std::vector<NodeId> newly_;

  TrialResult result_;
};

}  // namespace

TrialResult run_trial(const Graph& g, const StationProtocol& protocol, NodeId origin, std::uint64_t seed,
                      const TrialOptions& options) {
  if (origin >= g.size()) throw InvalidParameter("origin " + std::to_string(origin) + " out of range");
  if (options.max_rounds < 1) throw InvalidParameter("max_rounds must be >= 1");
  Simulation sim(g, protocol, seed, options);
  return sim.run(origin);
}

}  // namespace radiocast
