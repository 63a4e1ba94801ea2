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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radiocast/engine.hpp"
#include "radiocast/errors.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/tape.hpp"
#include "radiocast/topology.hpp"

using namespace radiocast;

namespace {

double binomial_sigma(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

}  // namespace

TEST_CASE("sample_geo edge cases") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(sample_geo(0.0, rng) == 1);
  CHECK_THROWS_AS(sample_geo(1.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_geo(-0.1, rng), InvalidParameter);
}

TEST_CASE("sample_geo pmf and mean") {
  Rng rng(2);
  const int draws = 1'000'000;
  int ones = 0, twos = 0;
  for (int i = 0; i < draws; ++i) {
    const auto x = sample_geo(0.5, rng);
    ones += x == 1;
    twos += x == 2;
  }
  CHECK(std::abs(ones / double(draws) - 0.5) <= 3 * binomial_sigma(0.5, draws));
  CHECK(std::abs(twos / double(draws) - 0.25) <= 3 * binomial_sigma(0.25, draws));

  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_geo(0.9, rng));
  const double sd = std::sqrt(0.9) / 0.1;
  CHECK(std::abs(sum / draws - 10.0) <= 3 * sd / std::sqrt(double(draws)));
}

TEST_CASE("sample_geo tail law") {
  Rng rng(3);
  const int draws = 1'000'000;
  for (double q : {0.3, 0.7, 0.95}) {
    std::vector<int> exceed(21, 0);
    for (int d = 0; d < draws; ++d) {
      const auto x = sample_geo(q, rng);
      for (std::uint64_t i = 0; i <= 20 && i < x; ++i) ++exceed[i];
    }
    for (int i = 0; i <= 20; ++i) {
      const double expect = std::pow(q, i);
      CHECK(std::abs(exceed[i] / double(draws) - expect) <= 4 * binomial_sigma(expect, draws) + 1e-12);
    }
  }
}

TEST_CASE("balls-into-bins offsets") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) CHECK(balls_into_bins_offset(1, rng) == 0);
  CHECK_THROWS_AS(balls_into_bins_offset(0, rng), InvalidParameter);

  const int draws = 1'000'000;
  std::vector<int> count(4, 0);
  for (int i = 0; i < draws; ++i) ++count[balls_into_bins_offset(4, rng)];
  for (int c : count) CHECK(std::abs(c / double(draws) - 0.25) <= 3 * binomial_sigma(0.25, draws));
}

TEST_CASE("equal balls-into-bins offsets collide at the common neighbour") {
  // Nodes 0 and 2 both hold the message and pick the same slot.
  auto g = make_path(3);
  std::vector<NodeId> both{0, 2};
  for (int slot = 0; slot < 2; ++slot) {
    auto fb = resolve_round(g, slot == 0 ? std::span<const NodeId>(both) : std::span<const NodeId>());
    CHECK(fb[1] == Feedback::Nothing);
  }
}

TEST_CASE("green-decay offsets") {
  ScriptedTape t1({{false, false, true}, {}, {}});
  CHECK(green_decay_offsets(14, t1) == std::vector<std::uint64_t>{0, 3});
  ScriptedTape t2({std::vector<bool>(3, false), {}, {}});
  CHECK(green_decay_offsets(4, t2) == std::vector<std::uint64_t>{0});
  CHECK(t2.coins_used() == 3);
  ScriptedTape t3({{}, {}, {}});
  CHECK_THROWS_AS(green_decay_offsets(1, t3), InvalidParameter);

  RngTape tape(Rng(5));
  for (int i = 0; i < 10000; ++i) {
    auto offs = green_decay_offsets(2 + i % 30, tape);
    CHECK((offs.size() == 1 || offs.size() == 2));
    CHECK(offs.front() == 0);
    CHECK(offs.back() < 2 + std::uint64_t(i % 30));
  }
}

TEST_CASE("integer logarithms") {
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(1024) == 10);
  CHECK(ceil_log2(1025) == 11);
  for (std::uint64_t n = 2; n < 5000; ++n) {
    CHECK(ceil_log2_log2(n) == static_cast<std::uint32_t>(std::ceil(std::log2(std::log2(double(n))) - 1e-12)));
  }
  CHECK(ceil_root(4096, 3) == 16);
  CHECK(ceil_root(256, 4) == 4);
  CHECK(ceil_root(4095, 2) == 64);
  CHECK(ceil_root(1 << 16, 1) == 65536);
  CHECK(real_root(4096, 3) == 16.0);
  CHECK(real_root(1 << 20, 4) == 32.0);
  CHECK(real_root(1000, 2) == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-15));
}

TEST_CASE("ggb parameters") {
  auto p = ggb_params(1 << 16, 2.0, 0.5);
  CHECK(p.a == 3);
  CHECK(p.k == 6145);
  CHECK(p.t_ph == 18435);
  CHECK(p.repeats == 3);

  auto p1 = ggb_params(1 << 16, 1.0, 0.5);
  CHECK(p1.a == 1);
  CHECK(p1.k == 24 * 65536 + 1);

  // log n = 10, phi log phi = 2: a = ceil(20 / 8).
  auto p2 = ggb_params(1 << 10, 2.0, 0.1);
  CHECK(p2.k == 769);
  CHECK(p2.a == 3);
  CHECK(p2.repeats == 3);

  CHECK_THROWS_AS(ggb_params(3, 1.0, 0.5), InvalidParameter);
  CHECK_THROWS_AS(ggb_params(1024, 0.5, 0.5), InvalidParameter);
  CHECK_THROWS_AS(ggb_params(1024, 2.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(ggb_params(1024, 2.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(ggb_params(16, 4.0, 0.5), InvalidParameter);  // phi log phi = log n

  CHECK(ggb_params(1 << 16, 2.0, 0.5).warnings.empty());
  CHECK_FALSE(ggb_params(4095, 4.0, 0.1).warnings.empty());
}

TEST_CASE("ggb schedules") {
  auto p = ggb_params(1024, 2.0, 0.1);
  const Round t_ph = static_cast<Round>(p.t_ph);

  ScriptedTape origin({{}, {0, 0, 0}, {1, 1, 1}});
  auto s = ggb_build_schedule(p, kOriginReception, origin);
  CHECK(s.transmit_rounds == std::vector<Round>{0, t_ph, 2 * t_ph});

  ScriptedTape late({{}, {0, 0, 0}, {1, 1, 1}});
  auto s2 = ggb_build_schedule(p, t_ph - 1, late);
  CHECK(s2.transmit_rounds.front() == t_ph);

  // x is capped at a; the slot index is min(x, a) - 1.
  ScriptedTape capped({{}, {5, 7, 768}, {2, 3, 99}});
  auto s3 = ggb_build_schedule(p, 0, capped);
  const Round k = static_cast<Round>(p.k);
  CHECK(s3.transmit_rounds ==
        std::vector<Round>{t_ph + k + 5, 2 * t_ph + 2 * k + 7, 3 * t_ph + 2 * k + 768});
  CHECK(capped.below_requests() == std::vector<std::uint64_t>(3, p.k));

  RngTape tape(Rng(6));
  for (int i = 0; i < 2000; ++i) {
    const Round reception = static_cast<Round>(i * 37) - 1;
    auto sch = ggb_build_schedule(p, reception, tape);
    CHECK(sch.energy() == p.repeats);
    CHECK(sch.transmit_rounds.front() > reception);
    CHECK(std::is_sorted(sch.transmit_rounds.begin(), sch.transmit_rounds.end()));
    CHECK(sch.finish_round - reception <= static_cast<Round>(p.repeats + 1) * t_ph);
    for (std::size_t j = 0; j < sch.transmit_rounds.size(); ++j) {
      // Transmission j sits inside phase j after the first boundary.
      const Round phase = sch.transmit_rounds[j] / t_ph;
      CHECK(phase == sch.transmit_rounds.front() / t_ph + static_cast<Round>(j));
    }
  }
}

TEST_CASE("gb parameters") {
  auto p = gb_params(32);
  CHECK(p.ll == 3);
  CHECK(p.k == 121);
  CHECK(p.t_ph == 363);
  CHECK(p.repeats == 12);

  auto q = gb_params(1 << 16);
  CHECK(q.ll == 4);
  CHECK(q.k == 385);
  CHECK(q.t_ph == 1155);
  CHECK(q.repeats == 34);

  CHECK_THROWS_AS(gb_params(3), InvalidParameter);
  CHECK(gb_energy_bound(p) == 1 + 3 * (4 + 1));
}

TEST_CASE("gb joining at phase index 0") {
  auto p = gb_params(32);  // ll = 3, k = 121, window 363
  const Round w = static_cast<Round>(p.t_ph);
  const Round k = static_cast<Round>(p.k);
  // Reception -1: first window starts at 0, whose index is 0.
  ScriptedTape tape({std::vector<bool>(200, true), std::vector<std::uint64_t>(40, 1), {}});
  auto s = gb_build_schedule(p, kOriginReception, tape);
  std::vector<Round> first_window;
  for (Round r : s.transmit_rounds) {
    if (r < w) first_window.push_back(r);
  }
  // B-slot BiB at offset 1, then myPhase = 1 (not this window): nothing in A or C.
  CHECK(first_window == std::vector<Round>{k + 1});
}

TEST_CASE("gb joining mid-epoch") {
  auto p = gb_params(32);
  const Round w = static_cast<Round>(p.t_ph);
  const Round k = static_cast<Round>(p.k);
  // Reception in window 0: first window is window 1 (index 1).
  // Tape: BiB offset 4 in A, myPhase 1 so Green-Decay runs in C with coins 0,1.
  ScriptedTape tape({{false, true}, {4, 1}, {}});
  GbParams one = p;
  one.repeats = 1;
  auto s = gb_build_schedule(one, 10, tape);
  CHECK(s.transmit_rounds == std::vector<Round>{w + 4, w + 2 * k, w + 2 * k + 2});
  CHECK(s.finish_round == 2 * w - 1);
}

TEST_CASE("gb myPhase is redrawn at join and at each index-0 window") {
  auto p = gb_params(32);
  const Round w = static_cast<Round>(p.t_ph);
  for (Round reception : {Round{-1}, Round{5}, w + 3, 2 * w + 100, 7 * w - 1}) {
    ScriptedTape tape({std::vector<bool>(400, true), std::vector<std::uint64_t>(200, 0), {}});
    gb_build_schedule(p, reception, tape);
    const Round first = (reception < 0 ? 0 : reception / w + 1);
    std::uint64_t index_zero = 0;
    for (std::uint64_t r = 0; r < p.repeats; ++r) {
      if (r > 0 && (first + static_cast<Round>(r)) % static_cast<Round>(p.ll) == 0) ++index_zero;
    }
    const auto& req = tape.below_requests();
    const auto redraws = std::count(req.begin(), req.end(), p.ll);
    CHECK(static_cast<std::uint64_t>(redraws) == 1 + index_zero);
  }
}

TEST_CASE("gb energy bound under fuzzed tapes") {
  for (std::uint64_t n : {32u, 100u, 1024u}) {
    auto p = gb_params(n);
    const auto bound = gb_energy_bound(p);
    RngTape tape{Rng(n)};
    std::uint64_t worst = 0;
    for (int i = 0; i < 20000; ++i) {
      const Round reception = static_cast<Round>(i * 53) % (Round(p.t_ph) * Round(p.ll) * 3) - 1;
      auto s = gb_build_schedule(p, reception, tape);
      worst = std::max<std::uint64_t>(worst, s.energy());
      CHECK(s.transmit_rounds.front() > reception);
      CHECK(std::adjacent_find(s.transmit_rounds.begin(), s.transmit_rounds.end(), std::greater_equal<>()) ==
            s.transmit_rounds.end());
    }
    CHECK(worst <= bound);
  }
  // Worst case: every Green-Decay transmits twice and myPhase always lands on the current window.
  auto p = gb_params(32);
  for (Round reception = -1; reception < 3 * Round(p.t_ph); reception += 121) {
    ScriptedTape probe({std::vector<bool>(1000, true), std::vector<std::uint64_t>(100, 0), {}});
    auto s = gb_build_schedule(p, reception, probe);
    CHECK(s.energy() <= gb_energy_bound(p));
  }
}

TEST_CASE("decay baseline schedules") {
  auto p = decay_params(1024);
  CHECK(p.window == 20);
  CHECK(p.windows == 20);
  ScriptedTape heads({std::vector<bool>(20, true), {}, {}});
  auto s = decay_baseline_schedule(p, kOriginReception, heads);
  CHECK(s.energy() == 20);
  for (std::size_t w = 0; w < 20; ++w) CHECK(s.transmit_rounds[w] == static_cast<Round>(20 * w));

  ScriptedTape tails({std::vector<bool>(2000, false), {}, {}});
  auto all = decay_baseline_schedule(p, kOriginReception, tails);
  CHECK(all.energy() == 400);
  CHECK(tails.coins_used() == 20 * 19);
  CHECK_THROWS_AS(decay_params(1), InvalidParameter);
}

TEST_CASE("decay baseline exceeds the gb energy bound") {
  const auto decay = decay_params(1024);
  const auto gb_bound = gb_energy_bound(gb_params(1024));
  int exceeded = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    std::size_t max_energy = 0;
    for (NodeId v = 0; v < 1024; ++v) {
      RngTape tape(derive_rng(trial, v));
      max_energy = std::max(max_energy, decay_baseline_schedule(decay, 0, tape).energy());
    }
    exceeded += max_energy > gb_bound;
  }
  CHECK(exceeded >= 90);
}

TEST_CASE("fixed patterns and protocol lookup") {
  const std::vector<std::uint64_t> offs{5, 0};
  auto s = fixed_schedule(offs, 10);
  CHECK(s.transmit_rounds == std::vector<Round>{11, 16});

  auto fixed = make_protocol({"fixed:5,0,5", 8, {}, {}});
  CHECK(fixed->name() == "fixed:0,5");
  CHECK(fixed->phase_length() == 6);
  CHECK(fixed->energy_bound() == 2u);

  auto ggb = make_protocol({"ggb", 1024, 3.0, 0.1});
  CHECK(ggb->energy_bound() == ggb_params(1024, 3.0, 0.1).repeats);
  CHECK(make_protocol({"gb", 1024, {}, {}})->phase_length() == 3 * 241);
  CHECK(make_protocol({"decay-baseline", 1024, {}, {}})->name() == "decay-baseline");

  CHECK_THROWS_AS(make_protocol({"ggb", 1024, 2.0, {}}), InvalidParameter);
  CHECK_THROWS_AS(make_protocol({"fixed:", 8, {}, {}}), InvalidParameter);
  CHECK_THROWS_AS(make_protocol({"fixed:1,x", 8, {}, {}}), InvalidParameter);
  CHECK_THROWS_AS(make_protocol({"flood", 8, {}, {}}), InvalidParameter);
}

TEST_CASE("schedules ignore channel history") {
  // Same tape, same reception: same schedule, whatever happened before.
  auto p = gb_params(64);
  for (Round reception : {Round{-1}, Round{77}, Round{4000}}) {
    RngTape a(derive_rng(3, 9)), b(derive_rng(3, 9));
    CHECK(gb_build_schedule(p, reception, a) == gb_build_schedule(p, reception, b));
  }
}
