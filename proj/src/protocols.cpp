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

#include "radiocast/protocols.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "radiocast/errors.hpp"

namespace radiocast {

namespace {

// First multiple of `period` strictly after `r` (r may be -1).
Round next_boundary_after(Round r, Round period) {
  const Round q = r >= 0 ? r / period : -((-r + period - 1) / period);
  return (q + 1) * period;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::uint64_t sample_geo(double q, Rng& rng) {
  if (!(q >= 0.0 && q < 1.0)) throw InvalidParameter("geometric continue probability must be in [0, 1)");
  if (q == 0.0) return 1;
  // P(floor(log u / log q) >= i) = P(u <= q^i) = q^i.
  const double u = uniform_open_closed(rng);
  const double steps = std::floor(std::log(u) / std::log(q));
  constexpr double cap = static_cast<double>(std::uint64_t{1} << 62);
  return 1 + static_cast<std::uint64_t>(std::min(steps, cap));
}

std::uint64_t balls_into_bins_offset(std::uint64_t k, Rng& rng) {
  if (k == 0) throw InvalidParameter("balls-into-bins needs k >= 1");
  return uniform_below(rng, k);
}

std::vector<std::uint64_t> green_decay_offsets(std::uint64_t k, RandomTape& tape) {
  if (k < 2) throw InvalidParameter("green-decay needs k >= 2");
  std::vector<std::uint64_t> offsets{0};
  for (std::uint64_t i = 1; i < k; ++i) {
    if (tape.coin()) {
      offsets.push_back(i);
      break;
    }
  }
  return offsets;
}

std::uint32_t ceil_log2(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("log of zero");
  return n == 1 ? 0 : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

std::uint32_t ceil_log2_log2(std::uint64_t n) {
  if (n < 2) throw InvalidParameter("log log needs n >= 2");
  // log2 n <= 2^j  <=>  ceil(log2 n) <= 2^j, because 2^j is an integer.
  return ceil_log2(ceil_log2(n));
}

std::uint64_t ceil_guarded(double v) {
  if (!std::isfinite(v) || v < 0) throw InvalidParameter("ceil of invalid value");
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(v));
}

double real_root(std::uint64_t n, double phi) {
  const double r = std::pow(static_cast<double>(n), 1.0 / phi);
  const double nearest = std::round(r);
  return std::abs(r - nearest) <= 1e-9 * std::max(1.0, r) ? nearest : r;
}

std::uint64_t ceil_root(std::uint64_t n, double phi) { return ceil_guarded(real_root(n, phi)); }

GgbParams ggb_params(std::uint64_t n, double phi, double eps) {
  if (n < 4) throw InvalidParameter("ggb needs n >= 4, got " + std::to_string(n));
  if (!(phi >= 1.0) || !std::isfinite(phi)) throw InvalidParameter("ggb needs phi >= 1, got " + format_double(phi));
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("ggb needs 0 < eps < 1, got " + format_double(eps));

  const double log_n = std::log2(static_cast<double>(n));
  const double denom = log_n - phi * std::log2(phi);
  if (!(denom > 0.0)) {
    throw InvalidParameter("ggb needs phi log phi < log n; phi=" + format_double(phi) +
                           " is too large for n=" + std::to_string(n));
  }

  GgbParams p;
  p.n = n;
  p.phi = phi;
  p.eps = eps;
  p.a = ceil_guarded(phi * log_n / denom);
  p.k = 24 * ceil_root(n, phi) + 1;
  p.t_ph = p.a * p.k;
  p.repeats = ceil_guarded(phi * (1.0 + std::log2(2.0 / eps) / log_n));
  p.continue_prob = phi / real_root(n, phi);

  const double log_log_n = std::log2(log_n);
  if (phi >= log_n / log_log_n) {
    p.warnings.push_back("phi=" + format_double(phi) + " >= log n / log log n = " +
                         format_double(log_n / log_log_n) + ": outside the range where one value is guaranteed to be "
                         "drawn by few stations");
  } else if (phi > log_n / (2.0 * log_log_n)) {
    p.warnings.push_back("phi=" + format_double(phi) + " > log n / (2 log log n) = " +
                         format_double(log_n / (2.0 * log_log_n)) + ": phase length is no longer O(phi n^(1/phi))");
  }
  if (eps <= 2.0 / std::pow(static_cast<double>(n), 3.0)) {
    p.warnings.push_back("eps <= 2 n^-3: success guarantee does not cover this eps");
  }
  return p;
}

StationSchedule ggb_build_schedule(const GgbParams& p, Round reception, RandomTape& tape) {
  const auto t_ph = static_cast<Round>(p.t_ph);
  const auto k = static_cast<Round>(p.k);
  StationSchedule s;
  s.transmit_rounds.reserve(p.repeats);
  Round phase_start = next_boundary_after(reception, t_ph);
  for (std::uint64_t rep = 0; rep < p.repeats; ++rep, phase_start += t_ph) {
    const std::uint64_t x = std::min(tape.geometric(p.continue_prob), p.a);
    const Round slot = phase_start + static_cast<Round>(x - 1) * k;
    s.transmit_rounds.push_back(slot + static_cast<Round>(tape.below(p.k)));
  }
  s.finish_round = phase_start - 1;
  return s;
}

GbParams gb_params(std::uint64_t n) {
  if (n < 4) throw InvalidParameter("gb needs n >= 4, got " + std::to_string(n));
  GbParams p;
  p.n = n;
  p.ll = ceil_log2_log2(n);
  p.k = 24 * std::uint64_t{ceil_log2(n)} + 1;
  p.t_ph = 3 * p.k;
  p.repeats = 2 * std::uint64_t{ceil_log2(n)} + 2;
  return p;
}

std::uint64_t gb_energy_bound(const GbParams& p) {
  return 1 + 3 * ((p.repeats + p.ll - 1) / p.ll + 1);
}

StationSchedule gb_build_schedule(const GbParams& p, Round reception, RandomTape& tape) {
  const auto t_ph = static_cast<Round>(p.t_ph);
  const auto k = static_cast<Round>(p.k);
  StationSchedule s;
  bool fresh = true;
  std::uint64_t my_phase = 0;
  Round window = next_boundary_after(reception, t_ph);
  for (std::uint64_t rep = 0; rep < p.repeats; ++rep, window += t_ph) {
    const auto phase = static_cast<std::uint64_t>(window / t_ph) % p.ll;
    if (phase == 0 && fresh) fresh = false;
    if (fresh) {
      s.transmit_rounds.push_back(window + static_cast<Round>(tape.below(p.k)));
    } else if (phase == 0) {
      s.transmit_rounds.push_back(window + k + static_cast<Round>(tape.below(p.k)));
    }
    if (phase == 0 || fresh) {
      fresh = false;
      my_phase = tape.below(p.ll);
    }
    if (phase == my_phase) {
      for (auto off : green_decay_offsets(p.k, tape)) {
        s.transmit_rounds.push_back(window + 2 * k + static_cast<Round>(off));
      }
    }
  }
  s.finish_round = window - 1;
  return s;
}

DecayParams decay_params(std::uint64_t n) {
  if (n < 2) throw InvalidParameter("decay baseline needs n >= 2");
  const std::uint64_t len = 2 * std::uint64_t{ceil_log2(n)};
  return DecayParams{n, len, len};
}

StationSchedule decay_baseline_schedule(const DecayParams& p, Round reception, RandomTape& tape) {
  const auto len = static_cast<Round>(p.window);
  StationSchedule s;
  Round start = next_boundary_after(reception, len);
  for (std::uint64_t w = 0; w < p.windows; ++w, start += len) {
    Round x = 1;
    while (x < len && !tape.coin()) ++x;
    for (Round i = 0; i < x; ++i) s.transmit_rounds.push_back(start + i);
  }
  s.finish_round = start - 1;
  return s;
}

StationSchedule fixed_schedule(std::span<const std::uint64_t> offsets, Round reception) {
  StationSchedule s;
  for (auto off : offsets) s.transmit_rounds.push_back(reception + 1 + static_cast<Round>(off));
  std::sort(s.transmit_rounds.begin(), s.transmit_rounds.end());
  s.transmit_rounds.erase(std::unique(s.transmit_rounds.begin(), s.transmit_rounds.end()), s.transmit_rounds.end());
  s.finish_round = s.transmit_rounds.empty() ? reception : s.transmit_rounds.back();
  return s;
}

FixedPatternProtocol::FixedPatternProtocol(std::vector<std::uint64_t> offsets) : offsets_(std::move(offsets)) {
  std::sort(offsets_.begin(), offsets_.end());
  offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
}

std::string FixedPatternProtocol::name() const {
  std::string out = "fixed:";
  for (std::size_t i = 0; i < offsets_.size(); ++i) out += (i ? "," : "") + std::to_string(offsets_[i]);
  return out;
}

Round FixedPatternProtocol::phase_length() const {
  return offsets_.empty() ? 1 : static_cast<Round>(offsets_.back()) + 1;
}

std::unique_ptr<StationProtocol> make_protocol(const ProtocolSpec& spec) {
  if (spec.name == "ggb") {
    if (!spec.phi || !spec.eps) throw InvalidParameter("ggb needs --phi and --eps");
    return std::make_unique<GgbProtocol>(ggb_params(spec.n, *spec.phi, *spec.eps));
  }
  if (spec.name == "gb") return std::make_unique<GbProtocol>(gb_params(spec.n));
  if (spec.name == "decay-baseline") return std::make_unique<DecayBaselineProtocol>(decay_params(spec.n));
  if (spec.name.starts_with("fixed:")) {
    std::vector<std::uint64_t> offsets;
    std::string_view rest = std::string_view(spec.name).substr(6);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto token = rest.substr(0, comma);
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw InvalidParameter("bad offset '" + std::string(token) + "' in " + spec.name);
      }
      offsets.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (offsets.empty()) throw InvalidParameter("fixed protocol needs at least one offset");
    return std::make_unique<FixedPatternProtocol>(std::move(offsets));
  }
  throw InvalidParameter("unknown protocol '" + spec.name + "'");
}

}  // namespace radiocast
