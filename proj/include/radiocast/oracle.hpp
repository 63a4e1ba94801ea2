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

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace radiocast {

// ---------------------------------------------------------------------------
// Balls into bins: probability that no bin holds exactly one ball
// ---------------------------------------------------------------------------

/// Default cap on bins * balls^2 inner steps of the exact table.
inline constexpr double kDefaultDpBudget = 2.5e8;

/// Exact counts f(k, m) of assignments of m labeled balls to k bins with no
/// singleton bin, for m = 0..m_max, via
///   f(b, j) = sum_{c in {0, 2, 3, ..., j}} C(j, c) f(b-1, j-c),
///   f(0, 0) = 1, f(0, j > 0) = 0.
/// Throws ResourceError when k * m_max^2 exceeds `budget`.
std::vector<mpz_class> no_singleton_counts(std::uint32_t k, std::uint32_t m_max,
                                           double budget = kDefaultDpBudget);

/// f(k, m) / k^m, divided once at the end. k >= 1.
double p_no_singleton_exact(std::uint32_t m, std::uint32_t k, double budget = kDefaultDpBudget);

/// Exact probabilities for every m = 0..m_max at once.
std::vector<double> p_no_singleton_table(std::uint32_t k, std::uint32_t m_max,
                                         double budget = kDefaultDpBudget);

struct Lemma1Report {
  std::uint64_t n = 0;
  double phi = 0.0;
  std::uint32_t k = 0;      // 24 ceil(n^(1/phi)) + 1
  std::uint32_t m_max = 0;  // ceil((12 / phi) n^(1/phi) ln n)
  double bound = 0.0;       // 1 / (2 n^(1/phi))
  bool exact = true;        // false: Monte-Carlo fallback was used
  double confidence = 1.0;  // 0.99 for the fallback
  std::vector<double> failure_prob;  // index m - 1; MC point estimate when !exact
  double max_failure = 0.0;
  std::uint32_t argmax_m = 0;
  std::vector<std::uint32_t> violations;  // m values over the bound
  bool pass() const { return violations.empty(); }
};

struct Lemma1Options {
  double budget = kDefaultDpBudget;
  std::uint64_t mc_trials = 20'000;  // per m, fallback only
  std::uint64_t seed = 1;
};

/// For every m in [1, m_max] checks P(no singleton | m balls, k bins) against
/// 1 / (2 n^(1/phi)). Exact DP when it fits the budget; otherwise a Monte-Carlo
/// estimate per m that fails only when the 99% Wilson lower limit exceeds the
/// bound.
Lemma1Report check_lemma1(std::uint64_t n, double phi, const Lemma1Options& options = {});

// ---------------------------------------------------------------------------
// Collision probability of a discrete distribution
// ---------------------------------------------------------------------------

/// Finite distribution over positive integers, sorted by value.
class DiscreteDistribution {
 public:
  /// Values must be positive and distinct; probabilities must sum to 1 within
  /// 1e-12. Throws InvalidParameter otherwise.
  static DiscreteDistribution from_pmf(std::vector<std::pair<std::uint64_t, double>> pmf);

  static DiscreteDistribution point_mass(std::uint64_t value);
  /// Uniform on {lo, ..., hi}.
  static DiscreteDistribution uniform(std::uint64_t lo, std::uint64_t hi);
  /// Geometric with continue probability q, cut where the remaining tail mass
  /// drops below `tail`, then renormalized.
  static DiscreteDistribution truncated_geometric(double q, double tail = 1e-12);
  static DiscreteDistribution two_point(std::uint64_t a, std::uint64_t b, double p_a);

  const std::vector<std::pair<std::uint64_t, double>>& pmf() const { return pmf_; }
  double mean() const;
  double tail_mass() const { return tail_mass_; }

 private:
  std::vector<std::pair<std::uint64_t, double>> pmf_;
  double tail_mass_ = 0.0;
};

/// P(X = Y) for independent X, Y ~ d: sum of squared probabilities.
double collision_prob_exact(const DiscreteDistribution& d);

struct Fact1Check {
  double collision = 0.0;
  double mean = 0.0;
  bool applicable = false;  // mean is an even integer >= 2 (within 1e-9)
  double bound = 0.0;       // 1 / (2 mean) when applicable
  bool pass = true;
};

Fact1Check check_fact1(const DiscreteDistribution& d);

// ---------------------------------------------------------------------------
// Broadcasting patterns
// ---------------------------------------------------------------------------

/// alpha(T, E) = sum_{i=0}^{E} C(T, i). Requires E <= T.
mpz_class pattern_count(std::uint32_t T, std::uint32_t E);

/// (e T / E)^E, for E >= 1.
double pattern_count_bound(std::uint32_t T, std::uint32_t E);

// ---------------------------------------------------------------------------
// Monte-Carlo estimates
// ---------------------------------------------------------------------------

inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ99);

struct McEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double frequency() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
  Interval ci99() const { return wilson_interval(successes, trials); }
};

/// `participants` independent Green-Decay(k) runs sharing a listener; success
/// iff some round of the window has exactly one transmitter.
McEstimate green_decay_success_mc(std::uint64_t participants, std::uint64_t k, std::uint64_t trials,
                                  std::uint64_t seed);

/// Exact value of the same probability, by a recursion over the window's
/// rounds on the number of participants that have not yet stopped.
double green_decay_success_exact(std::uint64_t participants, std::uint64_t k);

struct Lemma2Estimate {
  McEstimate estimate;
  std::uint64_t a = 0;
  double threshold = 0.0;  // (12 / phi) n^(1/phi) ln n
  double target = 0.0;     // 1 - 2 / n^2
};

/// Draws n_hat values Y_i = min(Geo(phi / n^(1/phi)), a); a trial succeeds if
/// some y in {1..a} is drawn at least once and at most `threshold` times.
Lemma2Estimate lemma2_mc(std::uint64_t n, std::uint64_t n_hat, double phi, std::uint64_t trials,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

struct OracleRow {
  std::string operation;
  std::string params;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

/// "operation,params,value,bound,pass" with a header row.
std::string oracle_rows_to_csv(const std::vector<OracleRow>& rows);

}  // namespace radiocast
