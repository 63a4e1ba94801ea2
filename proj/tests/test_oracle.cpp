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

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "radiocast/errors.hpp"
#include "radiocast/oracle.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/rng.hpp"

using namespace radiocast;

namespace {

// Fraction of the k^m assignments that leave no bin with exactly one ball.
double enumerate_no_singleton(std::uint32_t m, std::uint32_t k) {
  std::vector<std::uint32_t> ball(m, 0), load(k, 0);
  std::uint64_t good = 0, total = 0;
  while (true) {
    std::fill(load.begin(), load.end(), 0u);
    for (auto b : ball) ++load[b];
    good += std::find(load.begin(), load.end(), 1u) == load.end();
    ++total;
    std::uint32_t i = 0;
    while (i < m && ++ball[i] == k) ball[i++] = 0;
    if (i == m) break;
  }
  return static_cast<double>(good) / static_cast<double>(total);
}

// by_singletons[s] = assignments of m labelled balls into k bins with exactly s singleton bins.
std::vector<mpz_class> singleton_histogram(std::uint32_t m, std::uint32_t k) {
  // state[j][s] over bins processed so far
  std::vector<std::vector<mpz_class>> state(m + 1, std::vector<mpz_class>(k + 1, 0));
  state[0][0] = 1;
  for (std::uint32_t b = 0; b < k; ++b) {
    std::vector<std::vector<mpz_class>> next(m + 1, std::vector<mpz_class>(k + 1, 0));
    for (std::uint32_t j = 0; j <= m; ++j) {
      for (std::uint32_t s = 0; s <= b; ++s) {
        if (state[j][s] == 0) continue;
        for (std::uint32_t c = 0; j + c <= m; ++c) {
          mpz_class ways;
          mpz_bin_uiui(ways.get_mpz_t(), j + c, c);
          next[j + c][s + (c == 1)] += state[j][s] * ways;
        }
      }
    }
    state = std::move(next);
  }
  return state[m];
}

// Outcome of one Green-Decay station: 0 = no second transmission, i = second transmission at offset i.
double enumerate_green_decay(std::uint32_t n, std::uint32_t k) {
  std::vector<std::uint32_t> pick(n, 0);
  double success = 0.0;
  while (true) {
    double prob = 1.0;
    std::vector<std::uint32_t> per_round(k, 0);
    per_round[0] = n;
    for (auto p : pick) {
      prob *= p == 0 ? std::ldexp(1.0, -static_cast<int>(k - 1)) : std::ldexp(1.0, -static_cast<int>(p));
      if (p) ++per_round[p];
    }
    if (std::find(per_round.begin(), per_round.end(), 1u) != per_round.end()) success += prob;
    std::uint32_t i = 0;
    while (i < n && ++pick[i] == k) pick[i++] = 0;
    if (i == n) break;
  }
  return success;
}

}  // namespace

TEST_CASE("no-singleton probability examples") {
  CHECK(p_no_singleton_exact(1, 5) == 0.0);
  CHECK(p_no_singleton_exact(2, 2) == 0.5);
  CHECK(p_no_singleton_exact(3, 2) == 0.25);
  CHECK(p_no_singleton_exact(0, 3) == 1.0);
}

TEST_CASE("no-singleton probability matches enumeration") {
  for (std::uint32_t k = 1; k <= 10; ++k) {
    for (std::uint32_t m = 0; std::pow(double(k), double(m)) <= 2e5 && m <= 17; ++m) {
      CHECK(p_no_singleton_exact(m, k) == doctest::Approx(enumerate_no_singleton(m, k)).epsilon(1e-14));
    }
  }
}

TEST_CASE("no-singleton counts agree with a singleton-tracking table") {
  for (std::uint32_t k = 1; k <= 7; ++k) {
    const std::uint32_t m_max = 9;
    auto counts = no_singleton_counts(k, m_max);
    for (std::uint32_t m = 0; m <= m_max; ++m) {
      auto hist = singleton_histogram(m, k);
      mpz_class total = 0;
      for (const auto& h : hist) total += h;
      mpz_class k_pow;
      mpz_ui_pow_ui(k_pow.get_mpz_t(), k, m);
      CHECK(total == k_pow);
      CHECK(hist[0] == counts[m]);
    }
  }
}

TEST_CASE("no-singleton probability agrees with sampling") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto k = static_cast<std::uint32_t>(1 + uniform_below(rng, 30));
    const auto m = static_cast<std::uint32_t>(uniform_below(rng, 60));
    const double exact = p_no_singleton_exact(m, k);
    const int trials = 20000;
    int hits = 0;
    std::vector<std::uint32_t> load(k);
    for (int t = 0; t < trials; ++t) {
      std::fill(load.begin(), load.end(), 0u);
      for (std::uint32_t b = 0; b < m; ++b) ++load[uniform_below(rng, k)];
      hits += std::find(load.begin(), load.end(), 1u) == load.end();
    }
    const double sigma = std::sqrt(exact * (1 - exact) / trials);
    CHECK(std::abs(hits / double(trials) - exact) <= 4 * sigma + 1e-12);
  }
}

TEST_CASE("exact table respects its budget") {
  CHECK_THROWS_AS(no_singleton_counts(1000, 1000, 1e6), ResourceError);
  CHECK_THROWS_AS(no_singleton_counts(0, 3), InvalidParameter);
}

TEST_CASE("no-singleton bound at n=256, phi=4") {
  auto r = check_lemma1(256, 4.0);
  CHECK(r.k == 97);
  CHECK(r.m_max == 67);
  CHECK(r.bound == 0.125);
  CHECK(r.exact);
  CHECK(r.failure_prob.size() == 67);
  CHECK(r.failure_prob[0] == 0.0);
  CHECK(r.pass());
  CHECK(r.max_failure <= r.bound);
}

TEST_CASE("no-singleton bound falls back to sampling over budget") {
  Lemma1Options opt;
  opt.budget = 10;
  opt.mc_trials = 2000;
  auto r = check_lemma1(256, 4.0, opt);
  CHECK_FALSE(r.exact);
  CHECK(r.confidence == 0.99);
  CHECK(r.failure_prob.size() == r.m_max);
  CHECK(r.pass());
}

TEST_CASE("collision probability examples") {
  CHECK(collision_prob_exact(DiscreteDistribution::point_mass(4)) == 1.0);

  auto u = DiscreteDistribution::uniform(1, 3);
  CHECK(u.mean() == doctest::Approx(2.0));
  CHECK(collision_prob_exact(u) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  auto cu = check_fact1(u);
  CHECK(cu.applicable);
  CHECK(cu.bound == 0.25);
  CHECK(cu.pass);

  auto g = DiscreteDistribution::truncated_geometric(0.5);
  CHECK(g.tail_mass() < 1e-12);
  CHECK(g.mean() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(collision_prob_exact(g) == doctest::Approx(0.25 / 0.75).epsilon(1e-10));
  CHECK(check_fact1(g).pass);

  auto odd = check_fact1(DiscreteDistribution::uniform(1, 5));  // mean 3
  CHECK_FALSE(odd.applicable);
  CHECK(odd.pass);

  CHECK_THROWS_AS(DiscreteDistribution::from_pmf({{1, 0.5}, {2, 0.4}}), InvalidParameter);
  CHECK_THROWS_AS(DiscreteDistribution::from_pmf({{0, 1.0}}), InvalidParameter);
  CHECK_THROWS_AS(DiscreteDistribution::from_pmf({{3, 0.5}, {3, 0.5}}), InvalidParameter);
}

TEST_CASE("collision probability is at least the uniform floor") {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t support = 1 + uniform_below(rng, 12);
    std::vector<double> w(support);
    double total = 0.0;
    for (auto& x : w) total += (x = uniform_open_closed(rng));
    std::vector<std::pair<std::uint64_t, double>> pmf;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < support; ++i) {
      pmf.emplace_back(i + 1, w[i] / total);
      acc += w[i] / total;
    }
    pmf.emplace_back(support, 1.0 - acc);
    auto d = DiscreteDistribution::from_pmf(pmf);
    CHECK(collision_prob_exact(d) >= 1.0 / static_cast<double>(support) - 1e-15);
  }
}

TEST_CASE("pattern counts") {
  CHECK(pattern_count(3, 1) == 4);
  CHECK(pattern_count(4, 2) == 11);
  for (std::uint32_t T = 0; T < 40; ++T) {
    CHECK(pattern_count(T, 0) == 1);
    mpz_class two_t;
    mpz_ui_pow_ui(two_t.get_mpz_t(), 2, T);
    CHECK(pattern_count(T, T) == two_t);
    for (std::uint32_t E = 0; E <= T; ++E) {
      if (E > 0) CHECK(pattern_count(T, E) >= pattern_count(T, E - 1));
      if (T > 0 && E < T) CHECK(pattern_count(T, E) >= pattern_count(T - 1, E));
    }
  }
  CHECK(pattern_count_bound(4, 2) == doctest::Approx(std::pow(std::numbers::e * 2, 2)));
  CHECK_THROWS_AS(pattern_count(2, 3), InvalidParameter);
  CHECK_THROWS_AS(pattern_count_bound(5, 0), InvalidParameter);
}

TEST_CASE("wilson interval") {
  const double z = kZ99;
  auto ci = wilson_interval(50, 100);
  const double half = z * std::sqrt(0.25 / 100 + z * z / 40000) / (1 + z * z / 100);
  CHECK(ci.lo == doctest::Approx(0.5 - half));
  CHECK(ci.hi == doctest::Approx(0.5 + half));
  auto all = wilson_interval(10, 10);
  CHECK(all.hi == doctest::Approx(1.0));
  CHECK(all.lo == doctest::Approx(1.0 / (1 + z * z / 10)));
  auto none = wilson_interval(0, 0);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == 1.0);
}

TEST_CASE("green-decay success") {
  auto one = green_decay_success_mc(1, 14, 1000, 1);
  CHECK(one.successes == 1000);
  CHECK(green_decay_success_exact(1, 14) == 1.0);

  for (std::uint32_t n = 2; n <= 4; ++n) {
    for (std::uint32_t k = 2; k <= 7; ++k) {
      CHECK(green_decay_success_exact(n, k) == doctest::Approx(enumerate_green_decay(n, k)).epsilon(1e-12));
    }
  }
  for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 3}, {5, 6}, {20, 10}, {128, 14}}) {
    const double exact = green_decay_success_exact(n, k);
    auto est = green_decay_success_mc(n, k, 20000, 7 + n);
    const double sigma = std::sqrt(exact * (1 - exact) / 20000);
    CHECK(std::abs(est.frequency() - exact) <= 4 * sigma);
  }
  CHECK(green_decay_success_mc(10, 14, 500, 3).successes == green_decay_success_mc(10, 14, 500, 3).successes);
}

TEST_CASE("lightly chosen geometric values") {
  // Few participants: every drawn value is chosen at most threshold times.
  auto few = lemma2_mc(1024, 50, 2.0, 2000, 1);
  CHECK(few.estimate.successes == 2000);

  // a = 1 when phi = 1: every sample is 1.
  auto flat = lemma2_mc(1024, 1024, 1.0, 500, 2);
  CHECK(flat.a == 1);
  CHECK((flat.estimate.successes == 500) == (1024 <= flat.threshold));

  auto full = lemma2_mc(1024, 1024, 2.0, 100000, 3);
  const double f = full.estimate.frequency();
  const double sigma = std::sqrt(std::max(f * (1 - f), 1.0 / 100000) / 100000);
  CHECK(f >= full.target - 4 * sigma);
  CHECK(full.target == 1.0 - 2.0 / (1024.0 * 1024.0));

  CHECK_THROWS_AS(lemma2_mc(1024, 0, 2.0, 10, 1), InvalidParameter);
  CHECK_THROWS_AS(lemma2_mc(1024, 1025, 2.0, 10, 1), InvalidParameter);
}

TEST_CASE("oracle rows export") {
  std::vector<OracleRow> rows{{"alpha", "T=4;E=2", 11, 29.5562243957226, true},
                              {"fact1", "pmf:1=0.5,3=0.5", 0.5, 0.25, true}};
  auto csv = oracle_rows_to_csv(rows);
  CHECK(csv.rfind("operation,params,value,bound,pass\n", 0) == 0);
  CHECK(csv.find("\"pmf:1=0.5,3=0.5\"") != std::string::npos);
}
