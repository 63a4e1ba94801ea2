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

#include "radiocast/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "radiocast/errors.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/rng.hpp"

namespace radiocast {

std::vector<mpz_class> no_singleton_counts(std::uint32_t k, std::uint32_t m_max, double budget) {
  if (k == 0) throw InvalidParameter("need at least one bin");
  const double work = static_cast<double>(k) * static_cast<double>(m_max) * static_cast<double>(m_max);
  if (work > budget) {
    throw ResourceError("exact no-singleton table for k=" + std::to_string(k) + ", m<=" + std::to_string(m_max) +
                        " needs ~" + std::to_string(static_cast<long long>(work)) + " steps");
  }
  // binom[j][c] = C(j, c)
  std::vector<std::vector<mpz_class>> binom(m_max + 1);
  for (std::uint32_t j = 0; j <= m_max; ++j) {
    binom[j].resize(j + 1);
    mpz_bin_uiui(binom[j][0].get_mpz_t(), j, 0);
    for (std::uint32_t c = 1; c <= j; ++c) mpz_bin_uiui(binom[j][c].get_mpz_t(), j, c);
  }
  std::vector<mpz_class> prev(m_max + 1, 0);
  std::vector<mpz_class> cur(m_max + 1, 0);
  prev[0] = 1;
  for (std::uint32_t b = 1; b <= k; ++b) {
    for (std::uint32_t j = 0; j <= m_max; ++j) {
      mpz_set(cur[j].get_mpz_t(), prev[j].get_mpz_t());  // c = 0
      for (std::uint32_t c = 2; c <= j; ++c) {
        mpz_addmul(cur[j].get_mpz_t(), binom[j][c].get_mpz_t(), prev[j - c].get_mpz_t());
      }
    }
    std::swap(prev, cur);
  }
  return prev;
}

std::vector<double> p_no_singleton_table(std::uint32_t k, std::uint32_t m_max, double budget) {
  const auto counts = no_singleton_counts(k, m_max, budget);
  std::vector<double> out(m_max + 1);
  mpz_class total = 1;
  for (std::uint32_t m = 0; m <= m_max; ++m) {
    out[m] = mpq_class(counts[m], total).get_d();
    total *= k;
  }
  return out;
}

double p_no_singleton_exact(std::uint32_t m, std::uint32_t k, double budget) {
  return p_no_singleton_table(k, m, budget)[m];
}

Lemma1Report check_lemma1(std::uint64_t n, double phi, const Lemma1Options& options) {
  if (n < 2) throw InvalidParameter("lemma1 needs n >= 2");
  if (!(phi >= 1.0) || !std::isfinite(phi)) throw InvalidParameter("lemma1 needs phi >= 1");
  const double root = real_root(n, phi);
  Lemma1Report report;
  report.n = n;
  report.phi = phi;
  report.k = static_cast<std::uint32_t>(24 * ceil_root(n, phi) + 1);
  report.m_max = static_cast<std::uint32_t>(ceil_guarded(12.0 / phi * root * std::log(static_cast<double>(n))));
  report.bound = 1.0 / (2.0 * root);

  try {
    const auto table = p_no_singleton_table(report.k, report.m_max, options.budget);
    report.failure_prob.assign(table.begin() + 1, table.end());
    for (std::uint32_t m = 1; m <= report.m_max; ++m) {
      if (table[m] > report.bound) report.violations.push_back(m);
    }
  } catch (const ResourceError&) {
    report.exact = false;
    report.confidence = 0.99;
    Rng rng(options.seed);
    std::vector<std::uint32_t> load(report.k);
    for (std::uint32_t m = 1; m <= report.m_max; ++m) {
      std::uint64_t hits = 0;
      for (std::uint64_t t = 0; t < options.mc_trials; ++t) {
        std::fill(load.begin(), load.end(), 0u);
        for (std::uint32_t ball = 0; ball < m; ++ball) ++load[uniform_below(rng, report.k)];
        if (std::find(load.begin(), load.end(), 1u) == load.end()) ++hits;
      }
      const McEstimate est{hits, options.mc_trials};
      report.failure_prob.push_back(est.frequency());
      if (est.ci99().lo > report.bound) report.violations.push_back(m);
    }
  }
  for (std::uint32_t m = 1; m <= report.m_max; ++m) {
    if (report.failure_prob[m - 1] > report.max_failure || report.argmax_m == 0) {
      report.max_failure = report.failure_prob[m - 1];
      report.argmax_m = m;
    }
  }
  return report;
}

DiscreteDistribution DiscreteDistribution::from_pmf(std::vector<std::pair<std::uint64_t, double>> pmf) {
  if (pmf.empty()) throw InvalidParameter("empty distribution");
  std::sort(pmf.begin(), pmf.end());
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i].first == 0) throw InvalidParameter("distribution support must be positive");
    if (i > 0 && pmf[i].first == pmf[i - 1].first) throw InvalidParameter("repeated support value");
    if (!(pmf[i].second >= 0.0)) throw InvalidParameter("negative probability");
    total += pmf[i].second;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("probabilities do not sum to 1");
  DiscreteDistribution d;
  d.pmf_ = std::move(pmf);
  return d;
}

DiscreteDistribution DiscreteDistribution::point_mass(std::uint64_t value) { return from_pmf({{value, 1.0}}); }

DiscreteDistribution DiscreteDistribution::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo == 0 || hi < lo) throw InvalidParameter("uniform needs 1 <= lo <= hi");
  const double p = 1.0 / static_cast<double>(hi - lo + 1);
  std::vector<std::pair<std::uint64_t, double>> pmf;
  for (std::uint64_t v = lo; v <= hi; ++v) pmf.emplace_back(v, p);
  // Sum of (hi-lo+1) copies of p may miss 1 by a few ulps.
  double total = 0.0;
  for (auto& [v, q] : pmf) total += q;
  for (auto& [v, q] : pmf) q /= total;
  return from_pmf(std::move(pmf));
}

DiscreteDistribution DiscreteDistribution::truncated_geometric(double q, double tail) {
  if (!(q >= 0.0 && q < 1.0)) throw InvalidParameter("geometric continue probability must be in [0, 1)");
  if (!(tail > 0.0 && tail < 1.0)) throw InvalidParameter("tail mass must be in (0, 1)");
  std::vector<std::pair<std::uint64_t, double>> pmf;
  double remaining = 1.0;  // P(X > i - 1) = q^(i-1)
  double kept = 0.0;
  for (std::uint64_t i = 1; remaining >= tail; ++i) {
    const double p = remaining * (1.0 - q);
    pmf.emplace_back(i, p);
    kept += p;
    remaining *= q;
  }
  for (auto& [v, p] : pmf) p /= kept;
  auto d = from_pmf(std::move(pmf));
  d.tail_mass_ = remaining;
  return d;
}

DiscreteDistribution DiscreteDistribution::two_point(std::uint64_t a, std::uint64_t b, double p_a) {
  if (!(p_a > 0.0 && p_a < 1.0)) throw InvalidParameter("two-point weight must be in (0, 1)");
  return from_pmf({{a, p_a}, {b, 1.0 - p_a}});
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (auto [v, p] : pmf_) m += static_cast<double>(v) * p;
  return m;
}

double collision_prob_exact(const DiscreteDistribution& d) {
  double s = 0.0;
  for (auto [v, p] : d.pmf()) s += p * p;
  return s;
}

Fact1Check check_fact1(const DiscreteDistribution& d) {
  Fact1Check c;
  c.collision = collision_prob_exact(d);
  c.mean = d.mean();
  const double k = std::round(c.mean);
  c.applicable = k >= 2 && std::fmod(k, 2.0) == 0.0 && std::abs(c.mean - k) <= 1e-9 * k;
  if (c.applicable) {
    c.bound = 1.0 / (2.0 * k);
    c.pass = c.collision >= c.bound;
  }
  return c;
}

mpz_class pattern_count(std::uint32_t T, std::uint32_t E) {
  if (E > T) throw InvalidParameter("pattern count needs E <= T");
  mpz_class total = 0;
  mpz_class term = 1;  // C(T, 0)
  for (std::uint32_t i = 0; i <= E; ++i) {
    total += term;
    term = term * (T - i) / (i + 1);
  }
  return total;
}

double pattern_count_bound(std::uint32_t T, std::uint32_t E) {
  if (E == 0 || E > T) throw InvalidParameter("pattern bound needs 1 <= E <= T");
  return std::pow(std::numbers::e * T / E, static_cast<double>(E));
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

McEstimate green_decay_success_mc(std::uint64_t participants, std::uint64_t k, std::uint64_t trials,
                                  std::uint64_t seed) {
  if (participants == 0) throw InvalidParameter("green-decay needs at least one participant");
  McEstimate est{0, trials};
  RngTape tape(Rng(mix64(seed)));
  std::vector<std::uint32_t> per_round(k);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(per_round.begin(), per_round.end(), 0u);
    for (std::uint64_t i = 0; i < participants; ++i) {
      for (auto off : green_decay_offsets(k, tape)) ++per_round[off];
    }
    if (std::find(per_round.begin(), per_round.end(), 1u) != per_round.end()) ++est.successes;
  }
  return est;
}

double green_decay_success_exact(std::uint64_t participants, std::uint64_t k) {
  if (participants == 0) throw InvalidParameter("green-decay needs at least one participant");
  if (k < 2) throw InvalidParameter("green-decay needs k >= 2");
  if (participants == 1) return 1.0;  // alone in round 0
  const std::size_t n = participants;
  // half_binom[r][c] = C(r, c) / 2^r
  std::vector<std::vector<double>> half_binom(n + 1);
  half_binom[0] = {1.0};
  for (std::size_t r = 1; r <= n; ++r) {
    half_binom[r].assign(r + 1, 0.0);
    for (std::size_t c = 0; c <= r; ++c) {
      const double left = c > 0 ? half_binom[r - 1][c - 1] : 0.0;
      const double right = c < r ? half_binom[r - 1][c] : 0.0;
      half_binom[r][c] = 0.5 * (left + right);
    }
  }
  // quiet[r]: P(no round so far had a lone transmitter, r still flipping)
  std::vector<double> quiet(n + 1, 0.0);
  quiet[n] = 1.0;
  std::vector<double> next(n + 1);
  for (std::uint64_t round = 1; round < k; ++round) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r <= n; ++r) {
      if (quiet[r] == 0.0) continue;
      for (std::size_t stop = 0; stop <= r; ++stop) {
        if (stop == 1) continue;
        next[r - stop] += quiet[r] * half_binom[r][stop];
      }
    }
    std::swap(quiet, next);
  }
  double fail = 0.0;
  for (double q : quiet) fail += q;
  return 1.0 - fail;
}

Lemma2Estimate lemma2_mc(std::uint64_t n, std::uint64_t n_hat, double phi, std::uint64_t trials,
                         std::uint64_t seed) {
  if (n_hat < 1 || n_hat > n) throw InvalidParameter("lemma2 needs 1 <= n_hat <= n");
  const GgbParams p = ggb_params(n, phi, 0.5);
  Lemma2Estimate out;
  out.a = p.a;
  out.threshold = 12.0 / phi * real_root(n, phi) * std::log(static_cast<double>(n));
  out.target = 1.0 - 2.0 / (static_cast<double>(n) * static_cast<double>(n));
  out.estimate.trials = trials;
  Rng rng(mix64(seed));
  std::vector<std::uint64_t> counts(p.a + 1);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t i = 0; i < n_hat; ++i) ++counts[std::min(sample_geo(p.continue_prob, rng), p.a)];
    const bool ok = std::any_of(counts.begin() + 1, counts.end(), [&](std::uint64_t c) {
      return c >= 1 && static_cast<double>(c) <= out.threshold;
    });
    if (ok) ++out.estimate.successes;
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string oracle_rows_to_csv(const std::vector<OracleRow>& rows) {
  std::string out = "operation,params,value,bound,pass\n";
  for (const auto& r : rows) {
    out += csv_field(r.operation) + "," + csv_field(r.params) + "," + shortest(r.value) + "," + shortest(r.bound) +
           "," + (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace radiocast
