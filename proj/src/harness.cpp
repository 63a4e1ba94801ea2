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

#include "radiocast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "radiocast/errors.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/rng.hpp"

namespace radiocast {

namespace {

using nlohmann::json;

constexpr const char* kRecordColumns[] = {
    "config_hash", "trial",  "seed",           "n",                 "D",          "protocol",   "phi",
    "eps",         "success", "completion_round", "termination_round", "max_energy", "mean_energy"};

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return fmt_double(*v);
  } else {
    return std::to_string(*v);
  }
}

// Splits RFC 4180 text into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("quote inside unquoted field", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + column + " '" + s + "'", line);
  }
  return value;
}

template <class T>
std::optional<T> parse_optional(const std::string& s, std::size_t line, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_number<T>(s, line, column);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string canonical_config(const ExperimentConfig& cfg) {
  json j;
  j["graph"] = cfg.graph;
  j["graph_seed"] = cfg.graph_seed;
  j["resample_graph"] = cfg.resample_graph;
  j["protocol"] = cfg.protocol;
  j["n_param"] = cfg.n_param ? json(*cfg.n_param) : json(nullptr);
  j["phi"] = optional_json(cfg.phi);
  j["eps"] = optional_json(cfg.eps);
  j["origin"] = cfg.origin;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["max_rounds"] = cfg.max_rounds;
  return j.dump();  // object keys are sorted
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Round default_max_rounds(std::uint64_t n, std::uint32_t diameter, Round phase_length) {
  const Round log_n = ceil_log2(std::max<std::uint64_t>(n, 2));
  return 100 * (static_cast<Round>(diameter) + log_n * log_n) * std::max<Round>(phase_length, 1);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RADIOCAST_WORKERS")) {
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), value);
    if (ec == std::errc{} && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg, const TrialObserver& observer) {
  std::vector<ExperimentRecord> records(cfg.trials);
  if (cfg.trials == 0) return records;

  const std::string hash = config_hash(cfg);
  Rng graph_rng(cfg.graph_seed);
  std::optional<Graph> shared_graph;
  std::uint32_t shared_diameter = 0;
  if (!cfg.resample_graph) {
    shared_graph = make_graph(cfg.graph, graph_rng);
    shared_diameter = diameter(*shared_graph);
  }
  const std::uint64_t graph_n = shared_graph ? shared_graph->size() : 0;
  std::uint64_t n_param = cfg.n_param.value_or(graph_n);
  if (n_param == 0) {
    // Resampled families keep their size; probe once.
    Rng probe(derive_seed(cfg.graph_seed, 0));
    n_param = make_graph(cfg.graph, probe).size();
  }
  const auto protocol = make_protocol(ProtocolSpec{cfg.protocol, n_param, cfg.phi, cfg.eps});

  std::mutex observer_lock;
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= cfg.trials) return;
      try {
        std::optional<Graph> own_graph;
        std::uint32_t d = shared_diameter;
        if (cfg.resample_graph) {
          Rng rng(derive_seed(cfg.graph_seed, i));
          own_graph = make_graph(cfg.graph, rng);
          d = diameter(*own_graph);
        }
        const Graph& g = shared_graph ? *shared_graph : *own_graph;
        TrialOptions options;
        options.max_rounds = cfg.max_rounds > 0 ? cfg.max_rounds
                                                : default_max_rounds(g.size(), d, protocol->phase_length());
        const std::uint64_t seed = derive_seed(cfg.base_seed, i);
        const TrialResult result = run_trial(g, *protocol, cfg.origin, seed, options);

        ExperimentRecord& rec = records[i];
        rec.config_hash = hash;
        rec.trial = i;
        rec.seed = seed;
        rec.n = g.size();
        rec.diameter = d;
        rec.protocol = protocol->name();
        if (cfg.protocol == "ggb") {
          rec.phi = cfg.phi;
          rec.eps = cfg.eps;
        }
        rec.success = result.success;
        rec.completion_round = result.completion_round;
        rec.termination_round = result.termination_round;
        rec.max_energy = result.max_energy();
        rec.mean_energy = result.mean_energy();
        if (observer) {
          std::lock_guard lock(observer_lock);
          observer(i, g, result);
        }
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next.store(cfg.trials);
        return;
      }
    }
  };

  const unsigned workers = std::min<std::uint64_t>(resolve_workers(cfg.workers), cfg.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

Aggregate aggregate(std::span<const ExperimentRecord> records) {
  Aggregate a;
  a.trials = records.size();
  if (records.empty()) return a;
  const auto& first = records.front();
  a.config_hash = first.config_hash;
  a.n = first.n;
  a.diameter = first.diameter;
  a.protocol = first.protocol;
  a.phi = first.phi;
  a.eps = first.eps;
  std::vector<Round> times;
  for (const auto& r : records) {
    a.max_energy = std::max(a.max_energy, r.max_energy);
    a.diameter = std::max(a.diameter, r.diameter);
    if (r.success) {
      ++a.successes;
      times.push_back(*r.completion_round);
    }
  }
  a.success_rate = static_cast<double>(a.successes) / static_cast<double>(a.trials);
  if (!times.empty()) {
    std::sort(times.begin(), times.end());
    const std::size_t m = times.size();
    a.median_time = m % 2 ? static_cast<double>(times[m / 2])
                          : 0.5 * (static_cast<double>(times[m / 2 - 1]) + static_cast<double>(times[m / 2]));
    double sum = 0.0;
    for (Round t : times) sum += static_cast<double>(t);
    a.mean_time = sum / static_cast<double>(m);
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(m)));
    a.p95_time = times[std::max<std::size_t>(rank, 1) - 1];
  }
  return a;
}

std::vector<Aggregate> sweep_phi(const ExperimentConfig& base, std::span<const double> phis,
                                 const TrialObserver& observer) {
  std::vector<Aggregate> rows;
  for (double phi : phis) {
    ExperimentConfig cfg = base;
    cfg.phi = phi;
    const auto records = run_experiment(cfg, observer);
    rows.push_back(aggregate(records));
  }
  return rows;
}

std::string records_to_csv(std::span<const ExperimentRecord> records) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kRecordColumns); ++i) out += (i ? "," : "") + std::string(kRecordColumns[i]);
  out += '\n';
  for (const auto& r : records) {
    out += csv_field(r.config_hash) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.n) + ',' + std::to_string(r.diameter) + ',' + csv_field(r.protocol) + ',' +
           opt_field(r.phi) + ',' + opt_field(r.eps) + ',' + (r.success ? "true" : "false") + ',' +
           opt_field(r.completion_round) + ',' + std::to_string(r.termination_round) + ',' +
           std::to_string(r.max_energy) + ',' + fmt_double(r.mean_energy) + '\n';
  }
  return out;
}

std::vector<ExperimentRecord> records_from_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) throw ParseError("missing header", 1);
  const std::vector<std::string> expected(std::begin(kRecordColumns), std::end(kRecordColumns));
  if (rows.front() != expected) throw ParseError("unexpected header", 1);
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const std::size_t line = i + 1;
    if (f.size() != expected.size()) throw ParseError("expected " + std::to_string(expected.size()) + " fields", line);
    ExperimentRecord r;
    r.config_hash = f[0];
    r.trial = parse_number<std::uint64_t>(f[1], line, "trial");
    r.seed = parse_number<std::uint64_t>(f[2], line, "seed");
    r.n = parse_number<std::uint64_t>(f[3], line, "n");
    r.diameter = parse_number<std::uint32_t>(f[4], line, "D");
    r.protocol = f[5];
    r.phi = parse_optional<double>(f[6], line, "phi");
    r.eps = parse_optional<double>(f[7], line, "eps");
    if (f[8] != "true" && f[8] != "false") throw ParseError("bad success '" + f[8] + "'", line);
    r.success = f[8] == "true";
    r.completion_round = parse_optional<Round>(f[9], line, "completion_round");
    r.termination_round = parse_number<Round>(f[10], line, "termination_round");
    r.max_energy = parse_number<std::uint32_t>(f[11], line, "max_energy");
    r.mean_energy = parse_number<double>(f[12], line, "mean_energy");
    out.push_back(std::move(r));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

void write_csv(std::span<const ExperimentRecord> records, const std::string& path) {
  write_text_file(path, records_to_csv(records));
}

std::vector<ExperimentRecord> read_csv(const std::string& path) {
  try {
    return records_from_csv(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

std::string aggregates_to_csv(std::span<const Aggregate> rows) {
  std::string out =
      "config_hash,n,D,protocol,phi,eps,trials,successes,success_rate,median_time,mean_time,p95_time,max_energy\n";
  for (const auto& a : rows) {
    out += csv_field(a.config_hash) + ',' + std::to_string(a.n) + ',' + std::to_string(a.diameter) + ',' +
           csv_field(a.protocol) + ',' + opt_field(a.phi) + ',' + opt_field(a.eps) + ',' + std::to_string(a.trials) +
           ',' + std::to_string(a.successes) + ',' + fmt_double(a.success_rate) + ',' + opt_field(a.median_time) +
           ',' + opt_field(a.mean_time) + ',' + opt_field(a.p95_time) + ',' + std::to_string(a.max_energy) + '\n';
  }
  return out;
}

std::string aggregates_to_json(std::span<const Aggregate> rows) {
  json arr = json::array();
  for (const auto& a : rows) {
    json j;
    j["config_hash"] = a.config_hash;
    j["n"] = a.n;
    j["D"] = a.diameter;
    j["protocol"] = a.protocol;
    j["phi"] = optional_json(a.phi);
    j["eps"] = optional_json(a.eps);
    j["trials"] = a.trials;
    j["success_rate"] = a.success_rate;
    j["median_time"] = optional_json(a.median_time);
    j["p95_time"] = a.p95_time ? json(*a.p95_time) : json(nullptr);
    j["max_energy"] = a.max_energy;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void write_json(std::span<const Aggregate> rows, const std::string& path) {
  write_text_file(path, aggregates_to_json(rows));
}

}  // namespace radiocast
