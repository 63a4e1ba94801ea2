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

#include "radiocast/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "radiocast/errors.hpp"

namespace radiocast {

namespace {

bool is_connected(const std::vector<std::vector<NodeId>>& adj) {
  if (adj.empty()) return true;
  std::vector<char> seen(adj.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == adj.size();
}

std::size_t parse_count(std::string_view token, std::string_view what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw InvalidParameter("bad " + std::string(what) + " '" + std::string(token) + "'");
  }
  return value;
}

double parse_probability(std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw InvalidParameter("bad probability '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw ValidationError("graph must have at least one node");
  Graph g;
  g.adjacency_.resize(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw ValidationError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") out of range for n=" + std::to_string(n));
    }
    if (u == v) throw ValidationError("self-loop at node " + std::to_string(u));
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto& list = g.adjacency_[v];
    std::sort(list.begin(), list.end());
    if (auto dup = std::adjacent_find(list.begin(), list.end()); dup != list.end()) {
      throw ValidationError("duplicate edge (" + std::to_string(v) + "," + std::to_string(*dup) + ")");
    }
  }
  g.edge_count_ = edges.size();
  if (!is_connected(g.adjacency_)) throw ValidationError("graph is disconnected");
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& list = adjacency_.at(u);
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < adjacency_.size(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph make_path(std::size_t n) {
  if (n == 0) throw InvalidParameter("path needs n >= 1");
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.emplace_back(v - 1, v);
  return Graph::from_edges(n, edges);
}

Graph make_complete(std::size_t n) {
  if (n == 0) throw InvalidParameter("complete graph needs n >= 1");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

Graph make_random_connected(std::size_t n, double p, Rng& rng, std::size_t max_attempts) {
  if (n == 0) throw InvalidParameter("gnp needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("gnp needs 0 <= p <= 1");
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    edges.clear();
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (uniform_unit(rng) < p) edges.emplace_back(u, v);
      }
    }
    try {
      return Graph::from_edges(n, edges);
    } catch (const ValidationError&) {
      // disconnected sample; draw again
    }
  }
  throw GenerationFailure("G(" + std::to_string(n) + ", " + std::to_string(p) +
                          ") stayed disconnected after " + std::to_string(max_attempts) +
                          " attempts; p is too small for n");
}

std::vector<std::uint32_t> sample_derangement(std::size_t m, Rng& rng) {
  if (m < 2) throw InvalidParameter("no derangement of size " + std::to_string(m));
  std::vector<std::uint32_t> perm(m);
  for (;;) {
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = m - 1; i > 0; --i) {
      std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
    }
    bool fixed_point = false;
    for (std::size_t i = 0; i < m && !fixed_point; ++i) fixed_point = perm[i] == i;
    if (!fixed_point) return perm;
  }
}

Graph make_star_permutation(std::span<const std::uint32_t> derangement) {
  const std::size_t h = derangement.size();
  if (h < 2) throw InvalidParameter("star-permutation needs (n-1)/2 >= 2");
  const StarPermutationLayout layout{h};
  std::vector<Edge> edges;
  edges.reserve(3 * h);
  for (std::size_t i = 0; i < h; ++i) {
    const std::uint32_t target = derangement[i];
    if (target >= h || target == i) throw InvalidParameter("not a derangement");
    edges.emplace_back(StarPermutationLayout::hub, layout.s(i));
    edges.emplace_back(layout.s(i), layout.x(i));
    edges.emplace_back(layout.x(i), layout.s(target));
  }
  // pi must be a bijection as well as fixed-point-free.
  std::vector<char> hit(h, 0);
  for (auto t : derangement) {
    if (hit[t]) throw InvalidParameter("not a permutation");
    hit[t] = 1;
  }
  return Graph::from_edges(2 * h + 1, edges);
}

Graph make_star_permutation(std::size_t n, Rng& rng) {
  if (n % 2 == 0) throw InvalidParameter("star-permutation needs odd n, got " + std::to_string(n));
  if (n < 5) throw InvalidParameter("star-permutation needs n >= 5");
  const auto pi = sample_derangement((n - 1) / 2, rng);
  return make_star_permutation(pi);
}

Graph make_pair_chain(std::size_t segments) {
  if (segments == 0) throw InvalidParameter("pair-chain needs at least one segment");
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= segments; ++i) {
    const auto prev = static_cast<NodeId>(3 * (i - 1));
    const auto x = static_cast<NodeId>(3 * i - 2);
    const auto y = static_cast<NodeId>(3 * i - 1);
    const auto next = static_cast<NodeId>(3 * i);
    edges.insert(edges.end(), {{prev, x}, {prev, y}, {x, next}, {y, next}});
  }
  return Graph::from_edges(3 * segments + 1, edges);
}

std::vector<std::uint32_t> bfs_from(const Graph& g, NodeId src) {
  constexpr auto unseen = static_cast<std::uint32_t>(-1);
  if (src >= g.size()) throw InvalidParameter("bfs source out of range");
  std::vector<std::uint32_t> dist(g.size(), unseen);
  std::deque<NodeId> queue{src};
  dist[src] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : g.neighbors(v)) {
      if (dist[w] == unseen) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  if (std::find(dist.begin(), dist.end(), unseen) != dist.end()) {
    throw ValidationError("graph is disconnected");
  }
  return dist;
}

std::uint32_t diameter(const Graph& g) {
  std::uint32_t best = 0;
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto dist = bfs_from(g, v);
    best = std::max(best, *std::max_element(dist.begin(), dist.end()));
  }
  return best;
}

Graph read_edge_list(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 2) throw ParseError("expected two integers", line_no);

    std::size_t a = 0;
    std::size_t b = 0;
    try {
      a = parse_count(tokens[0], "integer");
      b = parse_count(tokens[1], "integer");
    } catch (const InvalidParameter& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!have_header) {
      n = a;
      m = b;
      have_header = true;
      if (n == 0) throw ParseError("node count must be positive", line_no);
      continue;
    }
    if (a >= n || b >= n) throw ParseError("node id out of range", line_no);
    if (a == b) throw ParseError("self-loop", line_no);
    edges.emplace_back(static_cast<NodeId>(std::min(a, b)), static_cast<NodeId>(std::max(a, b)));
    edge_lines.push_back(line_no);
  }
  if (!have_header) throw ParseError("missing header line", 0);
  if (edges.size() != m) {
    throw ParseError("header declares " + std::to_string(m) + " edges, found " +
                         std::to_string(edges.size()),
                     0);
  }
  // Report duplicates with the line of the second occurrence.
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return edges[l] < edges[r]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (edges[order[i]] == edges[order[i - 1]]) throw ParseError("duplicate edge", edge_lines[order[i]]);
  }
  return Graph::from_edges(n, edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return read_edge_list(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string write_edge_list(const Graph& g) {
  std::string out = std::to_string(g.size()) + " " + std::to_string(g.edge_count()) + "\n";
  for (auto [u, v] : g.edges()) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

Graph make_graph(std::string_view spec, Rng& rng) {
  const auto parts = split(spec, ':');
  const std::string_view family = parts[0];
  auto expect = [&](std::size_t count) {
    if (parts.size() != count) {
      throw InvalidParameter("graph spec '" + std::string(spec) + "' needs " +
                             std::to_string(count - 1) + " parameter(s)");
    }
  };
  if (family == "file") {
    if (parts.size() < 2) throw InvalidParameter("file spec needs a path");
    return read_edge_list_file(std::string(spec.substr(5)));
  }
  if (family == "path") {
    expect(2);
    return make_path(parse_count(parts[1], "node count"));
  }
  if (family == "complete") {
    expect(2);
    return make_complete(parse_count(parts[1], "node count"));
  }
  if (family == "gnp") {
    expect(3);
    return make_random_connected(parse_count(parts[1], "node count"), parse_probability(parts[2]), rng);
  }
  if (family == "star-perm") {
    expect(2);
    return make_star_permutation(parse_count(parts[1], "node count"), rng);
  }
  if (family == "pair-chain") {
    expect(2);
    return make_pair_chain(parse_count(parts[1], "segment count"));
  }
  throw InvalidParameter("unknown graph family '" + std::string(family) + "'");
}

}  // namespace radiocast
