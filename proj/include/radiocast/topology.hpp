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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radiocast/rng.hpp"

namespace radiocast {

/// Dense 0-based station index. Node 0 is the originator unless a caller says
/// otherwise.
using NodeId = std::uint32_t;

using Edge = std::pair<NodeId, NodeId>;

/// Undirected, connected, simple graph with sorted adjacency lists.
///
/// Instances are only produced through `from_edges` (and the generators that
/// call it), so every live Graph is symmetric, loop-free, duplicate-free and
/// connected.
class Graph {
 public:
  /// Builds and validates. Edge endpoints may be given in either order.
  /// Throws ValidationError on out-of-range endpoints, self-loops, duplicate
  /// edges or a disconnected result.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

  bool has_edge(NodeId u, NodeId v) const;

  /// Edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Graph() = default;

  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Path 0-1-...-(n-1).
Graph make_path(std::size_t n);

/// Complete graph on n nodes.
Graph make_complete(std::size_t n);

/// Erdos-Renyi G(n, p) conditioned on connectivity by rejection. Gives up with
/// GenerationFailure after `max_attempts` disconnected samples.
Graph make_random_connected(std::size_t n, double p, Rng& rng, std::size_t max_attempts = 1000);

/// Uniform fixed-point-free permutation of {0, ..., m-1}, by rejection.
std::vector<std::uint32_t> sample_derangement(std::size_t m, Rng& rng);

/// Node numbering of the star-permutation family G_pi on n = 2h + 1 nodes.
struct StarPermutationLayout {
  std::size_t half;  // h = |S| = |X|
  static constexpr NodeId hub = 0;
  NodeId s(std::size_t i) const { return static_cast<NodeId>(1 + i); }         // i in [0, h)
  NodeId x(std::size_t i) const { return static_cast<NodeId>(1 + half + i); }  // i in [0, h)
  bool is_x(NodeId v) const { return v > half; }
};

/// G_pi: hub 0 adjacent to every s_i; each x_i adjacent to s_i and
/// s_{pi(i)} for a sampled derangement pi. Requires n odd and (n-1)/2 >= 2.
Graph make_star_permutation(std::size_t n, Rng& rng);

/// Same family with an explicit derangement (0-based, size (n-1)/2).
Graph make_star_permutation(std::span<const std::uint32_t> derangement);

/// Chain of parallel relay pairs: c_0 - {x_1, y_1} - c_1 - ... - c_s.
/// Node c_i has index 3i, x_i is 3i-2 and y_i is 3i-1, so n = 3s + 1,
/// D = 2s and the originator c_0 is node 0. x_i and y_i are not adjacent.
Graph make_pair_chain(std::size_t segments);

/// Hop distances from src. Throws ValidationError if some node is unreachable.
std::vector<std::uint32_t> bfs_from(const Graph& g, NodeId src);

/// Exact diameter by BFS from every node.
std::uint32_t diameter(const Graph& g);

/// Edge-list text: first line "n m", then m lines "u v"; '#' starts a comment.
/// Throws ParseError (with line number) or ValidationError.
Graph read_edge_list(std::string_view text);
Graph read_edge_list_file(const std::string& path);

/// Normalized form: header, then edges with u < v in ascending order.
std::string write_edge_list(const Graph& g);

/// Parses a family spec such as "path:16", "complete:4", "gnp:1024:0.01",
/// "star-perm:63", "pair-chain:8" or "file:graph.el". `rng` feeds the
/// randomized families.
Graph make_graph(std::string_view spec, Rng& rng);

}  // namespace radiocast
