// Copyright 2026 The knnscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Breadth-first neighborhood hierarchy around a root vertex.
//
// Layer i holds the vertices at hop distance exactly i; the ball of radius r
// is the union of layers 0..r. The full m-neighborhood of a root is the
// smallest ball holding at least m vertices, and an exact m-neighborhood is
// an m-subset of that ball containing the next-smaller ball. The subset is
// fixed here by keeping the smallest vertex ids of the outermost layer, so
// the whole family is a pure function of (graph, m).
//
// Canonical member order, shared by every routine that sums over a
// neighborhood: the inner ball layer by layer in BFS discovery order
// (neighbor lists are sorted, so discovery order is deterministic), then
// the kept part of the outer layer, also in discovery order.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "knnscan/graph.hpp"

namespace knnscan {

struct LayeredNeighborhood {
  VertexId root = 0;
  // layers[i] in discovery order; layers[0] == {root}.
  std::vector<std::vector<VertexId>> layers;
  // cumulative_sizes[i] == |ball of radius i|.
  std::vector<std::size_t> cumulative_sizes;
  // True when the component ran out before reaching the requested size.
  bool exhausted = false;

  std::size_t radius() const { return layers.size() - 1; }
  std::size_t size() const { return cumulative_sizes.back(); }
  // Union of layers 0..i in canonical order.
  std::vector<VertexId> ball(std::size_t i) const;
};

// Expands BFS layers from `v` until the ball holds at least `stop_at_size`
// vertices or the component is exhausted. Throws ValidationError if
// stop_at_size == 0.
LayeredNeighborhood bfs_layers(const AttributedGraph& g, VertexId v,
                               std::size_t stop_at_size);

struct ExactNeighborhood {
  VertexId root = 0;
  // Exactly m vertices, canonical order.
  std::vector<VertexId> members;
  // Radius r of the full m-neighborhood the members were drawn from.
  std::size_t inner_radius = 0;
  // The part of layer r that was kept, in discovery order.
  std::vector<VertexId> truncated_last_layer;

  std::size_t size() const { return members.size(); }
  std::vector<VertexId> sorted_members() const;
};

// Throws FamilyError when the reachable component holds fewer than m
// vertices.
ExactNeighborhood exact_neighborhood(const LayeredNeighborhood& layers,
                                     std::size_t m);

// Reusable per-thread BFS scratch for the hot path. Produces the same
// members, in the same order, as exact_neighborhood(bfs_layers(...)).
class NeighborhoodScanner {
 public:
  explicit NeighborhoodScanner(const AttributedGraph& g);

  // Returns false (and leaves members() empty) when the component of
  // `root` has fewer than k vertices.
  bool build(VertexId root, std::size_t k);

  std::span<const VertexId> members() const { return members_; }
  // Vertices touched by the last build: |ball r| on success, the
  // component size otherwise.
  std::size_t visited() const { return order_.size(); }
  std::size_t inner_radius() const { return radius_; }
  // Size of the ball of radius r-1.
  std::size_t inner_size() const { return inner_size_; }

  ExactNeighborhood snapshot(VertexId root) const;

 private:
  const AttributedGraph* g_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<VertexId> order_;
  std::vector<VertexId> members_;
  std::vector<VertexId> tail_;
  std::vector<VertexId> scratch_;
  std::size_t radius_ = 0;
  std::size_t inner_size_ = 0;
};

// One exact k-neighborhood per vertex whose component holds >= k vertices.
struct NeighborhoodFamily {
  std::size_t k = 0;
  // Indexed by root; nullopt for skipped roots.
  std::vector<std::optional<ExactNeighborhood>> by_root;
  // Ascending.
  std::vector<VertexId> skipped;

  std::size_t admissible_count() const { return by_root.size() - skipped.size(); }
};

// Throws ValidationError for k == 0 or k > n, FamilyError when every vertex
// is skipped. Output does not depend on `workers`.
NeighborhoodFamily build_family(const AttributedGraph& g, std::size_t k,
                                unsigned workers = 1);

// CSV `root,member` with external labels, one row per membership.
void write_family_csv(const AttributedGraph& g, const NeighborhoodFamily& family,
                      const std::filesystem::path& path);

}  // namespace knnscan
