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

#include "knnscan/neighborhoods.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <limits>
#include <span>
#include <string>

#include "knnscan/error.hpp"
#include "knnscan/parallel.hpp"

namespace knnscan {
namespace {

// Keeps the `need` smallest ids of `layer` in `out`, in their order within
// `layer`. `scratch` is clobbered.
void smallest_ids(std::span<const VertexId> layer, std::size_t need,
                  std::vector<VertexId>& scratch, std::vector<VertexId>& out) {
  out.clear();
  if (need >= layer.size()) {
    out.assign(layer.begin(), layer.end());
    return;
  }
  if (need == 0) return;
  // Radix select on the top 8 bits, then select within the one bucket that
  // holds the need-th smallest id.
  VertexId max_id = 0;
  for (VertexId v : layer) max_id = std::max(max_id, v);
  const int width = std::bit_width(max_id);
  const int shift = width > 8 ? width - 8 : 0;
  std::array<std::uint32_t, 256> counts{};
  for (VertexId v : layer) ++counts[v >> shift];
  std::size_t below = 0;
  std::size_t bucket = 0;
  while (below + counts[bucket] < need) below += counts[bucket++];
  scratch.clear();
  for (VertexId v : layer)
    if ((v >> shift) == bucket) scratch.push_back(v);
  const std::size_t rank = need - below - 1;
  std::nth_element(scratch.begin(), scratch.begin() + rank, scratch.end());
  const VertexId threshold = scratch[rank];
  for (VertexId v : layer)
    if (v <= threshold) out.push_back(v);
}

}  // namespace

std::vector<VertexId> LayeredNeighborhood::ball(std::size_t i) const {
  std::vector<VertexId> out;
  for (std::size_t j = 0; j <= i && j < layers.size(); ++j)
    out.insert(out.end(), layers[j].begin(), layers[j].end());
  return out;
}

LayeredNeighborhood bfs_layers(const AttributedGraph& g, VertexId v,
                               std::size_t stop_at_size) {
  if (stop_at_size == 0) throw ValidationError("neighborhood size must be >= 1");
  if (v >= g.num_vertices()) throw ValidationError("root out of range");
  LayeredNeighborhood out;
  out.root = v;
  std::vector<char> seen(g.num_vertices(), 0);
  seen[v] = 1;
  out.layers.push_back({v});
  out.cumulative_sizes.push_back(1);
  while (out.cumulative_sizes.back() < stop_at_size) {
    std::vector<VertexId> next;
    for (VertexId u : out.layers.back())
      for (VertexId w : g.neighbors(u))
        if (!seen[w]) {
          seen[w] = 1;
          next.push_back(w);
        }
    if (next.empty()) {
      out.exhausted = true;
      break;
    }
    out.cumulative_sizes.push_back(out.cumulative_sizes.back() + next.size());
    out.layers.push_back(std::move(next));
  }
  return out;
}

std::vector<VertexId> ExactNeighborhood::sorted_members() const {
  std::vector<VertexId> out = members;
  std::sort(out.begin(), out.end());
  return out;
}

ExactNeighborhood exact_neighborhood(const LayeredNeighborhood& layers,
                                     std::size_t m) {
  if (m == 0) throw ValidationError("neighborhood size must be >= 1");
  if (layers.size() < m)
    throw FamilyError("component of vertex " + std::to_string(layers.root) +
                      " has " + std::to_string(layers.size()) +
                      " vertices, fewer than " + std::to_string(m));
  // Smallest r with |ball r| >= m.
  std::size_t r = 0;
  while (layers.cumulative_sizes[r] < m) ++r;
  ExactNeighborhood out;
  out.root = layers.root;
  out.inner_radius = r;
  if (r > 0) out.members = layers.ball(r - 1);
  std::vector<VertexId> scratch;
  smallest_ids(layers.layers[r], m - out.members.size(), scratch,
               out.truncated_last_layer);
  out.members.insert(out.members.end(), out.truncated_last_layer.begin(),
                     out.truncated_last_layer.end());
  return out;
}

NeighborhoodScanner::NeighborhoodScanner(const AttributedGraph& g)
    : g_(&g), stamp_(g.num_vertices(), 0) {}

bool NeighborhoodScanner::build(VertexId root, std::size_t k) {
  if (epoch_ == std::numeric_limits<std::uint32_t>::max()) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 0;
  }
  const std::uint32_t epoch = ++epoch_;
  order_.clear();
  members_.clear();
  order_.push_back(root);
  stamp_[root] = epoch;

  // order_[layer_begin, layer_end) is the current outermost layer.
  std::size_t layer_begin = 0;
  std::size_t layer_end = 1;
  std::size_t radius = 0;
  while (layer_end < k) {
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (VertexId w : g_->neighbors(order_[i])) {
        if (stamp_[w] != epoch) {
          stamp_[w] = epoch;
          order_.push_back(w);
        }
      }
    }
    if (order_.size() == layer_end) return false;
    layer_begin = layer_end;
    layer_end = order_.size();
    ++radius;
  }
  radius_ = radius;
  inner_size_ = layer_begin;
  members_.assign(order_.begin(), order_.begin() + layer_begin);
  smallest_ids(std::span<const VertexId>(order_).subspan(layer_begin, layer_end - layer_begin),
               k - layer_begin, scratch_, tail_);
  members_.insert(members_.end(), tail_.begin(), tail_.end());
  return true;
}

ExactNeighborhood NeighborhoodScanner::snapshot(VertexId root) const {
  ExactNeighborhood out;
  out.root = root;
  out.members = members_;
  out.inner_radius = radius_;
  out.truncated_last_layer = tail_;
  return out;
}

NeighborhoodFamily build_family(const AttributedGraph& g, std::size_t k,
                                unsigned workers) {
  const std::size_t n = g.num_vertices();
  if (k == 0) throw ValidationError("neighborhood size k must be >= 1");
  if (k > n)
    throw ValidationError("neighborhood size k=" + std::to_string(k) +
                          " exceeds vertex count n=" + std::to_string(n));
  NeighborhoodFamily family;
  family.k = k;
  family.by_root.resize(n);
  std::vector<std::optional<NeighborhoodScanner>> scratch(std::max(1u, workers));
  parallel_chunks(n, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    if (!scratch[w]) scratch[w].emplace(g);
    auto& scanner = *scratch[w];
    for (std::size_t v = begin; v < end; ++v) {
      const auto root = static_cast<VertexId>(v);
      if (scanner.build(root, k)) family.by_root[v] = scanner.snapshot(root);
    }
  });
  for (std::size_t v = 0; v < n; ++v)
    if (!family.by_root[v]) family.skipped.push_back(static_cast<VertexId>(v));
  if (family.skipped.size() == n)
    throw FamilyError("no admissible neighborhood: every component has fewer than k=" +
                      std::to_string(k) + " vertices");
  return family;
}

void write_family_csv(const AttributedGraph& g, const NeighborhoodFamily& family,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "root,member\n";
  for (const auto& nb : family.by_root) {
    if (!nb) continue;
    for (VertexId m : nb->members) out << g.label(nb->root) << ',' << g.label(m) << '\n';
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace knnscan
