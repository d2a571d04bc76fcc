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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace knnscan {

// Dense vertex index in [0, n).
using VertexId = std::uint32_t;

struct IngestReport {
  std::size_t edges_read = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t loops_dropped = 0;
};

struct EdgeListOptions {
  // When set, an edge that repeats an earlier one (in either direction) is
  // an error instead of being merged.
  bool reject_duplicates = false;
};

// Immutable undirected graph in CSR form with optional per-vertex observed
// activity. Copies share topology and observations, so a copy is cheap and
// concurrent reads from many threads are safe.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  // Builds from dense-id edges. Loops and duplicate (including reciprocal)
  // edges are dropped and counted. `labels` may be empty, in which case the
  // decimal id is used as the external label.
  static AttributedGraph from_edges(
      std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges,
      std::vector<std::string> labels = {},
      const EdgeListOptions& options = {});

  std::size_t num_vertices() const { return topo_ ? topo_->offsets.size() - 1 : 0; }
  std::size_t num_edges() const { return topo_ ? topo_->neighbors.size() / 2 : 0; }

  // Strictly ascending neighbor list.
  std::span<const VertexId> neighbors(VertexId v) const {
    const auto& t = *topo_;
    return {t.neighbors.data() + t.offsets[v],
            t.neighbors.data() + t.offsets[v + 1]};
  }
  std::size_t degree(VertexId v) const {
    return topo_->offsets[v + 1] - topo_->offsets[v];
  }
  bool has_edge(VertexId u, VertexId v) const;

  const std::string& label(VertexId v) const { return topo_->labels[v]; }
  // Dense id for an external label; throws ValidationError if unknown.
  VertexId id_of(const std::string& label) const;
  bool has_label(const std::string& label) const {
    return topo_->index.contains(label);
  }

  const IngestReport& ingest_report() const { return topo_->report; }

  bool has_observations() const { return observed_ != nullptr; }
  // Throws ValidationError when observations have not been attached.
  std::span<const double> observed() const;

  // Returns a copy with observations attached. Throws ValidationError on a
  // length mismatch or a non-finite entry (the message cites the index).
  AttributedGraph with_observations(std::vector<double> x) const;

  // Canonical edge list: pairs (u, v) with u < v, ascending.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

 private:
  struct Topology {
    std::vector<std::size_t> offsets;
    std::vector<VertexId> neighbors;
    std::vector<std::string> labels;
    std::unordered_map<std::string, VertexId> index;
    IngestReport report;
  };

  std::shared_ptr<const Topology> topo_;
  std::shared_ptr<const std::vector<double>> observed_;
};

inline AttributedGraph set_observations(const AttributedGraph& g,
                                        std::vector<double> x) {
  return g.with_observations(std::move(x));
}

// Hidden truth of the observation model: inactive vertices sit exactly at
// the baseline `a`, active ones at or above the threshold `b` > `a`.
struct GroundTruth {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> activity;
  std::vector<char> active;

  std::size_t size() const { return activity.size(); }
  std::size_t active_count() const;
  // Throws ValidationError naming the first offending vertex.
  void validate() const;
};

// Builds a truth vector: active vertices get `active_level`, the rest `a`.
GroundTruth make_truth(double a, double b, double active_level,
                       std::vector<char> active);

// Edge list, one `u v` pair per line (whitespace or comma separated, `#`
// comments). Dense ids follow label order, numeric when every label is an
// unsigned integer, so a graph written by write_edge_list reads back with
// the same ids. Vertices appear only through their edges.
AttributedGraph load_edge_list(const std::filesystem::path& path,
                               const EdgeListOptions& options = {});
AttributedGraph parse_edge_list(const std::string& text,
                                const EdgeListOptions& options = {});
void write_edge_list(const AttributedGraph& g,
                     const std::filesystem::path& path);

struct GmlGraph {
  AttributedGraph graph;
  // Integer `value` attribute per vertex (dense order); 0 when absent.
  std::vector<int> value;
};

// Reads the GML subset `graph [ node [ id N value V ... ] edge [ source S
// target T ] ]`. Scalar attributes other than id/value/source/target are
// ignored; nested lists other than graph/node/edge are rejected. Directed
// edges are symmetrized.
GmlGraph load_gml(const std::filesystem::path& path);
GmlGraph parse_gml(const std::string& text);

// Reads a `vertex,value` CSV and returns values in dense-id order. Every
// vertex must appear exactly once.
std::vector<double> load_attributes(const AttributedGraph& g,
                                    const std::filesystem::path& path);
void write_attributes(const AttributedGraph& g, std::span<const double> values,
                      const std::filesystem::path& path);

}  // namespace knnscan
