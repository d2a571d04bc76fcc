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

// k-NN graph scan estimators.
//
// The scan runs in two phases. Phase 1 computes, independently for every
// root, the average observation over its exact k-neighborhood. Phase 2
// reduces those averages to the extremum (min for the sublevel scan that
// estimates the inactive baseline, max for the superlevel scan that
// estimates the active level). Phase 1 is data-parallel; phase 2 is an
// associative, commutative reduction with an id tie-break, so any worker
// count or reduction tree yields the same answer.
//
// Neighborhood sums accumulate in long double over the canonical member
// order (see neighborhoods.hpp), so every code path that averages the same
// neighborhood produces the same bits.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "knnscan/graph.hpp"
#include "knnscan/neighborhoods.hpp"
#include "knnscan/parallel.hpp"

namespace knnscan {

enum class ScanMode { kSublevel, kSuperlevel };

std::string_view to_string(ScanMode mode);
// Accepts "sub"/"sublevel" and "super"/"superlevel".
ScanMode parse_scan_mode(std::string_view s);

// Sum of observations over `members`; throws ValidationError when the graph
// has no observations.
double neighborhood_sum(const AttributedGraph& g, const ExactNeighborhood& K);
double neighborhood_sum(std::span<const double> x,
                        std::span<const VertexId> members);
// Sum / |members|, divided before rounding to double.
double neighborhood_average(std::span<const double> x,
                            std::span<const VertexId> members);

struct Phase1Result {
  std::size_t k = 0;
  // NaN for skipped roots.
  std::vector<double> averages;
  // Vertices touched by each root's BFS: |ball r(v)| for admissible roots
  // (the full k-neighborhood), the component size for skipped ones.
  std::vector<std::uint32_t> visited;
  // Total observation accumulations; exactly k per admissible root.
  std::uint64_t accumulations = 0;
  std::size_t skipped_count = 0;
};

// Streams one neighborhood per root without materializing the family.
Phase1Result scan_phase1(const AttributedGraph& g, std::size_t k,
                         unsigned workers = 1);
Phase1Result scan_phase1(const AttributedGraph& g,
                         const NeighborhoodFamily& family, unsigned workers = 1);

// Reduction element for phase 2. An empty candidate (NaN value) is the
// identity of `combine`.
struct Candidate {
  double value;
  VertexId root;

  static Candidate empty();
  bool is_empty() const;
};

// Associative and commutative: prefers the smaller (sublevel) or larger
// (superlevel) value, then the smaller root id.
Candidate combine(const Candidate& lhs, const Candidate& rhs, ScanMode mode);

struct Extremum {
  VertexId root = 0;
  double value = 0.0;
  // Every root attaining `value`, ascending; includes `root`.
  std::vector<VertexId> ties;
};

// Non-finite entries are skipped roots. Throws FamilyError when every entry
// is skipped.
Extremum scan_phase2(std::span<const double> averages, ScanMode mode);

struct ScanOptions {
  unsigned workers = 1;
};

struct ScanResult {
  std::size_t k = 0;
  ScanMode mode = ScanMode::kSublevel;
  ExactNeighborhood selected;
  double estimate = 0.0;
  std::vector<double> per_vertex_avg;
  std::vector<VertexId> ties;
  std::size_t skipped_count = 0;
  std::uint64_t accumulations = 0;
  std::uint32_t max_visited = 0;
};

// Throws ValidationError for k == 0 or k > n, FamilyError when no vertex has
// a component of at least k vertices.
ScanResult scan(const AttributedGraph& g, std::size_t k, ScanMode mode,
                const ScanOptions& options = {});
ScanResult scan(const AttributedGraph& g, const NeighborhoodFamily& family,
                ScanMode mode, const ScanOptions& options = {});

inline ScanResult scan_sublevel(const AttributedGraph& g, std::size_t k,
                                const ScanOptions& options = {}) {
  return scan(g, k, ScanMode::kSublevel, options);
}
inline ScanResult scan_sublevel(const AttributedGraph& g,
                                const NeighborhoodFamily& family,
                                const ScanOptions& options = {}) {
  return scan(g, family, ScanMode::kSublevel, options);
}
inline ScanResult scan_superlevel(const AttributedGraph& g, std::size_t k,
                                  const ScanOptions& options = {}) {
  return scan(g, k, ScanMode::kSuperlevel, options);
}
inline ScanResult scan_superlevel(const AttributedGraph& g,
                                  const NeighborhoodFamily& family,
                                  const ScanOptions& options = {}) {
  return scan(g, family, ScanMode::kSuperlevel, options);
}

// Right-continuous empirical distribution function over a stored sample.
class Ecdf {
 public:
  Ecdf() = default;
  explicit Ecdf(std::vector<double> sample);

  double operator()(double t) const;
  std::span<const double> points() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  // sup_t |F_hat(t) - cdf(t)| for a continuous reference cdf.
  double sup_distance(const std::function<double(double)>& cdf) const;

 private:
  std::vector<double> sorted_;
};

struct CrawlerEstimate {
  // Unbiased sample variance of the selected neighborhood around the
  // scan estimate.
  double sigma2_hat = 0.0;
  Ecdf ecdf;
};

// Requires a sublevel result with at least two members.
CrawlerEstimate crawler_estimates(const AttributedGraph& g, const ScanResult& scan);

}  // namespace knnscan
