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

#include "knnscan/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "knnscan/error.hpp"

namespace knnscan {
namespace {

constexpr double kSkipped = std::numeric_limits<double>::quiet_NaN();

long double accumulate(std::span<const double> x,
                       std::span<const VertexId> members) {
  long double acc = 0.0L;
  for (VertexId v : members) acc += x[v];
  return acc;
}

void check_k(const AttributedGraph& g, std::size_t k) {
  if (k == 0) throw ValidationError("neighborhood size k must be >= 1");
  if (k > g.num_vertices())
    throw ValidationError("neighborhood size k=" + std::to_string(k) +
                          " exceeds vertex count n=" +
                          std::to_string(g.num_vertices()));
}

ScanResult finish(const AttributedGraph& g, Phase1Result phase1, ScanMode mode,
                  const std::function<ExactNeighborhood(VertexId)>& members_of) {
  const Extremum best = scan_phase2(phase1.averages, mode);
  ScanResult out;
  out.k = phase1.k;
  out.mode = mode;
  out.selected = members_of(best.root);
  // Recomputed from the selected members; same order and precision as
  // phase 1, so this equals best.value bit for bit.
  out.estimate = neighborhood_average(g.observed(), out.selected.members);
  out.ties = best.ties;
  out.skipped_count = phase1.skipped_count;
  out.accumulations = phase1.accumulations;
  out.max_visited = phase1.visited.empty()
                        ? 0
                        : *std::max_element(phase1.visited.begin(),
                                            phase1.visited.end());
  out.per_vertex_avg = std::move(phase1.averages);
  return out;
}

}  // namespace

std::string_view to_string(ScanMode mode) {
  return mode == ScanMode::kSublevel ? "sublevel" : "superlevel";
}

ScanMode parse_scan_mode(std::string_view s) {
  if (s == "sub" || s == "sublevel") return ScanMode::kSublevel;
  if (s == "super" || s == "superlevel") return ScanMode::kSuperlevel;
  throw ValidationError("unknown scan mode '" + std::string(s) + "'");
}

double neighborhood_sum(std::span<const double> x,
                        std::span<const VertexId> members) {
  return static_cast<double>(accumulate(x, members));
}

double neighborhood_sum(const AttributedGraph& g, const ExactNeighborhood& K) {
  return neighborhood_sum(g.observed(), K.members);
}

double neighborhood_average(std::span<const double> x,
                            std::span<const VertexId> members) {
  if (members.empty()) throw ValidationError("empty neighborhood");
  return static_cast<double>(accumulate(x, members) /
                             static_cast<long double>(members.size()));
}

Phase1Result scan_phase1(const AttributedGraph& g, std::size_t k,
                         unsigned workers) {
  check_k(g, k);
  const auto x = g.observed();
  const std::size_t n = g.num_vertices();
  Phase1Result out;
  out.k = k;
  out.averages.assign(n, kSkipped);
  out.visited.assign(n, 0);
  std::vector<std::optional<NeighborhoodScanner>> scratch(std::max(1u, workers));
  parallel_chunks(n, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    if (!scratch[w]) scratch[w].emplace(g);
    auto& scanner = *scratch[w];
    for (std::size_t v = begin; v < end; ++v) {
      if (scanner.build(static_cast<VertexId>(v), k))
        out.averages[v] = neighborhood_average(x, scanner.members());
      out.visited[v] = static_cast<std::uint32_t>(scanner.visited());
    }
  });
  for (double a : out.averages) {
    if (std::isnan(a))
      ++out.skipped_count;
    else
      out.accumulations += k;
  }
  return out;
}

Phase1Result scan_phase1(const AttributedGraph& g,
                         const NeighborhoodFamily& family, unsigned workers) {
  const auto x = g.observed();
  const std::size_t n = family.by_root.size();
  if (n != g.num_vertices())
    throw ValidationError("neighborhood family was built for a different graph");
  Phase1Result out;
  out.k = family.k;
  out.averages.assign(n, kSkipped);
  out.visited.assign(n, 0);
  parallel_chunks(n, workers, [&](unsigned, std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      const auto& nb = family.by_root[v];
      if (!nb) continue;
      out.averages[v] = neighborhood_average(x, nb->members);
      out.visited[v] = static_cast<std::uint32_t>(nb->size());
    }
  });
  out.skipped_count = family.skipped.size();
  out.accumulations = std::uint64_t{family.k} * family.admissible_count();
  return out;
}

Candidate Candidate::empty() {
  return {std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<VertexId>::max()};
}

bool Candidate::is_empty() const { return std::isnan(value); }

Candidate combine(const Candidate& lhs, const Candidate& rhs, ScanMode mode) {
  if (lhs.is_empty()) return rhs;
  if (rhs.is_empty()) return lhs;
  if (lhs.value != rhs.value) {
    const bool lhs_better = mode == ScanMode::kSublevel ? lhs.value < rhs.value
                                                        : lhs.value > rhs.value;
    return lhs_better ? lhs : rhs;
  }
  return lhs.root <= rhs.root ? lhs : rhs;
}

Extremum scan_phase2(std::span<const double> averages, ScanMode mode) {
  Candidate best = Candidate::empty();
  for (std::size_t v = 0; v < averages.size(); ++v) {
    if (!std::isfinite(averages[v])) continue;
    best = combine(best, {averages[v], static_cast<VertexId>(v)}, mode);
  }
  if (best.is_empty())
    throw FamilyError("no admissible neighborhood: every root was skipped");
  Extremum out;
  out.root = best.root;
  out.value = best.value;
  for (std::size_t v = 0; v < averages.size(); ++v)
    if (averages[v] == best.value) out.ties.push_back(static_cast<VertexId>(v));
  return out;
}

ScanResult scan(const AttributedGraph& g, std::size_t k, ScanMode mode,
                const ScanOptions& options) {
  Phase1Result phase1 = scan_phase1(g, k, options.workers);
  NeighborhoodScanner scanner(g);
  return finish(g, std::move(phase1), mode, [&](VertexId root) {
    scanner.build(root, k);
    return scanner.snapshot(root);
  });
}

ScanResult scan(const AttributedGraph& g, const NeighborhoodFamily& family,
                ScanMode mode, const ScanOptions& options) {
  Phase1Result phase1 = scan_phase1(g, family, options.workers);
  return finish(g, std::move(phase1), mode,
                [&](VertexId root) { return *family.by_root[root]; });
}

Ecdf::Ecdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double t) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

double Ecdf::sup_distance(const std::function<double(double)>& cdf) const {
  const std::size_t n = sorted_.size();
  const auto nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted_[j] == sorted_[i]) ++j;
    const double f = cdf(sorted_[i]);
    // Just below and at the jump.
    d = std::max(d, std::abs(f - static_cast<double>(i) / nd));
    d = std::max(d, std::abs(static_cast<double>(j) / nd - f));
    i = j;
  }
  return d;
}

CrawlerEstimate crawler_estimates(const AttributedGraph& g,
                                  const ScanResult& scan) {
  if (scan.mode != ScanMode::kSublevel)
    throw ValidationError("crawler estimates need a sublevel scan");
  const auto& members = scan.selected.members;
  if (members.size() < 2)
    throw ValidationError("noise variance needs a neighborhood of at least 2 vertices");
  const auto x = g.observed();
  long double ss = 0.0L;
  std::vector<double> sample;
  sample.reserve(members.size());
  for (VertexId v : members) {
    const long double d = static_cast<long double>(x[v]) - scan.estimate;
    ss += d * d;
    sample.push_back(x[v]);
  }
  CrawlerEstimate out;
  out.sigma2_hat =
      static_cast<double>(ss / static_cast<long double>(members.size() - 1));
  out.ecdf = Ecdf(std::move(sample));
  return out;
}

}  // namespace knnscan
