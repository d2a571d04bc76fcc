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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "knnscan/error.hpp"
#include "knnscan/neighborhoods.hpp"
#include "oracles.hpp"

using namespace knnscan;

namespace {

using Edges = std::vector<std::pair<VertexId, VertexId>>;

AttributedGraph path_graph(std::size_t n) {
  Edges e;
  for (VertexId v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return AttributedGraph::from_edges(n, e);
}

AttributedGraph two_triangles() {
  const Edges e{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
  return AttributedGraph::from_edges(6, e);
}

oracle::VertexSet as_set(const std::vector<VertexId>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("bfs layers on a path") {
  const auto g = path_graph(6);
  const auto L = bfs_layers(g, 2, 5);
  REQUIRE(L.layers.size() == 3);
  CHECK(L.layers[0] == std::vector<VertexId>{2});
  CHECK(L.layers[1] == std::vector<VertexId>{1, 3});
  CHECK(L.layers[2] == std::vector<VertexId>{0, 4});
  CHECK(L.cumulative_sizes == std::vector<std::size_t>{1, 3, 5});
  CHECK_FALSE(L.exhausted);
  CHECK(L.ball(1) == std::vector<VertexId>{2, 1, 3});
  CHECK_THROWS_AS(bfs_layers(g, 0, 0), ValidationError);
}

TEST_CASE("an isolated vertex exhausts its component") {
  const Edges e{{1, 2}};
  const auto g = AttributedGraph::from_edges(3, e);
  const auto L = bfs_layers(g, 0, 2);
  CHECK(L.exhausted);
  CHECK(L.size() == 1);
  CHECK_THROWS_AS(exact_neighborhood(L, 2), FamilyError);
  const auto one = exact_neighborhood(bfs_layers(g, 0, 1), 1);
  CHECK(one.members == std::vector<VertexId>{0});
  CHECK(one.inner_radius == 0);
}

TEST_CASE("exact neighborhood keeps the smallest ids of the last layer") {
  // Star centred at 4 with leaves 0..3 and 5..7.
  Edges e;
  for (VertexId v : {0u, 1u, 2u, 3u, 5u, 6u, 7u}) e.push_back({4, v});
  const auto g = AttributedGraph::from_edges(8, e);
  const auto K = exact_neighborhood(bfs_layers(g, 4, 4), 4);
  CHECK(K.sorted_members() == std::vector<VertexId>{0, 1, 2, 4});
  CHECK(K.members.front() == 4);
  CHECK(K.inner_radius == 1);
  CHECK(as_set(K.truncated_last_layer) == oracle::VertexSet{0, 1, 2});
}

TEST_CASE("family construction skips small components and validates k") {
  const auto g = two_triangles();
  CHECK_THROWS_AS(build_family(g, 0), ValidationError);
  CHECK_THROWS_AS(build_family(g, 7), ValidationError);
  CHECK_THROWS_AS(build_family(g, 4), FamilyError);
  const auto fam = build_family(g, 3);
  CHECK(fam.admissible_count() == 6);
  CHECK(fam.skipped.empty());

  const Edges e{{0, 1}, {1, 2}, {2, 3}, {4, 5}};
  const auto h = AttributedGraph::from_edges(6, e);
  const auto mixed = build_family(h, 3);
  CHECK(mixed.skipped == std::vector<VertexId>{4, 5});
  CHECK(mixed.admissible_count() == 4);
}

TEST_CASE("single-step difference of walk sets is not the BFS layer") {
  // On a triangle, walks of length 2 return to the root, so N_2 \ N_1 = {0}
  // while the second BFS layer is empty. Layers must subtract every earlier
  // walk set.
  const Edges e{{0, 1}, {1, 2}, {0, 2}};
  const auto adj = oracle::adjacency(3, e);
  const auto N = oracle::walk_sets(adj, 0, 2);
  CHECK(oracle::set_minus(N[2], N[1]) == oracle::VertexSet{0});
  CHECK(oracle::level_sets(N)[2].empty());
}

TEST_CASE("layers and balls agree with the walk-set definitions") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 35;
    const double p = 0.03 + 0.25 * std::uniform_real_distribution<double>()(rng);
    const auto edges = oracle::random_graph(n, p, rng);
    const auto g = AttributedGraph::from_edges(n, edges);
    const auto adj = oracle::adjacency(n, edges);
    for (VertexId v = 0; v < n; ++v) {
      const auto L = bfs_layers(g, v, n);
      const auto N = oracle::walk_sets(adj, v, L.layers.size());
      const auto D = oracle::level_sets(N);
      for (std::size_t i = 0; i < L.layers.size(); ++i) {
        REQUIRE(as_set(L.layers[i]) == D[i]);
        REQUIRE(L.layers[i].size() == D[i].size());
        REQUIRE(as_set(L.ball(i)) == oracle::ball(N, i));
      }
      // Nothing lies beyond the last layer.
      CHECK(D[L.layers.size()].empty());
    }
  }
}

TEST_CASE("scanner, exact_neighborhood and family agree with the oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const auto edges = oracle::random_graph(n, 0.12, rng);
    const auto g = AttributedGraph::from_edges(n, edges);
    const auto adj = oracle::adjacency(n, edges);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 8);
    NeighborhoodScanner scanner(g);
    for (VertexId v = 0; v < n; ++v) {
      const auto expect = oracle::exact(adj, v, k);
      const bool ok = scanner.build(v, k);
      REQUIRE(ok == expect.has_value());
      if (!ok) {
        CHECK_THROWS_AS(exact_neighborhood(bfs_layers(g, v, k), k), FamilyError);
        continue;
      }
      const auto K = exact_neighborhood(bfs_layers(g, v, k), k);
      const std::vector<VertexId> scanned(scanner.members().begin(), scanner.members().end());
      REQUIRE(scanned == K.members);
      REQUIRE(as_set(K.members) == expect->members);
      CHECK(K.inner_radius == expect->radius);
      CHECK(scanner.inner_radius() == expect->radius);
      CHECK(scanner.visited() == expect->outer.size());
      CHECK(scanner.inner_size() == expect->inner.size());
    }
  }
}

TEST_CASE("family is independent of the worker count") {
  std::mt19937_64 rng(5);
  const auto edges = oracle::random_graph(600, 0.01, rng);
  const auto g = AttributedGraph::from_edges(600, edges);
  const auto one = build_family(g, 12, 1);
  const auto four = build_family(g, 12, 4);
  CHECK(one.skipped == four.skipped);
  for (std::size_t v = 0; v < 600; ++v) {
    REQUIRE(one.by_root[v].has_value() == four.by_root[v].has_value());
    if (one.by_root[v]) REQUIRE(one.by_root[v]->members == four.by_root[v]->members);
  }
}

TEST_CASE("family CSV lists root,member pairs") {
  const auto g = path_graph(3);
  const auto fam = build_family(g, 2);
  const auto path = std::filesystem::temp_directory_path() / "knnscan_family.csv";
  write_family_csv(g, fam, path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  // Canonical member order: root first, then outward.
  CHECK(ss.str() == "root,member\n0,0\n0,1\n1,1\n1,0\n2,2\n2,1\n");
}
