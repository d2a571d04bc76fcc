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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "doctest.h"
#include "knnscan/error.hpp"
#include "knnscan/report.hpp"
#include "knnscan/simulation.hpp"

using namespace knnscan;

namespace {

TwoSubgraphSpec small_spec(std::uint64_t seed) {
  TwoSubgraphSpec s;
  s.n_big = 800;
  s.n_small = 80;
  s.out_degree = 3;
  s.bridges = 5;
  s.seed = seed;
  return s;
}

struct Moments {
  double mean;
  double var;
};

Moments moments(const std::vector<double>& xs) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    s += x;
    s2 += x * x;
  }
  const double m = s / xs.size();
  return {m, s2 / xs.size() - m * m};
}

// The game replayed with a full scan at every step.
GameRecord reference_game(const AttributedGraph& g, NoisyWorld& world, std::size_t k,
                          const AdversaryStrategy& strategy, std::size_t max_steps) {
  GameRecord rec;
  for (std::size_t step = 0;; ++step) {
    const auto r = scan_sublevel(g.with_observations(world.observed), k);
    GameStep s;
    s.root = r.selected.root;
    s.estimate = r.estimate;
    s.active_in_selected = count_active(world.truth, r.selected.members);
    rec.steps.push_back(s);
    if (s.active_in_selected == 0) {
      rec.winning_step = step;
      break;
    }
    if (step == max_steps) break;
    rec.steps.back().mutated = adversary_act(world, r, strategy);
    if (rec.steps.back().mutated.empty()) break;
  }
  return rec;
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST_CASE("two-subgraph generator invariants") {
  const auto spec = small_spec(4);
  const auto sim = generate_two_subgraph(spec);
  const auto& g = sim.graph;
  REQUIRE(g.num_vertices() == 880);
  std::size_t cross = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    CHECK(g.neighbors(v).size() >= spec.out_degree);
    for (VertexId w : g.neighbors(v)) cross += (v < 800) != (w < 800) ? 1 : 0;
  }
  CHECK(cross > 0);
  CHECK(cross <= 2 * spec.bridges);
  for (VertexId v = 800; v < 880; ++v) {
    CHECK_FALSE(sim.truth.active[v]);
    CHECK(sim.truth.activity[v] == spec.a);
  }
  const std::size_t active = sim.truth.active_count();
  CHECK(active > 300);
  CHECK(active < 500);
  CHECK_NOTHROW(sim.truth.validate());

  const auto again = generate_two_subgraph(spec);
  CHECK(again.graph.edges() == g.edges());
  CHECK(again.truth.active == sim.truth.active);
  const auto other = generate_two_subgraph(small_spec(5));
  CHECK(other.graph.edges() != g.edges());

  auto bad = spec;
  bad.out_degree = 0;
  CHECK_THROWS_AS(generate_two_subgraph(bad), ValidationError);
  bad = spec;
  bad.b = bad.a;
  CHECK_THROWS_AS(generate_two_subgraph(bad), ValidationError);
}

TEST_CASE("random out-graph has minimum degree out_degree and no loops") {
  const auto g = generate_random_out_graph(500, 4, 9);
  CHECK(g.ingest_report().loops_dropped == 0);
  for (VertexId v = 0; v < 500; ++v) CHECK(g.neighbors(v).size() >= 4);
}

TEST_CASE("noise models: moments, bounds, validation") {
  const auto gauss = draw_noise(NoiseModel::gaussian(2.0, 3), 100000);
  const auto mg = moments(gauss);
  CHECK(std::abs(mg.mean) < 4.0 * 2.0 / std::sqrt(1e5));
  CHECK(mg.var == doctest::Approx(4.0).epsilon(0.03));
  CHECK_FALSE(NoiseModel::gaussian(2.0).almost_sure_bound());

  const auto uni = NoiseModel::uniform(0.5, 3);
  const auto xs = draw_noise(uni, 100000);
  for (double x : xs) REQUIRE(std::abs(x) <= 0.5);
  CHECK(moments(xs).var == doctest::Approx(uni.variance()).epsilon(0.03));
  CHECK(*uni.almost_sure_bound() == 0.5);

  const auto disc = NoiseModel::discrete({-1.0, 2.0}, {2.0 / 3.0, 1.0 / 3.0}, 3);
  CHECK_NOTHROW(disc.validate());
  CHECK(disc.variance() == doctest::Approx(2.0));
  CHECK(*disc.almost_sure_bound() == 2.0);
  std::size_t twos = 0;
  for (double x : draw_noise(disc, 30000)) {
    REQUIRE((x == -1.0 || x == 2.0));
    twos += x == 2.0 ? 1 : 0;
  }
  CHECK(twos / 30000.0 == doctest::Approx(1.0 / 3.0).epsilon(0.05));
  CHECK_THROWS_AS(NoiseModel::discrete({-1.0, 1.0}, {0.2, 0.8}).validate(), ValidationError);
  CHECK_THROWS_AS(NoiseModel::discrete({0.0}, {0.5}).validate(), ValidationError);

  // Same seed, same draws; a prefix is stable under a longer request.
  const auto a = draw_noise(NoiseModel::gaussian(1.0, 8), 50);
  const auto b = draw_noise(NoiseModel::gaussian(1.0, 8), 80);
  CHECK(std::equal(a.begin(), a.end(), b.begin()));
  CHECK(draw_noise(NoiseModel::gaussian(1.0, 9), 50) != a);

  CHECK(parse_noise_spec("uniform:0.25").bound == 0.25);
  CHECK(parse_noise_spec("gaussian:3").sigma == 3.0);
  CHECK_THROWS_AS(parse_noise_spec("cauchy:1"), ValidationError);
  CHECK_THROWS_AS(parse_noise_spec("gaussian:-1"), ValidationError);
  CHECK_THROWS_AS(parse_noise_spec("gaussian"), ValidationError);
}

TEST_CASE("adversaries touch only active vertices") {
  const auto sim = generate_two_subgraph(small_spec(1));
  for (AdversaryKind kind : {AdversaryKind::kWeakLocal, AdversaryKind::kStrongGlobal}) {
    auto world = apply_noise(sim.truth, NoiseModel::gaussian(1.0, 1));
    const auto before = world;
    const auto r = scan_sublevel(sim.graph.with_observations(world.observed), 30);
    AdversaryStrategy strat;
    strat.kind = kind;
    strat.influence_value = 50.0;
    const auto mutated = adversary_act(world, r, strat);
    const std::set<VertexId> touched(mutated.begin(), mutated.end());
    const std::set<VertexId> selected(r.selected.members.begin(), r.selected.members.end());
    for (VertexId v = 0; v < sim.graph.num_vertices(); ++v) {
      if (touched.count(v)) {
        CHECK(before.truth.active[v]);
        CHECK(world.truth.activity[v] == 50.0);
        if (kind == AdversaryKind::kWeakLocal) CHECK(selected.count(v) == 1);
      } else {
        CHECK(world.truth.activity[v] == before.truth.activity[v]);
        CHECK(world.observed[v] == before.observed[v]);
      }
      CHECK(world.noise[v] == before.noise[v]);
      CHECK(world.observed[v] == world.truth.activity[v] + world.noise[v]);
    }
    if (kind == AdversaryKind::kStrongGlobal) CHECK(touched.size() == sim.truth.active_count());
  }

  auto world = apply_noise(sim.truth, NoiseModel::gaussian(1.0, 1));
  const auto r = scan_sublevel(sim.graph.with_observations(world.observed), 30);
  AdversaryStrategy weak;
  weak.kind = AdversaryKind::kWeakLocal;
  weak.influence_value = 5.0;  // below b
  CHECK_THROWS_AS(adversary_act(world, r, weak), ValidationError);
  AdversaryStrategy none;
  CHECK(adversary_act(world, r, none).empty());
}

TEST_CASE("lazy-heap game equals a game with full rescans") {
  std::size_t long_games = 0;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto spec = small_spec(seed);
    spec.n_small = 30;  // below the larger k: the clean side cannot host that neighborhood
    spec.active_level = seed % 2 == 0 ? 10.0 : 14.0;
    const auto sim = generate_two_subgraph(spec);
    const NoiseModel noise = NoiseModel::gaussian(3.0, seed);
    AdversaryStrategy strat;
    strat.kind = AdversaryKind::kMultiStep;
    // 12 lowers the level-14 vertices, forcing the non-monotone path.
    strat.influence_value = 12.0;
    for (std::size_t k : {5u, 40u}) {
      auto w1 = apply_noise(sim.truth, noise);
      auto w2 = w1;
      const auto lazy = play_multistep_game(sim.graph, w1, k, strat, 6);
      const auto full = reference_game(sim.graph, w2, k, strat, 6);
      REQUIRE(lazy.steps.size() == full.steps.size());
      for (std::size_t i = 0; i < lazy.steps.size(); ++i) {
        REQUIRE(lazy.steps[i].root == full.steps[i].root);
        REQUIRE(same_bits(lazy.steps[i].estimate, full.steps[i].estimate));
        REQUIRE(lazy.steps[i].active_in_selected == full.steps[i].active_in_selected);
        REQUIRE(lazy.steps[i].mutated == full.steps[i].mutated);
      }
      CHECK(lazy.winning_step == full.winning_step);
      CHECK(w1.observed == w2.observed);
      long_games += lazy.steps.size() > 2 ? 1 : 0;
    }
  }
  CHECK(long_games > 3);
}

TEST_CASE("game edge cases") {
  auto spec = small_spec(3);
  spec.n_small = 10;
  const auto sim = generate_two_subgraph(spec);
  AdversaryStrategy strat;
  strat.kind = AdversaryKind::kMultiStep;
  strat.influence_value = 100.0;
  auto world = apply_noise(sim.truth, NoiseModel::gaussian(4.0, 2));
  const auto zero = play_multistep_game(sim.graph, world, 60, strat, 0);
  CHECK(zero.steps.size() == 1);
  CHECK(zero.steps[0].mutated.empty());

  spec.active_probability = 0.0;
  const auto calm = generate_two_subgraph(spec);
  auto quiet = apply_noise(calm.truth, NoiseModel::gaussian(1e-3, 2));
  const auto won = play_multistep_game(calm.graph, quiet, 20, strat, 5);
  CHECK(won.winning_step == std::size_t{0});
  CHECK(won.final_estimate() == doctest::Approx(spec.a).epsilon(1e-2));
}

TEST_CASE("summary statistics and histograms") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(xs);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 4.0);
  CHECK(summarize(std::vector<double>{7.0}).variance == 0.0);
  const auto h = make_histogram(xs, 3);
  CHECK(h.counts.size() == 3);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 4);
  CHECK(h.counts.back() >= 1);
}

TEST_CASE("Monte Carlo runs are reproducible and configs round-trip") {
  ExperimentConfig cfg;
  cfg.graph.spec = small_spec(1);
  cfg.noise = NoiseModel::gaussian(1.0);
  cfg.k_values = {10, 25};
  cfg.seeds = {1, 2, 3};
  cfg.histogram_bins = 5;
  const auto r1 = run_monte_carlo(cfg);
  const auto r2 = run_monte_carlo(cfg);
  REQUIRE(r1.per_k.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(r1.per_k[i].outcomes.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(r1.per_k[i].outcomes[j].root == r2.per_k[i].outcomes[j].root);
      CHECK(same_bits(r1.per_k[i].outcomes[j].estimate, r2.per_k[i].outcomes[j].estimate));
    }
  }

  // A single (k, seed) of the driver equals a direct scan.
  auto spec = small_spec(2);
  const auto sim = generate_two_subgraph(spec);
  auto noise = cfg.noise;
  noise.seed = 2;
  const auto world = apply_noise(sim.truth, noise);
  const auto direct = scan_sublevel(sim.graph.with_observations(world.observed), 25);
  CHECK(same_bits(r1.per_k[1].outcomes[1].estimate, direct.estimate));

  cfg.adversary.kind = AdversaryKind::kWeakLocal;
  cfg.adversary.influence_value = 40.0;
  cfg.redraw_graph = false;
  const auto json = config_to_json(cfg);
  const auto back = config_from_json(json);
  CHECK(config_to_json(back) == json);
  CHECK(back.k_values == cfg.k_values);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.adversary.kind == AdversaryKind::kWeakLocal);
  CHECK_FALSE(back.redraw_graph);

  cfg.mode = ScanMode::kSuperlevel;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.mode = ScanMode::kSublevel;
  cfg.k_values.clear();
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
