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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "knnscan/estimators.hpp"
#include "knnscan/graph.hpp"

namespace knnscan {

// Two random out-degree subgraphs joined by a few bridges. Vertices
// [0, n_big) form the big subgraph, [n_big, n_big + n_small) the small one.
// The small side is all inactive; big-side vertices are active with
// probability `active_probability`.
struct TwoSubgraphSpec {
  std::size_t n_big = 1'000'000;
  std::size_t n_small = 1'000;
  std::size_t out_degree = 3;
  std::size_t bridges = 20;
  std::uint64_t seed = 1;
  double a = 2.0;
  double b = 10.0;
  double active_level = 10.0;
  double active_probability = 0.5;

  std::size_t num_vertices() const { return n_big + n_small; }
  void validate() const;
};

struct SimulatedGraph {
  AttributedGraph graph;
  GroundTruth truth;
};

SimulatedGraph generate_two_subgraph(const TwoSubgraphSpec& spec);

// Random graph where every vertex draws `out_degree` distinct partners
// uniformly from the other vertices; the building block of the two-subgraph
// generator, also handy for tests.
AttributedGraph generate_random_out_graph(std::size_t n, std::size_t out_degree,
                                          std::uint64_t seed);

enum class NoiseKind { kGaussian, kUniform, kDiscrete };

// Zero-mean noise distribution with a seed. Draw v of a realization is a
// pure function of (seed, v).
struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussian;
  double sigma = 1.0;  // gaussian
  double bound = 1.0;  // uniform on [-bound, bound]
  std::vector<double> support;        // discrete
  std::vector<double> probabilities;  // discrete
  std::uint64_t seed = 1;

  static NoiseModel gaussian(double sigma, std::uint64_t seed = 1);
  static NoiseModel uniform(double bound, std::uint64_t seed = 1);
  static NoiseModel discrete(std::vector<double> support,
                             std::vector<double> probabilities,
                             std::uint64_t seed = 1);

  double variance() const;
  // Almost-sure bound on |eps| when one exists.
  std::optional<double> almost_sure_bound() const;
  // Throws ValidationError unless the model has mean zero and finite,
  // non-negative parameters.
  void validate() const;
  std::string describe() const;
};

// Parses "gaussian:SIGMA" or "uniform:M".
NoiseModel parse_noise_spec(std::string_view spec, std::uint64_t seed = 1);

std::vector<double> draw_noise(const NoiseModel& noise, std::size_t n);

// Truth plus one realized noise vector. The adversary edits `truth` only;
// `observed` is always truth.activity + noise.
struct NoisyWorld {
  GroundTruth truth;
  std::vector<double> noise;
  std::vector<double> observed;
};

NoisyWorld apply_noise(GroundTruth truth, const NoiseModel& noise);
NoisyWorld apply_noise(GroundTruth truth, std::vector<double> noise);

enum class AdversaryKind { kNone, kWeakLocal, kStrongGlobal, kMultiStep };

std::string_view to_string(AdversaryKind kind);
AdversaryKind parse_adversary(std::string_view s);

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::kNone;
  // Activity assigned to every influenced vertex; must be >= b.
  double influence_value = 1e6;
  std::size_t max_steps = 10;
};

// Sets truth.activity of the influenced active vertices to the influence
// value and re-derives their observations with the unchanged noise.
// Weak-local and multi-step influence the active members of the selected
// neighborhood; strong-global influences every active vertex. Inactive
// vertices are never touched. Returns the influenced vertices, ascending.
std::vector<VertexId> adversary_act(NoisyWorld& world, const ScanResult& scan,
                                    const AdversaryStrategy& strategy);

std::size_t count_active(const GroundTruth& truth,
                         std::span<const VertexId> members);

struct GameStep {
  VertexId root = 0;
  double estimate = 0.0;
  std::size_t active_in_selected = 0;
  // Vertices the adversary influenced after this step's scan.
  std::vector<VertexId> mutated;
};

struct GameRecord {
  std::vector<GameStep> steps;
  // Index of the first step whose selected neighborhood had no active
  // vertex.
  std::optional<std::size_t> winning_step;
  bool won() const { return winning_step.has_value(); }
  double final_estimate() const { return steps.back().estimate; }
};

// Alternates a sublevel scan with an adversary action on the selected
// neighborhood until the selection is active-free or `max_steps` adversary
// actions have been taken. `world` is updated in place.
GameRecord play_multistep_game(const AttributedGraph& g, NoisyWorld& world,
                               std::size_t k, const AdversaryStrategy& strategy,
                               std::size_t max_steps, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Monte Carlo driver

struct GraphSource {
  enum class Kind { kTwoSubgraph, kEdgeList, kGml };
  Kind kind = Kind::kTwoSubgraph;
  TwoSubgraphSpec spec;
  std::string path;
  // Edge-list graphs: `vertex,value` CSV of true activities.
  std::string truth_path;
  // GML graphs: vertices whose `value` equals this label are active.
  int active_label = 1;
  double a = 2.0;
  double b = 10.0;
  double active_level = 10.0;
};

struct ExperimentConfig {
  GraphSource graph;
  // Two-subgraph sources only: draw a fresh graph per seed (true) or reuse
  // the graph of the first seed and redraw only the noise.
  bool redraw_graph = true;
  NoiseModel noise;
  std::vector<std::size_t> k_values;
  std::vector<std::uint64_t> seeds;
  AdversaryStrategy adversary;
  ScanMode mode = ScanMode::kSublevel;
  unsigned workers = 1;
  std::size_t histogram_bins = 30;

  void validate() const;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  VertexId root = 0;
  double estimate = 0.0;
  std::size_t active_in_selected = 0;
  // Estimate after the adversary; equals `estimate` without one.
  double final_estimate = 0.0;
  // Multi-step games only.
  std::optional<std::size_t> winning_step;
  std::size_t steps_played = 0;
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator; 0 for a single sample
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SampleStats summarize(std::span<const double> xs);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

Histogram make_histogram(std::span<const double> xs, std::size_t bins);

struct KSummary {
  std::size_t k = 0;
  std::vector<SeedOutcome> outcomes;
  SampleStats estimate;
  SampleStats final_estimate;
  Histogram histogram;
  // Games: number of seeds with winning step 0, 1, 2, 3, >= 4.
  std::array<std::size_t, 5> winning_step_counts{};
  std::size_t games_lost = 0;
};

struct MonteCarloSummary {
  std::vector<KSummary> per_k;
};

// Loads or generates the graph and truth for one seed.
SimulatedGraph materialize(const GraphSource& source, std::uint64_t seed);

MonteCarloSummary run_monte_carlo(const ExperimentConfig& config);

}  // namespace knnscan
