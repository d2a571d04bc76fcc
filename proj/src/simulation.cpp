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

#include "knnscan/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "knnscan/error.hpp"
#include "knnscan/rng.hpp"

namespace knnscan {
namespace {

using Edge = std::pair<VertexId, VertexId>;

// Each vertex of [offset, offset + size) draws `d` distinct partners from
// the same range, excluding itself. Repeated draws are redrawn.
void draw_out_edges(std::size_t offset, std::size_t size, std::size_t d,
                    std::uint64_t seed, std::vector<Edge>& edges) {
  std::vector<VertexId> picked;
  for (std::size_t i = 0; i < size; ++i) {
    const auto v = static_cast<VertexId>(offset + i);
    CounterRng rng(seed, Stream::kGraphEdges, v);
    picked.clear();
    while (picked.size() < d) {
      const auto u = static_cast<VertexId>(offset + rng.below(size));
      if (u == v || std::find(picked.begin(), picked.end(), u) != picked.end())
        continue;
      picked.push_back(u);
      edges.emplace_back(v, u);
    }
  }
}

}  // namespace

void TwoSubgraphSpec::validate() const {
  if (n_big < 1 || n_small < 1)
    throw ValidationError("both subgraphs need at least one vertex");
  if (out_degree < 1) throw ValidationError("out_degree must be at least 1");
  if (out_degree >= std::min(n_big, n_small))
    throw ValidationError("out_degree must be smaller than both subgraph sizes");
  if (!(b > a)) throw ValidationError("activity threshold b must exceed a");
  if (!(active_level >= b))
    throw ValidationError("active level must be at least b");
  if (!(active_probability >= 0.0 && active_probability <= 1.0))
    throw ValidationError("active probability must lie in [0, 1]");
  if (num_vertices() > std::numeric_limits<VertexId>::max())
    throw ValidationError("too many vertices");
}

SimulatedGraph generate_two_subgraph(const TwoSubgraphSpec& spec) {
  spec.validate();
  const std::size_t n = spec.num_vertices();
  std::vector<Edge> edges;
  edges.reserve(spec.out_degree * n + spec.bridges);
  draw_out_edges(0, spec.n_big, spec.out_degree, spec.seed, edges);
  draw_out_edges(spec.n_big, spec.n_small, spec.out_degree, spec.seed, edges);
  for (std::size_t i = 0; i < spec.bridges; ++i) {
    CounterRng rng(spec.seed, Stream::kBridges, i);
    const auto u = static_cast<VertexId>(rng.below(spec.n_big));
    const auto w = static_cast<VertexId>(spec.n_big + rng.below(spec.n_small));
    edges.emplace_back(u, w);
  }
  std::vector<char> active(n, 0);
  for (std::size_t v = 0; v < spec.n_big; ++v) {
    CounterRng rng(spec.seed, Stream::kActivity, v);
    active[v] = rng.uniform() < spec.active_probability ? 1 : 0;
  }
  SimulatedGraph out;
  out.graph = AttributedGraph::from_edges(n, edges);
  out.truth = make_truth(spec.a, spec.b, spec.active_level, std::move(active));
  return out;
}

AttributedGraph generate_random_out_graph(std::size_t n, std::size_t out_degree,
                                          std::uint64_t seed) {
  if (out_degree >= n) throw ValidationError("out_degree must be smaller than n");
  std::vector<Edge> edges;
  edges.reserve(n * out_degree);
  draw_out_edges(0, n, out_degree, seed, edges);
  return AttributedGraph::from_edges(n, edges);
}

// ---------------------------------------------------------------------------
// Noise

NoiseModel NoiseModel::gaussian(double sigma, std::uint64_t seed) {
  NoiseModel m;
  m.kind = NoiseKind::kGaussian;
  m.sigma = sigma;
  m.seed = seed;
  m.validate();
  return m;
}

NoiseModel NoiseModel::uniform(double bound, std::uint64_t seed) {
  NoiseModel m;
  m.kind = NoiseKind::kUniform;
  m.bound = bound;
  m.seed = seed;
  m.validate();
  return m;
}

NoiseModel NoiseModel::discrete(std::vector<double> support,
                                std::vector<double> probabilities,
                                std::uint64_t seed) {
  NoiseModel m;
  m.kind = NoiseKind::kDiscrete;
  m.support = std::move(support);
  m.probabilities = std::move(probabilities);
  m.seed = seed;
  m.validate();
  return m;
}

double NoiseModel::variance() const {
  switch (kind) {
    case NoiseKind::kGaussian:
      return sigma * sigma;
    case NoiseKind::kUniform:
      return bound * bound / 3.0;
    case NoiseKind::kDiscrete: {
      double v = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i)
        v += probabilities[i] * support[i] * support[i];
      return v;
    }
  }
  return 0.0;
}

std::optional<double> NoiseModel::almost_sure_bound() const {
  switch (kind) {
    case NoiseKind::kGaussian:
      if (sigma == 0.0) return 0.0;
      return std::nullopt;
    case NoiseKind::kUniform:
      return bound;
    case NoiseKind::kDiscrete: {
      double m = 0.0;
      for (double s : support) m = std::max(m, std::abs(s));
      return m;
    }
  }
  return std::nullopt;
}

void NoiseModel::validate() const {
  switch (kind) {
    case NoiseKind::kGaussian:
      if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("gaussian sigma must be finite and >= 0");
      break;
    case NoiseKind::kUniform:
      if (!(bound >= 0.0) || !std::isfinite(bound))
        throw ValidationError("uniform bound must be finite and >= 0");
      break;
    case NoiseKind::kDiscrete: {
      if (support.empty() || support.size() != probabilities.size())
        throw ValidationError("discrete noise needs matching support and probabilities");
      double total = 0.0, mean = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (!(probabilities[i] >= 0.0) || !std::isfinite(support[i]))
          throw ValidationError("discrete noise has an invalid atom");
        total += probabilities[i];
        mean += probabilities[i] * support[i];
        scale = std::max(scale, std::abs(support[i]));
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("discrete noise probabilities must sum to 1");
      if (std::abs(mean) > 1e-9 * std::max(1.0, scale))
        throw ValidationError("discrete noise must have mean zero");
      break;
    }
  }
}

std::string NoiseModel::describe() const {
  std::ostringstream ss;
  switch (kind) {
    case NoiseKind::kGaussian:
      ss << "gaussian:" << sigma;
      break;
    case NoiseKind::kUniform:
      ss << "uniform:" << bound;
      break;
    case NoiseKind::kDiscrete:
      ss << "discrete:" << support.size() << "-atoms";
      break;
  }
  return ss.str();
}

NoiseModel parse_noise_spec(std::string_view spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw ValidationError("noise spec must look like gaussian:SIGMA or uniform:M");
  const std::string kind(spec.substr(0, colon));
  const std::string param(spec.substr(colon + 1));
  char* end = nullptr;
  const double value = std::strtod(param.c_str(), &end);
  if (param.empty() || end != param.c_str() + param.size())
    throw ValidationError("noise parameter '" + param + "' is not a number");
  if (kind == "gaussian") return NoiseModel::gaussian(value, seed);
  if (kind == "uniform") return NoiseModel::uniform(value, seed);
  throw ValidationError("unknown noise kind '" + kind + "'");
}

std::vector<double> draw_noise(const NoiseModel& noise, std::size_t n) {
  noise.validate();
  std::vector<double> eps(n);
  std::vector<double> cumulative;
  if (noise.kind == NoiseKind::kDiscrete) {
    cumulative.resize(noise.probabilities.size());
    std::partial_sum(noise.probabilities.begin(), noise.probabilities.end(),
                     cumulative.begin());
  }
  for (std::size_t v = 0; v < n; ++v) {
    CounterRng rng(noise.seed, Stream::kNoise, v);
    switch (noise.kind) {
      case NoiseKind::kGaussian:
        eps[v] = noise.sigma * rng.normal();
        break;
      case NoiseKind::kUniform:
        eps[v] = noise.bound * (2.0 * rng.uniform() - 1.0);
        break;
      case NoiseKind::kDiscrete: {
        const double u = rng.uniform();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        eps[v] = noise.support[static_cast<std::size_t>(it - cumulative.begin())];
        break;
      }
    }
  }
  return eps;
}

NoisyWorld apply_noise(GroundTruth truth, std::vector<double> noise) {
  truth.validate();
  if (noise.size() != truth.size())
    throw ValidationError("noise vector does not match the truth vector");
  NoisyWorld w;
  w.observed.resize(noise.size());
  for (std::size_t v = 0; v < noise.size(); ++v)
    w.observed[v] = truth.activity[v] + noise[v];
  w.truth = std::move(truth);
  w.noise = std::move(noise);
  return w;
}

NoisyWorld apply_noise(GroundTruth truth, const NoiseModel& noise) {
  auto eps = draw_noise(noise, truth.size());
  return apply_noise(std::move(truth), std::move(eps));
}

// ---------------------------------------------------------------------------
// Adversary

std::string_view to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kNone:
      return "none";
    case AdversaryKind::kWeakLocal:
      return "weak";
    case AdversaryKind::kStrongGlobal:
      return "strong";
    case AdversaryKind::kMultiStep:
      return "multistep";
  }
  return "none";
}

AdversaryKind parse_adversary(std::string_view s) {
  if (s == "none") return AdversaryKind::kNone;
  if (s == "weak" || s == "weak_local") return AdversaryKind::kWeakLocal;
  if (s == "strong" || s == "strong_global") return AdversaryKind::kStrongGlobal;
  if (s == "multistep" || s == "multi_step") return AdversaryKind::kMultiStep;
  throw ValidationError("unknown adversary '" + std::string(s) + "'");
}

std::size_t count_active(const GroundTruth& truth,
                         std::span<const VertexId> members) {
  std::size_t c = 0;
  for (VertexId v : members) c += truth.active[v] ? 1 : 0;
  return c;
}

namespace {

std::vector<VertexId> influence(NoisyWorld& world,
                                std::span<const VertexId> selected,
                                const AdversaryStrategy& strategy) {
  if (strategy.kind == AdversaryKind::kNone) return {};
  if (!(strategy.influence_value >= world.truth.b))
    throw ValidationError("influence value must be at least b to keep actives separated");
  std::vector<VertexId> mutated;
  if (strategy.kind == AdversaryKind::kStrongGlobal) {
    for (std::size_t v = 0; v < world.truth.size(); ++v)
      if (world.truth.active[v]) mutated.push_back(static_cast<VertexId>(v));
  } else {
    for (VertexId v : selected)
      if (world.truth.active[v]) mutated.push_back(v);
    std::sort(mutated.begin(), mutated.end());
  }
  for (VertexId v : mutated) {
    world.truth.activity[v] = strategy.influence_value;
    world.observed[v] = world.truth.activity[v] + world.noise[v];
  }
  return mutated;
}

struct HeapEntry {
  double value;
  VertexId root;
  std::size_t epoch;
};

// Min-heap on (value, root).
struct HeapOrder {
  bool operator()(const HeapEntry& l, const HeapEntry& r) const {
    return l.value != r.value ? l.value > r.value : l.root > r.root;
  }
};

using LazyHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder>;

LazyHeap heap_from(std::span<const double> averages, std::size_t epoch) {
  std::vector<HeapEntry> entries;
  entries.reserve(averages.size());
  for (std::size_t v = 0; v < averages.size(); ++v)
    if (std::isfinite(averages[v]))
      entries.push_back({averages[v], static_cast<VertexId>(v), epoch});
  return LazyHeap(HeapOrder{}, std::move(entries));
}

}  // namespace

std::vector<VertexId> adversary_act(NoisyWorld& world, const ScanResult& scan,
                                    const AdversaryStrategy& strategy) {
  return influence(world, scan.selected.members, strategy);
}

GameRecord play_multistep_game(const AttributedGraph& g, NoisyWorld& world,
                               std::size_t k, const AdversaryStrategy& strategy,
                               std::size_t max_steps, unsigned workers) {
  ScanResult first =
      scan_sublevel(g.with_observations(world.observed), k, {workers});
  // Heap entries carry lower bounds on current averages: an entry from an
  // older epoch was computed before some observations increased. The top
  // entry is the argmin once it is current.
  LazyHeap heap = heap_from(first.per_vertex_avg, 0);
  NeighborhoodScanner scanner(g);

  GameRecord record;
  VertexId root = first.selected.root;
  double estimate = first.estimate;
  std::vector<VertexId> members = std::move(first.selected.members);
  for (std::size_t step = 0;; ++step) {
    GameStep s;
    s.root = root;
    s.estimate = estimate;
    s.active_in_selected = count_active(world.truth, members);
    record.steps.push_back(s);
    if (s.active_in_selected == 0) {
      record.winning_step = step;
      break;
    }
    if (step == max_steps) break;

    bool monotone = true;
    std::vector<double> before;
    before.reserve(members.size());
    for (VertexId v : members) before.push_back(world.observed[v]);
    auto mutated = influence(world, members, strategy);
    if (strategy.kind == AdversaryKind::kStrongGlobal) {
      monotone = false;
    } else {
      for (std::size_t i = 0; i < members.size(); ++i)
        if (world.observed[members[i]] < before[i]) monotone = false;
    }
    record.steps.back().mutated = mutated;
    if (mutated.empty()) break;

    const std::size_t epoch = step + 1;
    if (!monotone) {
      ScanResult full =
          scan_sublevel(g.with_observations(world.observed), k, {workers});
      heap = heap_from(full.per_vertex_avg, epoch);
      root = full.selected.root;
      estimate = full.estimate;
      members = std::move(full.selected.members);
      continue;
    }
    for (;;) {
      const HeapEntry top = heap.top();
      if (top.epoch == epoch) break;
      heap.pop();
      scanner.build(top.root, k);
      heap.push({neighborhood_average(world.observed, scanner.members()),
                 top.root, epoch});
    }
    root = heap.top().root;
    scanner.build(root, k);
    members.assign(scanner.members().begin(), scanner.members().end());
    estimate = neighborhood_average(world.observed, members);
  }
  return record;
}

// ---------------------------------------------------------------------------
// Monte Carlo

SampleStats summarize(std::span<const double> xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  long double sum = 0.0L;
  for (double x : xs) sum += x;
  s.mean = static_cast<double>(sum / xs.size());
  long double ss = 0.0L;
  for (double x : xs) ss += (x - s.mean) * static_cast<long double>(x - s.mean);
  s.variance = xs.size() > 1 ? static_cast<double>(ss / (xs.size() - 1)) : 0.0;
  s.stddev = std::sqrt(s.variance);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

Histogram make_histogram(std::span<const double> xs, std::size_t bins) {
  Histogram h;
  if (xs.empty() || bins == 0) return h;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  h.lo = *lo;
  h.hi = *hi;
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double x : xs) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((x - h.lo) / width) : 0;
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

void ExperimentConfig::validate() const {
  if (k_values.empty()) throw ValidationError("at least one k value is required");
  for (std::size_t k : k_values)
    if (k == 0) throw ValidationError("k values must be >= 1");
  if (seeds.empty()) throw ValidationError("at least one seed is required");
  noise.validate();
  if (graph.kind == GraphSource::Kind::kTwoSubgraph) graph.spec.validate();
  if (mode == ScanMode::kSuperlevel && adversary.kind != AdversaryKind::kNone)
    throw ValidationError("adversaries act against the sublevel scan only");
}

SimulatedGraph materialize(const GraphSource& source, std::uint64_t seed) {
  switch (source.kind) {
    case GraphSource::Kind::kTwoSubgraph: {
      TwoSubgraphSpec spec = source.spec;
      spec.seed = seed;
      return generate_two_subgraph(spec);
    }
    case GraphSource::Kind::kEdgeList: {
      SimulatedGraph out;
      out.graph = load_edge_list(source.path);
      if (source.truth_path.empty())
        throw ValidationError("edge-list experiments need a truth file");
      const auto activity = load_attributes(out.graph, source.truth_path);
      out.truth.a = source.a;
      out.truth.b = source.b;
      out.truth.activity = activity;
      out.truth.active.resize(activity.size());
      for (std::size_t v = 0; v < activity.size(); ++v)
        out.truth.active[v] = activity[v] != source.a ? 1 : 0;
      out.truth.validate();
      return out;
    }
    case GraphSource::Kind::kGml: {
      GmlGraph gml = load_gml(source.path);
      std::vector<char> active(gml.value.size());
      for (std::size_t v = 0; v < active.size(); ++v)
        active[v] = gml.value[v] == source.active_label ? 1 : 0;
      SimulatedGraph out;
      out.graph = std::move(gml.graph);
      out.truth = make_truth(source.a, source.b, source.active_level, std::move(active));
      return out;
    }
  }
  throw ValidationError("unknown graph source");
}

MonteCarloSummary run_monte_carlo(const ExperimentConfig& config) {
  config.validate();
  MonteCarloSummary summary;
  summary.per_k.resize(config.k_values.size());
  for (std::size_t i = 0; i < config.k_values.size(); ++i)
    summary.per_k[i].k = config.k_values[i];

  const bool fixed_graph = config.graph.kind != GraphSource::Kind::kTwoSubgraph ||
                           !config.redraw_graph;
  std::optional<SimulatedGraph> cached;
  for (std::uint64_t seed : config.seeds) {
    if (!fixed_graph || !cached) cached = materialize(config.graph, seed);
    const SimulatedGraph& sim = *cached;
    NoiseModel noise = config.noise;
    noise.seed = seed;
    const NoisyWorld base = apply_noise(sim.truth, noise);

    for (std::size_t i = 0; i < config.k_values.size(); ++i) {
      const std::size_t k = config.k_values[i];
      NoisyWorld world = base;
      SeedOutcome out;
      out.seed = seed;
      if (config.adversary.kind == AdversaryKind::kMultiStep) {
        const GameRecord game =
            play_multistep_game(sim.graph, world, k, config.adversary,
                                config.adversary.max_steps, config.workers);
        out.root = game.steps.front().root;
        out.estimate = game.steps.front().estimate;
        out.active_in_selected = game.steps.front().active_in_selected;
        out.final_estimate = game.final_estimate();
        out.winning_step = game.winning_step;
        out.steps_played = game.steps.size();
      } else {
        const ScanResult result =
            scan(sim.graph.with_observations(world.observed), k, config.mode,
                 {config.workers});
        out.root = result.selected.root;
        out.estimate = result.estimate;
        out.active_in_selected = count_active(world.truth, result.selected.members);
        out.final_estimate = result.estimate;
        out.steps_played = 1;
        if (config.adversary.kind != AdversaryKind::kNone) {
          adversary_act(world, result, config.adversary);
          out.final_estimate =
              scan(sim.graph.with_observations(world.observed), k, config.mode,
                   {config.workers})
                  .estimate;
          out.steps_played = 2;
        }
      }
      summary.per_k[i].outcomes.push_back(out);
    }
  }

  for (auto& ks : summary.per_k) {
    std::vector<double> pre, post;
    for (const auto& o : ks.outcomes) {
      pre.push_back(o.estimate);
      post.push_back(o.final_estimate);
      if (config.adversary.kind == AdversaryKind::kMultiStep) {
        if (!o.winning_step)
          ++ks.games_lost;
        else
          ++ks.winning_step_counts[std::min<std::size_t>(*o.winning_step, 4)];
      }
    }
    ks.estimate = summarize(pre);
    ks.final_estimate = summarize(post);
    ks.histogram = make_histogram(pre, config.histogram_bins);
  }
  return summary;
}

}  // namespace knnscan
