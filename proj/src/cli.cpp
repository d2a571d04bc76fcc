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

#include "knnscan/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "knnscan/bounds.hpp"
#include "knnscan/error.hpp"
#include "knnscan/parallel.hpp"
#include "knnscan/report.hpp"
#include "knnscan/simulation.hpp"

namespace knnscan {
namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct SourceFlags {
  std::string graph;
  std::string gml;
  std::string truth;
  int active_label = 1;
  double a = 2.0;
  double b = 10.0;
  double active_level = 10.0;
  TwoSubgraphSpec spec;
};

struct RunFlags {
  SourceFlags source;
  std::string attrs;
  std::string noise = "gaussian:1";
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::size_t num_seeds = 0;
  std::uint64_t first_seed = 1;
  std::size_t k = 0;
  std::vector<std::size_t> k_values;
  std::string mode = "sub";
  unsigned workers = default_workers();
  std::string adversary = "none";
  double influence = 1e6;
  std::size_t max_steps = 10;
  std::size_t bins = 30;
  bool keep_graph = false;
  bool dump_averages = false;
  std::optional<double> sigma2;
  std::optional<double> M;
  std::string reference;
  std::string config;
  std::string out;
};

void add_source_flags(CLI::App* cmd, SourceFlags& f) {
  auto* graph = cmd->add_option("--graph", f.graph, "Edge-list graph file");
  auto* gml = cmd->add_option("--gml", f.gml, "GML graph file");
  graph->excludes(gml);
  cmd->add_option("--truth", f.truth,
                  "vertex,value CSV of true activities for --graph inputs");
  cmd->add_option("--active-label", f.active_label,
                  "GML node value marking active vertices")
      ->capture_default_str();
  cmd->add_option("--a", f.a, "Inactive level a")->capture_default_str();
  cmd->add_option("--b", f.b, "Activity threshold b")->capture_default_str();
  cmd->add_option("--active-level", f.active_level, "Activity of active vertices")
      ->capture_default_str();
  cmd->add_option("--n-big", f.spec.n_big, "Generator: big subgraph size")
      ->capture_default_str();
  cmd->add_option("--n-small", f.spec.n_small, "Generator: small subgraph size")
      ->capture_default_str();
  cmd->add_option("--out-degree", f.spec.out_degree, "Generator: out-degree")
      ->capture_default_str();
  cmd->add_option("--bridges", f.spec.bridges, "Generator: bridge edges")
      ->capture_default_str();
  cmd->add_option("--active-prob", f.spec.active_probability,
                  "Generator: activity probability on the big side")
      ->capture_default_str();
}

GraphSource to_source(const SourceFlags& f) {
  GraphSource s;
  s.spec = f.spec;
  s.spec.a = f.a;
  s.spec.b = f.b;
  s.spec.active_level = f.active_level;
  s.a = f.a;
  s.b = f.b;
  s.active_level = f.active_level;
  s.active_label = f.active_label;
  if (!f.gml.empty()) {
    s.kind = GraphSource::Kind::kGml;
    s.path = f.gml;
  } else if (!f.graph.empty()) {
    s.kind = GraphSource::Kind::kEdgeList;
    s.path = f.graph;
    s.truth_path = f.truth;
  }
  return s;
}

std::vector<std::uint64_t> resolve_seeds(const RunFlags& f) {
  if (!f.seeds.empty()) return f.seeds;
  if (f.num_seeds == 0) throw UsageError("--seeds or --num-seeds is required");
  std::vector<std::uint64_t> out(f.num_seeds);
  for (std::size_t i = 0; i < f.num_seeds; ++i) out[i] = f.first_seed + i;
  return out;
}

ExperimentConfig to_config(const RunFlags& f, std::vector<std::size_t> k_values,
                           std::vector<std::uint64_t> seeds) {
  ExperimentConfig c;
  c.graph = to_source(f.source);
  c.redraw_graph = !f.keep_graph;
  c.noise = parse_noise_spec(f.noise);
  c.k_values = std::move(k_values);
  c.seeds = std::move(seeds);
  c.adversary.kind = parse_adversary(f.adversary);
  c.adversary.influence_value = f.influence;
  c.adversary.max_steps = f.max_steps;
  c.mode = parse_scan_mode(f.mode);
  c.workers = f.workers;
  c.histogram_bins = f.bins;
  return c;
}

// Graph with observations: read from --attrs, or synthesized from the truth
// and the noise model with the given seed.
AttributedGraph observed_graph(const RunFlags& f) {
  if (!f.attrs.empty()) {
    AttributedGraph g;
    if (!f.source.gml.empty())
      g = load_gml(f.source.gml).graph;
    else if (!f.source.graph.empty())
      g = load_edge_list(f.source.graph);
    else
      throw UsageError("--attrs needs --graph or --gml");
    return g.with_observations(load_attributes(g, f.attrs));
  }
  SimulatedGraph sim = materialize(to_source(f.source), f.seed);
  NoiseModel noise = parse_noise_spec(f.noise, f.seed);
  const NoisyWorld world = apply_noise(sim.truth, noise);
  return sim.graph.with_observations(world.observed);
}

Json run_manifest(const std::string& command, const RunFlags& f,
                  const ExperimentConfig& config) {
  Json echo = config_to_json(config);
  if (!f.attrs.empty()) echo["attrs"] = f.attrs;
  return make_manifest(command, echo, config.seeds);
}

fs::path make_out_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create output directory '" + path + "': " + ec.message());
  return fs::path(path);
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

int cmd_generate(const RunFlags& f, std::ostream& out) {
  if (!f.source.graph.empty() || !f.source.gml.empty())
    throw UsageError("generate builds a two-subgraph graph; --graph/--gml do not apply");
  const ExperimentConfig config = to_config(f, {1}, {f.seed});
  const SimulatedGraph sim = materialize(config.graph, f.seed);
  const fs::path dir = make_out_dir(f.out);
  write_edge_list(sim.graph, dir / "graph.edges");
  write_attributes(sim.graph, sim.truth.activity, dir / "truth.csv");
  NoiseModel noise = config.noise;
  noise.seed = f.seed;
  const NoisyWorld world = apply_noise(sim.truth, noise);
  write_attributes(sim.graph, world.observed, dir / "attrs.csv");
  Json echo = config_to_json(config);
  echo.erase("k");
  write_json(dir / "manifest.json", make_manifest("generate", echo, {f.seed}));
  emit(out, {{"vertices", sim.graph.num_vertices()},
             {"edges", sim.graph.num_edges()},
             {"active", sim.truth.active_count()}});
  return kExitOk;
}

int cmd_estimate(const RunFlags& f, std::ostream& out) {
  const AttributedGraph g = observed_graph(f);
  const ExperimentConfig config = to_config(f, {f.k}, {f.seed});
  const ScanResult result = scan(g, f.k, config.mode, {f.workers});
  const Json j = scan_to_json(g, result);
  if (!f.out.empty()) {
    const fs::path dir = make_out_dir(f.out);
    write_json(dir / "result.json", j);
    if (f.dump_averages) write_averages_csv(dir / "averages.csv", g, result);
    write_json(dir / "manifest.json", run_manifest("estimate", f, config));
  }
  emit(out, j);
  return kExitOk;
}

int cmd_crawler(const RunFlags& f, std::ostream& out) {
  const AttributedGraph g = observed_graph(f);
  const ExperimentConfig config = to_config(f, {f.k}, {f.seed});
  const ScanResult result = scan_sublevel(g, f.k, {f.workers});
  const CrawlerEstimate est = crawler_estimates(g, result);
  const Json j = crawler_to_json(result, est);
  if (!f.out.empty()) {
    const fs::path dir = make_out_dir(f.out);
    write_json(dir / "crawler.json", j);
    write_ecdf_csv(dir / "ecdf.csv", est.ecdf);
    write_json(dir / "manifest.json", run_manifest("crawler", f, config));
  }
  emit(out, j);
  return kExitOk;
}

int run_experiment(const std::string& command, const ExperimentConfig& config,
                   const Json& echo, const std::string& out_dir, std::ostream& out) {
  const MonteCarloSummary summary = run_monte_carlo(config);
  const Json j = summary_to_json(summary, config.adversary.kind);
  const fs::path dir = make_out_dir(out_dir);
  if (config.adversary.kind == AdversaryKind::kMultiStep) {
    write_outcomes_csv(dir / "games.csv", summary);
    write_json(dir / "table.json", j);
  } else {
    write_outcomes_csv(dir / "samples.csv", summary);
    write_json(dir / "summary.json", j);
  }
  write_histogram_csv(dir / "histogram.csv", summary);
  write_json(dir / "manifest.json", make_manifest(command, echo, config.seeds));
  emit(out, j);
  return kExitOk;
}

int cmd_sweep(const std::string& command, const RunFlags& f, std::ostream& out) {
  if (!f.attrs.empty())
    throw UsageError(command + " draws its own noise; use --noise instead of --attrs");
  const ExperimentConfig config = to_config(f, f.k_values, resolve_seeds(f));
  config.validate();
  return run_experiment(command, config, run_manifest(command, f, config).at("config"),
                        f.out, out);
}

int cmd_run(const RunFlags& f, std::ostream& out) {
  const ExperimentConfig config = load_config(f.config);
  return run_experiment("run", config, config_to_json(config), f.out, out);
}

int cmd_bound(const RunFlags& f, std::ostream& out) {
  if (!f.sigma2) throw UsageError("--sigma2 is required");
  const GraphSource source = to_source(f.source);
  const SimulatedGraph sim = materialize(source, f.seed);
  const NeighborhoodFamily family = build_family(sim.graph, f.k, f.workers);
  std::vector<VertexId> k0;
  if (!f.reference.empty()) {
    const VertexId root = sim.graph.id_of(f.reference);
    if (!family.by_root[root])
      throw ValidationError("reference root '" + f.reference +
                            "' has no neighborhood of size k");
    k0 = family.by_root[root]->members;
  } else {
    const Assumption1Check check = check_assumption1(sim.graph, sim.truth, f.k);
    if (!check.holds)
      throw ValidationError(
          "no all-inactive neighborhood of size k exists; pass --reference");
    k0 = check.reference_set;
  }
  BoundInputs inputs;
  inputs.a = sim.truth.a;
  inputs.b = sim.truth.b;
  inputs.sigma2 = *f.sigma2;
  inputs.M = f.M;
  inputs.k = f.k;
  inputs.terms = summarize_family(sim.truth, family, k0);
  inputs.provenance = "user";
  const SelectionBound bound = selection_bound(inputs);
  const Json j = bound_to_json(inputs, bound);
  if (!f.out.empty()) {
    const fs::path dir = make_out_dir(f.out);
    write_json(dir / "bound.json", j);
    ExperimentConfig config = to_config(f, {f.k}, {f.seed});
    Json echo = config_to_json(config);
    echo["sigma2"] = *f.sigma2;
    echo["M"] = f.M ? Json(*f.M) : Json(nullptr);
    echo["reference"] = f.reference;
    write_json(dir / "manifest.json", make_manifest("bound", echo, {f.seed}));
  }
  emit(out, j);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"k-nearest-neighbor graph scan estimators", "knnscan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  RunFlags f;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--workers", f.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
  };
  auto add_k = [&](CLI::App* cmd) {
    cmd->add_option("--k", f.k, "Neighborhood size")->required()->check(CLI::PositiveNumber);
  };
  auto add_noise = [&](CLI::App* cmd) {
    cmd->add_option("--noise", f.noise, "gaussian:SIGMA or uniform:M")
        ->capture_default_str();
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", f.seed, "Seed for the graph and noise")->capture_default_str();
  };
  std::string sweep_adversary = "none";
  std::string game_adversary = "multistep";
  auto add_experiment = [&](CLI::App* cmd, std::string& adversary) {
    add_source_flags(cmd, f.source);
    add_noise(cmd);
    add_common(cmd);
    cmd->add_option("--attrs", f.attrs, "Not supported; experiments draw noise");
    cmd->add_option("--k", f.k_values, "Neighborhood sizes")->required()->expected(1, -1);
    cmd->add_option("--seeds", f.seeds, "Explicit seed list")->expected(1, -1);
    cmd->add_option("--num-seeds", f.num_seeds, "Use seeds first-seed .. first-seed+N-1");
    cmd->add_option("--first-seed", f.first_seed, "First seed for --num-seeds");
    cmd->add_option("--mode", f.mode, "sub or super")->capture_default_str();
    cmd->add_option("--adversary", adversary, "none, weak, strong or multistep")
        ->capture_default_str();
    cmd->add_option("--influence", f.influence, "Activity set by the adversary")
        ->capture_default_str();
    cmd->add_option("--max-steps", f.max_steps, "Maximum adversary moves per game")
        ->capture_default_str();
    cmd->add_option("--bins", f.bins, "Histogram bins")->capture_default_str();
    cmd->add_flag("--keep-graph", f.keep_graph,
                  "Reuse the first seed's graph and redraw only the noise");
    cmd->add_option("--out", f.out, "Output directory")->required();
  };

  auto* generate = app.add_subcommand("generate", "Generate a two-subgraph graph");
  add_source_flags(generate, f.source);
  add_noise(generate);
  add_seed(generate);
  generate->add_option("--out", f.out, "Output directory")->required();

  auto* estimate = app.add_subcommand("estimate", "Run one k-NN scan");
  add_source_flags(estimate, f.source);
  add_noise(estimate);
  add_seed(estimate);
  add_common(estimate);
  add_k(estimate);
  estimate->add_option("--attrs", f.attrs, "vertex,value CSV of observations");
  estimate->add_option("--mode", f.mode, "sub or super")->capture_default_str();
  estimate->add_flag("--averages", f.dump_averages, "Also write per-root averages");
  estimate->add_option("--out", f.out, "Output directory");

  auto* crawler = app.add_subcommand("crawler", "Estimate the noise CDF and variance");
  add_source_flags(crawler, f.source);
  add_noise(crawler);
  add_seed(crawler);
  add_common(crawler);
  add_k(crawler);
  crawler->add_option("--attrs", f.attrs, "vertex,value CSV of observations");
  crawler->add_option("--out", f.out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo over seeds and k values");
  add_experiment(sweep, sweep_adversary);

  auto* game = app.add_subcommand("game", "Multi-step adversary games");
  add_experiment(game, game_adversary);

  auto* bound = app.add_subcommand("bound", "Evaluate the selection-failure bound");
  add_source_flags(bound, f.source);
  add_seed(bound);
  add_common(bound);
  add_k(bound);
  bound->add_option("--sigma2", f.sigma2, "Noise variance");
  bound->add_option("--M", f.M, "Almost-sure noise bound |eps| <= M");
  bound->add_option("--reference", f.reference,
                    "Root label of the reference neighborhood (default: first "
                    "all-inactive one)");
  bound->add_option("--out", f.out, "Output directory");

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", f.config, "Experiment config")->required();
  run->add_option("--out", f.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(f, out);
    if (*estimate) return cmd_estimate(f, out);
    if (*crawler) return cmd_crawler(f, out);
    if (*sweep) {
      f.adversary = sweep_adversary;
      return cmd_sweep("sweep", f, out);
    }
    if (*game) {
      f.adversary = game_adversary;
      return cmd_sweep("game", f, out);
    }
    if (*bound) return cmd_bound(f, out);
    if (*run) return cmd_run(f, out);
  } catch (const UsageError& e) {
    err << "knnscan: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "knnscan: io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FamilyError& e) {
    err << "knnscan: neighborhood error: " << e.what() << '\n';
    return kExitFamily;
  } catch (const ValidationError& e) {
    err << "knnscan: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "knnscan: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "knnscan: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace knnscan
