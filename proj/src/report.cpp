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

#include "knnscan/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "knnscan/error.hpp"

namespace knnscan {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string graph_kind_name(GraphSource::Kind kind) {
  switch (kind) {
    case GraphSource::Kind::kTwoSubgraph:
      return "two_subgraph";
    case GraphSource::Kind::kEdgeList:
      return "edge_list";
    case GraphSource::Kind::kGml:
      return "gml";
  }
  return "two_subgraph";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Json scan_to_json(const AttributedGraph& g, const ScanResult& result) {
  Json j;
  j["k"] = result.k;
  j["mode"] = std::string(to_string(result.mode));
  j["root"] = result.selected.root;
  j["root_label"] = g.label(result.selected.root);
  j["estimate"] = result.estimate;
  j["ties"] = result.ties;
  j["skipped_count"] = result.skipped_count;
  j["members"] = result.selected.sorted_members();
  return j;
}

Json bound_to_json(const BoundInputs& inputs, const SelectionBound& bound) {
  Json j;
  j["k"] = inputs.k;
  j["a"] = inputs.a;
  j["b"] = inputs.b;
  j["sigma2"] = inputs.sigma2;
  j["M"] = inputs.M ? Json(*inputs.M) : Json(nullptr);
  j["provenance"] = inputs.provenance;
  j["terms"] = inputs.terms.size();
  j["raw_sum"] = bound.raw_sum;
  j["clamped"] = bound.clamped;
  j["degenerate_terms"] = bound.degenerate_terms;
  j["excluded_terms"] = bound.excluded_terms;
  Json top = Json::array();
  for (const auto& t : bound.top_terms) top.push_back({{"root", t.root}, {"value", t.value}});
  j["per_term_top10"] = std::move(top);
  return j;
}

Json crawler_to_json(const ScanResult& scan, const CrawlerEstimate& est) {
  Json j;
  j["k"] = scan.k;
  j["root"] = scan.selected.root;
  j["estimate"] = scan.estimate;
  j["sigma2_hat"] = est.sigma2_hat;
  j["ecdf_points"] = est.ecdf.size();
  return j;
}

Json stats_to_json(const SampleStats& s) {
  return {{"count", s.count}, {"mean", s.mean},  {"variance", s.variance},
          {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
}

Json summary_to_json(const MonteCarloSummary& summary, AdversaryKind adversary) {
  Json per_k = Json::array();
  for (const auto& ks : summary.per_k) {
    Json j;
    j["k"] = ks.k;
    j["estimate"] = stats_to_json(ks.estimate);
    if (adversary != AdversaryKind::kNone) {
      j["final_estimate"] = stats_to_json(ks.final_estimate);
      std::size_t active_free = 0;
      for (const auto& o : ks.outcomes) active_free += o.active_in_selected == 0 ? 1 : 0;
      j["pre_attack_active_free"] = active_free;
    }
    if (adversary == AdversaryKind::kMultiStep) {
      const auto& c = ks.winning_step_counts;
      j["winning_steps"] = {{"0", c[0]}, {"1", c[1]}, {"2", c[2]}, {"3", c[3]}, {">=4", c[4]}};
      j["games_lost"] = ks.games_lost;
    }
    per_k.push_back(std::move(j));
  }
  return {{"adversary", std::string(to_string(adversary))}, {"per_k", per_k}};
}

Json noise_to_json(const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseKind::kGaussian:
      return {{"kind", "gaussian"}, {"sigma", noise.sigma}};
    case NoiseKind::kUniform:
      return {{"kind", "uniform"}, {"bound", noise.bound}};
    case NoiseKind::kDiscrete:
      return {{"kind", "discrete"},
              {"support", noise.support},
              {"probabilities", noise.probabilities}};
  }
  return {};
}

NoiseModel noise_from_json(const Json& j) {
  if (j.is_string()) return parse_noise_spec(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("noise must be a string or an object");
  const auto kind = get_or<std::string>(j, "kind", "gaussian");
  if (kind == "gaussian") return NoiseModel::gaussian(get_or(j, "sigma", 1.0));
  if (kind == "uniform") return NoiseModel::uniform(get_or(j, "bound", 1.0));
  if (kind == "discrete")
    return NoiseModel::discrete(get_or<std::vector<double>>(j, "support", {}),
                                get_or<std::vector<double>>(j, "probabilities", {}));
  throw ValidationError("unknown noise kind '" + kind + "'");
}

Json config_to_json(const ExperimentConfig& c) {
  Json graph;
  graph["kind"] = graph_kind_name(c.graph.kind);
  if (c.graph.kind == GraphSource::Kind::kTwoSubgraph) {
    const auto& s = c.graph.spec;
    graph["n_big"] = s.n_big;
    graph["n_small"] = s.n_small;
    graph["out_degree"] = s.out_degree;
    graph["bridges"] = s.bridges;
    graph["a"] = s.a;
    graph["b"] = s.b;
    graph["active_level"] = s.active_level;
    graph["active_probability"] = s.active_probability;
  } else {
    graph["path"] = c.graph.path;
    if (c.graph.kind == GraphSource::Kind::kEdgeList)
      graph["truth"] = c.graph.truth_path;
    else
      graph["active_label"] = c.graph.active_label;
    graph["a"] = c.graph.a;
    graph["b"] = c.graph.b;
    graph["active_level"] = c.graph.active_level;
  }
  Json j;
  j["graph"] = std::move(graph);
  j["redraw_graph"] = c.redraw_graph;
  j["noise"] = noise_to_json(c.noise);
  j["k"] = c.k_values;
  j["seeds"] = c.seeds;
  j["adversary"] = {{"kind", std::string(to_string(c.adversary.kind))},
                    {"influence", c.adversary.influence_value},
                    {"max_steps", c.adversary.max_steps}};
  j["mode"] = std::string(to_string(c.mode));
  j["workers"] = c.workers;
  j["histogram_bins"] = c.histogram_bins;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("graph")) {
    const Json& g = j.at("graph");
    const auto kind = get_or<std::string>(g, "kind", "two_subgraph");
    if (kind == "two_subgraph") {
      auto& s = c.graph.spec;
      c.graph.kind = GraphSource::Kind::kTwoSubgraph;
      s.n_big = get_or(g, "n_big", s.n_big);
      s.n_small = get_or(g, "n_small", s.n_small);
      s.out_degree = get_or(g, "out_degree", s.out_degree);
      s.bridges = get_or(g, "bridges", s.bridges);
      s.a = get_or(g, "a", s.a);
      s.b = get_or(g, "b", s.b);
      s.active_level = get_or(g, "active_level", s.active_level);
      s.active_probability = get_or(g, "active_probability", s.active_probability);
    } else if (kind == "edge_list" || kind == "gml") {
      c.graph.kind = kind == "gml" ? GraphSource::Kind::kGml : GraphSource::Kind::kEdgeList;
      c.graph.path = get_or<std::string>(g, "path", "");
      c.graph.truth_path = get_or<std::string>(g, "truth", "");
      c.graph.active_label = get_or(g, "active_label", c.graph.active_label);
      c.graph.a = get_or(g, "a", c.graph.a);
      c.graph.b = get_or(g, "b", c.graph.b);
      c.graph.active_level = get_or(g, "active_level", c.graph.active_level);
      if (c.graph.path.empty()) throw ValidationError("graph.path is required");
    } else {
      throw ValidationError("unknown graph kind '" + kind + "'");
    }
  }
  c.redraw_graph = get_or(j, "redraw_graph", c.redraw_graph);
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  c.k_values = get_or<std::vector<std::size_t>>(j, "k", {});
  if (j.contains("seeds")) {
    c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
  } else {
    const auto count = get_or<std::size_t>(j, "num_seeds", 0);
    const auto first = get_or<std::uint64_t>(j, "first_seed", 1);
    for (std::size_t i = 0; i < count; ++i) c.seeds.push_back(first + i);
  }
  if (j.contains("adversary")) {
    const Json& a = j.at("adversary");
    if (a.is_string()) {
      c.adversary.kind = parse_adversary(a.get<std::string>());
    } else {
      c.adversary.kind = parse_adversary(get_or<std::string>(a, "kind", "none"));
      c.adversary.influence_value = get_or(a, "influence", c.adversary.influence_value);
      c.adversary.max_steps = get_or(a, "max_steps", c.adversary.max_steps);
    }
  }
  c.mode = parse_scan_mode(get_or<std::string>(j, "mode", "sublevel"));
  c.workers = get_or(j, "workers", c.workers);
  c.histogram_bins = get_or(j, "histogram_bins", c.histogram_bins);
  if (c.workers == 0) throw ValidationError("workers must be >= 1");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

Json make_manifest(const std::string& command, const Json& config,
                   const std::vector<std::uint64_t>& seeds) {
  Json j;
  j["tool"] = "knnscan";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config;
  j["seeds"] = seeds;
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_out(out, path);
}

void write_averages_csv(const std::filesystem::path& path,
                        const AttributedGraph& g, const ScanResult& result) {
  auto out = open_out(path);
  out << "root,label,average\n";
  for (std::size_t v = 0; v < result.per_vertex_avg.size(); ++v) {
    const double a = result.per_vertex_avg[v];
    out << v << ',' << g.label(static_cast<VertexId>(v)) << ','
        << (std::isfinite(a) ? format_double(a) : std::string()) << '\n';
  }
  close_out(out, path);
}

void write_ecdf_csv(const std::filesystem::path& path, const Ecdf& ecdf) {
  auto out = open_out(path);
  out << "t,F\n";
  const auto pts = ecdf.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i + 1 < pts.size() && pts[i + 1] == pts[i]) continue;
    out << format_double(pts[i]) << ',' << format_double(ecdf(pts[i])) << '\n';
  }
  close_out(out, path);
}

void write_outcomes_csv(const std::filesystem::path& path,
                        const MonteCarloSummary& summary) {
  auto out = open_out(path);
  out << "k,seed,root,estimate,active_in_selected,final_estimate,winning_step,steps\n";
  for (const auto& ks : summary.per_k) {
    for (const auto& o : ks.outcomes) {
      out << ks.k << ',' << o.seed << ',' << o.root << ',' << format_double(o.estimate)
          << ',' << o.active_in_selected << ',' << format_double(o.final_estimate) << ','
          << (o.winning_step ? std::to_string(*o.winning_step) : std::string()) << ','
          << o.steps_played << '\n';
    }
  }
  close_out(out, path);
}

void write_histogram_csv(const std::filesystem::path& path,
                         const MonteCarloSummary& summary) {
  auto out = open_out(path);
  out << "k,bin,lo,hi,count\n";
  for (const auto& ks : summary.per_k) {
    const auto& h = ks.histogram;
    const std::size_t bins = h.counts.size();
    for (std::size_t b = 0; b < bins; ++b) {
      const double width = (h.hi - h.lo) / static_cast<double>(bins);
      const double lo = h.lo + width * static_cast<double>(b);
      const double hi = b + 1 == bins ? h.hi : lo + width;
      out << ks.k << ',' << b << ',' << format_double(lo) << ',' << format_double(hi)
          << ',' << h.counts[b] << '\n';
    }
  }
  close_out(out, path);
}

}  // namespace knnscan
