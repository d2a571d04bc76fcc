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

#include "knnscan/graph.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "knnscan/error.hpp"

namespace knnscan {
namespace {

using Edge = std::pair<VertexId, VertexId>;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.precision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           (line[i] == ' ' || line[i] == '\t' || line[i] == ',' ||
            line[i] == '\r'))
      ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != ',' && line[i] != '\r')
      ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && !buf.empty();
}

}  // namespace

AttributedGraph AttributedGraph::from_edges(std::size_t n,
                                            std::span<const Edge> input,
                                            std::vector<std::string> labels,
                                            const EdgeListOptions& options) {
  if (!labels.empty() && labels.size() != n)
    throw ValidationError("label count does not match vertex count");
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
  }

  IngestReport report;
  report.edges_read = input.size();
  std::vector<Edge> edges;
  edges.reserve(input.size());
  for (auto [u, v] : input) {
    if (u >= n || v >= n)
      throw ValidationError("edge endpoint out of range [0, " +
                            std::to_string(n) + ")");
    if (u == v) {
      ++report.loops_dropped;
      continue;
    }
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }

  std::sort(edges.begin(), edges.end());
  const auto uniq_end = std::unique(edges.begin(), edges.end());
  const auto dups = static_cast<std::size_t>(edges.end() - uniq_end);
  if (dups > 0 && options.reject_duplicates)
    throw ValidationError("duplicate edge " + labels[uniq_end->first] + " " +
                          labels[uniq_end->second]);
  report.duplicates_dropped = dups;
  edges.erase(uniq_end, edges.end());

  auto topo = std::make_shared<Topology>();
  topo->offsets.assign(n + 1, 0);
  for (auto [u, v] : edges) {
    ++topo->offsets[u + 1];
    ++topo->offsets[v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) topo->offsets[v + 1] += topo->offsets[v];
  topo->neighbors.resize(topo->offsets[n]);
  std::vector<std::size_t> fill(topo->offsets.begin(), topo->offsets.end() - 1);
  for (auto [u, v] : edges) {
    topo->neighbors[fill[u]++] = v;
    topo->neighbors[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(topo->neighbors.begin() + topo->offsets[v],
              topo->neighbors.begin() + topo->offsets[v + 1]);

  topo->index.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!topo->index.emplace(labels[v], static_cast<VertexId>(v)).second)
      throw ValidationError("duplicate vertex label '" + labels[v] + "'");
  }
  topo->labels = std::move(labels);
  topo->report = report;

  AttributedGraph g;
  g.topo_ = std::move(topo);
  return g;
}

bool AttributedGraph::has_edge(VertexId u, VertexId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

VertexId AttributedGraph::id_of(const std::string& label) const {
  const auto it = topo_->index.find(label);
  if (it == topo_->index.end())
    throw ValidationError("unknown vertex label '" + label + "'");
  return it->second;
}

std::span<const double> AttributedGraph::observed() const {
  if (!observed_) throw ValidationError("observations are not set");
  return *observed_;
}

AttributedGraph AttributedGraph::with_observations(std::vector<double> x) const {
  if (x.size() != num_vertices())
    throw ValidationError("observation vector has length " +
                          std::to_string(x.size()) + ", graph has " +
                          std::to_string(num_vertices()) + " vertices");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]))
      throw ValidationError("non-finite observation at index " +
                            std::to_string(i));
  }
  AttributedGraph g = *this;
  g.observed_ = std::make_shared<const std::vector<double>>(std::move(x));
  return g;
}

std::vector<Edge> AttributedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (VertexId u = 0; u < num_vertices(); ++u)
    for (VertexId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::size_t GroundTruth::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

void GroundTruth::validate() const {
  if (!(b > a))
    throw ValidationError("ground truth requires b > a");
  if (activity.size() != active.size())
    throw ValidationError("activity and active-flag vectors differ in length");
  for (std::size_t v = 0; v < activity.size(); ++v) {
    if (active[v] ? !(activity[v] >= b) : activity[v] != a)
      throw ValidationError("vertex " + std::to_string(v) +
                            " violates the activity separation");
  }
}

GroundTruth make_truth(double a, double b, double active_level,
                       std::vector<char> active) {
  GroundTruth t;
  t.a = a;
  t.b = b;
  t.activity.resize(active.size());
  for (std::size_t v = 0; v < active.size(); ++v)
    t.activity[v] = active[v] ? active_level : a;
  t.active = std::move(active);
  t.validate();
  return t;
}

AttributedGraph parse_edge_list(const std::string& text,
                                const EdgeListOptions& options) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> index;
  std::vector<Edge> edges;

  auto intern = [&](std::string_view s) {
    auto [it, inserted] =
        index.emplace(std::string(s), static_cast<VertexId>(labels.size()));
    if (inserted) labels.emplace_back(s);
    return it->second;
  };

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos)
      body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != 2)
      throw ParseError("expected two vertex labels, got " +
                           std::to_string(fields.size()) + " fields",
                       lineno);
    const VertexId u = intern(fields[0]);
    const VertexId v = intern(fields[1]);
    edges.emplace_back(u, v);
  }
  if (labels.empty()) throw ValidationError("edge list is empty");
  const std::size_t n = labels.size();

  // Dense ids follow label order, not line order: numerically when every
  // label is an unsigned integer, lexicographically otherwise.
  const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
    return s.size() <= 19 &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  });
  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), VertexId{0});
  std::sort(order.begin(), order.end(), [&](VertexId l, VertexId r) {
    const std::string& a = labels[l];
    const std::string& b = labels[r];
    if (numeric) {
      const auto x = std::stoull(a);
      const auto y = std::stoull(b);
      if (x != y) return x < y;
    }
    return a < b;
  });
  std::vector<VertexId> rank(n);
  std::vector<std::string> sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    rank[order[i]] = static_cast<VertexId>(i);
    sorted[i] = std::move(labels[order[i]]);
  }
  for (auto& [u, v] : edges) {
    u = rank[u];
    v = rank[v];
  }
  return AttributedGraph::from_edges(n, edges, std::move(sorted), options);
}

AttributedGraph load_edge_list(const std::filesystem::path& path,
                               const EdgeListOptions& options) {
  return parse_edge_list(read_file(path), options);
}

void write_edge_list(const AttributedGraph& g,
                     const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// GML subset

namespace {

struct GmlToken {
  enum Kind { kWord, kString, kOpen, kClose } kind;
  std::string text;
  std::size_t line;
};

std::vector<GmlToken> tokenize_gml(const std::string& text) {
  std::vector<GmlToken> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '[') {
      out.push_back({GmlToken::kOpen, "[", line});
      ++i;
    } else if (c == ']') {
      out.push_back({GmlToken::kClose, "]", line});
      ++i;
    } else if (c == '"') {
      const std::size_t start_line = line;
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"') {
        if (text[j] == '\n') ++line;
        ++j;
      }
      if (j >= text.size()) throw ParseError("unterminated GML string", start_line);
      out.push_back({GmlToken::kString, text.substr(i + 1, j - i - 1), start_line});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() &&
             !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '[' && text[j] != ']' && text[j] != '"')
        ++j;
      out.push_back({GmlToken::kWord, text.substr(i, j - i), line});
      i = j;
    }
  }
  return out;
}

class GmlReader {
 public:
  explicit GmlReader(std::vector<GmlToken> tokens) : toks_(std::move(tokens)) {}

  GmlGraph read() {
    bool seen_graph = false;
    while (pos_ < toks_.size()) {
      const GmlToken& key = expect_key();
      if (key.text == "graph") {
        if (seen_graph) throw ParseError("more than one GML graph", key.line);
        expect_open(key);
        read_graph();
        seen_graph = true;
      } else {
        skip_scalar(key);
      }
    }
    if (!seen_graph) throw ValidationError("GML input has no 'graph' block");
    if (node_ids_.empty()) throw ValidationError("GML graph has no nodes");

    std::vector<std::string> labels;
    labels.reserve(node_ids_.size());
    for (const auto& id : node_ids_) labels.push_back(id);
    std::vector<Edge> edges;
    edges.reserve(raw_edges_.size());
    for (const auto& [s, t, line] : raw_edges_) {
      const auto si = index_.find(s);
      const auto ti = index_.find(t);
      if (si == index_.end())
        throw ParseError("edge source '" + s + "' is not a node id", line);
      if (ti == index_.end())
        throw ParseError("edge target '" + t + "' is not a node id", line);
      edges.emplace_back(si->second, ti->second);
    }
    const std::size_t n = labels.size();
    GmlGraph out;
    out.graph = AttributedGraph::from_edges(n, edges, std::move(labels));
    out.value = std::move(values_);
    return out;
  }

 private:
  const GmlToken& next(std::size_t line) {
    if (pos_ >= toks_.size()) throw ParseError("unexpected end of GML input", line);
    return toks_[pos_++];
  }
  const GmlToken& expect_key() {
    const GmlToken& t = next(toks_.empty() ? 1 : toks_.back().line);
    if (t.kind != GmlToken::kWord)
      throw ParseError("expected a GML key, got '" + t.text + "'", t.line);
    return t;
  }
  void expect_open(const GmlToken& key) {
    const GmlToken& t = next(key.line);
    if (t.kind != GmlToken::kOpen)
      throw ParseError("expected '[' after '" + key.text + "'", t.line);
  }
  bool at_close() const {
    return pos_ < toks_.size() && toks_[pos_].kind == GmlToken::kClose;
  }
  const GmlToken& scalar_value(const GmlToken& key) {
    const GmlToken& v = next(key.line);
    if (v.kind == GmlToken::kOpen)
      throw ParseError("unsupported GML construct: nested list '" + key.text + "'",
                       key.line);
    if (v.kind == GmlToken::kClose)
      throw ParseError("missing value for GML key '" + key.text + "'", key.line);
    return v;
  }
  void skip_scalar(const GmlToken& key) { scalar_value(key); }

  void read_graph() {
    std::size_t node_ordinal = 0;
    for (;;) {
      if (at_close()) {
        ++pos_;
        return;
      }
      const GmlToken& key = expect_key();
      if (key.text == "node") {
        expect_open(key);
        read_node(node_ordinal++, key.line);
      } else if (key.text == "edge") {
        expect_open(key);
        read_edge(key.line);
      } else {
        skip_scalar(key);
      }
    }
  }

  void read_node(std::size_t ordinal, std::size_t line) {
    std::string id;
    bool has_id = false;
    int value = 0;
    for (;;) {
      if (at_close()) {
        ++pos_;
        break;
      }
      const GmlToken& key = expect_key();
      const GmlToken& v = scalar_value(key);
      if (key.text == "id") {
        id = v.text;
        has_id = true;
      } else if (key.text == "value") {
        double d;
        if (!parse_double(v.text, d) || d != std::floor(d))
          throw ParseError("node value must be an integer", v.line);
        value = static_cast<int>(d);
      }
    }
    if (!has_id)
      throw ParseError("GML node #" + std::to_string(ordinal) + " has no id", line);
    if (!index_.emplace(id, static_cast<VertexId>(node_ids_.size())).second)
      throw ParseError("duplicate GML node id '" + id + "'", line);
    node_ids_.push_back(id);
    values_.push_back(value);
  }

  void read_edge(std::size_t line) {
    std::string source, target;
    bool has_s = false, has_t = false;
    for (;;) {
      if (at_close()) {
        ++pos_;
        break;
      }
      const GmlToken& key = expect_key();
      const GmlToken& v = scalar_value(key);
      if (key.text == "source") {
        source = v.text;
        has_s = true;
      } else if (key.text == "target") {
        target = v.text;
        has_t = true;
      }
    }
    if (!has_s || !has_t)
      throw ParseError("GML edge needs both source and target", line);
    raw_edges_.push_back({source, target, line});
  }

  struct RawEdge {
    std::string source, target;
    std::size_t line;
  };

  std::vector<GmlToken> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> node_ids_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<int> values_;
  std::vector<RawEdge> raw_edges_;
};

}  // namespace

GmlGraph parse_gml(const std::string& text) {
  return GmlReader(tokenize_gml(text)).read();
}

GmlGraph load_gml(const std::filesystem::path& path) {
  return parse_gml(read_file(path));
}

// ---------------------------------------------------------------------------
// Attribute CSV

std::vector<double> load_attributes(const AttributedGraph& g,
                                    const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  const std::size_t n = g.num_vertices();
  std::vector<double> values(n, 0.0);
  std::vector<char> seen(n, 0);
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!header) {
      if (body != "vertex,value")
        throw ParseError("attribute file must start with header 'vertex,value'",
                         lineno);
      header = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected 'vertex,value'", lineno);
    const std::string label(trim(body.substr(0, comma)));
    double x;
    if (!parse_double(trim(body.substr(comma + 1)), x))
      throw ParseError("value is not a number", lineno);
    if (!std::isfinite(x)) throw ParseError("value is not finite", lineno);
    if (!g.has_label(label))
      throw ParseError("unknown vertex '" + label + "'", lineno);
    const VertexId v = g.id_of(label);
    if (seen[v]) throw ParseError("vertex '" + label + "' listed twice", lineno);
    seen[v] = 1;
    values[v] = x;
    ++count;
  }
  if (!header) throw ValidationError("attribute file is empty");
  if (count != n) {
    const auto missing = std::find(seen.begin(), seen.end(), 0) - seen.begin();
    throw ValidationError("attribute file misses vertex '" +
                          g.label(static_cast<VertexId>(missing)) + "'");
  }
  return values;
}

void write_attributes(const AttributedGraph& g, std::span<const double> values,
                      const std::filesystem::path& path) {
  if (values.size() != g.num_vertices())
    throw ValidationError("value vector does not match vertex count");
  auto out = open_for_write(path);
  out << "vertex,value\n";
  for (VertexId v = 0; v < values.size(); ++v)
    out << g.label(v) << ',' << values[v] << '\n';
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace knnscan
