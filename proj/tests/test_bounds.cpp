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
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "knnscan/bounds.hpp"
#include "knnscan/error.hpp"
#include "oracles.hpp"

using namespace knnscan;

namespace {

using Edges = std::vector<std::pair<VertexId, VertexId>>;

AttributedGraph cycle(std::size_t n) {
  Edges e;
  for (VertexId v = 0; v < n; ++v) e.push_back({v, static_cast<VertexId>((v + 1) % n)});
  return AttributedGraph::from_edges(n, e);
}

// Monte Carlo slack: four binomial standard errors plus a floor.
double slack(double p, int draws) {
  return 4.0 * std::sqrt(std::max(p * (1.0 - p), 1e-4) / draws) + 1e-3;
}

}  // namespace

TEST_CASE("signal margin by hand") {
  CHECK(r_functional(0, 1.0, 0.0) == 0.0);
  CHECK(r_functional(3, 2.0, 0.5) == 6.5);
  CHECK(r_functional(2, 0.25, 4.0) == 4.5);
  CHECK_THROWS_AS(r_functional(1, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(r_functional(1, 1.0, -0.1), ValidationError);
}

TEST_CASE("Bernstein tail: range, monotonicity, small-t limit") {
  double prev = 1.0;
  for (int i = 1; i <= 200; ++i) {
    const double t = 0.05 * i;
    const double p = bernstein_tail(t, 2.0, 1.5);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(p <= prev);
    prev = p;
  }
  // Larger variance or larger M loosens the bound.
  CHECK(bernstein_tail(2.0, 3.0, 1.0) > bernstein_tail(2.0, 2.0, 1.0));
  CHECK(bernstein_tail(2.0, 2.0, 2.0) > bernstein_tail(2.0, 2.0, 1.0));
  CHECK(bernstein_tail(1e-9, 1.0, 1.0) == doctest::Approx(1.0));
  // The log form stays finite where the bound underflows.
  CHECK(bernstein_tail(1e4, 1.0, 1.0) == std::numeric_limits<double>::min());
  CHECK(std::isfinite(bernstein_log_tail(1e4, 1.0, 1.0)));
  CHECK_THROWS_AS(bernstein_tail(0.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(bernstein_tail(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("Bernstein tail dominates the empirical tail of bounded sums") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 10;
  const int draws = 50000;
  std::vector<double> sums(draws);
  for (auto& s : sums) {
    s = 0.0;
    for (int i = 0; i < n; ++i) s += u(rng);
  }
  const double sum_var = n / 3.0;
  for (int j = 1; j <= 20; ++j) {
    const double t = 0.4 * j;
    int over = 0;
    for (double s : sums) over += s > t ? 1 : 0;
    const double freq = static_cast<double>(over) / draws;
    const double bound = bernstein_tail(t, sum_var, 1.0);
    CHECK(freq <= bound + slack(bound, draws));
  }
}

TEST_CASE("selection bound: hand value") {
  // One competitor with R = 24, sigma^2 = 1, M = 3, |K \ K0| = 3.
  BoundInputs in;
  in.a = 0.0;
  in.b = 8.0;
  in.sigma2 = 1.0;
  in.M = 3.0;
  in.k = 3;
  in.terms = {{7, 3, 0.0, 3}};
  const auto out = selection_bound(in);
  CHECK(out.raw_sum == doctest::Approx(std::exp(-1728.0 / 324.0)).epsilon(1e-12));
  CHECK(out.raw_sum == doctest::Approx(4.84e-3).epsilon(1e-2));
  REQUIRE(out.top_terms.size() == 1);
  CHECK(out.top_terms[0].root == 7);
}

TEST_CASE("selection bound: degenerate, excluded and invalid terms") {
  BoundInputs in;
  in.b = 1.0;
  in.sigma2 = 1.0;
  in.M = 1.0;
  in.terms = {{0, 0, 0.0, 0}, {1, 0, 0.0, 2}, {2, 1, 0.0, 2}};
  const auto out = selection_bound(in);
  CHECK(out.excluded_terms == 1);
  CHECK(out.degenerate_terms == 1);
  CHECK(out.raw_sum > 1.0);
  CHECK(out.clamped == 1.0);
  CHECK(out.top_terms.front().root == 1);

  in.terms = {{3, 3, 0.0, 2}};
  CHECK_THROWS_AS(selection_bound(in), ValidationError);

  in.terms = {{1, 1, 0.0, 2}};
  in.M.reset();
  bool mentions_m = false;
  try {
    selection_bound(in);
  } catch (const ValidationError& e) {
    mentions_m = std::string(e.what()).find("M") != std::string::npos;
  }
  CHECK(mentions_m);
}

TEST_CASE("selection bound terms shrink with signal and grow with noise") {
  auto term = [](std::size_t s1, double excess, std::size_t d, double sigma2, double M) {
    BoundInputs in;
    in.b = 1.0;
    in.sigma2 = sigma2;
    in.M = M;
    in.terms = {{0, s1, excess, d}};
    return selection_bound(in).raw_sum;
  };
  for (std::size_t d = 1; d <= 8; ++d) {
    for (std::size_t s1 = 1; s1 < d; ++s1) {
      CHECK(term(s1 + 1, 0.0, d, 1.0, 1.0) <= term(s1, 0.0, d, 1.0, 1.0));
      CHECK(term(s1, 0.5, d, 1.0, 1.0) <= term(s1, 0.0, d, 1.0, 1.0));
      CHECK(term(s1, 0.0, d, 2.0, 1.0) >= term(s1, 0.0, d, 1.0, 1.0));
      CHECK(term(s1, 0.0, d, 1.0, 2.0) >= term(s1, 0.0, d, 1.0, 1.0));
      CHECK(term(s1, 0.0, d + 1, 1.0, 1.0) >= term(s1, 0.0, d, 1.0, 1.0));
    }
  }
}

TEST_CASE("selection bound dominates simulated selection frequencies") {
  // n = 20 cycle, k = 3, a run of active vertices; uniform noise on [-M, M].
  const std::size_t n = 20, k = 3;
  const auto g = cycle(n);
  std::vector<char> active(n, 0);
  for (VertexId v = 8; v < 14; ++v) active[v] = 1;
  auto truth = make_truth(0.0, 1.0, 1.0, active);
  truth.activity[10] = 1.5;
  const auto check = check_assumption1(g, truth, k);
  REQUIRE(check.holds);
  const auto fam = build_family(g, k);
  const auto terms = summarize_family(truth, fam, check.reference_set);

  const double M = 1.5;
  BoundInputs in;
  in.a = 0.0;
  in.b = 1.0;
  in.sigma2 = M * M / 3.0;
  in.M = M;
  in.k = k;
  in.terms = terms;
  const auto bound = selection_bound(in);

  std::vector<double> per_term(n, 0.0);
  for (const auto& t : terms) {
    BoundInputs one = in;
    one.terms = {t};
    per_term[t.root] = selection_bound(one).raw_sum;
  }

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> eps(-M, M);
  const int draws = 20000;
  std::vector<int> undercut(n, 0);
  int any = 0;
  std::vector<double> x(n);
  for (int d = 0; d < draws; ++d) {
    for (VertexId v = 0; v < n; ++v) x[v] = truth.activity[v] + eps(rng);
    double s0 = 0.0;
    for (VertexId v : check.reference_set) s0 += x[v];
    bool hit = false;
    for (const auto& nb : fam.by_root) {
      const std::set<VertexId> K(nb->members.begin(), nb->members.end());
      bool same = true;
      for (VertexId v : check.reference_set) same = same && K.count(v) == 1;
      if (same) continue;
      double s = 0.0;
      for (VertexId v : K) s += x[v];
      if (s < s0) {
        ++undercut[nb->root];
        hit = true;
      }
    }
    any += hit ? 1 : 0;
  }
  bool nontrivial = false;
  for (const auto& t : terms) {
    if (t.overlap_defect == 0) continue;
    const double freq = static_cast<double>(undercut[t.root]) / draws;
    CHECK(freq <= per_term[t.root] + slack(per_term[t.root], draws));
    nontrivial = nontrivial || (per_term[t.root] > 0.01 && per_term[t.root] < 1.0);
  }
  CHECK(nontrivial);
  const double freq_any = static_cast<double>(any) / draws;
  CHECK(freq_any <= bound.raw_sum + slack(std::min(bound.raw_sum, 1.0), draws));
}

TEST_CASE("summarized terms never have more actives than |K \\ K0|") {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6 + rng() % 25;
    const auto edges = oracle::random_graph(n, 0.2, rng);
    const auto g = AttributedGraph::from_edges(n, edges);
    std::vector<char> active(n);
    for (auto& a : active) a = rng() % 3 == 0;
    const auto truth = make_truth(0.0, 1.0, 2.0, active);
    const std::size_t k = 1 + rng() % 4;
    const auto c = check_assumption1(g, truth, k);
    if (!c.holds) continue;
    NeighborhoodFamily fam;
    try {
      fam = build_family(g, k);
    } catch (const FamilyError&) {
      continue;
    }
    for (const auto& t : summarize_family(truth, fam, c.reference_set)) {
      REQUIRE(t.active_count <= t.overlap_defect);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("pairing differences") {
  CHECK(pairing_deltas(std::vector<double>{1, 2, 3, 4}) == std::vector<double>{-2, -2});
  CHECK_THROWS_AS(pairing_deltas(std::vector<double>{1, 2, 3}), ValidationError);

  std::mt19937_64 rng(12);
  std::normal_distribution<double> z(0.0, 1.5);
  std::vector<double> eps(40000);
  for (auto& e : eps) e = z(rng);
  const auto d = pairing_deltas(eps);
  double s = 0.0, s2 = 0.0;
  for (double v : d) {
    s += v;
    s2 += v * v;
  }
  const double mean = s / d.size();
  const double var = s2 / d.size() - mean * mean;
  // Var of the difference is 2 sigma^2 = 4.5.
  CHECK(var == doctest::Approx(4.5).epsilon(0.05));
  std::vector<double> neg(d);
  for (auto& v : neg) v = -v;
  // Symmetry: KS distance between D and -D is small (critical value about
  // 1.95 * sqrt(2 / n) at the 0.001 level).
  CHECK(oracle::ks_two_sample(d, neg) < 1.95 * std::sqrt(2.0 / d.size()));
}

TEST_CASE("reference community check") {
  Edges e;
  for (VertexId v = 0; v + 1 < 8; ++v) e.push_back({v, v + 1});
  const auto path = AttributedGraph::from_edges(8, e);
  const auto alternating = make_truth(0.0, 1.0, 1.0, {0, 1, 0, 1, 0, 1, 0, 1});
  CHECK_FALSE(check_assumption1(path, alternating, 2).holds);
  const auto one = check_assumption1(path, alternating, 1);
  CHECK(one.holds);
  CHECK(one.witness == VertexId{0});

  const auto block = make_truth(0.0, 1.0, 1.0, {1, 1, 0, 0, 0, 0, 1, 1});
  const auto c = check_assumption1(path, block, 3);
  CHECK(c.holds);
  CHECK(c.witness == VertexId{3});
  CHECK(std::set<VertexId>(c.reference_set.begin(), c.reference_set.end()) ==
        std::set<VertexId>{2, 3, 4});
  CHECK_FALSE(check_assumption1(path, block, 4).holds);

  const Edges lone{{1, 2}};
  const auto g = AttributedGraph::from_edges(3, lone);
  const auto isolated = check_assumption1(g, make_truth(0.0, 1.0, 1.0, {0, 1, 1}), 1);
  CHECK(isolated.holds);
  CHECK(isolated.reference_set == std::vector<VertexId>{0});
}
