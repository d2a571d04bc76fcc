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

#include "knnscan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "knnscan/error.hpp"

namespace knnscan {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double r_functional(std::size_t active_count, double b_minus_a, double excess) {
  if (!(b_minus_a > 0.0)) throw ValidationError("b - a must be positive");
  if (!(excess >= 0.0)) throw ValidationError("active excess must be non-negative");
  return b_minus_a * static_cast<double>(active_count) + excess;
}

double bernstein_log_tail(double t, double sum_var, double M) {
  if (!(t > 0.0)) throw ValidationError("Bernstein bound needs t > 0");
  if (!(sum_var >= 0.0)) throw ValidationError("variance sum must be non-negative");
  if (!(M > 0.0)) throw ValidationError("Bernstein bound needs M > 0");
  return -(t * t / 2.0) / (sum_var + M * t / 3.0);
}

double bernstein_tail(double t, double sum_var, double M) {
  const double p = std::exp(bernstein_log_tail(t, sum_var, M));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

SelectionBound selection_bound(const BoundInputs& in) {
  if (!in.M)
    throw ValidationError(
        "selection bound requires an almost-sure noise bound M (|eps| <= M)");
  const double M = *in.M;
  if (!(M > 0.0)) throw ValidationError("noise bound M must be positive");
  if (!(in.sigma2 >= 0.0)) throw ValidationError("sigma2 must be non-negative");
  if (!(in.b > in.a)) throw ValidationError("selection bound requires b > a");

  SelectionBound out;
  CompensatedSum sum;
  std::vector<TermValue> values;
  values.reserve(in.terms.size());
  for (const auto& term : in.terms) {
    if (term.active_count > term.overlap_defect)
      throw ValidationError("neighborhood " + std::to_string(term.root) +
                            " has more active vertices than |K \\ K0|");
    if (term.overlap_defect == 0) {
      ++out.excluded_terms;
      continue;
    }
    const double R = r_functional(term.active_count, in.b - in.a, term.excess);
    double value = 1.0;
    if (R == 0.0) {
      ++out.degenerate_terms;
    } else {
      const double d = static_cast<double>(term.overlap_defect);
      value = std::exp(-3.0 * R * R / (12.0 * in.sigma2 * d + 4.0 * M * R));
    }
    sum.add(value);
    values.push_back({term.root, value});
  }
  out.raw_sum = sum.value();
  out.clamped = std::min(out.raw_sum, 1.0);
  const std::size_t top = std::min<std::size_t>(10, values.size());
  std::partial_sort(values.begin(), values.begin() + top, values.end(),
                    [](const TermValue& l, const TermValue& r) {
                      return l.value != r.value ? l.value > r.value : l.root < r.root;
                    });
  out.top_terms.assign(values.begin(), values.begin() + top);
  return out;
}

std::vector<NeighborhoodTerm> summarize_family(const GroundTruth& truth,
                                               const NeighborhoodFamily& family,
                                               std::span<const VertexId> k0) {
  std::vector<char> in_k0(truth.size(), 0);
  for (VertexId v : k0) in_k0.at(v) = 1;
  std::vector<NeighborhoodTerm> out;
  for (const auto& nb : family.by_root) {
    if (!nb) continue;
    NeighborhoodTerm term;
    term.root = nb->root;
    long double excess = 0.0L;
    for (VertexId v : nb->members) {
      if (truth.active[v]) {
        ++term.active_count;
        excess += truth.activity[v] - truth.b;
      }
      if (!in_k0[v]) ++term.overlap_defect;
    }
    term.excess = static_cast<double>(excess);
    out.push_back(term);
  }
  return out;
}

std::vector<double> pairing_deltas(std::span<const double> eps) {
  if (eps.size() % 2 != 0)
    throw ValidationError("pairing needs an even number of samples");
  const std::size_t r = eps.size() / 2;
  std::vector<double> out(r);
  for (std::size_t i = 0; i < r; ++i) out[i] = eps[i] - eps[i + r];
  return out;
}

Assumption1Check check_assumption1(const AttributedGraph& g,
                                   const GroundTruth& truth, std::size_t k) {
  if (k == 0) throw ValidationError("neighborhood size k must be >= 1");
  if (truth.size() != g.num_vertices())
    throw ValidationError("ground truth does not match the graph");
  Assumption1Check out;
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<VertexId> order;
  std::uint32_t epoch = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (truth.active[v]) continue;
    ++epoch;
    order.assign(1, v);
    stamp[v] = epoch;
    std::size_t layer_begin = 0;
    std::size_t layer_end = 1;
    bool clean = true;
    bool exhausted = false;
    while (clean && layer_end < k) {
      for (std::size_t i = layer_begin; i < layer_end && clean; ++i) {
        for (VertexId w : g.neighbors(order[i])) {
          if (stamp[w] == epoch) continue;
          stamp[w] = epoch;
          if (truth.active[w]) {
            clean = false;
            break;
          }
          order.push_back(w);
        }
      }
      if (!clean) break;
      if (order.size() == layer_end) {
        exhausted = true;
        break;
      }
      layer_begin = layer_end;
      layer_end = order.size();
    }
    if (!clean || exhausted) continue;
    out.holds = true;
    out.witness = v;
    NeighborhoodScanner scanner(g);
    scanner.build(v, k);
    out.reference_set.assign(scanner.members().begin(), scanner.members().end());
    return out;
  }
  return out;
}

}  // namespace knnscan
