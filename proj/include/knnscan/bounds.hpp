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

// Concentration bounds for neighborhood selection.
//
// For a reference neighborhood K0 of inactive vertices and a competitor K
// of the same size, the signal margin
//
//   R(K) = (b - a) * S1(K) + sum over active v in K of (A_v - b),
//
// with S1(K) the number of active vertices of K, controls how likely the
// noise is to make S_K undercut S_K0. Pairing the noise of K \ K0 with that
// of K0 \ K gives |K \ K0| i.i.d. symmetric differences bounded by 2M with
// variance 2 sigma^2, and the Bernstein inequality then gives
//
//   P(S_K < S_K0) <= exp(-3 R^2 / (12 sigma^2 |K \ K0| + 4 M R)).
//
// Summing over a collection of competitors bounds the probability that the
// scan selects any of them over K0.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "knnscan/graph.hpp"
#include "knnscan/neighborhoods.hpp"

namespace knnscan {

// Throws ValidationError on b_minus_a <= 0 or excess < 0.
double r_functional(std::size_t active_count, double b_minus_a, double excess);

// Bernstein upper bound on P(sum X_i > t) for independent zero-mean X_i
// with |X_i| <= M and sum of variances `sum_var`. The result lies in
// (0, 1]; underflow is clamped to the smallest normal double.
double bernstein_tail(double t, double sum_var, double M);
// Natural log of the unclamped bound; finite for t > 0.
double bernstein_log_tail(double t, double sum_var, double M);

// One competitor neighborhood, summarized against K0.
struct NeighborhoodTerm {
  VertexId root = 0;
  std::size_t active_count = 0;  // S1(K)
  double excess = 0.0;           // sum of (A_v - b) over active v in K
  std::size_t overlap_defect = 0;  // |K \ K0|
};

struct BoundInputs {
  double a = 0.0;
  double b = 1.0;
  double sigma2 = 0.0;
  // Almost-sure noise bound; the bound is undefined without it.
  std::optional<double> M;
  std::size_t k = 0;
  std::vector<NeighborhoodTerm> terms;
  // Where sigma2 and M came from ("ground-truth", "estimated", ...).
  std::string provenance = "user";
};

struct TermValue {
  VertexId root;
  double value;
};

struct SelectionBound {
  double raw_sum = 0.0;
  double clamped = 0.0;  // min(raw_sum, 1)
  // Terms with R = 0 and |K \ K0| > 0; each contributes exactly 1.
  std::size_t degenerate_terms = 0;
  // Terms identical to K0 (|K \ K0| = 0); left out of the sum.
  std::size_t excluded_terms = 0;
  // Largest ten terms, descending.
  std::vector<TermValue> top_terms;
};

// Union bound over `inputs.terms`, accumulated with compensated summation.
// Throws ValidationError when M is missing or a term violates
// S1 <= |K \ K0|.
SelectionBound selection_bound(const BoundInputs& inputs);

// Builds one term per admissible neighborhood of `family`, measured against
// the reference set `k0`.
std::vector<NeighborhoodTerm> summarize_family(const GroundTruth& truth,
                                               const NeighborhoodFamily& family,
                                               std::span<const VertexId> k0);

// Differences eps[i] - eps[i + r] for an input of even length 2r. Throws
// ValidationError on odd length.
std::vector<double> pairing_deltas(std::span<const double> eps);

struct Assumption1Check {
  bool holds = false;
  // Smallest-id inactive vertex whose full k-neighborhood is all inactive.
  std::optional<VertexId> witness;
  // Exact k-neighborhood of the witness; a valid reference set K0.
  std::vector<VertexId> reference_set;
};

Assumption1Check check_assumption1(const AttributedGraph& g,
                                   const GroundTruth& truth, std::size_t k);

}  // namespace knnscan
