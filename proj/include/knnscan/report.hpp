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

// JSON and CSV serialization of results, experiment configs and run
// manifests. Every writer is deterministic: the same inputs give
// byte-identical files.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "knnscan/bounds.hpp"
#include "knnscan/estimators.hpp"
#include "knnscan/simulation.hpp"

namespace knnscan {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

Json scan_to_json(const AttributedGraph& g, const ScanResult& result);
Json bound_to_json(const BoundInputs& inputs, const SelectionBound& bound);
Json crawler_to_json(const ScanResult& scan, const CrawlerEstimate& est);
Json stats_to_json(const SampleStats& s);
Json summary_to_json(const MonteCarloSummary& summary, AdversaryKind adversary);

Json noise_to_json(const NoiseModel& noise);
// Accepts "gaussian:S" / "uniform:M" strings or an object
// {"kind": "gaussian"|"uniform"|"discrete", ...}.
NoiseModel noise_from_json(const Json& j);

Json config_to_json(const ExperimentConfig& config);
// Missing keys take the ExperimentConfig defaults. Throws ValidationError on
// malformed or unknown values.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

// {"tool", "version", "command", "config", "seeds"}; no timestamps.
Json make_manifest(const std::string& command, const Json& config,
                   const std::vector<std::uint64_t>& seeds);

void write_json(const std::filesystem::path& path, const Json& j);
// `root,label,average`; skipped roots are written with an empty average.
void write_averages_csv(const std::filesystem::path& path,
                        const AttributedGraph& g, const ScanResult& result);
// `t,F` at each distinct sample point.
void write_ecdf_csv(const std::filesystem::path& path, const Ecdf& ecdf);
// `k,seed,root,estimate,active_in_selected,final_estimate,winning_step,steps`
void write_outcomes_csv(const std::filesystem::path& path,
                        const MonteCarloSummary& summary);
// `k,bin,lo,hi,count`
void write_histogram_csv(const std::filesystem::path& path,
                         const MonteCarloSummary& summary);

// Formats a double with round-trip precision.
std::string format_double(double x);

}  // namespace knnscan
