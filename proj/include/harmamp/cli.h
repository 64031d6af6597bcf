/*
 * Copyright 2026 The HarmAmp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command implementations behind the `harmamp` tool. Each Run* function
// takes a fully merged configuration, writes its output files, prints a
// human summary to `out` and diagnostics to `err`, and returns the process
// exit code.

#ifndef HARMAMP_CLI_H_
#define HARMAMP_CLI_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace harmamp {
namespace cli {

inline constexpr absl::string_view kToolName = "harmamp";
inline constexpr absl::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAnalysis = 3;

// Every field is optional so flags, config files and defaults can be layered.
struct RunConfig {
  std::string command;

  std::optional<std::string> in;
  std::optional<std::string> embeddings;
  std::optional<std::string> concepts;
  std::optional<std::string> thresholds;
  std::optional<std::string> outcomes;
  std::optional<std::string> out;
  std::optional<std::string> skips;
  std::optional<std::string> summary;

  std::optional<std::string> harm;
  std::optional<std::string> method;
  std::optional<std::string> stat;
  std::optional<std::string> grid;
  std::optional<std::string> group;
  std::optional<std::string> require;

  std::optional<int> buckets;
  std::optional<int> degree;
  std::optional<std::size_t> min_count;
  std::optional<double> tau;
  std::optional<double> max_missing_rate;
  std::optional<int> threads;
};

// Fields set in `flags` win over `file`.
RunConfig MergeConfig(const RunConfig& flags, const RunConfig& file);

// Reads a flat JSON object whose keys match the long flag names.
absl::StatusOr<RunConfig> LoadConfigFile(const std::string& path);

// HARMAMP_THREADS when set to a positive integer.
std::optional<int> ThreadsFromEnv();

// cfg.threads, else HARMAMP_THREADS, else hardware threads.
int ResolveThreads(const RunConfig& cfg);

// Stable digest of the settings that influence results (outputs and thread
// count excluded).
std::string ConfigHash(const RunConfig& cfg);

absl::StatusOr<std::string> Sha256File(const std::string& path);

// {tool, version, command, config_hash, inputs: [{path, sha256}]}.
absl::StatusOr<nlohmann::json> ProvenanceHeader(
    const RunConfig& cfg, const std::vector<std::string>& input_paths);

int RunCalibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int RunDetect(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int RunEvaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int RunSweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int RunDisparity(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int RunValidate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Dispatches on cfg.command.
int Run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace harmamp

#endif  // HARMAMP_CLI_H_
