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

// harmamp: harm-amplification measurement for text-to-image outputs.
//
//   harmamp calibrate --in m.jsonl --harm sexually_explicit --out th.json
//   harmamp detect --method bucketflip --in eval.jsonl --harm violence --out o.jsonl
//   harmamp evaluate --outcomes o.jsonl --in eval.jsonl --out metrics.json
//   harmamp sweep --in eval.jsonl --embeddings emb.jsonl --concepts bundled ...
//   harmamp disparity --in eval.jsonl --harm sexually_explicit --out d.json

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "harmamp/cli.h"

namespace {

using harmamp::cli::RunConfig;

enum Flag : unsigned {
  kIn = 1u << 0,
  kEmbeddings = 1u << 1,
  kConcepts = 1u << 2,
  kThresholds = 1u << 3,
  kOutcomes = 1u << 4,
  kOut = 1u << 5,
  kSkips = 1u << 6,
  kSummary = 1u << 7,
  kHarm = 1u << 8,
  kMethod = 1u << 9,
  kStat = 1u << 10,
  kGrid = 1u << 11,
  kGroup = 1u << 12,
  kBuckets = 1u << 13,
  kDegree = 1u << 14,
  kMinCount = 1u << 15,
  kTau = 1u << 16,
  kMaxMissing = 1u << 17,
  kRequire = 1u << 18,
};

void AddFlags(CLI::App* app, RunConfig& cfg, unsigned flags) {
  if (flags & kIn) app->add_option("--in", cfg.in, "Record file (JSONL)");
  if (flags & kEmbeddings) {
    app->add_option("--embeddings", cfg.embeddings, "Embedding sidecar (JSONL)");
  }
  if (flags & kConcepts) {
    app->add_option("--concepts", cfg.concepts,
                    "Concept word file, or 'bundled' for the built-in lists");
  }
  if (flags & kThresholds) {
    app->add_option("--thresholds", cfg.thresholds, "Thresholds file from calibrate");
  }
  if (flags & kOutcomes) {
    app->add_option("--outcomes", cfg.outcomes, "Outcomes file from detect");
  }
  if (flags & kOut) app->add_option("--out", cfg.out, "Output path");
  if (flags & kSkips) {
    app->add_option("--skips", cfg.skips, "Skip report path (default <out>.skips.jsonl)");
  }
  if (flags & kSummary) {
    app->add_option("--summary", cfg.summary,
                    "Best-threshold summary path (default <out>.summary.json)");
  }
  if (flags & kHarm) app->add_option("--harm", cfg.harm, "Harm type");
  if (flags & kMethod) {
    app->add_option("--method", cfg.method, "distribution|bucketflip|coembed");
  }
  if (flags & kStat) app->add_option("--stat", cfg.stat, "p95|mean_plus_2sd");
  if (flags & kGrid) app->add_option("--grid", cfg.grid, "start:stop:step");
  if (flags & kGroup) {
    app->add_option("--group", cfg.group, "'gender' or a group_tags key");
  }
  if (flags & kBuckets) app->add_option("--buckets", cfg.buckets, "Bucket count");
  if (flags & kDegree) app->add_option("--degree", cfg.degree, "Polynomial degree");
  if (flags & kMinCount) {
    app->add_option("--min-count", cfg.min_count, "Minimum records per bucket");
  }
  if (flags & kTau) app->add_option("--tau", cfg.tau, "Co-embedding threshold (> 0)");
  if (flags & kMaxMissing) {
    app->add_option("--max-missing-rate", cfg.max_missing_rate,
                    "Tolerated fraction of outcome ids absent from records");
  }
  if (flags & kRequire) {
    app->add_option("--require", cfg.require,
                    "Comma list of scores,embeddings,annotations,faces");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harm-amplification measurement toolkit", "harmamp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(harmamp::cli::kToolVersion));

  RunConfig flags;
  std::string config_path;
  std::optional<int> threads;

  struct Command {
    const char* name;
    const char* help;
    unsigned flags;
  };
  const Command commands[] = {
      {"calibrate", "Fit distribution-based thresholds",
       kIn | kEmbeddings | kOut | kHarm | kStat | kBuckets | kDegree | kMinCount},
      {"detect", "Flag harm amplification per record",
       kIn | kEmbeddings | kConcepts | kThresholds | kOut | kSkips | kHarm |
           kMethod | kBuckets | kTau},
      {"evaluate", "Score outcomes against rater ground truth",
       kIn | kEmbeddings | kOutcomes | kOut | kHarm | kGroup | kMaxMissing},
      {"sweep", "Co-embedding precision-recall sweep",
       kIn | kEmbeddings | kConcepts | kOut | kSummary | kHarm | kGrid},
      {"disparity", "Compare amplification rates across perceived gender",
       kIn | kEmbeddings | kOut | kHarm},
      {"validate", "Report record capabilities", kIn | kEmbeddings | kOut | kRequire},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    AddFlags(sub, flags, c.flags);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--threads", threads, "Worker threads (else HARMAMP_THREADS)");
    sub->callback([&flags, name = c.name] { flags.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : harmamp::cli::kExitUsage;
  }

  // Thread count: flag, then environment, then config file.
  flags.threads = threads ? threads : harmamp::cli::ThreadsFromEnv();
  RunConfig cfg = flags;
  if (!config_path.empty()) {
    auto file = harmamp::cli::LoadConfigFile(config_path);
    if (!file.ok()) {
      std::cerr << "harmamp: " << file.status().message() << "\n";
      return harmamp::cli::kExitUsage;
    }
    cfg = harmamp::cli::MergeConfig(flags, *file);
  }
  return harmamp::cli::Run(cfg, std::cout, std::cerr);
}
