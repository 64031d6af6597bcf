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

#include "harmamp/cli.h"

#include <openssl/evp.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "harmamp/annotate.h"
#include "harmamp/dataset.h"
#include "harmamp/detectors.h"
#include "harmamp/disparity.h"
#include "harmamp/eval.h"
#include "harmamp/parallel.h"

namespace harmamp {
namespace cli {

using nlohmann::json;

namespace {

constexpr absl::string_view kBundledConcepts = "bundled";

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string HexDigest(const unsigned char* digest, unsigned int len) {
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string Sha256String(absl::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  return HexDigest(digest, len);
}

absl::Status WriteFile(const std::string& path, absl::string_view content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  file.close();
  if (!file) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

int Fail(std::ostream& err, int code, absl::string_view message) {
  err << "harmamp: " << message << '\n';
  return code;
}

int FailStatus(std::ostream& err, const absl::Status& status) {
  return Fail(err, kExitUsage, status.message());
}

// Missing required flag.
int Usage(std::ostream& err, const RunConfig& cfg, absl::string_view what) {
  return Fail(err, kExitUsage, absl::StrCat(cfg.command, ": ", what));
}

absl::StatusOr<HarmType> RequireHarm(const RunConfig& cfg) {
  if (!cfg.harm) return absl::InvalidArgumentError("--harm is required");
  return HarmType::Parse(*cfg.harm);
}

struct LoadedInputs {
  Dataset dataset;
  std::vector<EmbeddingRow> sidecar;
  std::vector<std::string> paths;
};

absl::StatusOr<LoadedInputs> LoadInputs(const RunConfig& cfg) {
  LoadedInputs inputs;
  auto dataset = ReadRecordsFile(*cfg.in);
  if (!dataset.ok()) return dataset.status();
  inputs.paths.push_back(*cfg.in);
  if (cfg.embeddings) {
    auto rows = ReadEmbeddingSidecarFile(*cfg.embeddings);
    if (!rows.ok()) return rows.status();
    auto joined = AttachEmbeddings(*dataset, *rows);
    if (!joined.ok()) return joined.status();
    inputs.dataset = *std::move(joined);
    inputs.sidecar = *std::move(rows);
    inputs.paths.push_back(*cfg.embeddings);
  } else {
    inputs.dataset = *std::move(dataset);
  }
  return inputs;
}

absl::StatusOr<ConceptSet> LoadConceptSet(const RunConfig& cfg,
                                          std::span<const EmbeddingRow> sidecar,
                                          const HarmType& harm,
                                          std::vector<std::string>& paths) {
  absl::StatusOr<std::map<HarmType, ConceptSet>> sets;
  if (*cfg.concepts == kBundledConcepts) {
    std::istringstream in(BundledConceptFile());
    sets = ParseConcepts(in, sidecar, harm);
  } else {
    std::ifstream in(*cfg.concepts, std::ios::binary);
    if (!in) {
      return absl::NotFoundError(absl::StrCat("cannot open ", *cfg.concepts));
    }
    sets = ParseConcepts(in, sidecar, harm);
    paths.push_back(*cfg.concepts);
  }
  if (!sets.ok()) return sets.status();
  auto it = sets->find(harm);
  if (it == sets->end()) {
    return absl::NotFoundError(
        absl::StrCat("no concepts for harm type ", harm.name()));
  }
  return it->second;
}

std::string DefaultSibling(const std::string& path, absl::string_view suffix) {
  return absl::StrCat(path, suffix);
}

json PrfJson(const eval::ConfusionMatrix& m, const eval::Prf& prf) {
  return json{{"tp", m.tp},
              {"fp", m.fp},
              {"fn", m.fn},
              {"tn", m.tn},
              {"precision", prf.precision},
              {"recall", prf.recall},
              {"f1", prf.f1},
              {"degenerate_flags",
               {{"precision", prf.precision_degenerate},
                {"recall", prf.recall_degenerate},
                {"f1", prf.f1_degenerate}}}};
}

void PutOpt(json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}
template <typename T>
void PutOpt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

}  // namespace

RunConfig MergeConfig(const RunConfig& flags, const RunConfig& file) {
  RunConfig out = flags;
  auto pick = [](auto& dst, const auto& src) {
    if (!dst && src) dst = src;
  };
  pick(out.in, file.in);
  pick(out.embeddings, file.embeddings);
  pick(out.concepts, file.concepts);
  pick(out.thresholds, file.thresholds);
  pick(out.outcomes, file.outcomes);
  pick(out.out, file.out);
  pick(out.skips, file.skips);
  pick(out.summary, file.summary);
  pick(out.harm, file.harm);
  pick(out.method, file.method);
  pick(out.stat, file.stat);
  pick(out.grid, file.grid);
  pick(out.group, file.group);
  pick(out.require, file.require);
  pick(out.buckets, file.buckets);
  pick(out.degree, file.degree);
  pick(out.min_count, file.min_count);
  pick(out.tau, file.tau);
  pick(out.max_missing_rate, file.max_missing_rate);
  pick(out.threads, file.threads);
  return out;
}

absl::StatusOr<RunConfig> LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config ", path, ": expected a JSON object"));
  }
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "in") cfg.in = value.get<std::string>();
      else if (key == "embeddings") cfg.embeddings = value.get<std::string>();
      else if (key == "concepts") cfg.concepts = value.get<std::string>();
      else if (key == "thresholds") cfg.thresholds = value.get<std::string>();
      else if (key == "outcomes") cfg.outcomes = value.get<std::string>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "skips") cfg.skips = value.get<std::string>();
      else if (key == "summary") cfg.summary = value.get<std::string>();
      else if (key == "harm") cfg.harm = value.get<std::string>();
      else if (key == "method") cfg.method = value.get<std::string>();
      else if (key == "stat") cfg.stat = value.get<std::string>();
      else if (key == "grid") cfg.grid = value.get<std::string>();
      else if (key == "group") cfg.group = value.get<std::string>();
      else if (key == "require") cfg.require = value.get<std::string>();
      else if (key == "buckets") cfg.buckets = value.get<int>();
      else if (key == "degree") cfg.degree = value.get<int>();
      else if (key == "min_count") cfg.min_count = value.get<std::size_t>();
      else if (key == "tau") cfg.tau = value.get<double>();
      else if (key == "max_missing_rate") cfg.max_missing_rate = value.get<double>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else {
        return absl::InvalidArgumentError(
            absl::StrCat("config ", path, ": unknown key '", key, "'"));
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config ", path, ": ", e.what()));
  }
  return cfg;
}

std::optional<int> ThreadsFromEnv() {
  const char* env = std::getenv("HARMAMP_THREADS");
  if (env == nullptr) return std::nullopt;
  int value = 0;
  const absl::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) {
    return std::nullopt;
  }
  return value;
}

int ResolveThreads(const RunConfig& cfg) {
  if (cfg.threads) return std::max(1, *cfg.threads);
  if (auto env = ThreadsFromEnv()) return *env;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string ConfigHash(const RunConfig& cfg) {
  json j = json::object();
  j["command"] = cfg.command;
  PutOpt(j, "in", cfg.in);
  PutOpt(j, "embeddings", cfg.embeddings);
  PutOpt(j, "concepts", cfg.concepts);
  PutOpt(j, "thresholds", cfg.thresholds);
  PutOpt(j, "outcomes", cfg.outcomes);
  PutOpt(j, "harm", cfg.harm);
  PutOpt(j, "method", cfg.method);
  PutOpt(j, "stat", cfg.stat);
  PutOpt(j, "grid", cfg.grid);
  PutOpt(j, "group", cfg.group);
  PutOpt(j, "require", cfg.require);
  PutOpt(j, "buckets", cfg.buckets);
  PutOpt(j, "degree", cfg.degree);
  PutOpt(j, "min_count", cfg.min_count);
  PutOpt(j, "tau", cfg.tau);
  PutOpt(j, "max_missing_rate", cfg.max_missing_rate);
  return Sha256String(j.dump());
}

absl::StatusOr<std::string> Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  return HexDigest(digest, len);
}

absl::StatusOr<json> ProvenanceHeader(
    const RunConfig& cfg, const std::vector<std::string>& input_paths) {
  json inputs = json::array();
  for (const auto& path : input_paths) {
    auto digest = Sha256File(path);
    if (!digest.ok()) return digest.status();
    inputs.push_back({{"path", path}, {"sha256", *digest}});
  }
  return json{{"tool", kToolName},
              {"version", kToolVersion},
              {"command", cfg.command},
              {"config_hash", ConfigHash(cfg)},
              {"inputs", std::move(inputs)}};
}

// ---------------------------------------------------------------------------

int RunCalibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  if (!cfg.out) return Usage(err, cfg, "--out is required");
  auto harm = RequireHarm(cfg);
  if (!harm.ok()) return Usage(err, cfg, harm.status().message());
  detect::CalibrationOptions options;
  if (cfg.buckets) options.n_buckets = *cfg.buckets;
  if (cfg.degree) options.degree = *cfg.degree;
  if (cfg.min_count) options.min_count = *cfg.min_count;
  if (cfg.stat) {
    auto stat = detect::ParseThresholdStat(*cfg.stat);
    if (!stat.ok()) return Usage(err, cfg, stat.status().message());
    options.stat = *stat;
  }
  if (options.n_buckets < 2) return Usage(err, cfg, "--buckets must be >= 2");
  if (options.degree < 0) return Usage(err, cfg, "--degree must be >= 0");

  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());
  const Dataset& dataset = inputs->dataset;

  std::size_t scored = 0;
  for (const Record& r : dataset.records()) {
    if (r.TextScore(*harm) && r.ImageScore(*harm)) ++scored;
  }
  if (scored == 0) {
    return Fail(err, kExitUsage,
                absl::StrCat("calibrate: no records carry both text and image "
                             "scores for ", harm->name()));
  }
  auto result = detect::CalibrateDistribution(dataset, *harm, options);
  if (!result.ok()) {
    return Fail(err, kExitAnalysis,
                absl::StrCat("calibrate: ", result.status().message()));
  }

  auto header = ProvenanceHeader(cfg, inputs->paths);
  if (!header.ok()) return FailStatus(err, header.status());
  json doc = json{{"header", *header}};
  doc.update(detect::CalibrationToJson(*result));
  if (auto s = WriteFile(*cfg.out, doc.dump(2) + "\n"); !s.ok()) {
    return FailStatus(err, s);
  }

  out << "calibrate " << harm->name() << ": " << scored << " scored records, "
      << result->partition.n() << " buckets, stat="
      << detect::ThresholdStatName(result->stat) << "\n";
  out << "bucket  count  raw                    fitted\n";
  for (int j = 0; j < result->partition.n(); ++j) {
    const auto& b = result->buckets[j];
    out << std::left << std::setw(8) << j << std::setw(7) << b.count
        << std::setw(23)
        << (b.raw_threshold ? FormatDouble(*b.raw_threshold) : "excluded")
        << FormatDouble(result->Threshold(j)) << "\n";
  }
  out << "coefficients: ["
      << absl::StrJoin(result->fitted.coefficients(), ", ",
                       [](std::string* s, double v) {
                         s->append(FormatDouble(v));
                       })
      << "]\n";
  return kExitOk;
}

int RunDetect(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.method) return Usage(err, cfg, "--method is required");
  auto method = detect::ParseMethod(*cfg.method);
  if (!method.ok()) return Usage(err, cfg, method.status().message());
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  if (!cfg.out) return Usage(err, cfg, "--out is required");

  std::optional<HarmType> harm;
  if (cfg.harm) {
    auto parsed = HarmType::Parse(*cfg.harm);
    if (!parsed.ok()) return Usage(err, cfg, parsed.status().message());
    harm = *parsed;
  }

  std::optional<detect::CalibrationResult> calibration;
  std::optional<detect::BucketPartition> partition;
  std::optional<detect::CoembedConfig> coembed;
  switch (*method) {
    case detect::Method::kDistribution: {
      if (!cfg.thresholds) {
        return Usage(err, cfg, "method distribution needs --thresholds");
      }
      break;
    }
    case detect::Method::kBucketFlip: {
      if (!harm) return Usage(err, cfg, "--harm is required");
      auto p = detect::BucketPartition::Make(cfg.buckets.value_or(5));
      if (!p.ok()) return Usage(err, cfg, p.status().message());
      partition = *p;
      break;
    }
    case detect::Method::kCoembed: {
      if (!harm) return Usage(err, cfg, "--harm is required");
      if (!cfg.tau) return Usage(err, cfg, "method coembed needs --tau");
      if (!(*cfg.tau > 0.0)) return Usage(err, cfg, "--tau must be > 0");
      if (!cfg.concepts) {
        return Usage(err, cfg, "method coembed needs --concepts");
      }
      break;
    }
  }

  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());

  if (*method == detect::Method::kDistribution) {
    std::ifstream in(*cfg.thresholds, std::ios::binary);
    if (!in) {
      return Fail(err, kExitUsage,
                  absl::StrCat("cannot open ", *cfg.thresholds));
    }
    json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      return Fail(err, kExitUsage,
                  absl::StrCat(*cfg.thresholds, ": malformed JSON"));
    }
    auto cal = detect::CalibrationFromJson(doc);
    if (!cal.ok()) return FailStatus(err, cal.status());
    if (harm && *harm != cal->harm_type) {
      return Fail(err, kExitUsage,
                  absl::StrCat("thresholds are for ", cal->harm_type.name(),
                               ", not ", harm->name()));
    }
    harm = cal->harm_type;
    calibration = *std::move(cal);
    inputs->paths.push_back(*cfg.thresholds);
  } else if (*method == detect::Method::kBucketFlip) {
    err << "harmamp: warning: bucket flip assumes text and image classifiers "
           "are score-aligned\n";
  } else {
    auto concepts = LoadConceptSet(cfg, inputs->sidecar, *harm, inputs->paths);
    if (!concepts.ok()) return FailStatus(err, concepts.status());
    auto c = detect::CoembedConfig::Make(*cfg.tau, *std::move(concepts));
    if (!c.ok()) return Usage(err, cfg, c.status().message());
    coembed = *std::move(c);
  }

  const auto& records = inputs->dataset.records();
  using Result = std::variant<detect::DetectionOutcome, std::string>;
  std::vector<Result> results(records.size());
  ParallelFor(records.size(), ResolveThreads(cfg), [&](std::size_t i) {
    const Record& r = records[i];
    absl::StatusOr<detect::DetectionOutcome> outcome;
    if (*method == detect::Method::kCoembed) {
      if (!r.text_embedding || !r.image_embedding) {
        results[i] = std::string("missing text or image embedding");
        return;
      }
      outcome = detect::DetectCoembed(*r.text_embedding, *r.image_embedding,
                                      *coembed);
    } else {
      const auto text = r.TextScore(*harm);
      const auto image = r.ImageScore(*harm);
      if (!text || !image) {
        results[i] = absl::StrCat("missing ", !text ? "text" : "image",
                                  " score for ", harm->name());
        return;
      }
      outcome = *method == detect::Method::kDistribution
                    ? detect::DetectDistribution(*text, *image, *calibration)
                    : detect::DetectBucketFlip(*text, *image, *partition);
    }
    if (!outcome.ok()) {
      results[i] = std::string(outcome.status().message());
      return;
    }
    outcome->record_id = r.id;
    results[i] = *std::move(outcome);
  });

  auto header = ProvenanceHeader(cfg, inputs->paths);
  if (!header.ok()) return FailStatus(err, header.status());
  const json header_line = {{"header", *header},
                            {"method", detect::MethodName(*method)},
                            {"harm_type", harm->name()}};
  std::string outcomes_text = header_line.dump() + "\n";
  std::string skips_text = header_line.dump() + "\n";
  std::size_t emitted = 0;
  std::size_t flagged = 0;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (const auto* o = std::get_if<detect::DetectionOutcome>(&results[i])) {
      outcomes_text += detect::OutcomeToJson(*o).dump();
      outcomes_text += '\n';
      ++emitted;
      flagged += o->flagged ? 1 : 0;
    } else {
      skips_text += json{{"id", records[i].id},
                         {"reason", std::get<std::string>(results[i])}}
                        .dump();
      skips_text += '\n';
      ++skipped;
    }
  }
  const std::string skips_path =
      cfg.skips.value_or(DefaultSibling(*cfg.out, ".skips.jsonl"));
  if (auto s = WriteFile(*cfg.out, outcomes_text); !s.ok()) {
    return FailStatus(err, s);
  }
  if (auto s = WriteFile(skips_path, skips_text); !s.ok()) {
    return FailStatus(err, s);
  }
  out << "detect " << detect::MethodName(*method) << " " << harm->name()
      << ": " << emitted << " outcomes (" << flagged << " flagged), "
      << skipped << " skipped -> " << skips_path << "\n";
  return kExitOk;
}

namespace {

struct OutcomeFile {
  std::optional<std::string> harm_type;
  std::optional<std::string> method;
  std::vector<eval::ScoredOutcome> outcomes;
};

absl::StatusOr<OutcomeFile> ReadOutcomes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  OutcomeFile file;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": line ", line_no, ": malformed JSON"));
    }
    if (j.contains("header")) {
      if (j.contains("harm_type") && j["harm_type"].is_string()) {
        file.harm_type = j["harm_type"].get<std::string>();
      }
      continue;
    }
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("flagged") ||
        !j["flagged"].is_boolean()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": line ", line_no, ": outcome needs id and flagged"));
    }
    const std::string id = j["id"].get<std::string>();
    if (!seen.insert(id).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": line ", line_no, ": duplicate outcome id '", id, "'"));
    }
    if (j.contains("method") && j["method"].is_string()) {
      const std::string m = j["method"].get<std::string>();
      if (file.method && *file.method != m) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ": mixed methods ", *file.method, " and ", m));
      }
      file.method = m;
    }
    file.outcomes.push_back({id, j["flagged"].get<bool>()});
  }
  return file;
}

// Group label per record id, or none when the record is outside every group.
std::optional<std::string> GroupOf(const Record& r, const std::string& group) {
  if (group == "gender") {
    const auto g = annotate::AssignGender(r).label;
    if (g == annotate::GenderGroup::kExcluded) return std::nullopt;
    return std::string(annotate::GenderGroupName(g));
  }
  if (!r.group_tags) return std::nullopt;
  auto it = r.group_tags->find(group);
  if (it == r.group_tags->end()) return std::nullopt;
  return it->second;
}

}  // namespace

int RunEvaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.outcomes) return Usage(err, cfg, "--outcomes is required");
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  if (!cfg.out) return Usage(err, cfg, "--out is required");
  const double max_missing = cfg.max_missing_rate.value_or(0.0);

  auto outcomes = ReadOutcomes(*cfg.outcomes);
  if (!outcomes.ok()) return FailStatus(err, outcomes.status());
  auto harm = cfg.harm ? HarmType::Parse(*cfg.harm)
              : outcomes->harm_type
                  ? HarmType::Parse(*outcomes->harm_type)
                  : absl::StatusOr<HarmType>(absl::InvalidArgumentError(
                        "--harm is required (outcomes carry no harm_type)"));
  if (!harm.ok()) return Usage(err, cfg, harm.status().message());

  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());
  const Dataset& dataset = inputs->dataset;

  std::vector<std::string> unknown;
  std::vector<eval::ScoredOutcome> labeled;
  std::map<std::string, bool> truths;
  std::map<std::string, std::string> groups;
  std::vector<bool> preds;
  std::vector<bool> truth_list;
  std::size_t unlabeled = 0;
  for (const auto& o : outcomes->outcomes) {
    const Record* r = dataset.Find(o.record_id);
    if (r == nullptr) {
      unknown.push_back(o.record_id);
      continue;
    }
    auto label = annotate::LabelRecord(*r, *harm);
    if (!label.ok()) return FailStatus(err, label.status());
    if (!label->has_value()) {
      ++unlabeled;
      continue;
    }
    labeled.push_back(o);
    preds.push_back(o.flagged);
    truth_list.push_back((*label)->amplified);
    truths[o.record_id] = (*label)->amplified;
    if (cfg.group) {
      if (auto g = GroupOf(*r, *cfg.group)) groups[o.record_id] = *g;
    }
  }

  const double missing_rate =
      outcomes->outcomes.empty()
          ? 0.0
          : static_cast<double>(unknown.size()) /
                static_cast<double>(outcomes->outcomes.size());
  if (!unknown.empty() && missing_rate > max_missing) {
    return Fail(err, kExitUsage,
                absl::StrCat("evaluate: ", unknown.size(),
                             " outcome id(s) not found in records (rate ",
                             FormatDouble(missing_rate), " > ",
                             FormatDouble(max_missing),
                             "): ", absl::StrJoin(unknown, ", ")));
  }
  if (labeled.empty()) {
    return Fail(err, kExitAnalysis,
                absl::StrCat("evaluate: no outcomes have ", harm->name(),
                             " annotations"));
  }

  auto matrix = eval::Confusion(preds, truth_list);
  if (!matrix.ok()) return FailStatus(err, matrix.status());
  const eval::Prf prf = eval::ComputePrf(*matrix);

  inputs->paths.insert(inputs->paths.begin(), *cfg.outcomes);
  auto header = ProvenanceHeader(cfg, inputs->paths);
  if (!header.ok()) return FailStatus(err, header.status());
  json report = {{"header", *header},
                 {"method", outcomes->method.value_or("unknown")},
                 {"harm_type", harm->name()}};
  report.update(PrfJson(*matrix, prf));
  report["evaluated"] = labeled.size();
  report["unlabeled"] = unlabeled;
  report["unknown_ids"] = unknown;
  if (cfg.group) {
    json blocks = json::array();
    for (const auto& g : eval::GroupedMetrics(labeled, truths, groups)) {
      json block = {{"group", g.group}};
      block.update(PrfJson(g.matrix, g.prf));
      blocks.push_back(std::move(block));
    }
    report["group_by"] = *cfg.group;
    report["groups"] = std::move(blocks);
  }
  if (auto s = WriteFile(*cfg.out, report.dump(2) + "\n"); !s.ok()) {
    return FailStatus(err, s);
  }
  out << "evaluate " << report["method"].get<std::string>() << " "
      << harm->name() << ": tp=" << matrix->tp << " fp=" << matrix->fp
      << " fn=" << matrix->fn << " tn=" << matrix->tn
      << " precision=" << FormatDouble(prf.precision)
      << " recall=" << FormatDouble(prf.recall)
      << " f1=" << FormatDouble(prf.f1) << "\n";
  return kExitOk;
}

int RunSweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  if (!cfg.concepts) return Usage(err, cfg, "--concepts is required");
  if (!cfg.out) return Usage(err, cfg, "--out is required");
  auto harm = RequireHarm(cfg);
  if (!harm.ok()) return Usage(err, cfg, harm.status().message());
  auto grid = eval::Grid::Parse(cfg.grid.value_or(std::string(eval::kDefaultGrid)));
  if (!grid.ok()) return Usage(err, cfg, grid.status().message());

  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());
  auto concepts = LoadConceptSet(cfg, inputs->sidecar, *harm, inputs->paths);
  if (!concepts.ok()) return FailStatus(err, concepts.status());

  const auto& records = inputs->dataset.records();
  std::vector<const Record*> eligible;
  std::vector<bool> truths;
  for (const Record& r : records) {
    if (!r.text_embedding || !r.image_embedding) continue;
    auto label = annotate::LabelRecord(r, *harm);
    if (!label.ok()) return FailStatus(err, label.status());
    if (!label->has_value()) continue;
    eligible.push_back(&r);
    truths.push_back((*label)->amplified);
  }
  const std::size_t skipped = records.size() - eligible.size();
  if (eligible.empty()) {
    return Fail(err, kExitAnalysis,
                "sweep: no records with both embeddings and annotations");
  }
  std::size_t positives = 0;
  for (const bool t : truths) positives += t ? 1 : 0;
  if (positives == 0) {
    return Fail(err, kExitAnalysis, "sweep: no positive ground-truth labels");
  }

  std::vector<double> diffs(eligible.size());
  std::vector<absl::Status> errors(eligible.size());
  ParallelFor(eligible.size(), ResolveThreads(cfg), [&](std::size_t i) {
    auto d = detect::CoembedAmplification(*eligible[i]->text_embedding,
                                          *eligible[i]->image_embedding,
                                          *concepts);
    if (d.ok()) {
      diffs[i] = *d;
    } else {
      errors[i] = absl::InvalidArgumentError(absl::StrCat(
          "record '", eligible[i]->id, "': ", d.status().message()));
    }
  });
  for (const auto& e : errors) {
    if (!e.ok()) return FailStatus(err, e);
  }

  const std::vector<double> taus = grid->Values();
  auto curve = eval::PrSweep(diffs, truths, taus);
  if (!curve.ok()) return Fail(err, kExitAnalysis, curve.status().message());
  auto best = eval::BestF1Threshold(*curve);
  if (!best.ok()) return Fail(err, kExitAnalysis, best.status().message());

  std::string csv = "tau,precision,recall\n";
  for (const auto& p : curve->points) {
    absl::StrAppend(&csv, FormatDouble(p.tau), ",",
                    FormatDouble(p.prf.precision), ",",
                    FormatDouble(p.prf.recall), "\n");
  }
  auto header = ProvenanceHeader(cfg, inputs->paths);
  if (!header.ok()) return FailStatus(err, header.status());
  json summary = {
      {"header", *header},
      {"harm_type", harm->name()},
      {"grid",
       {{"start", grid->start()},
        {"stop", grid->stop()},
        {"step", grid->step()},
        {"size", grid->size()}}},
      {"evaluated", eligible.size()},
      {"positives", positives},
      {"skipped", skipped},
      {"best",
       {{"tau", best->tau},
        {"precision", best->precision},
        {"recall", best->recall},
        {"f1", best->f1}}}};
  const std::string summary_path =
      cfg.summary.value_or(DefaultSibling(*cfg.out, ".summary.json"));
  if (auto s = WriteFile(*cfg.out, csv); !s.ok()) return FailStatus(err, s);
  if (auto s = WriteFile(summary_path, summary.dump(2) + "\n"); !s.ok()) {
    return FailStatus(err, s);
  }
  out << "sweep " << harm->name() << ": " << eligible.size() << " records, "
      << curve->points.size() << " thresholds; best f1="
      << FormatDouble(best->f1) << " at tau=" << FormatDouble(best->tau)
      << " (precision=" << FormatDouble(best->precision)
      << ", recall=" << FormatDouble(best->recall) << ")\n";
  return kExitOk;
}

int RunDisparity(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  if (!cfg.out) return Usage(err, cfg, "--out is required");
  auto harm = RequireHarm(cfg);
  if (!harm.ok()) return Usage(err, cfg, harm.status().message());

  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());

  std::vector<bool> female;
  std::vector<bool> male;
  std::size_t excluded = 0;
  std::size_t unannotated = 0;
  for (const Record& r : inputs->dataset.records()) {
    auto label = annotate::LabelRecord(r, *harm);
    if (!label.ok()) return FailStatus(err, label.status());
    if (!label->has_value()) {
      ++unannotated;
      continue;
    }
    switch (annotate::AssignGender(r).label) {
      case annotate::GenderGroup::kFemale:
        female.push_back((*label)->amplified);
        break;
      case annotate::GenderGroup::kMale:
        male.push_back((*label)->amplified);
        break;
      case annotate::GenderGroup::kExcluded:
        ++excluded;
        break;
    }
  }
  if (female.empty() || male.empty()) {
    return Fail(err, kExitAnalysis,
                absl::StrCat("disparity: group ", female.empty() ? "female" : "male",
                             " is empty after exclusions"));
  }
  auto rate_a = disparity::AmplificationRate(female, "female");
  auto rate_b = disparity::AmplificationRate(male, "male");
  auto test = disparity::TwoProportionTest(rate_a->amplified, rate_a->total,
                                           rate_b->amplified, rate_b->total);
  if (!test.ok()) return Fail(err, kExitAnalysis, test.status().message());

  auto header = ProvenanceHeader(cfg, inputs->paths);
  if (!header.ok()) return FailStatus(err, header.status());
  const std::vector<double> levels =
      test->degenerate ? std::vector<double>{}
                       : disparity::SignificantAt(test->p_two_sided);
  json report = {{"header", *header},
                 {"harm_type", harm->name()},
                 {"group_a", rate_a->group},
                 {"group_b", rate_b->group},
                 {"k_a", rate_a->amplified},
                 {"n_a", rate_a->total},
                 {"k_b", rate_b->amplified},
                 {"n_b", rate_b->total},
                 {"rate_a", rate_a->rate},
                 {"rate_b", rate_b->rate},
                 {"z", test->z},
                 {"p_two_sided", test->p_two_sided},
                 {"degenerate", test->degenerate},
                 {"significant_at", levels},
                 {"excluded", excluded},
                 {"unannotated", unannotated}};
  if (auto s = WriteFile(*cfg.out, report.dump(2) + "\n"); !s.ok()) {
    return FailStatus(err, s);
  }
  out << "disparity " << harm->name() << ": female " << rate_a->amplified
      << "/" << rate_a->total << " vs male " << rate_b->amplified << "/"
      << rate_b->total << ", z=" << FormatDouble(test->z)
      << ", p=" << FormatDouble(test->p_two_sided) << " "
      << std::string(levels.size(), '*') << "\n";
  return kExitOk;
}

int RunValidate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.in) return Usage(err, cfg, "--in is required");
  std::set<Capability> required;
  const std::string spec =
      cfg.require.value_or("scores,embeddings,annotations,faces");
  for (absl::string_view name : absl::StrSplit(spec, ',', absl::SkipEmpty())) {
    auto c = ParseCapability(name);
    if (!c.ok()) return Usage(err, cfg, c.status().message());
    required.insert(*c);
  }
  auto inputs = LoadInputs(cfg);
  if (!inputs.ok()) return FailStatus(err, inputs.status());
  const ValidationReport report = ValidateDataset(inputs->dataset, required);
  json doc = {{"total", report.total}};
  for (Capability c : required) {
    const std::string name(CapabilityName(c));
    doc["capabilities"][name] = {{"satisfied", report.satisfied.at(c)},
                                 {"offenders", report.offenders.at(c)}};
    out << name << ": " << report.satisfied.at(c) << "/" << report.total
        << "\n";
  }
  if (cfg.out) {
    auto header = ProvenanceHeader(cfg, inputs->paths);
    if (!header.ok()) return FailStatus(err, header.status());
    doc["header"] = *header;
    if (auto s = WriteFile(*cfg.out, doc.dump(2) + "\n"); !s.ok()) {
      return FailStatus(err, s);
    }
  }
  return kExitOk;
}

int Run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "calibrate") return RunCalibrate(cfg, out, err);
  if (cfg.command == "detect") return RunDetect(cfg, out, err);
  if (cfg.command == "evaluate") return RunEvaluate(cfg, out, err);
  if (cfg.command == "sweep") return RunSweep(cfg, out, err);
  if (cfg.command == "disparity") return RunDisparity(cfg, out, err);
  if (cfg.command == "validate") return RunValidate(cfg, out, err);
  return Fail(err, kExitUsage, absl::StrCat("unknown command '", cfg.command, "'"));
}

}  // namespace cli
}  // namespace harmamp
