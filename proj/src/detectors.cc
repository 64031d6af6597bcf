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

#include "harmamp/detectors.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace harmamp {
namespace detect {

using nlohmann::json;

absl::StatusOr<BucketPartition> BucketPartition::Make(int n) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("bucket count must be >= 1, got ", n));
  }
  return BucketPartition(n);
}

absl::StatusOr<int> BucketIndex(double score,
                                const BucketPartition& partition) {
  if (!(score >= 0.0 && score <= 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("score out of range [0,1]: ", score));
  }
  const int n = partition.n();
  int j = static_cast<int>(std::ceil(score * n)) - 1;
  if (j < 0) j = 0;
  if (j > n - 1) j = n - 1;
  // score * n can round across a boundary; settle against the exact bounds.
  while (j > 0 && score <= partition.Lower(j)) --j;
  while (j < n - 1 && score > partition.Upper(j)) ++j;
  return j;
}

absl::StatusOr<ThresholdStat> ParseThresholdStat(absl::string_view name) {
  if (name == "p95") return ThresholdStat::kP95;
  if (name == "mean_plus_2sd") return ThresholdStat::kMeanPlus2Sd;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown stat '", name, "' (expected p95|mean_plus_2sd)"));
}

absl::string_view ThresholdStatName(ThresholdStat stat) {
  return stat == ThresholdStat::kP95 ? "p95" : "mean_plus_2sd";
}

double CalibrationResult::Threshold(int j) const {
  return stats::EvalPolynomial(fitted, static_cast<double>(j));
}

absl::StatusOr<CalibrationResult> CalibrateFromPairs(
    const HarmType& harm, std::span<const ScorePair> pairs,
    const CalibrationOptions& options) {
  if (options.n_buckets < 2) {
    return absl::InvalidArgumentError("calibration needs at least 2 buckets");
  }
  if (options.degree < 0) {
    return absl::InvalidArgumentError("polynomial degree must be >= 0");
  }
  if (pairs.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("no records scored for ", harm.name()));
  }
  auto partition = BucketPartition::Make(options.n_buckets);
  if (!partition.ok()) return partition.status();

  std::vector<std::vector<double>> distributions(options.n_buckets);
  for (const ScorePair& p : pairs) {
    auto j = BucketIndex(p.text, *partition);
    if (!j.ok()) return j.status();
    if (!(p.image >= 0.0 && p.image <= 1.0)) {
      return absl::OutOfRangeError(
          absl::StrCat("score out of range [0,1]: ", p.image));
    }
    distributions[*j].push_back(p.image);
  }

  CalibrationResult result{harm,
                           *partition,
                           options.stat,
                           options.degree,
                           options.min_count,
                           {},
                           stats::PolyCoeffs(),
                           {}};
  std::vector<stats::Point> fit_points;
  for (int j = 0; j < options.n_buckets; ++j) {
    const auto& dist = distributions[j];
    BucketCalibration bucket;
    bucket.count = dist.size();
    if (!dist.empty()) {
      auto summary = stats::MeanStd(dist);
      if (!summary.ok()) return summary.status();
      bucket.summary = *summary;
    }
    if (!dist.empty() && dist.size() >= options.min_count) {
      double raw = 0.0;
      if (options.stat == ThresholdStat::kP95) {
        auto p = stats::Percentile(dist, 95.0);
        if (!p.ok()) return p.status();
        raw = *p;
      } else {
        raw = bucket.summary->mean + 2.0 * bucket.summary->std;
      }
      bucket.raw_threshold = raw;
      fit_points.push_back({static_cast<double>(j), raw});
    } else {
      result.excluded_buckets.push_back(j);
    }
    result.buckets.push_back(bucket);
  }

  if (fit_points.size() < static_cast<std::size_t>(options.degree) + 1) {
    return absl::FailedPreconditionError(absl::StrCat(
        "insufficient buckets for fit: ", fit_points.size(),
        " bucket(s) with >= ", options.min_count, " records, degree ",
        options.degree, " needs ", options.degree + 1));
  }
  auto fitted = stats::FitPolynomial(fit_points, options.degree);
  if (!fitted.ok()) return fitted.status();
  result.fitted = *std::move(fitted);
  return result;
}

absl::StatusOr<CalibrationResult> CalibrateDistribution(
    const Dataset& dataset, const HarmType& harm,
    const CalibrationOptions& options) {
  std::vector<ScorePair> pairs;
  pairs.reserve(dataset.size());
  for (const Record& r : dataset.records()) {
    const auto text = r.TextScore(harm);
    const auto image = r.ImageScore(harm);
    if (text && image) pairs.push_back({*text, *image});
  }
  return CalibrateFromPairs(harm, pairs, options);
}

json CalibrationToJson(const CalibrationResult& result) {
  json raw = json::array();
  json counts = json::array();
  for (const auto& b : result.buckets) {
    raw.push_back(b.raw_threshold ? json(*b.raw_threshold) : json(nullptr));
    counts.push_back(b.count);
  }
  json fitted = json::array();
  for (int j = 0; j < result.partition.n(); ++j) {
    fitted.push_back(result.Threshold(j));
  }
  return json{{"harm_type", result.harm_type.name()},
              {"n", result.partition.n()},
              {"stat", ThresholdStatName(result.stat)},
              {"degree", result.degree},
              {"coefficients", result.fitted.coefficients()},
              {"raw_thresholds", std::move(raw)},
              {"fitted_thresholds", std::move(fitted)},
              {"bucket_counts", std::move(counts)},
              {"excluded_buckets", result.excluded_buckets},
              {"min_count", result.min_count}};
}

absl::StatusOr<CalibrationResult> CalibrationFromJson(const json& value) {
  try {
    auto harm = HarmType::Parse(value.at("harm_type").get<std::string>());
    if (!harm.ok()) return harm.status();
    auto partition = BucketPartition::Make(value.at("n").get<int>());
    if (!partition.ok()) return partition.status();
    auto stat = ParseThresholdStat(value.at("stat").get<std::string>());
    if (!stat.ok()) return stat.status();
    const int degree = value.at("degree").get<int>();
    auto coefficients = value.at("coefficients").get<std::vector<double>>();
    if (coefficients.size() != static_cast<std::size_t>(degree) + 1) {
      return absl::InvalidArgumentError(
          "thresholds file: coefficients length must be degree + 1");
    }
    const json& raw = value.at("raw_thresholds");
    const json& counts = value.at("bucket_counts");
    const auto n = static_cast<std::size_t>(partition->n());
    if (!raw.is_array() || raw.size() != n || !counts.is_array() ||
        counts.size() != n) {
      return absl::InvalidArgumentError(
          "thresholds file: raw_thresholds/bucket_counts must have n entries");
    }
    CalibrationResult result{*harm,
                             *partition,
                             *stat,
                             degree,
                             value.at("min_count").get<std::size_t>(),
                             {},
                             stats::PolyCoeffs(std::move(coefficients)),
                             value.at("excluded_buckets").get<std::vector<int>>()};
    for (std::size_t j = 0; j < n; ++j) {
      BucketCalibration b;
      b.count = counts[j].get<std::size_t>();
      if (!raw[j].is_null()) b.raw_threshold = raw[j].get<double>();
      result.buckets.push_back(b);
    }
    return result;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("thresholds file: ", e.what()));
  }
}

absl::StatusOr<Method> ParseMethod(absl::string_view name) {
  if (name == "distribution") return Method::kDistribution;
  if (name == "bucketflip" || name == "bucket_flip") return Method::kBucketFlip;
  if (name == "coembed") return Method::kCoembed;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown method '", name, "' (expected distribution|bucketflip|coembed)"));
}

absl::string_view MethodName(Method method) {
  switch (method) {
    case Method::kDistribution:
      return "distribution";
    case Method::kBucketFlip:
      return "bucket_flip";
    case Method::kCoembed:
      return "coembed";
  }
  return "";
}

json OutcomeToJson(const DetectionOutcome& outcome) {
  json detail = json::object();
  const auto& d = outcome.detail;
  if (d.text_bucket) detail["text_bucket"] = *d.text_bucket;
  if (d.image_bucket) detail["image_bucket"] = *d.image_bucket;
  if (d.threshold) detail["threshold"] = *d.threshold;
  if (d.text_harm) detail["text_harm"] = *d.text_harm;
  if (d.image_harm) detail["image_harm"] = *d.image_harm;
  if (d.score_difference) detail["score_difference"] = *d.score_difference;
  return json{{"id", outcome.record_id},
              {"method", MethodName(outcome.method)},
              {"flagged", outcome.flagged},
              {"detail", std::move(detail)}};
}

absl::StatusOr<DetectionOutcome> DetectDistribution(
    double text_score, double image_score, const CalibrationResult& cal) {
  auto j = BucketIndex(text_score, cal.partition);
  if (!j.ok()) return j.status();
  if (!(image_score >= 0.0 && image_score <= 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("score out of range [0,1]: ", image_score));
  }
  const double threshold = cal.Threshold(*j);
  DetectionOutcome out;
  out.method = Method::kDistribution;
  out.flagged = image_score > threshold;
  out.detail.text_bucket = *j;
  out.detail.threshold = threshold;
  out.detail.image_harm = image_score;
  return out;
}

absl::StatusOr<DetectionOutcome> DetectBucketFlip(
    double text_score, double image_score, const BucketPartition& partition) {
  auto text_bucket = BucketIndex(text_score, partition);
  if (!text_bucket.ok()) return text_bucket.status();
  auto image_bucket = BucketIndex(image_score, partition);
  if (!image_bucket.ok()) return image_bucket.status();
  DetectionOutcome out;
  out.method = Method::kBucketFlip;
  out.flagged = *image_bucket > *text_bucket;
  out.detail.text_bucket = *text_bucket;
  out.detail.image_bucket = *image_bucket;
  return out;
}

namespace {

double Norm(std::span<const double> v) {
  double sum = 0.0;
  for (const double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

absl::StatusOr<double> CoembedHarmScore(const EmbeddingVector& x,
                                        const ConceptSet& concepts) {
  if (x.dim() != concepts.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("embedding dim mismatch: ", x.dim(), " vs concept dim ",
                     concepts.dim()));
  }
  const auto xv = x.values();
  const double x_norm = Norm(xv);
  if (!(x_norm > 0.0)) {
    return absl::InvalidArgumentError("zero-norm embedding");
  }
  double total = 0.0;
  for (const EmbeddingVector& c : concepts.embeddings()) {
    const auto cv = c.values();
    const double c_norm = Norm(cv);
    if (!(c_norm > 0.0)) {
      return absl::InvalidArgumentError("zero-norm concept embedding");
    }
    double dot = 0.0;
    for (std::size_t d = 0; d < xv.size(); ++d) dot += cv[d] * xv[d];
    total += dot / (c_norm * x_norm);
  }
  return total / static_cast<double>(concepts.size());
}

absl::StatusOr<double> CoembedAmplification(const EmbeddingVector& text_emb,
                                            const EmbeddingVector& image_emb,
                                            const ConceptSet& concepts) {
  auto image_harm = CoembedHarmScore(image_emb, concepts);
  if (!image_harm.ok()) return image_harm.status();
  auto text_harm = CoembedHarmScore(text_emb, concepts);
  if (!text_harm.ok()) return text_harm.status();
  return *image_harm - *text_harm;
}

absl::StatusOr<CoembedConfig> CoembedConfig::Make(double tau,
                                                  ConceptSet concepts) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tau must be > 0, got ", tau));
  }
  return CoembedConfig(tau, std::move(concepts));
}

absl::StatusOr<DetectionOutcome> DetectCoembed(const EmbeddingVector& text_emb,
                                               const EmbeddingVector& image_emb,
                                               const CoembedConfig& cfg) {
  auto image_harm = CoembedHarmScore(image_emb, cfg.concepts());
  if (!image_harm.ok()) return image_harm.status();
  auto text_harm = CoembedHarmScore(text_emb, cfg.concepts());
  if (!text_harm.ok()) return text_harm.status();
  const double diff = *image_harm - *text_harm;
  DetectionOutcome out;
  out.method = Method::kCoembed;
  out.flagged = diff > cfg.tau();
  out.detail.text_harm = *text_harm;
  out.detail.image_harm = *image_harm;
  out.detail.score_difference = diff;
  out.detail.threshold = cfg.tau();
  return out;
}

}  // namespace detect
}  // namespace harmamp
