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

// Data model and interchange-file ingestion.
//
// Records arrive as line-delimited JSON, one (prompt, image) observation per
// line. Embeddings may be inline or supplied by a sidecar file and joined on
// record id. Harm concepts are word lists per harm type whose embeddings are
// joined from the same sidecar by word.

#ifndef HARMAMP_DATASET_H_
#define HARMAMP_DATASET_H_

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace harmamp {

inline constexpr absl::string_view kSexuallyExplicit = "sexually_explicit";
inline constexpr absl::string_view kViolence = "violence";

// A harm category name. Open set; stored in lowercase canonical form.
class HarmType {
 public:
  static absl::StatusOr<HarmType> Parse(absl::string_view name);

  const std::string& name() const { return name_; }
  auto operator<=>(const HarmType&) const = default;

 private:
  explicit HarmType(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// Classifier severity in [0, 1].
class HarmScore {
 public:
  static absl::StatusOr<HarmScore> Make(double value);

  double value() const { return value_; }
  auto operator<=>(const HarmScore&) const = default;

 private:
  explicit HarmScore(double value) : value_(value) {}
  double value_;
};

// Finite, non-zero vector of dimension >= 1.
class EmbeddingVector {
 public:
  static absl::StatusOr<EmbeddingVector> Make(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> values)
      : values_(std::move(values)) {}
  std::vector<double> values_;
};

struct AnnotationCounts {
  int text_votes = 0;
  int image_votes = 0;
  int num_raters = 0;
  bool operator==(const AnnotationCounts&) const = default;
};

// Perceived gender expression of a detected face. Only kFemale and kMale
// take part in majority assignment.
enum class FaceLabel { kFemale, kMale, kNonbinary, kUnknown };

absl::StatusOr<FaceLabel> ParseFaceLabel(absl::string_view label);
absl::string_view FaceLabelName(FaceLabel label);

using ScoreMap = std::map<HarmType, HarmScore>;
using AnnotationSet = std::map<HarmType, AnnotationCounts>;

struct Record {
  std::string id;
  std::optional<std::string> prompt_text;
  std::optional<ScoreMap> text_scores;
  std::optional<ScoreMap> image_scores;
  std::optional<EmbeddingVector> text_embedding;
  std::optional<EmbeddingVector> image_embedding;
  std::optional<AnnotationSet> annotations;
  std::optional<std::vector<FaceLabel>> faces;
  std::optional<std::map<std::string, std::string>> group_tags;
  // Fields this version does not interpret; kept so they survive a rewrite.
  nlohmann::json extra = nlohmann::json::object();

  std::optional<double> TextScore(const HarmType& harm) const;
  std::optional<double> ImageScore(const HarmType& harm) const;
  const AnnotationCounts* Annotation(const HarmType& harm) const;

  bool operator==(const Record&) const = default;
};

// Ordered, id-unique collection of records. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  static absl::StatusOr<Dataset> Make(std::vector<Record> records,
                                      std::string source_path);

  const std::vector<Record>& records() const { return records_; }
  const std::string& source_path() const { return source_path_; }
  std::size_t size() const { return records_.size(); }
  const Record* Find(absl::string_view id) const;

 private:
  std::vector<Record> records_;
  std::string source_path_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses one record line. `line_number` is 1-based and only used in errors.
absl::StatusOr<Record> ParseRecordLine(absl::string_view line,
                                       std::size_t line_number);

// Parses a whole record stream. Blank lines are ignored. The first bad line
// aborts the parse with an error naming it.
absl::StatusOr<Dataset> ParseRecords(std::istream& input,
                                     std::string source_path = "");
absl::StatusOr<Dataset> ReadRecordsFile(const std::string& path);

nlohmann::json RecordToJson(const Record& record);
// One compact JSON object, no trailing newline.
std::string SerializeRecord(const Record& record);
void WriteRecords(const Dataset& dataset, std::ostream& out);

// ---------------------------------------------------------------------------
// Embedding sidecar.

enum class EmbeddingKind { kPrompt, kImage, kConcept };

struct EmbeddingRow {
  std::string id;
  EmbeddingKind kind = EmbeddingKind::kPrompt;
  std::optional<std::string> word;
  EmbeddingVector vector;
};

absl::StatusOr<std::vector<EmbeddingRow>> ParseEmbeddingSidecar(
    std::istream& input);
absl::StatusOr<std::vector<EmbeddingRow>> ReadEmbeddingSidecarFile(
    const std::string& path);

// Fills text/image embeddings from prompt/image sidecar rows, joined on id.
// Rows for unknown ids are ignored. A row for a record that already carries
// that embedding inline is an error, as is a duplicate row.
absl::StatusOr<Dataset> AttachEmbeddings(const Dataset& dataset,
                                         std::span<const EmbeddingRow> rows);

// ---------------------------------------------------------------------------
// Harm concepts.

class ConceptSet {
 public:
  static absl::StatusOr<ConceptSet> Make(HarmType harm,
                                         std::vector<std::string> words,
                                         std::vector<EmbeddingVector> vectors);

  const HarmType& harm_type() const { return harm_; }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<EmbeddingVector>& embeddings() const { return vectors_; }
  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return vectors_.front().dim(); }

 private:
  ConceptSet(HarmType harm, std::vector<std::string> words,
             std::vector<EmbeddingVector> vectors)
      : harm_(std::move(harm)),
        words_(std::move(words)),
        vectors_(std::move(vectors)) {}

  HarmType harm_;
  std::vector<std::string> words_;
  std::vector<EmbeddingVector> vectors_;
};

using ConceptWords = std::map<HarmType, std::vector<std::string>>;

// Reads concept word lines {harm_type, word[, dim, values]} preserving order.
absl::StatusOr<ConceptWords> ParseConceptWords(std::istream& input);

// Builds one ConceptSet per harm type. A word without an inline vector takes
// its vector from a sidecar "concept" row with the same word. With `only`
// set, other harm types are skipped and need no vectors.
absl::StatusOr<std::map<HarmType, ConceptSet>> ParseConcepts(
    std::istream& concept_file, std::span<const EmbeddingRow> sidecar,
    const std::optional<HarmType>& only = std::nullopt);

// The built-in harm-concept word lists (15 words each for sexually_explicit
// and violence) in concept word file format.
std::string BundledConceptFile();
absl::StatusOr<std::vector<std::string>> BundledConceptWords(
    const HarmType& harm);

// ---------------------------------------------------------------------------
// Validation.

enum class Capability { kScores, kEmbeddings, kAnnotations, kFaces };

absl::StatusOr<Capability> ParseCapability(absl::string_view name);
absl::string_view CapabilityName(Capability capability);

struct ValidationReport {
  std::size_t total = 0;
  std::map<Capability, std::size_t> satisfied;
  std::map<Capability, std::vector<std::string>> offenders;
};

// Counts records providing each required capability. Scores means both text
// and image score maps, embeddings means both embeddings.
ValidationReport ValidateDataset(const Dataset& dataset,
                                 const std::set<Capability>& required);

}  // namespace harmamp

#endif  // HARMAMP_DATASET_H_
