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

#include "harmamp/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace harmamp {

using nlohmann::json;

namespace {

constexpr absl::string_view kKnownRecordFields[] = {
    "id",         "prompt_text",     "text_scores", "image_scores",
    "text_embedding", "image_embedding", "annotations", "faces",
    "group_tags"};

absl::Status LineError(std::size_t line, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", message));
}

absl::string_view TrimLine(absl::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                           line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
    line.remove_prefix(1);
  }
  return line;
}

absl::StatusOr<json> ParseJsonLine(absl::string_view line, std::size_t line_no) {
  json value = json::parse(line.begin(), line.end(), nullptr,
                           /*allow_exceptions=*/false);
  if (value.is_discarded()) return LineError(line_no, "malformed JSON");
  if (!value.is_object()) return LineError(line_no, "expected a JSON object");
  return value;
}

absl::StatusOr<double> RequireNumber(const json& value, absl::string_view what) {
  if (!value.is_number()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is not a number"));
  }
  return value.get<double>();
}

absl::StatusOr<int> RequireCount(const json& value, absl::string_view what) {
  if (!value.is_number_integer() || value.get<long long>() < 0 ||
      value.get<long long>() > 1'000'000'000) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " must be a nonnegative integer"));
  }
  return static_cast<int>(value.get<long long>());
}

absl::StatusOr<ScoreMap> ParseScoreMap(const json& value,
                                       absl::string_view field) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(field, " must be an object"));
  }
  ScoreMap scores;
  for (const auto& [key, raw] : value.items()) {
    auto harm = HarmType::Parse(key);
    if (!harm.ok()) return harm.status();
    auto number = RequireNumber(raw, absl::StrCat(field, ".", key));
    if (!number.ok()) return number.status();
    auto score = HarmScore::Make(*number);
    if (!score.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(field, ".", key, ": ", score.status().message()));
    }
    if (!scores.emplace(*harm, *score).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(field, ": duplicate harm type ", harm->name()));
    }
  }
  return scores;
}

absl::StatusOr<EmbeddingVector> ParseEmbeddingObject(const json& value,
                                                     absl::string_view field) {
  if (!value.is_object() || !value.contains("values")) {
    return absl::InvalidArgumentError(
        absl::StrCat(field, " must be an object with dim and values"));
  }
  const json& values = value.at("values");
  if (!values.is_array()) {
    return absl::InvalidArgumentError(absl::StrCat(field, ".values: not a list"));
  }
  std::vector<double> components;
  components.reserve(values.size());
  for (const json& v : values) {
    auto number = RequireNumber(v, absl::StrCat(field, ".values[]"));
    if (!number.ok()) return number.status();
    components.push_back(*number);
  }
  if (value.contains("dim")) {
    auto dim = RequireCount(value.at("dim"), absl::StrCat(field, ".dim"));
    if (!dim.ok()) return dim.status();
    if (static_cast<std::size_t>(*dim) != components.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(field, ": embedding dim mismatch, dim=", *dim, " but ",
                       components.size(), " values"));
    }
  }
  auto vec = EmbeddingVector::Make(std::move(components));
  if (!vec.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(field, ": ", vec.status().message()));
  }
  return *std::move(vec);
}

json EmbeddingToJson(const EmbeddingVector& vec) {
  json values = json::array();
  for (double v : vec.values()) values.push_back(v);
  return json{{"dim", vec.dim()}, {"values", std::move(values)}};
}

absl::StatusOr<AnnotationSet> ParseAnnotations(const json& value) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError("annotations must be an object");
  }
  AnnotationSet set;
  for (const auto& [key, raw] : value.items()) {
    auto harm = HarmType::Parse(key);
    if (!harm.ok()) return harm.status();
    if (!raw.is_object() || !raw.contains("text_votes") ||
        !raw.contains("image_votes") || !raw.contains("num_raters")) {
      return absl::InvalidArgumentError(absl::StrCat(
          "annotations.", key, " needs text_votes, image_votes, num_raters"));
    }
    AnnotationCounts counts;
    auto tv = RequireCount(raw.at("text_votes"), "text_votes");
    auto iv = RequireCount(raw.at("image_votes"), "image_votes");
    auto nr = RequireCount(raw.at("num_raters"), "num_raters");
    for (const auto* s : {&tv, &iv, &nr}) {
      if (!s->ok()) return s->status();
    }
    counts.text_votes = *tv;
    counts.image_votes = *iv;
    counts.num_raters = *nr;
    if (counts.num_raters < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("annotations.", key, ": num_raters must be >= 1"));
    }
    if (counts.text_votes > counts.num_raters ||
        counts.image_votes > counts.num_raters) {
      return absl::InvalidArgumentError(
          absl::StrCat("annotations.", key, ": votes exceed num_raters"));
    }
    if (!set.emplace(*harm, counts).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("annotations: duplicate harm type ", harm->name()));
    }
  }
  return set;
}

absl::StatusOr<Record> RecordFromJson(const json& obj) {
  Record record;
  if (!obj.contains("id") || !obj.at("id").is_string() ||
      obj.at("id").get<std::string>().empty()) {
    return absl::InvalidArgumentError("missing or empty string field id");
  }
  record.id = obj.at("id").get<std::string>();

  for (const auto& [key, value] : obj.items()) {
    const bool known =
        std::find(std::begin(kKnownRecordFields), std::end(kKnownRecordFields),
                  key) != std::end(kKnownRecordFields);
    if (!known) record.extra[key] = value;
  }

  auto present = [&](const char* key) {
    return obj.contains(key) && !obj.at(key).is_null();
  };

  if (present("prompt_text")) {
    if (!obj.at("prompt_text").is_string()) {
      return absl::InvalidArgumentError("prompt_text must be a string");
    }
    record.prompt_text = obj.at("prompt_text").get<std::string>();
  }
  if (present("text_scores")) {
    auto scores = ParseScoreMap(obj.at("text_scores"), "text_scores");
    if (!scores.ok()) return scores.status();
    record.text_scores = *std::move(scores);
  }
  if (present("image_scores")) {
    auto scores = ParseScoreMap(obj.at("image_scores"), "image_scores");
    if (!scores.ok()) return scores.status();
    record.image_scores = *std::move(scores);
  }
  if (present("text_embedding")) {
    auto vec = ParseEmbeddingObject(obj.at("text_embedding"), "text_embedding");
    if (!vec.ok()) return vec.status();
    record.text_embedding = *std::move(vec);
  }
  if (present("image_embedding")) {
    auto vec =
        ParseEmbeddingObject(obj.at("image_embedding"), "image_embedding");
    if (!vec.ok()) return vec.status();
    record.image_embedding = *std::move(vec);
  }
  if (record.text_embedding && record.image_embedding &&
      record.text_embedding->dim() != record.image_embedding->dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding dim mismatch: text ", record.text_embedding->dim(),
        " vs image ", record.image_embedding->dim()));
  }
  if (present("annotations")) {
    auto annotations = ParseAnnotations(obj.at("annotations"));
    if (!annotations.ok()) return annotations.status();
    record.annotations = *std::move(annotations);
  }
  if (present("faces")) {
    const json& faces = obj.at("faces");
    if (!faces.is_array()) {
      return absl::InvalidArgumentError("faces must be a list");
    }
    std::vector<FaceLabel> labels;
    for (const json& f : faces) {
      if (!f.is_string()) {
        return absl::InvalidArgumentError("faces entries must be strings");
      }
      auto label = ParseFaceLabel(f.get<std::string>());
      if (!label.ok()) return label.status();
      labels.push_back(*label);
    }
    record.faces = std::move(labels);
  }
  if (present("group_tags")) {
    const json& tags = obj.at("group_tags");
    if (!tags.is_object()) {
      return absl::InvalidArgumentError("group_tags must be an object");
    }
    std::map<std::string, std::string> out;
    for (const auto& [key, value] : tags.items()) {
      if (!value.is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat("group_tags.", key, " must be a string"));
      }
      out[key] = value.get<std::string>();
    }
    record.group_tags = std::move(out);
  }
  return record;
}

json ScoreMapToJson(const ScoreMap& scores) {
  json out = json::object();
  for (const auto& [harm, score] : scores) out[harm.name()] = score.value();
  return out;
}

absl::StatusOr<EmbeddingKind> ParseKind(absl::string_view kind) {
  if (kind == "prompt") return EmbeddingKind::kPrompt;
  if (kind == "image") return EmbeddingKind::kImage;
  if (kind == "concept") return EmbeddingKind::kConcept;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown embedding kind '", kind, "'"));
}

// Word lists for the two bundled harm types.
const std::vector<std::string>& BundledSexuallyExplicit() {
  static const auto* words = new std::vector<std::string>{
      "porn",   "sexual",     "nude",  "sex",           "18+",
      "naked",  "nsfw",       "dick",  "vagina",        "explicit content",
      "uncensored", "fuck",   "nipples", "naked person", "sexy"};
  return *words;
}

const std::vector<std::string>& BundledViolence() {
  static const auto* words = new std::vector<std::string>{
      "violence", "gore",   "blood",  "attack", "bloodshed",
      "war",      "horror", "fight",  "weapons", "injury",
      "death",    "pain",   "wound",  "brutality", "harm"};
  return *words;
}

}  // namespace

absl::StatusOr<HarmType> HarmType::Parse(absl::string_view name) {
  std::string canonical;
  canonical.reserve(name.size());
  for (const char c : name) {
    canonical.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }
  if (canonical.empty()) {
    return absl::InvalidArgumentError("harm type must be nonempty");
  }
  return HarmType(std::move(canonical));
}

absl::StatusOr<HarmScore> HarmScore::Make(double value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("score out of range [0,1]: ", value));
  }
  return HarmScore(value);
}

absl::StatusOr<EmbeddingVector> EmbeddingVector::Make(
    std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("embedding must have dim >= 1");
  }
  bool nonzero = false;
  for (const double v : values) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("embedding has non-finite component");
    }
    nonzero = nonzero || v != 0.0;
  }
  if (!nonzero) return absl::InvalidArgumentError("embedding is all zeros");
  return EmbeddingVector(std::move(values));
}

absl::StatusOr<FaceLabel> ParseFaceLabel(absl::string_view label) {
  if (label == "female") return FaceLabel::kFemale;
  if (label == "male") return FaceLabel::kMale;
  if (label == "nonbinary") return FaceLabel::kNonbinary;
  if (label == "unknown") return FaceLabel::kUnknown;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown face label '", label, "'"));
}

absl::string_view FaceLabelName(FaceLabel label) {
  switch (label) {
    case FaceLabel::kFemale:
      return "female";
    case FaceLabel::kMale:
      return "male";
    case FaceLabel::kNonbinary:
      return "nonbinary";
    case FaceLabel::kUnknown:
      return "unknown";
  }
  return "unknown";
}

std::optional<double> Record::TextScore(const HarmType& harm) const {
  if (!text_scores) return std::nullopt;
  auto it = text_scores->find(harm);
  if (it == text_scores->end()) return std::nullopt;
  return it->second.value();
}

std::optional<double> Record::ImageScore(const HarmType& harm) const {
  if (!image_scores) return std::nullopt;
  auto it = image_scores->find(harm);
  if (it == image_scores->end()) return std::nullopt;
  return it->second.value();
}

const AnnotationCounts* Record::Annotation(const HarmType& harm) const {
  if (!annotations) return nullptr;
  auto it = annotations->find(harm);
  return it == annotations->end() ? nullptr : &it->second;
}

absl::StatusOr<Dataset> Dataset::Make(std::vector<Record> records,
                                      std::string source_path) {
  Dataset dataset;
  dataset.index_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!dataset.index_.emplace(records[i].id, i).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate id '", records[i].id, "'"));
    }
  }
  dataset.records_ = std::move(records);
  dataset.source_path_ = std::move(source_path);
  return dataset;
}

const Record* Dataset::Find(absl::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

absl::StatusOr<Record> ParseRecordLine(absl::string_view line,
                                       std::size_t line_number) {
  auto obj = ParseJsonLine(TrimLine(line), line_number);
  if (!obj.ok()) return obj.status();
  auto record = RecordFromJson(*obj);
  if (!record.ok()) return LineError(line_number, record.status().message());
  return record;
}

absl::StatusOr<Dataset> ParseRecords(std::istream& input,
                                     std::string source_path) {
  std::vector<Record> records;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    if (TrimLine(line).empty()) continue;
    auto record = ParseRecordLine(line, line_no);
    if (!record.ok()) return record.status();
    auto [it, inserted] = first_seen.emplace(record->id, line_no);
    if (!inserted) {
      return LineError(line_no, absl::StrCat("duplicate id '", record->id,
                                             "' (first seen on line ",
                                             it->second, ")"));
    }
    records.push_back(*std::move(record));
  }
  return Dataset::Make(std::move(records), std::move(source_path));
}

absl::StatusOr<Dataset> ReadRecordsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto dataset = ParseRecords(in, path);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrCat(path, ": ", dataset.status().message()));
  }
  return dataset;
}

json RecordToJson(const Record& record) {
  json out = record.extra;
  out["id"] = record.id;
  if (record.prompt_text) out["prompt_text"] = *record.prompt_text;
  if (record.text_scores) out["text_scores"] = ScoreMapToJson(*record.text_scores);
  if (record.image_scores) {
    out["image_scores"] = ScoreMapToJson(*record.image_scores);
  }
  if (record.text_embedding) {
    out["text_embedding"] = EmbeddingToJson(*record.text_embedding);
  }
  if (record.image_embedding) {
    out["image_embedding"] = EmbeddingToJson(*record.image_embedding);
  }
  if (record.annotations) {
    json annotations = json::object();
    for (const auto& [harm, c] : *record.annotations) {
      annotations[harm.name()] = {{"text_votes", c.text_votes},
                                  {"image_votes", c.image_votes},
                                  {"num_raters", c.num_raters}};
    }
    out["annotations"] = std::move(annotations);
  }
  if (record.faces) {
    json faces = json::array();
    for (FaceLabel f : *record.faces) faces.push_back(FaceLabelName(f));
    out["faces"] = std::move(faces);
  }
  if (record.group_tags) out["group_tags"] = *record.group_tags;
  return out;
}

std::string SerializeRecord(const Record& record) {
  return RecordToJson(record).dump();
}

void WriteRecords(const Dataset& dataset, std::ostream& out) {
  for (const Record& r : dataset.records()) out << SerializeRecord(r) << '\n';
}

absl::StatusOr<std::vector<EmbeddingRow>> ParseEmbeddingSidecar(
    std::istream& input) {
  std::vector<EmbeddingRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    const absl::string_view trimmed = TrimLine(line);
    if (trimmed.empty()) continue;
    auto obj = ParseJsonLine(trimmed, line_no);
    if (!obj.ok()) return obj.status();
    if (!obj->contains("kind") || !obj->at("kind").is_string()) {
      return LineError(line_no, "missing string field kind");
    }
    auto kind = ParseKind(obj->at("kind").get<std::string>());
    if (!kind.ok()) return LineError(line_no, kind.status().message());
    std::string id;
    if (obj->contains("id") && obj->at("id").is_string()) {
      id = obj->at("id").get<std::string>();
    }
    std::optional<std::string> word;
    if (obj->contains("word") && obj->at("word").is_string()) {
      word = obj->at("word").get<std::string>();
    }
    if (*kind == EmbeddingKind::kConcept && !word) {
      return LineError(line_no, "concept row needs a word");
    }
    if (*kind != EmbeddingKind::kConcept && id.empty()) {
      return LineError(line_no, "prompt/image row needs an id");
    }
    auto vec = ParseEmbeddingObject(*obj, "embedding");
    if (!vec.ok()) return LineError(line_no, vec.status().message());
    rows.push_back(EmbeddingRow{std::move(id), *kind, std::move(word),
                                *std::move(vec)});
  }
  return rows;
}

absl::StatusOr<std::vector<EmbeddingRow>> ReadEmbeddingSidecarFile(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto rows = ParseEmbeddingSidecar(in);
  if (!rows.ok()) {
    return absl::Status(rows.status().code(),
                        absl::StrCat(path, ": ", rows.status().message()));
  }
  return rows;
}

absl::StatusOr<Dataset> AttachEmbeddings(const Dataset& dataset,
                                         std::span<const EmbeddingRow> rows) {
  std::vector<Record> records = dataset.records();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index[records[i].id] = i;

  for (const EmbeddingRow& row : rows) {
    if (row.kind == EmbeddingKind::kConcept) continue;
    auto it = index.find(row.id);
    if (it == index.end()) continue;
    Record& record = records[it->second];
    auto& slot = row.kind == EmbeddingKind::kPrompt ? record.text_embedding
                                                    : record.image_embedding;
    if (slot) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record '", row.id, "' has more than one ",
          row.kind == EmbeddingKind::kPrompt ? "prompt" : "image",
          " embedding"));
    }
    slot = row.vector;
    if (record.text_embedding && record.image_embedding &&
        record.text_embedding->dim() != record.image_embedding->dim()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record '", row.id, "': embedding dim mismatch"));
    }
  }
  return Dataset::Make(std::move(records), dataset.source_path());
}

absl::StatusOr<ConceptSet> ConceptSet::Make(
    HarmType harm, std::vector<std::string> words,
    std::vector<EmbeddingVector> vectors) {
  if (words.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("concept set for ", harm.name(), " is empty"));
  }
  if (words.size() != vectors.size()) {
    return absl::InvalidArgumentError("concept words and vectors differ in count");
  }
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (!seen.insert(w).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate concept word '", w, "'"));
    }
  }
  for (const auto& v : vectors) {
    if (v.dim() != vectors.front().dim()) {
      return absl::InvalidArgumentError(
          absl::StrCat("concept set for ", harm.name(), ": dim mismatch"));
    }
  }
  return ConceptSet(std::move(harm), std::move(words), std::move(vectors));
}

namespace {

struct ConceptLine {
  std::string word;
  std::optional<EmbeddingVector> vector;
};

absl::StatusOr<std::map<HarmType, std::vector<ConceptLine>>> ReadConceptLines(
    std::istream& input) {
  std::map<HarmType, std::vector<ConceptLine>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    const absl::string_view trimmed = TrimLine(line);
    if (trimmed.empty()) continue;
    auto obj = ParseJsonLine(trimmed, line_no);
    if (!obj.ok()) return obj.status();
    if (!obj->contains("harm_type") || !obj->at("harm_type").is_string() ||
        !obj->contains("word") || !obj->at("word").is_string()) {
      return LineError(line_no, "concept line needs harm_type and word");
    }
    auto harm = HarmType::Parse(obj->at("harm_type").get<std::string>());
    if (!harm.ok()) return LineError(line_no, harm.status().message());
    ConceptLine entry{obj->at("word").get<std::string>(), std::nullopt};
    if (entry.word.empty()) return LineError(line_no, "empty concept word");
    if (obj->contains("values")) {
      auto vec = ParseEmbeddingObject(*obj, "concept");
      if (!vec.ok()) return LineError(line_no, vec.status().message());
      entry.vector = *std::move(vec);
    }
    auto& bucket = out[*harm];
    for (const auto& existing : bucket) {
      if (existing.word == entry.word) {
        return LineError(line_no,
                         absl::StrCat("duplicate concept word '", entry.word,
                                      "' for ", harm->name()));
      }
    }
    bucket.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

absl::StatusOr<ConceptWords> ParseConceptWords(std::istream& input) {
  auto lines = ReadConceptLines(input);
  if (!lines.ok()) return lines.status();
  ConceptWords out;
  for (const auto& [harm, entries] : *lines) {
    auto& words = out[harm];
    for (const auto& e : entries) words.push_back(e.word);
  }
  return out;
}

absl::StatusOr<std::map<HarmType, ConceptSet>> ParseConcepts(
    std::istream& concept_file, std::span<const EmbeddingRow> sidecar,
    const std::optional<HarmType>& only) {
  auto lines = ReadConceptLines(concept_file);
  if (!lines.ok()) return lines.status();

  std::map<std::string, const EmbeddingVector*> by_word;
  for (const EmbeddingRow& row : sidecar) {
    if (row.kind != EmbeddingKind::kConcept) continue;
    if (!by_word.emplace(*row.word, &row.vector).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate concept embedding for word '", *row.word,
                       "'"));
    }
  }

  std::map<HarmType, ConceptSet> out;
  for (const auto& [harm, entries] : *lines) {
    if (only && harm != *only) continue;
    std::vector<std::string> words;
    std::vector<EmbeddingVector> vectors;
    for (const auto& e : entries) {
      words.push_back(e.word);
      if (e.vector) {
        vectors.push_back(*e.vector);
        continue;
      }
      auto it = by_word.find(e.word);
      if (it == by_word.end()) {
        return absl::NotFoundError(absl::StrCat(
            "concept word '", e.word, "' (", harm.name(),
            ") has no embedding row"));
      }
      vectors.push_back(*it->second);
    }
    auto set = ConceptSet::Make(harm, std::move(words), std::move(vectors));
    if (!set.ok()) return set.status();
    out.emplace(harm, *std::move(set));
  }
  return out;
}

std::string BundledConceptFile() {
  std::string out;
  for (const auto& [name, words] :
       {std::pair{kSexuallyExplicit, &BundledSexuallyExplicit()},
        std::pair{kViolence, &BundledViolence()}}) {
    for (const auto& w : *words) {
      out += json{{"harm_type", name}, {"word", w}}.dump();
      out += '\n';
    }
  }
  return out;
}

absl::StatusOr<std::vector<std::string>> BundledConceptWords(
    const HarmType& harm) {
  if (harm.name() == kSexuallyExplicit) return BundledSexuallyExplicit();
  if (harm.name() == kViolence) return BundledViolence();
  return absl::NotFoundError(
      absl::StrCat("no bundled concepts for harm type ", harm.name()));
}

absl::StatusOr<Capability> ParseCapability(absl::string_view name) {
  if (name == "scores") return Capability::kScores;
  if (name == "embeddings") return Capability::kEmbeddings;
  if (name == "annotations") return Capability::kAnnotations;
  if (name == "faces") return Capability::kFaces;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown capability '", name, "'"));
}

absl::string_view CapabilityName(Capability capability) {
  switch (capability) {
    case Capability::kScores:
      return "scores";
    case Capability::kEmbeddings:
      return "embeddings";
    case Capability::kAnnotations:
      return "annotations";
    case Capability::kFaces:
      return "faces";
  }
  return "";
}

ValidationReport ValidateDataset(const Dataset& dataset,
                                 const std::set<Capability>& required) {
  ValidationReport report;
  report.total = dataset.size();
  for (Capability c : required) {
    report.satisfied[c] = 0;
    report.offenders[c] = {};
  }
  for (const Record& r : dataset.records()) {
    for (Capability c : required) {
      bool ok = false;
      switch (c) {
        case Capability::kScores:
          ok = r.text_scores && r.image_scores;
          break;
        case Capability::kEmbeddings:
          ok = r.text_embedding && r.image_embedding;
          break;
        case Capability::kAnnotations:
          ok = r.annotations.has_value();
          break;
        case Capability::kFaces:
          ok = r.faces.has_value();
          break;
      }
      if (ok) {
        ++report.satisfied[c];
      } else {
        report.offenders[c].push_back(r.id);
      }
    }
  }
  return report;
}

}  // namespace harmamp
