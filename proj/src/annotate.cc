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

#include "harmamp/annotate.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace harmamp {
namespace annotate {

absl::string_view GenderGroupName(GenderGroup group) {
  switch (group) {
    case GenderGroup::kFemale:
      return "female";
    case GenderGroup::kMale:
      return "male";
    case GenderGroup::kExcluded:
      return "excluded";
  }
  return "excluded";
}

absl::StatusOr<double> Confidence(int votes, int num_raters) {
  if (num_raters <= 0) {
    return absl::InvalidArgumentError("confidence: num_raters must be >= 1");
  }
  if (votes < 0 || votes > num_raters) {
    return absl::InvalidArgumentError(absl::StrCat(
        "confidence: votes=", votes, " outside [0, ", num_raters, "]"));
  }
  return static_cast<double>(votes) / static_cast<double>(num_raters);
}

absl::StatusOr<bool> GroundTruth(double image_conf, double text_conf) {
  if (!(image_conf >= 0.0 && image_conf <= 1.0) ||
      !(text_conf >= 0.0 && text_conf <= 1.0)) {
    return absl::InvalidArgumentError(
        "ground_truth: confidences must lie in [0, 1]");
  }
  return image_conf > text_conf;
}

GenderGroup MajorityGender(std::span<const FaceLabel> faces) {
  int female = 0;
  int male = 0;
  for (FaceLabel f : faces) {
    if (f == FaceLabel::kFemale) ++female;
    if (f == FaceLabel::kMale) ++male;
  }
  if (female > male) return GenderGroup::kFemale;
  if (male > female) return GenderGroup::kMale;
  return GenderGroup::kExcluded;
}

absl::StatusOr<GenderGroup> MajorityGender(
    std::span<const std::string> face_labels) {
  std::vector<FaceLabel> faces;
  faces.reserve(face_labels.size());
  for (const auto& s : face_labels) {
    auto label = ParseFaceLabel(s);
    if (!label.ok()) return label.status();
    faces.push_back(*label);
  }
  return MajorityGender(faces);
}

absl::StatusOr<std::optional<GroundTruthLabel>> LabelRecord(
    const Record& record, const HarmType& harm) {
  const AnnotationCounts* counts = record.Annotation(harm);
  if (counts == nullptr) return std::optional<GroundTruthLabel>();
  auto image_conf = Confidence(counts->image_votes, counts->num_raters);
  if (!image_conf.ok()) return image_conf.status();
  auto text_conf = Confidence(counts->text_votes, counts->num_raters);
  if (!text_conf.ok()) return text_conf.status();
  auto amplified = GroundTruth(*image_conf, *text_conf);
  if (!amplified.ok()) return amplified.status();
  return std::optional<GroundTruthLabel>(GroundTruthLabel{
      record.id, harm, *amplified, *image_conf, *text_conf});
}

absl::StatusOr<std::vector<GroundTruthLabel>> LabelDataset(
    const Dataset& dataset, const HarmType& harm) {
  std::vector<GroundTruthLabel> labels;
  for (const Record& r : dataset.records()) {
    auto label = LabelRecord(r, harm);
    if (!label.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("record '", r.id, "': ", label.status().message()));
    }
    if (label->has_value()) labels.push_back(**label);
  }
  return labels;
}

GenderAssignment AssignGender(const Record& record) {
  GenderAssignment out{record.id, GenderGroup::kExcluded};
  if (record.faces) out.label = MajorityGender(*record.faces);
  return out;
}

}  // namespace annotate
}  // namespace harmamp
