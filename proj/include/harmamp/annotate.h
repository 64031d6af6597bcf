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

// Rater votes to confidence scores, ground-truth amplification labels, and
// majority perceived-gender assignment.

#ifndef HARMAMP_ANNOTATE_H_
#define HARMAMP_ANNOTATE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "harmamp/dataset.h"

namespace harmamp {
namespace annotate {

struct GroundTruthLabel {
  std::string record_id;
  HarmType harm_type;
  bool amplified = false;
  double image_conf = 0.0;
  double text_conf = 0.0;
};

enum class GenderGroup { kFemale, kMale, kExcluded };

absl::string_view GenderGroupName(GenderGroup group);

struct GenderAssignment {
  std::string record_id;
  GenderGroup label = GenderGroup::kExcluded;
};

// votes / num_raters, exactly.
absl::StatusOr<double> Confidence(int votes, int num_raters);

// True iff image_conf strictly exceeds text_conf.
absl::StatusOr<bool> GroundTruth(double image_conf, double text_conf);

// Strict majority among female/male faces. Other labels count toward
// neither side. Empty lists and ties are excluded.
GenderGroup MajorityGender(std::span<const FaceLabel> faces);
absl::StatusOr<GenderGroup> MajorityGender(
    std::span<const std::string> face_labels);

// Label for one record, or nullopt when the record has no annotations for
// `harm`.
absl::StatusOr<std::optional<GroundTruthLabel>> LabelRecord(
    const Record& record, const HarmType& harm);

// Labels for every annotated record of `harm`, in dataset order.
absl::StatusOr<std::vector<GroundTruthLabel>> LabelDataset(
    const Dataset& dataset, const HarmType& harm);

GenderAssignment AssignGender(const Record& record);

}  // namespace annotate
}  // namespace harmamp

#endif  // HARMAMP_ANNOTATE_H_
