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

// Scoring detector output against ground-truth amplification labels.

#ifndef HARMAMP_EVAL_H_
#define HARMAMP_EVAL_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace harmamp {
namespace eval {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

// Zero denominators yield 0 and set the matching degenerate flag.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;

  bool any_degenerate() const {
    return precision_degenerate || recall_degenerate || f1_degenerate;
  }
};

absl::StatusOr<ConfusionMatrix> Confusion(const std::vector<bool>& predictions,
                                          const std::vector<bool>& truths);

Prf ComputePrf(const ConfusionMatrix& m);

struct PrPoint {
  double tau = 0.0;
  ConfusionMatrix matrix;
  Prf prf;
};

struct PrCurve {
  std::vector<PrPoint> points;
};

// Inclusive arithmetic grid start, start+step, ..., <= stop.
class Grid {
 public:
  static absl::StatusOr<Grid> Make(double start, double stop, double step);
  // "start:stop:step", e.g. "-1:1:0.001".
  static absl::StatusOr<Grid> Parse(absl::string_view spec);

  double start() const { return start_; }
  double stop() const { return stop_; }
  double step() const { return step_; }
  std::size_t size() const { return size_; }
  std::vector<double> Values() const;

 private:
  Grid(double start, double stop, double step, std::size_t size)
      : start_(start), stop_(stop), step_(step), size_(size) {}
  double start_;
  double stop_;
  double step_;
  std::size_t size_;
};

inline constexpr absl::string_view kDefaultGrid = "-1:1:0.001";

// Predicts flagged iff diff > tau for every tau of `grid` (ascending).
// A label set without positives still yields a curve, with recall flagged
// degenerate at every point.
absl::StatusOr<PrCurve> PrSweep(std::span<const double> diff_scores,
                                const std::vector<bool>& truths,
                                std::span<const double> grid);

struct BestThreshold {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Grid point with maximal F1 among points whose F1 is defined; ties go to the
// smallest tau.
absl::StatusOr<BestThreshold> BestF1Threshold(const PrCurve& curve);

struct ScoredOutcome {
  std::string record_id;
  bool flagged = false;
};

struct GroupMetrics {
  std::string group;
  ConfusionMatrix matrix;
  Prf prf;
};

// Independent confusion matrices per group label, ordered by label. Outcomes
// without a truth or a group are skipped; empty groups do not appear.
std::vector<GroupMetrics> GroupedMetrics(
    std::span<const ScoredOutcome> outcomes,
    const std::map<std::string, bool>& truths,
    const std::map<std::string, std::string>& groups);

}  // namespace eval
}  // namespace harmamp

#endif  // HARMAMP_EVAL_H_
