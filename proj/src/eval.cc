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

#include "harmamp/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace harmamp {
namespace eval {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

absl::StatusOr<ConfusionMatrix> Confusion(const std::vector<bool>& predictions,
                                          const std::vector<bool>& truths) {
  if (predictions.size() != truths.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("confusion: ", predictions.size(), " predictions vs ",
                     truths.size(), " truths"));
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i]) {
      truths[i] ? ++m.tp : ++m.fp;
    } else {
      truths[i] ? ++m.fn : ++m.tn;
    }
  }
  return m;
}

Prf ComputePrf(const ConfusionMatrix& m) {
  Prf out;
  const auto tp = static_cast<double>(m.tp);
  if (m.tp + m.fp == 0) {
    out.precision_degenerate = true;
  } else {
    out.precision = tp / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn == 0) {
    out.recall_degenerate = true;
  } else {
    out.recall = tp / static_cast<double>(m.tp + m.fn);
  }
  // 2PR/(P+R) == 2tp/(2tp+fp+fn); the count form is exact for equal ratios.
  if (m.tp == 0) {
    out.f1_degenerate = true;
  } else {
    out.f1 = 2.0 * tp / static_cast<double>(2 * m.tp + m.fp + m.fn);
  }
  return out;
}

absl::StatusOr<Grid> Grid::Make(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) ||
      !(step > 0.0) || stop < start) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid grid ", start, ":", stop, ":", step,
        " (need finite start <= stop and step > 0)"));
  }
  const double span = (stop - start) / step;
  if (span > 1e8) return absl::InvalidArgumentError("grid too large");
  const auto size = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  return Grid(start, stop, step, size);
}

absl::StatusOr<Grid> Grid::Parse(absl::string_view spec) {
  std::vector<absl::string_view> parts = absl::StrSplit(spec, ':');
  if (parts.size() != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("grid spec '", spec, "' must be start:stop:step"));
  }
  double values[3];
  for (int i = 0; i < 3; ++i) {
    const auto part = parts[i];
    auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), values[i]);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("grid spec '", spec, "': bad number '", part, "'"));
    }
  }
  return Make(values[0], values[1], values[2]);
}

std::vector<double> Grid::Values() const {
  std::vector<double> out;
  out.reserve(size_);
  for (std::size_t k = 0; k < size_; ++k) {
    const double v = start_ + static_cast<double>(k) * step_;
    // Snap to 12 decimals so 0.1-style steps print as written.
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

absl::StatusOr<PrCurve> PrSweep(std::span<const double> diff_scores,
                                const std::vector<bool>& truths,
                                std::span<const double> grid) {
  if (truths.empty()) return absl::InvalidArgumentError("pr_sweep: no truths");
  if (diff_scores.size() != truths.size()) {
    return absl::InvalidArgumentError("pr_sweep: scores and truths differ in length");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    return absl::InvalidArgumentError("pr_sweep: grid must be ascending");
  }
  for (const double d : diff_scores) {
    if (std::isnan(d)) return absl::InvalidArgumentError("pr_sweep: NaN score");
  }

  std::vector<std::size_t> order(diff_scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return diff_scores[a] < diff_scores[b];
  });
  std::vector<double> sorted(order.size());
  // positives_above[i] = positives among sorted[i..].
  std::vector<std::size_t> positives_above(order.size() + 1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = diff_scores[order[i]];
  for (std::size_t i = order.size(); i-- > 0;) {
    positives_above[i] = positives_above[i + 1] + (truths[order[i]] ? 1 : 0);
  }
  const std::size_t positives = positives_above[0];
  const std::size_t n = sorted.size();

  PrCurve curve;
  curve.points.reserve(grid.size());
  for (const double tau : grid) {
    const auto first_flagged = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), tau) - sorted.begin());
    PrPoint point;
    point.tau = tau;
    point.matrix.tp = positives_above[first_flagged];
    point.matrix.fp = (n - first_flagged) - point.matrix.tp;
    point.matrix.fn = positives - point.matrix.tp;
    point.matrix.tn = first_flagged - point.matrix.fn;
    point.prf = ComputePrf(point.matrix);
    curve.points.push_back(point);
  }
  return curve;
}

absl::StatusOr<BestThreshold> BestF1Threshold(const PrCurve& curve) {
  if (curve.points.empty()) {
    return absl::InvalidArgumentError("best_f1_threshold: empty curve");
  }
  const PrPoint* best = nullptr;
  for (const PrPoint& p : curve.points) {
    if (p.prf.f1_degenerate) continue;
    if (best == nullptr || p.prf.f1 > best->prf.f1 ||
        (p.prf.f1 == best->prf.f1 && p.tau < best->tau)) {
      best = &p;
    }
  }
  if (best == nullptr) {
    return absl::FailedPreconditionError("no achievable F1 on this curve");
  }
  return BestThreshold{best->tau, best->prf.precision, best->prf.recall,
                       best->prf.f1};
}

std::vector<GroupMetrics> GroupedMetrics(
    std::span<const ScoredOutcome> outcomes,
    const std::map<std::string, bool>& truths,
    const std::map<std::string, std::string>& groups) {
  std::map<std::string, ConfusionMatrix> by_group;
  for (const ScoredOutcome& o : outcomes) {
    auto truth = truths.find(o.record_id);
    auto group = groups.find(o.record_id);
    if (truth == truths.end() || group == groups.end()) continue;
    ConfusionMatrix& m = by_group[group->second];
    if (o.flagged) {
      truth->second ? ++m.tp : ++m.fp;
    } else {
      truth->second ? ++m.fn : ++m.tn;
    }
  }
  std::vector<GroupMetrics> out;
  for (const auto& [label, m] : by_group) {
    out.push_back(GroupMetrics{label, m, ComputePrf(m)});
  }
  return out;
}

}  // namespace eval
}  // namespace harmamp
