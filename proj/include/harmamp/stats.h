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

// Deterministic numeric kernels used by threshold calibration: summary
// statistics, interpolated percentiles, and least-squares polynomial fits.

#ifndef HARMAMP_STATS_H_
#define HARMAMP_STATS_H_

#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace harmamp {
namespace stats {

// Population summary (divisor n) of a sample.
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
};

// Coefficients in increasing power order: b0 + b1 x + ... + b_d x^d.
class PolyCoeffs {
 public:
  PolyCoeffs() : coefficients_{0.0} {}
  explicit PolyCoeffs(std::vector<double> coefficients);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  std::vector<double> coefficients_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Single pass (Welford) in input order. Fails on an empty sample.
absl::StatusOr<SampleSummary> MeanStd(std::span<const double> samples);

// Linear interpolation between order statistics at rank (q/100)(n-1).
// `q` must lie in [0, 100].
absl::StatusOr<double> Percentile(std::span<const double> samples, double q);

// Least-squares polynomial of the given degree. Degree 1 uses the centered
// closed form; higher degrees solve the normal equations with partial
// pivoting. Requires at least degree+1 distinct abscissae.
absl::StatusOr<PolyCoeffs> FitPolynomial(std::span<const Point> points,
                                         int degree);

// Horner evaluation.
double EvalPolynomial(const PolyCoeffs& coeffs, double x);

// Sum of squared residuals of `coeffs` over `points`.
double SumSquaredError(const PolyCoeffs& coeffs, std::span<const Point> points);

}  // namespace stats
}  // namespace harmamp

#endif  // HARMAMP_STATS_H_
