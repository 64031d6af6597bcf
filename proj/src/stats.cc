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

#include "harmamp/stats.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace harmamp {
namespace stats {

PolyCoeffs::PolyCoeffs(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) coefficients_.push_back(0.0);
}

absl::StatusOr<SampleSummary> MeanStd(std::span<const double> samples) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("mean_std: empty sample");
  }
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (const double x : samples) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  SampleSummary summary;
  summary.n = n;
  summary.mean = mean;
  summary.std = std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));
  return summary;
}

absl::StatusOr<double> Percentile(std::span<const double> samples, double q) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("percentile: empty sample");
  }
  if (!(q >= 0.0 && q <= 100.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("percentile: q=", q, " outside [0, 100]"));
  }
  std::vector<double> work(samples.begin(), samples.end());
  const double rank = (q / 100.0) * static_cast<double>(work.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));

  // nth_element leaves every element after `lo` >= work[lo], so the next
  // order statistic is the minimum of that tail.
  std::nth_element(work.begin(), work.begin() + lo, work.end());
  const double lower = work[lo];
  if (hi == lo) return lower;
  const double upper = *std::min_element(work.begin() + lo + 1, work.end());
  const double frac = rank - static_cast<double>(lo);
  return lower + frac * (upper - lower);
}

namespace {

absl::StatusOr<PolyCoeffs> FitLinear(std::span<const Point> points) {
  const double n = static_cast<double>(points.size());
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (const Point& p : points) {
    sum_x += p.x;
    sum_y += p.y;
  }
  const double mean_x = sum_x / n;
  const double mean_y = sum_y / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const Point& p : points) {
    const double dx = p.x - mean_x;
    sxx += dx * dx;
    sxy += dx * (p.y - mean_y);
  }
  if (sxx <= 0.0) {
    return absl::FailedPreconditionError("fit_polynomial: degenerate system");
  }
  const double slope = sxy / sxx;
  return PolyCoeffs({mean_y - slope * mean_x, slope});
}

absl::StatusOr<PolyCoeffs> FitNormalEquations(std::span<const Point> points,
                                              int degree) {
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  // Augmented matrix [A^T A | A^T y], row-major.
  std::vector<std::vector<double>> system(m, std::vector<double>(m + 1, 0.0));
  std::vector<double> powers(2 * m - 1);
  for (const Point& p : points) {
    double v = 1.0;
    for (double& pw : powers) {
      pw = v;
      v *= p.x;
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) system[r][c] += powers[r + c];
      system[r][m] += powers[r] * p.y;
    }
  }

  double scale = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    scale = std::max(scale, std::abs(system[r][r]));
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(system[r][col]) > std::abs(system[pivot][col])) pivot = r;
    }
    if (std::abs(system[pivot][col]) <= 1e-14 * scale) {
      return absl::FailedPreconditionError(
          "fit_polynomial: degenerate normal system");
    }
    std::swap(system[col], system[pivot]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double factor = system[r][col] / system[col][col];
      for (std::size_t c = col; c <= m; ++c) {
        system[r][c] -= factor * system[col][c];
      }
    }
  }
  std::vector<double> coeffs(m, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    double acc = system[i][m];
    for (std::size_t c = i + 1; c < m; ++c) acc -= system[i][c] * coeffs[c];
    coeffs[i] = acc / system[i][i];
  }
  return PolyCoeffs(std::move(coeffs));
}

}  // namespace

absl::StatusOr<PolyCoeffs> FitPolynomial(std::span<const Point> points,
                                         int degree) {
  if (degree < 0) {
    return absl::InvalidArgumentError("fit_polynomial: negative degree");
  }
  std::set<double> distinct;
  for (const Point& p : points) distinct.insert(p.x);
  if (distinct.size() < static_cast<std::size_t>(degree) + 1) {
    return absl::FailedPreconditionError(absl::StrCat(
        "fit_polynomial: ", distinct.size(),
        " distinct points are insufficient for degree ", degree));
  }
  if (degree == 0) {
    double sum = 0.0;
    for (const Point& p : points) sum += p.y;
    return PolyCoeffs({sum / static_cast<double>(points.size())});
  }
  if (degree == 1) return FitLinear(points);
  return FitNormalEquations(points, degree);
}

double EvalPolynomial(const PolyCoeffs& coeffs, double x) {
  const auto& c = coeffs.coefficients();
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double SumSquaredError(const PolyCoeffs& coeffs,
                       std::span<const Point> points) {
  double sse = 0.0;
  for (const Point& p : points) {
    const double r = p.y - EvalPolynomial(coeffs, p.x);
    sse += r * r;
  }
  return sse;
}

}  // namespace stats
}  // namespace harmamp
