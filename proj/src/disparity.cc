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

#include "harmamp/disparity.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace harmamp {
namespace disparity {

absl::StatusOr<GroupRate> AmplificationRate(const std::vector<bool>& truths,
                                            std::string group) {
  if (truths.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("amplification_rate: group '", group, "' is empty"));
  }
  GroupRate out;
  out.group = std::move(group);
  out.total = truths.size();
  for (const bool t : truths) out.amplified += t ? 1 : 0;
  out.rate = static_cast<double>(out.amplified) / static_cast<double>(out.total);
  return out;
}

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

absl::StatusOr<ProportionTest> TwoProportionTest(std::size_t k1, std::size_t n1,
                                                 std::size_t k2,
                                                 std::size_t n2) {
  if (n1 == 0 || n2 == 0 || k1 > n1 || k2 > n2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "two_proportion_test: need 0 <= k <= n, n >= 1; got (", k1, ", ", n1,
        ") vs (", k2, ", ", n2, ")"));
  }
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / (dn1 + dn2);
  ProportionTest out;
  if (k1 + k2 == 0 || k1 + k2 == n1 + n2) {
    out.degenerate = true;
    return out;
  }
  const double diff = static_cast<double>(k1) / dn1 - static_cast<double>(k2) / dn2;
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / dn1 + 1.0 / dn2));
  out.z = diff / se;
  // erfc keeps precision in the far tail where 1 - cdf would cancel.
  out.p_two_sided = std::erfc(std::abs(out.z) / std::numbers::sqrt2);
  return out;
}

std::vector<double> SignificantAt(double p) {
  std::vector<double> out;
  for (const double level : kSignificanceLevels) {
    if (p < level) out.push_back(level);
  }
  return out;
}

}  // namespace disparity
}  // namespace harmamp
