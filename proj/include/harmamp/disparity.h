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

// Subgroup amplification rates and the pooled two-proportion z-test.

#ifndef HARMAMP_DISPARITY_H_
#define HARMAMP_DISPARITY_H_

#include <cstddef>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace harmamp {
namespace disparity {

struct GroupRate {
  std::string group;
  std::size_t amplified = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

absl::StatusOr<GroupRate> AmplificationRate(const std::vector<bool>& truths,
                                            std::string group = "");

struct ProportionTest {
  double z = 0.0;
  double p_two_sided = 1.0;
  // Pooled proportion is 0 or 1; z and p are then reported as 0 and 1.
  bool degenerate = false;
};

absl::StatusOr<ProportionTest> TwoProportionTest(std::size_t k1, std::size_t n1,
                                                 std::size_t k2,
                                                 std::size_t n2);

// Standard normal CDF via the complementary error function.
double NormalCdf(double x);

inline constexpr double kSignificanceLevels[] = {0.05, 0.01, 0.001};

// Levels from kSignificanceLevels with p below them.
std::vector<double> SignificantAt(double p);

}  // namespace disparity
}  // namespace harmamp

#endif  // HARMAMP_DISPARITY_H_
