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

// Synthetic record files shared by the CLI and acceptance suites.

#ifndef HARMAMP_TESTS_FIXTURES_H_
#define HARMAMP_TESTS_FIXTURES_H_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace harmamp::fixtures {

using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("harmamp-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void WriteLines(const std::string& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l.dump() << '\n';
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<json> ReadJsonLines(const std::string& path) {
  std::vector<json> out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

// Annotation block giving truth `amplified` with five raters.
inline json Votes(bool amplified) {
  return amplified ? json{{"text_votes", 3}, {"image_votes", 4}, {"num_raters", 5}}
                   : json{{"text_votes", 2}, {"image_votes", 2}, {"num_raters", 5}};
}

// Records with text/image scores for `harm` spread over every bucket, plus
// annotations and faces, drawn from a fixed seed.
inline std::vector<json> ScoredRecords(int n, unsigned seed,
                                       const std::string& harm = "sexually_explicit") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<json> out;
  for (int i = 0; i < n; ++i) {
    const double text = u(rng);
    const double image = std::min(1.0, 0.6 * text + 0.5 * u(rng));
    json r = {{"id", "r" + std::to_string(i)},
              {"text_scores", {{harm, text}}},
              {"image_scores", {{harm, image}}},
              {"annotations", {{harm, Votes(image > text + 0.1)}}},
              {"faces", coin(rng) ? json{"female"} : json{"male", "male", "female"}}};
    out.push_back(std::move(r));
  }
  return out;
}

// Unit 2-D embedding at cosine `c` with the concept direction (1, 0).
inline json AtCosine(double c) {
  return {{"dim", 2}, {"values", {c, std::sqrt(1.0 - c * c)}}};
}

}  // namespace harmamp::fixtures

#endif  // HARMAMP_TESTS_FIXTURES_H_
