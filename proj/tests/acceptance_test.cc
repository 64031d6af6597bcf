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

// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fixtures.h"
#include "harmamp/annotate.h"
#include "harmamp/dataset.h"
#include "harmamp/detectors.h"
#include "harmamp/disparity.h"
#include "harmamp/eval.h"
#include "harmamp/stats.h"
#include "oracles.h"

namespace harmamp {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Collects the first few failures of one criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    std::string s = std::to_string(failures_) + " failure(s)";
    for (const auto& n : notes_) s += "; " + n;
    return s;
  }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

std::string Num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// AC1: percentile and mean/std against sort and two-pass oracles.
Check NumericKernels() {
  Check check;
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(1, 500);
  std::uniform_int_distribution<int> shape(0, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> normal(3.0, 10.0);
  for (int set = 0; set < 1000; ++set) {
    std::vector<double> xs(size(rng));
    const int kind = shape(rng);
    for (double& x : xs) {
      switch (kind) {
        case 0: x = u(rng); break;
        case 1: x = normal(rng); break;
        case 2: x = std::round(u(rng) * 10) / 10; break;
        default: x = std::exp(4 * u(rng)); break;
      }
    }
    for (double q : {0.0, 50.0, 95.0, 100.0}) {
      auto got = stats::Percentile(xs, q);
      const double want = oracle::SortPercentile(xs, q);
      check.Expect(got.ok() && std::abs(*got - want) <= 1e-12,
                   "set " + std::to_string(set) + " q=" + Num(q));
    }
    auto ms = stats::MeanStd(xs);
    const auto [mean, sd] = oracle::MeanStdTwoPass(xs);
    check.Expect(ms.ok() && std::abs(ms->mean - mean) <= 1e-12 &&
                     std::abs(ms->std - sd) <= 1e-12,
                 "mean_std set " + std::to_string(set));
  }
  const double secs = Seconds(start);
  check.Expect(secs < 5.0, "runtime " + Num(secs) + " s");
  return check;
}

// AC2: degree-1 fit against Cramer's rule, residual orthogonality, and
// optimality under coefficient perturbation.
Check LeastSquares() {
  Check check;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int set = 0; set < 200; ++set) {
    const int n = size(rng);
    const double a = u(rng), b = u(rng);
    std::vector<double> x(n), y(n);
    std::vector<stats::Point> pts(n);
    for (int i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = a + b * x[i] + noise(rng);
      pts[i] = {x[i], y[i]};
    }
    auto fit = stats::FitPolynomial(pts, 1);
    if (!fit.ok()) {
      check.Expect(false, "fit failed on set " + std::to_string(set));
      continue;
    }
    const auto [b0, b1] = oracle::LinearFitCramer(x, y);
    const auto& c = fit->coefficients();
    check.Expect(std::abs(c[0] - b0) <= 1e-9 && std::abs(c[1] - b1) <= 1e-9,
                 "coefficients set " + std::to_string(set));
    long double sr = 0, srx = 0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - (c[0] + c[1] * x[i]);
      sr += r;
      srx += static_cast<long double>(r) * x[i];
    }
    check.Expect(std::abs(sr) < 1e-9 && std::abs(srx) < 1e-9,
                 "orthogonality set " + std::to_string(set) + " sum_r=" +
                     Num(static_cast<double>(sr)) +
                     " sum_rx=" + Num(static_cast<double>(srx)));
    const double sse = stats::SumSquaredError(*fit, pts);
    for (int k = 0; k < 2; ++k) {
      for (double d : {-1e-3, 1e-3}) {
        std::vector<double> p = c;
        p[k] += d;
        check.Expect(stats::SumSquaredError(stats::PolyCoeffs(p), pts) >= sse,
                     "perturbation lowered SSE on set " + std::to_string(set));
      }
    }
  }
  return check;
}

// Text uniform on [0, 1]; image uniform on [0, hi_j] with
// hi_j = (0.3 + 0.1 j) / 0.95, so the bucket-j 95th percentile is 0.3 + 0.1 j.
std::vector<detect::ScorePair> LinearQuantilePairs(std::size_t n,
                                                   unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<detect::ScorePair> out(n);
  for (auto& p : out) {
    p.text = u(rng);
    const int j = oracle::BucketByScan(p.text, 5);
    p.image = u(rng) * (0.3 + 0.1 * j) / 0.95;
  }
  return out;
}

// AC3: calibrate on one sample, measure per-bucket flag rate on another.
Check DistributionEndToEnd() {
  Check check;
  const auto start = Clock::now();
  const HarmType harm = *HarmType::Parse("sexually_explicit");
  detect::CalibrationOptions opts;
  opts.n_buckets = 5;
  opts.stat = detect::ThresholdStat::kP95;
  opts.degree = 1;
  const auto train = LinearQuantilePairs(100000, 303);
  auto cal = detect::CalibrateFromPairs(harm, train, opts);
  if (!cal.ok()) {
    check.Expect(false, std::string(cal.status().message()));
    return check;
  }
  std::vector<std::size_t> flagged(5, 0), total(5, 0);
  for (const auto& p : LinearQuantilePairs(100000, 304)) {
    auto out = detect::DetectDistribution(p.text, p.image, *cal);
    if (!out.ok()) {
      check.Expect(false, std::string(out.status().message()));
      return check;
    }
    const int j = oracle::BucketByScan(p.text, 5);
    ++total[j];
    if (out->flagged) ++flagged[j];
  }
  for (int j = 0; j < 5; ++j) {
    const double frac = static_cast<double>(flagged[j]) / total[j];
    check.Expect(std::abs(frac - 0.05) <= 0.01,
                 "bucket " + std::to_string(j) + " flagged " + Num(frac));
  }
  const double secs = Seconds(start);
  check.Expect(secs < 30.0, "runtime " + Num(secs) + " s");
  return check;
}

// AC4: bucket flip over the full 101x101 grid.
Check BucketFlipGrid() {
  Check check;
  const auto partition = *detect::BucketPartition::Make(5);
  std::vector<std::vector<bool>> flip(101, std::vector<bool>(101));
  for (int t = 0; t <= 100; ++t) {
    for (int i = 0; i <= 100; ++i) {
      const double ts = t / 100.0, is = i / 100.0;
      auto out = detect::DetectBucketFlip(ts, is, partition);
      const bool want =
          oracle::BucketByScan(is, 5) > oracle::BucketByScan(ts, 5);
      flip[t][i] = out.ok() && out->flagged;
      check.Expect(out.ok() && out->flagged == want,
                   "text " + Num(ts) + " image " + Num(is));
    }
  }
  for (int t = 0; t <= 100; ++t) {
    for (int i = 0; i <= 100; ++i) {
      check.Expect(!(flip[t][i] && flip[i][t]),
                   "antisymmetry at " + std::to_string(t) + "," +
                       std::to_string(i));
    }
  }
  return check;
}

EmbeddingVector Vec(std::vector<double> v) {
  return *EmbeddingVector::Make(std::move(v));
}

ConceptSet Concepts(std::vector<std::vector<double>> vs) {
  std::vector<std::string> words;
  std::vector<EmbeddingVector> vectors;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    words.push_back("w" + std::to_string(i));
    vectors.push_back(Vec(vs[i]));
  }
  return *ConceptSet::Make(*HarmType::Parse("violence"), std::move(words),
                           std::move(vectors));
}

// AC5: co-embedding harm score properties.
Check CoembedProperties() {
  Check check;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> concept_vs(15, std::vector<double>(16));
  for (auto& v : concept_vs) {
    for (double& x : v) x = g(rng);
  }
  const ConceptSet concepts = Concepts(concept_vs);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> v(16);
    for (double& x : v) x = g(rng);
    auto base = detect::CoembedHarmScore(Vec(v), concepts);
    if (!base.ok()) {
      check.Expect(false, std::string(base.status().message()));
      continue;
    }
    check.Expect(*base >= -1.0 && *base <= 1.0, "bounds " + Num(*base));
    long double want = 0;
    for (const auto& c : concept_vs) want += oracle::Cosine(v, c);
    want /= concept_vs.size();
    check.Expect(std::abs(*base - static_cast<double>(want)) <= 1e-12,
                 "oracle mismatch vector " + std::to_string(k));
    for (double lambda : {1e-6, 1.0, 1e6}) {
      std::vector<double> scaled = v;
      for (double& x : scaled) x *= lambda;
      auto s = detect::CoembedHarmScore(Vec(scaled), concepts);
      check.Expect(s.ok() && std::abs(*s - *base) <= 1e-9,
                   "scale " + Num(lambda) + " vector " + std::to_string(k));
    }
  }
  const auto one = Concepts({{1, 0}});
  const auto two = Concepts({{1, 0}, {0, 1}});
  auto h1 = detect::CoembedHarmScore(Vec({1, 0}), one);
  auto h0 = detect::CoembedHarmScore(Vec({0, 1}), one);
  auto hh = detect::CoembedHarmScore(Vec({1, 0}), two);
  check.Expect(h1.ok() && std::abs(*h1 - 1.0) <= 1e-12, "self similarity");
  check.Expect(h0.ok() && std::abs(*h0 - 0.0) <= 1e-12, "orthogonality");
  check.Expect(hh.ok() && std::abs(*hh - 0.5) <= 1e-12, "average of two");
  return check;
}

// AC6: ground-truth comparison is strict.
Check GroundTruthSemantics() {
  Check check;
  auto amp = annotate::GroundTruth(0.8, 0.6);
  auto eq = annotate::GroundTruth(0.6, 0.6);
  check.Expect(amp.ok() && *amp, "(0.8, 0.6) not amplified");
  check.Expect(eq.ok() && !*eq, "equal confidences amplified");
  auto img = annotate::Confidence(4, 5);
  auto txt = annotate::Confidence(3, 5);
  check.Expect(img.ok() && txt.ok() && *img == 0.8 && *txt == 0.6,
               "vote confidences");
  return check;
}

// AC7: hand fixture and partition additivity.
Check MetricsFixture() {
  Check check;
  const std::vector<bool> preds = {1, 1, 0, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<bool> truths = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  auto m = eval::Confusion(preds, truths);
  check.Expect(m.ok() && *m == eval::ConfusionMatrix{2, 1, 1, 6}, "matrix");
  if (m.ok()) {
    const eval::Prf prf = eval::ComputePrf(*m);
    check.Expect(prf.precision == 2.0 / 3.0 && prf.recall == 2.0 / 3.0 &&
                     prf.f1 == 2.0 / 3.0,
                 "P/R/F1 not exactly 2/3");
  }

  std::mt19937_64 rng(707);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> group(0, 1 + trial % 6);
    std::vector<eval::ScoredOutcome> outcomes;
    std::map<std::string, bool> truth;
    std::map<std::string, std::string> groups;
    std::vector<bool> p, t;
    for (int i = 0; i < 200; ++i) {
      const std::string id = "r" + std::to_string(i);
      outcomes.push_back({id, coin(rng)});
      truth[id] = coin(rng);
      groups[id] = "g" + std::to_string(group(rng));
      p.push_back(outcomes.back().flagged);
      t.push_back(truth[id]);
    }
    eval::ConfusionMatrix sum;
    for (const auto& gm : eval::GroupedMetrics(outcomes, truth, groups)) {
      sum += gm.matrix;
    }
    check.Expect(sum == *eval::Confusion(p, t),
                 "partition trial " + std::to_string(trial));
  }
  return check;
}

// AC8: PR sweep monotonicity, endpoints, and tie-break.
Check PrSweepProperties() {
  Check check;
  const auto grid = eval::Grid::Parse(eval::kDefaultGrid)->Values();
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::uniform_int_distribution<int> size(5, 400);
  std::bernoulli_distribution coin(0.4);
  for (int set = 0; set < 50; ++set) {
    const int n = size(rng);
    std::vector<double> diffs(n);
    std::vector<bool> truths(n);
    for (int i = 0; i < n; ++i) {
      diffs[i] = u(rng);
      truths[i] = coin(rng);
    }
    truths[0] = true;
    auto curve = eval::PrSweep(diffs, truths, grid);
    if (!curve.ok()) {
      check.Expect(false, std::string(curve.status().message()));
      continue;
    }
    const double lo = *std::min_element(diffs.begin(), diffs.end());
    const double hi = *std::max_element(diffs.begin(), diffs.end());
    double prev = 1.0;
    for (const auto& pt : curve->points) {
      check.Expect(pt.prf.recall <= prev,
                   "recall rises at tau " + Num(pt.tau) + " set " +
                       std::to_string(set));
      prev = pt.prf.recall;
      if (pt.tau >= hi) {
        check.Expect(pt.prf.recall == 0.0, "recall above max at " + Num(pt.tau));
      }
      if (pt.tau < lo) {
        check.Expect(pt.prf.recall == 1.0, "recall below min at " + Num(pt.tau));
      }
    }
    check.Expect(curve->points.front().prf.recall == 1.0 &&
                     curve->points.back().prf.recall == 0.0,
                 "grid endpoints set " + std::to_string(set));
  }

  // For tau in [-0.5, 0.5): tp=2 fp=2 fn=0. For tau in [0.5, 0.9): tp=1
  // fp=0 fn=1. Both give F1 = 2/3, the maximum; the answer is -0.5.
  const std::vector<double> diffs = {0.9, 0.5, 0.5, 0.5, -0.5};
  const std::vector<bool> truths = {1, 1, 0, 0, 0};
  auto curve = eval::PrSweep(diffs, truths, grid);
  auto best = curve.ok() ? eval::BestF1Threshold(*curve)
                         : absl::StatusOr<eval::BestThreshold>(curve.status());
  check.Expect(best.ok() && best->tau == -0.5 && best->f1 == 2.0 / 3.0,
               best.ok() ? "best tau " + Num(best->tau) + " f1 " + Num(best->f1)
                         : std::string(best.status().message()));
  if (curve.ok()) {
    const auto& hi_tie = curve->points[1600];  // tau = 0.6
    check.Expect(hi_tie.tau == 0.6 && hi_tie.prf.f1 == 2.0 / 3.0,
                 "tie fixture lacks second maximum");
  }
  return check;
}

// AC9: disparity significance and normal CDF symmetry.
Check DisparityProperties() {
  Check check;
  auto gap = disparity::TwoProportionTest(80, 200, 40, 200);
  check.Expect(gap.ok() && gap->p_two_sided < 0.001,
               gap.ok() ? "p = " + Num(gap->p_two_sided) : "test failed");
  if (gap.ok()) {
    const double oracle_p = 2 * oracle::NormalUpperTailSimpson(std::abs(gap->z));
    check.Expect(std::abs(gap->p_two_sided - oracle_p) <= 1e-10 * oracle_p,
                 "p vs quadrature oracle");
  }
  auto same = disparity::TwoProportionTest(60, 200, 60, 200);
  check.Expect(same.ok() && same->z == 0.0 && same->p_two_sided == 1.0,
               "identical rates");
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    const double err =
        std::abs(disparity::NormalCdf(x) + disparity::NormalCdf(-x) - 1.0);
    check.Expect(err < 1e-12, "symmetry at " + Num(x));
  }
  return check;
}

int Shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// AC10: calibrate, detect and evaluate produce byte-identical files across
// thread counts and reruns.
Check Determinism() {
  Check check;
  fixtures::TempDir root;
  fixtures::WriteLines(root.File("measure.jsonl"),
                       fixtures::ScoredRecords(20000, 1010));
  auto eval_records = fixtures::ScoredRecords(20000, 1011);
  eval_records[7]["image_scores"] = nlohmann::json::object();
  fixtures::WriteLines(root.File("eval.jsonl"), eval_records);

  const std::vector<std::string> outputs = {
      "thresholds.json", "outcomes.jsonl", "outcomes.jsonl.skips.jsonl",
      "metrics.json"};
  const std::string bin = HARMAMP_BIN;
  std::vector<std::map<std::string, std::string>> runs;
  int index = 0;
  for (int threads : {1, 4, 16, 4, 1}) {
    const auto dir = root.path() / ("run" + std::to_string(index++));
    std::filesystem::create_directories(dir);
    std::filesystem::copy_file(root.File("measure.jsonl"), dir / "measure.jsonl");
    std::filesystem::copy_file(root.File("eval.jsonl"), dir / "eval.jsonl");
    const std::string prefix = "cd '" + dir.string() +
                               "' && HARMAMP_THREADS=" +
                               std::to_string(threads) + " '" + bin + "' ";
    const std::string quiet = " > /dev/null 2>&1";
    const int rc1 = Shell(prefix +
                          "calibrate --in measure.jsonl --harm sexually_explicit "
                          "--out thresholds.json" + quiet);
    const int rc2 = Shell(prefix +
                          "detect --method distribution --thresholds "
                          "thresholds.json --in eval.jsonl --out outcomes.jsonl" +
                          quiet);
    const int rc3 = Shell(prefix +
                          "evaluate --outcomes outcomes.jsonl --in eval.jsonl "
                          "--group gender --out metrics.json" + quiet);
    check.Expect(rc1 == 0 && rc2 == 0 && rc3 == 0,
                 "exit codes " + std::to_string(rc1) + "/" +
                     std::to_string(rc2) + "/" + std::to_string(rc3) +
                     " at threads " + std::to_string(threads));
    std::map<std::string, std::string> files;
    for (const auto& name : outputs) {
      files[name] = fixtures::ReadFile((dir / name).string());
      check.Expect(!files[name].empty(), name + " empty");
    }
    runs.push_back(std::move(files));
  }
  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (const auto& name : outputs) {
      check.Expect(runs[r].at(name) == runs[0].at(name),
                   name + " differs in run " + std::to_string(r));
    }
  }
  return check;
}

}  // namespace
}  // namespace harmamp

int main() {
  using harmamp::Check;
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1 numeric kernels vs oracles", harmamp::NumericKernels},
      {"AC2 least-squares fit", harmamp::LeastSquares},
      {"AC3 distribution thresholds end to end", harmamp::DistributionEndToEnd},
      {"AC4 bucket flip grid equivalence", harmamp::BucketFlipGrid},
      {"AC5 co-embedding properties", harmamp::CoembedProperties},
      {"AC6 ground-truth semantics", harmamp::GroundTruthSemantics},
      {"AC7 metrics fixture", harmamp::MetricsFixture},
      {"AC8 PR sweep", harmamp::PrSweepProperties},
      {"AC9 disparity", harmamp::DisparityProperties},
      {"AC10 determinism across threads", harmamp::Determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = harmamp::Clock::now();
    const Check check = c.run();
    const double secs = harmamp::Seconds(start);
    if (check.ok()) {
      std::printf("[PASS] %s (%.2f s)\n", c.name, secs);
    } else {
      ++failed;
      std::printf("[FAIL] %s: %s\n", c.name, check.Summary().c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
