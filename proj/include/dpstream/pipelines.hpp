// Copyright 2026 The dpstream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSTREAM_PIPELINES_HPP_
#define DPSTREAM_PIPELINES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpstream/laplace.hpp"
#include "dpstream/privacy.hpp"

namespace dpstream {

inline constexpr int kMaxFeatures = 4;

// One synthetic stream record. Stands in for a platform's raw rows; each
// trainer reads the fields it needs (features+label for regression,
// key+label for group-bys, label alone for scalar statistics).
struct Record {
  std::array<double, kMaxFeatures> features{};
  double label = 0.0;
  int key = 0;
  int64_t arrival_index = 0;
};

// Deterministic record generator: same seed, same stream, and records are
// addressable by index so every strategy in a comparison sees identical
// data.
struct SyntheticSource {
  int dim = 1;
  std::vector<double> weights;        // ground-truth linear weights
  double label_noise = 0.0;           // half-width of uniform label noise
  double feature_min = -1.0;
  double feature_max = 1.0;
  int nkeys = 1;
  std::vector<double> group_offsets;  // per-key additive mean table
  bool classification = false;        // labels in {0,1}
  double majority_rate = 0.743;       // P(label == 0) for classification
  uint64_t seed = 0;

  void Validate() const;
};

Record MakeRecord(const SyntheticSource& src, int64_t index);
std::vector<Record> GenerateStream(const SyntheticSource& src, int64_t n);
std::vector<Record> GenerateRange(const SyntheticSource& src, int64_t begin,
                                  int64_t end);

enum class TrainerKind { kGroupMeans, kScalarStat, kLinearModel };

std::string ToString(TrainerKind k);
TrainerKind TrainerFromString(const std::string& s);

struct TrainedArtifact {
  TrainerKind kind = TrainerKind::kScalarStat;
  std::vector<double> parameters;  // finite by construction
  PrivacyParams training_spend;
  int64_t window_begin_block = -1;  // filled by the scheduler
  int64_t window_end_block = -1;

  std::string LogRecord() const;
};

struct GroupByMeans {
  std::vector<std::optional<double>> means;  // absent when the noised count
                                             // came out nonpositive
  PrivacyParams spent;
};

// Per-key means with a noised count and noised clipped-value sum per key.
// Each record carries exactly one key, so the per-key releases compose in
// parallel and the whole call costs epsilon: epsilon/2 on counts,
// epsilon/2 on sums.
GroupByMeans DpGroupByMean(std::span<const Record> records, int nkeys,
                           double epsilon, double value_range,
                           NoiseSource& noise);

struct ScalarStat {
  std::optional<double> mean;  // empty on training failure (count <= 0)
  PrivacyParams spent;
};

// Noised sum over noised count of values clipped to [0, range_b]; epsilon
// split evenly between the two releases.
ScalarStat DpScalarStat(std::span<const double> values, double epsilon,
                        double range_b, NoiseSource& noise);

inline std::vector<double> LabelsOf(std::span<const Record> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

struct LinregConfig {
  int dim = 1;
  double epsilon = 1.0;
  double label_range = 1.0;  // labels clipped to [0, label_range]
  double ridge = 0.1;        // regularization added to the noised normal
                             // equations
};

// Linear regression through noised sufficient statistics: X'X and X'y on
// clipped data (features scaled into the unit L2 ball, labels clipped),
// each noised at its own sensitivity with half the budget, then the
// ridge-regularized system is solved. Returns nothing when the regularized
// system is not positive definite (training failure).
std::optional<TrainedArtifact> DpLinreg(std::span<const Record> records,
                                        const LinregConfig& cfg,
                                        NoiseSource& noise);

// Prediction with a trained linear model on ball-clipped features.
double LinregPredict(const TrainedArtifact& model, const Record& r);

// Squared-error losses of a linear model over records, clipped to
// [0, loss_range] for the loss validator.
std::vector<double> LinregLosses(const TrainedArtifact& model,
                                 std::span<const Record> records,
                                 double label_range, double loss_range);

}  // namespace dpstream

#endif  // DPSTREAM_PIPELINES_HPP_
