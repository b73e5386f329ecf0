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

#include "dpstream/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpstream/event_log.hpp"
#include "dpstream/rng.hpp"

namespace dpstream {

void SyntheticSource::Validate() const {
  if (dim < 1 || dim > kMaxFeatures) {
    throw std::invalid_argument("source dim must lie in [1, 4]");
  }
  if (!weights.empty() && static_cast<int>(weights.size()) != dim) {
    throw std::invalid_argument("weights size must match dim");
  }
  if (nkeys < 1) {
    throw std::invalid_argument("nkeys must be positive");
  }
  if (!group_offsets.empty() &&
      static_cast<int>(group_offsets.size()) != nkeys) {
    throw std::invalid_argument("group_offsets size must match nkeys");
  }
  if (!(feature_max > feature_min)) {
    throw std::invalid_argument("feature range is empty");
  }
  if (!(majority_rate > 0.0 && majority_rate < 1.0)) {
    throw std::invalid_argument("majority_rate must lie in (0, 1)");
  }
  if (label_noise < 0.0) {
    throw std::invalid_argument("label_noise must be >= 0");
  }
}

namespace {

uint64_t Mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

Record MakeRecord(const SyntheticSource& src, int64_t index) {
  const uint64_t base = DeriveSeed(src.seed, "records");
  RngStream rng(Mix64(base ^ (static_cast<uint64_t>(index) *
                              0x9E3779B97F4A7C15ULL)));
  Record r;
  r.arrival_index = index;
  const double span = src.feature_max - src.feature_min;
  for (int d = 0; d < src.dim; ++d) {
    r.features[static_cast<size_t>(d)] =
        src.feature_min + span * rng.NextUniform();
  }
  r.key = static_cast<int>(rng.NextUniform() * src.nkeys);
  r.key = std::min(r.key, src.nkeys - 1);
  if (src.classification) {
    // Key the class draw off the majority rate: label 0 is the majority.
    r.label = rng.NextUniform() < src.majority_rate ? 0.0 : 1.0;
    return r;
  }
  double label = src.group_offsets.empty()
                     ? 0.0
                     : src.group_offsets[static_cast<size_t>(r.key)];
  for (int d = 0; d < src.dim; ++d) {
    const double w = src.weights.empty() ? 0.0 : src.weights[static_cast<size_t>(d)];
    label += w * r.features[static_cast<size_t>(d)];
  }
  if (src.label_noise > 0.0) {
    label += src.label_noise * (2.0 * rng.NextUniform() - 1.0);
  }
  r.label = label;
  return r;
}

std::vector<Record> GenerateRange(const SyntheticSource& src, int64_t begin,
                                  int64_t end) {
  src.Validate();
  if (begin < 0 || end < begin) {
    throw std::invalid_argument("bad record range");
  }
  std::vector<Record> out;
  out.reserve(static_cast<size_t>(end - begin));
  for (int64_t i = begin; i < end; ++i) out.push_back(MakeRecord(src, i));
  return out;
}

std::vector<Record> GenerateStream(const SyntheticSource& src, int64_t n) {
  return GenerateRange(src, 0, n);
}

std::string ToString(TrainerKind k) {
  switch (k) {
    case TrainerKind::kGroupMeans:
      return "group_means";
    case TrainerKind::kScalarStat:
      return "scalar_stat";
    case TrainerKind::kLinearModel:
      return "linear_model";
  }
  throw std::logic_error("unknown trainer kind");
}

TrainerKind TrainerFromString(const std::string& s) {
  if (s == "group_means") return TrainerKind::kGroupMeans;
  if (s == "scalar_stat") return TrainerKind::kScalarStat;
  if (s == "linear_model") return TrainerKind::kLinearModel;
  throw std::invalid_argument("unknown trainer kind: " + s);
}

std::string TrainedArtifact::LogRecord() const {
  std::string rec = "kind=" + ToString(kind) + ",eps=" +
                    FormatDouble(training_spend.epsilon) + ",window=" +
                    std::to_string(window_begin_block) + ".." +
                    std::to_string(window_end_block) + ",params=";
  for (size_t i = 0; i < parameters.size(); ++i) {
    if (i > 0) rec += "|";
    rec += FormatDouble(parameters[i]);
  }
  return rec;
}

GroupByMeans DpGroupByMean(std::span<const Record> records, int nkeys,
                           double epsilon, double value_range,
                           NoiseSource& noise) {
  if (nkeys <= 0) {
    throw std::invalid_argument("nkeys must be positive");
  }
  if (!(epsilon > 0.0) || !(value_range > 0.0)) {
    throw std::invalid_argument("epsilon and value_range must be positive");
  }
  std::vector<double> counts(static_cast<size_t>(nkeys), 0.0);
  std::vector<double> sums(static_cast<size_t>(nkeys), 0.0);
  for (const auto& r : records) {
    if (r.key < 0 || r.key >= nkeys) {
      throw std::invalid_argument("record key outside [0, nkeys)");
    }
    counts[static_cast<size_t>(r.key)] += 1.0;
    sums[static_cast<size_t>(r.key)] +=
        std::clamp(r.label, 0.0, value_range);
  }
  // One record lands in exactly one key, so the per-key count releases
  // compose in parallel (one epsilon/2 for all of them); same for the sums.
  const auto count_noise =
      noise.DrawVector(1.0, epsilon / 2.0, static_cast<size_t>(nkeys));
  const auto sum_noise =
      noise.DrawVector(value_range, epsilon / 2.0, static_cast<size_t>(nkeys));

  GroupByMeans out;
  out.spent = {epsilon, 0.0};
  out.means.resize(static_cast<size_t>(nkeys));
  for (size_t k = 0; k < static_cast<size_t>(nkeys); ++k) {
    const double dp_count = counts[k] + count_noise[k];
    if (dp_count > 0.0) {
      out.means[k] = (sums[k] + sum_noise[k]) / dp_count;
    }
  }
  return out;
}

ScalarStat DpScalarStat(std::span<const double> values, double epsilon,
                        double range_b, NoiseSource& noise) {
  if (!(epsilon > 0.0) || !(range_b > 0.0)) {
    throw std::invalid_argument("epsilon and range_b must be positive");
  }
  double sum = 0.0;
  for (double v : values) sum += std::clamp(v, 0.0, range_b);
  const double dp_count =
      static_cast<double>(values.size()) + noise.Draw(1.0, epsilon / 2.0);
  const double dp_sum = sum + noise.Draw(range_b, epsilon / 2.0);
  ScalarStat out;
  out.spent = {epsilon, 0.0};
  if (dp_count > 0.0) out.mean = dp_sum / dp_count;
  return out;
}

namespace {

// Features scaled into the unit L2 ball.
std::array<double, kMaxFeatures> BallClip(const Record& r, int dim) {
  std::array<double, kMaxFeatures> x = r.features;
  double norm_sq = 0.0;
  for (int d = 0; d < dim; ++d) norm_sq += x[static_cast<size_t>(d)] * x[static_cast<size_t>(d)];
  if (norm_sq > 1.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int d = 0; d < dim; ++d) x[static_cast<size_t>(d)] *= inv;
  }
  return x;
}

// Cholesky solve of the (small, symmetric) system A w = b; false when A is
// not positive definite.
bool CholeskySolve(std::vector<double>& a, std::vector<double>& b, int d) {
  std::vector<double> l(static_cast<size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[static_cast<size_t>(i * d + j)];
      for (int k = 0; k < j; ++k) {
        s -= l[static_cast<size_t>(i * d + k)] * l[static_cast<size_t>(j * d + k)];
      }
      if (i == j) {
        if (s <= 0.0) return false;
        l[static_cast<size_t>(i * d + i)] = std::sqrt(s);
      } else {
        l[static_cast<size_t>(i * d + j)] = s / l[static_cast<size_t>(j * d + j)];
      }
    }
  }
  // Forward then backward substitution in place on b.
  for (int i = 0; i < d; ++i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l[static_cast<size_t>(i * d + k)] * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / l[static_cast<size_t>(i * d + i)];
  }
  for (int i = d - 1; i >= 0; --i) {
    double s = b[static_cast<size_t>(i)];
    for (int k = i + 1; k < d; ++k) s -= l[static_cast<size_t>(k * d + i)] * b[static_cast<size_t>(k)];
    b[static_cast<size_t>(i)] = s / l[static_cast<size_t>(i * d + i)];
  }
  return true;
}

}  // namespace

std::optional<TrainedArtifact> DpLinreg(std::span<const Record> records,
                                        const LinregConfig& cfg,
                                        NoiseSource& noise) {
  if (!(cfg.epsilon > 0.0) || !(cfg.label_range > 0.0) || cfg.ridge < 0.0 ||
      cfg.dim < 1 || cfg.dim > kMaxFeatures) {
    throw std::invalid_argument("bad linreg config");
  }
  const int d = cfg.dim;
  const double B = cfg.label_range;

  std::vector<double> xtx(static_cast<size_t>(d * d), 0.0);
  std::vector<double> xty(static_cast<size_t>(d), 0.0);
  for (const auto& r : records) {
    const auto x = BallClip(r, d);
    const double y = std::clamp(r.label, 0.0, B);
    for (int i = 0; i < d; ++i) {
      xty[static_cast<size_t>(i)] += x[static_cast<size_t>(i)] * y;
      for (int j = 0; j <= i; ++j) {
        xtx[static_cast<size_t>(i * d + j)] += x[static_cast<size_t>(i)] * x[static_cast<size_t>(j)];
      }
    }
  }

  // One record moves the upper triangle of X'X by at most
  // (|x|_1^2 + |x|_2^2)/2 <= (d + 1)/2 in L1, and X'y by at most B sqrt(d).
  // Each statistic is released with half the budget.
  const double sens_xtx = (static_cast<double>(d) + 1.0) / 2.0;
  const double sens_xty = B * std::sqrt(static_cast<double>(d));
  const auto xtx_noise = noise.DrawVector(
      sens_xtx, cfg.epsilon / 2.0, static_cast<size_t>(d * (d + 1) / 2));
  const auto xty_noise =
      noise.DrawVector(sens_xty, cfg.epsilon / 2.0, static_cast<size_t>(d));

  std::vector<double> a(static_cast<size_t>(d * d), 0.0);
  size_t tri = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = xtx[static_cast<size_t>(i * d + j)] + xtx_noise[tri++];
      a[static_cast<size_t>(i * d + j)] = v;
      a[static_cast<size_t>(j * d + i)] = v;
    }
    a[static_cast<size_t>(i * d + i)] += cfg.ridge;
  }
  std::vector<double> w(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    w[static_cast<size_t>(i)] = xty[static_cast<size_t>(i)] + xty_noise[static_cast<size_t>(i)];
  }
  if (!CholeskySolve(a, w, d)) return std::nullopt;
  for (double v : w) {
    if (!std::isfinite(v)) return std::nullopt;
  }

  TrainedArtifact art;
  art.kind = TrainerKind::kLinearModel;
  art.parameters = std::move(w);
  art.training_spend = {cfg.epsilon, 0.0};
  return art;
}

double LinregPredict(const TrainedArtifact& model, const Record& r) {
  const int d = static_cast<int>(model.parameters.size());
  const auto x = BallClip(r, d);
  double y = 0.0;
  for (int i = 0; i < d; ++i) {
    y += model.parameters[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
  }
  return y;
}

std::vector<double> LinregLosses(const TrainedArtifact& model,
                                 std::span<const Record> records,
                                 double label_range, double loss_range) {
  std::vector<double> losses;
  losses.reserve(records.size());
  for (const auto& r : records) {
    const double y = std::clamp(r.label, 0.0, label_range);
    const double err = y - LinregPredict(model, r);
    losses.push_back(std::clamp(err * err, 0.0, loss_range));
  }
  return losses;
}

}  // namespace dpstream
