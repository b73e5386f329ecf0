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

#ifndef DPSTREAM_VALIDATORS_HPP_
#define DPSTREAM_VALIDATORS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpstream/laplace.hpp"
#include "dpstream/privacy.hpp"

namespace dpstream {

enum class Metric { kLoss, kAccuracy, kSumStat };

std::string ToString(Metric m);
Metric MetricFromString(const std::string& s);

// Statistical bound used by the loss ACCEPT test. REJECT always uses
// Hoeffding: the unknown best-in-class model has no observable variance.
enum class AcceptBound { kBernstein, kEmpiricalBernstein, kHoeffding };

struct ValidatorConfig {
  Metric metric = Metric::kLoss;
  double target = 0.0;   // tau_loss, tau_acc or tau_err
  double eta = 0.05;     // confidence slack, in (0, 1)
  double range_b = 1.0;  // metric range bound B
  double epsilon = 1.0;  // validation budget
  AcceptBound accept_bound = AcceptBound::kBernstein;
  // When false the DP-noise corrections are dropped (the noised estimates
  // are used as-is). Evaluation knob for quantifying what the corrections
  // buy; the high-probability guarantees only hold when true.
  bool dp_corrections = true;

  void Validate() const;
};

// Per-record evaluations: losses in [0, B], 0/1 correctness indicators, or
// sum-statistic contributions in [0, B]. Values are clipped on ingest.
class EvalSample {
 public:
  static EvalSample Losses(std::span<const double> values, double range_b);
  static EvalSample Correctness(std::span<const double> indicators);
  static EvalSample Contributions(std::span<const double> values,
                                  double range_b);

  Metric metric() const { return metric_; }
  int64_t n() const { return static_cast<int64_t>(values_.size()); }
  double Sum() const;
  double SumSquares() const;

 private:
  EvalSample(Metric metric, std::vector<double> values)
      : metric_(metric), values_(std::move(values)) {}

  Metric metric_;
  std::vector<double> values_;
};

enum class Verdict { kAccept, kReject, kRetry };

std::string ToString(Verdict v);

struct ValidationOutcome {
  Verdict verdict = Verdict::kRetry;
  // The DP-corrected bound compared against the target: an upper confidence
  // bound for ACCEPT tests, a lower confidence bound for REJECT tests.
  double dp_bound = 0.0;
  PrivacyParams spent;
  std::string reason;  // e.g. "insufficient-samples" on degenerate RETRY

  // Serialized structured-text record for the run's event log.
  std::string LogRecord(const ValidatorConfig& cfg) const;
};

// ACCEPT test for loss metrics: a DP lower bound on the test count, a DP
// upper bound on the clipped loss sum, and a concentration bound on top.
// Accepts iff the final upper bound is at most cfg.target; otherwise RETRY.
ValidationOutcome LossAccept(const EvalSample& test,
                             const ValidatorConfig& cfg, NoiseSource& noise);

// REJECT test for loss metrics. The sample must hold the training losses of
// the empirical training-loss minimizer over the model class; the guarantee
// is void otherwise (see Validate()'s minimizer flag).
ValidationOutcome LossReject(const EvalSample& train_minimizer,
                             const ValidatorConfig& cfg, NoiseSource& noise);

// ACCEPT iff the Clopper-Pearson lower bound on the DP-corrected correct
// count reaches cfg.target.
ValidationOutcome AccuracyAccept(const EvalSample& test,
                                 const ValidatorConfig& cfg,
                                 NoiseSource& noise);

// REJECT iff the Clopper-Pearson upper bound on the training accuracy of
// the (approximate) best in-class model falls below cfg.target.
ValidationOutcome AccuracyReject(const EvalSample& train,
                                 const ValidatorConfig& cfg,
                                 NoiseSource& noise);

// ACCEPT test for sum-based statistics; runs directly on the training set
// and has no REJECT counterpart (more data always reaches the target).
// Only the sample size enters the test, so its privacy cost is the one
// noised count: epsilon/2.
ValidationOutcome SumStatAccept(const EvalSample& train,
                                const ValidatorConfig& cfg,
                                NoiseSource& noise);

// Whether the supplied training sample comes from the true empirical
// minimizer (REJECT guarantees hold) or from the DP model standing in for
// it (guarantee-free approximation; false rejections possible at small n).
enum class MinimizerKind { kExact, kDpApproximation };

// Dispatch: runs the metric's ACCEPT test on the test sample; if it does
// not accept and a REJECT test exists and a train sample was supplied, runs
// the REJECT test on the (disjoint) train split. The joint spend stays at
// cfg.epsilon because the two tests touch disjoint splits.
ValidationOutcome Validate(const EvalSample& test,
                           const std::optional<EvalSample>& train,
                           const ValidatorConfig& cfg, NoiseSource& noise,
                           MinimizerKind minimizer = MinimizerKind::kExact);

}  // namespace dpstream

#endif  // DPSTREAM_VALIDATORS_HPP_
