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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dpstream/rng.hpp"
#include "dpstream/validators.hpp"

namespace dpstream {
namespace {

NoiseSource NoiseOff() { return NoiseSource(DeriveStream(0, "off"), true); }

NoiseSource Seeded(uint64_t seed) {
  return NoiseSource(DeriveStream(seed, "validator-test"), false);
}

EvalSample ConstantLosses(int64_t n, double value, double range_b = 1.0) {
  std::vector<double> v(static_cast<size_t>(n), value);
  return EvalSample::Losses(v, range_b);
}

EvalSample CorrectFraction(int64_t n, double fraction) {
  std::vector<double> v(static_cast<size_t>(n), 0.0);
  const auto k = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
  for (size_t i = 0; i < k && i < v.size(); ++i) v[i] = 1.0;
  return EvalSample::Correctness(v);
}

ValidatorConfig LossCfg(double target, double eta = 0.05, double eps = 1.0) {
  ValidatorConfig cfg;
  cfg.metric = Metric::kLoss;
  cfg.target = target;
  cfg.eta = eta;
  cfg.epsilon = eps;
  return cfg;
}

ValidatorConfig AccCfg(double target, double eta = 0.05, double eps = 1.0) {
  ValidatorConfig cfg;
  cfg.metric = Metric::kAccuracy;
  cfg.target = target;
  cfg.eta = eta;
  cfg.epsilon = eps;
  return cfg;
}

ValidatorConfig SumCfg(double target, double eta = 0.05, double eps = 1.0) {
  ValidatorConfig cfg;
  cfg.metric = Metric::kSumStat;
  cfg.target = target;
  cfg.eta = eta;
  cfg.epsilon = eps;
  return cfg;
}

TEST_CASE("loss accept: zero losses at large n leave only the corrections") {
  auto noise = NoiseOff();
  auto out = LossAccept(ConstantLosses(1000000, 0.0), LossCfg(0.01), noise);
  CHECK(out.verdict == Verdict::kAccept);
  // Frozen from hand-evaluating the three correction terms with the Laplace
  // draws zeroed: n_lb = 1e6 - 2 ln(30), L_ub = 2 ln(30) / n_lb, then the
  // Bernstein bound at eta/3.
  CHECK(out.dp_bound == doctest::Approx(3.064340534115842e-05).epsilon(1e-10));
  CHECK(out.spent.epsilon == doctest::Approx(1.0));
}

TEST_CASE("loss accept: empty sample retries") {
  auto noise = NoiseOff();
  auto out = LossAccept(ConstantLosses(0, 0.0), LossCfg(0.01), noise);
  CHECK(out.verdict == Verdict::kRetry);
  CHECK(out.reason == "insufficient-samples");
}

TEST_CASE("loss accept: target below the asymptotic floor retries forever") {
  // With losses pinned at 0.5 the bound's infimum over n is 0.5, so any
  // smaller target keeps returning RETRY at every n up to 10^6.
  for (int64_t n : {100, 1000, 10000, 100000, 1000000}) {
    auto noise = NoiseOff();
    auto out = LossAccept(ConstantLosses(n, 0.5), LossCfg(0.45), noise);
    CHECK(out.verdict == Verdict::kRetry);
    CHECK(out.dp_bound > 0.5);
  }
}

TEST_CASE("loss accept honors the selectable bound variants") {
  auto sample = ConstantLosses(20000, 0.1);
  ValidatorConfig cfg = LossCfg(0.2);

  auto noise1 = NoiseOff();
  cfg.accept_bound = AcceptBound::kBernstein;
  const double bern = LossAccept(sample, cfg, noise1).dp_bound;

  auto noise2 = NoiseOff();
  cfg.accept_bound = AcceptBound::kHoeffding;
  const double hoef = LossAccept(sample, cfg, noise2).dp_bound;

  auto noise3 = NoiseOff();
  cfg.accept_bound = AcceptBound::kEmpiricalBernstein;
  const double eb = LossAccept(sample, cfg, noise3).dp_bound;

  // At small mean loss, Bernstein-style bounds beat Hoeffding.
  CHECK(bern < hoef);
  CHECK(eb < hoef);
  // The extra release splits the budget three ways.
  CHECK(noise3.touches().size() == 3);
  CHECK(noise3.EpsilonSpent() == doctest::Approx(1.0));
}

TEST_CASE("loss reject: frozen example and trivial guards") {
  auto noise = NoiseOff();
  auto out = LossReject(ConstantLosses(100000, 0.9), LossCfg(0.5), noise);
  CHECK(out.verdict == Verdict::kReject);
  // Frozen from hand evaluation of L_lb minus the Hoeffding term.
  CHECK(out.dp_bound == doctest::Approx(0.8934593208947642).epsilon(1e-10));

  // A zero-loss minimizer can never be rejected at a positive target.
  auto noise2 = NoiseOff();
  CHECK(LossReject(ConstantLosses(100000, 0.0), LossCfg(0.01), noise2).verdict ==
        Verdict::kRetry);

  // Target at the metric range can never be exceeded by the lower bound.
  auto noise3 = NoiseOff();
  CHECK(LossReject(ConstantLosses(100000, 1.0), LossCfg(1.0), noise3).verdict ==
        Verdict::kRetry);

  auto noise4 = NoiseOff();
  CHECK(LossReject(ConstantLosses(0, 0.0), LossCfg(0.5), noise4).reason ==
        "insufficient-samples");
}

TEST_CASE("accuracy accept: perfect predictions certify a 0.99 target") {
  auto noise = NoiseOff();
  auto out = AccuracyAccept(CorrectFraction(100000, 1.0), AccCfg(0.99), noise);
  CHECK(out.verdict == Verdict::kAccept);
  CHECK(out.dp_bound == doctest::Approx(0.9997059).epsilon(1e-4));
  CHECK(out.spent.epsilon == doctest::Approx(1.0));
}

TEST_CASE("accuracy accept: zero correct retries at any positive target") {
  auto noise = NoiseOff();
  auto out = AccuracyAccept(CorrectFraction(1000, 0.0), AccCfg(0.01), noise);
  CHECK(out.verdict == Verdict::kRetry);
}

TEST_CASE("accuracy accept: majority-rate predictor boundary behavior") {
  // A predictor that matches the majority label on a 74.3%-majority sample:
  // comfortably below the rate it certifies, just above it it retries.
  auto sample = CorrectFraction(100000, 0.743);
  auto noise1 = NoiseOff();
  CHECK(AccuracyAccept(sample, AccCfg(0.735), noise1).verdict ==
        Verdict::kAccept);
  auto noise2 = NoiseOff();
  auto boundary = AccuracyAccept(sample, AccCfg(0.743), noise2);
  CHECK(boundary.verdict == Verdict::kRetry);
  CHECK(boundary.dp_bound < 0.743);
  CHECK(boundary.dp_bound > 0.739);
}

TEST_CASE("accuracy reject: coin-flip training accuracy rejects 0.9") {
  auto noise = NoiseOff();
  auto out = AccuracyReject(CorrectFraction(10000, 0.5), AccCfg(0.9), noise);
  CHECK(out.verdict == Verdict::kReject);
  CHECK(out.dp_bound == doctest::Approx(0.512).epsilon(2e-3));

  // Perfect training accuracy is never rejected.
  auto noise2 = NoiseOff();
  CHECK(AccuracyReject(CorrectFraction(10000, 1.0), AccCfg(0.99), noise2)
            .verdict == Verdict::kRetry);

  auto noise3 = NoiseOff();
  CHECK(AccuracyReject(CorrectFraction(0, 0.0), AccCfg(0.9), noise3).reason ==
        "insufficient-samples");
}

TEST_CASE("sum stat accept: boundary n frozen from the inequality") {
  // Smallest n passing tau_err = B = 1 at eta = 0.05, eps = 1 is 23.
  auto noise1 = NoiseOff();
  CHECK(SumStatAccept(EvalSample::Contributions(std::vector<double>(23, 0.3), 1.0),
                      SumCfg(1.0), noise1)
            .verdict == Verdict::kAccept);
  auto noise2 = NoiseOff();
  CHECK(SumStatAccept(EvalSample::Contributions(std::vector<double>(22, 0.3), 1.0),
                      SumCfg(1.0), noise2)
            .verdict == Verdict::kRetry);

  // Law of large numbers: big n accepts any positive target.
  auto noise3 = NoiseOff();
  CHECK(SumStatAccept(
            EvalSample::Contributions(std::vector<double>(2000000, 0.3), 1.0),
            SumCfg(0.005), noise3)
            .verdict == Verdict::kAccept);

  auto noise4 = NoiseOff();
  CHECK(SumStatAccept(EvalSample::Contributions({}, 1.0), SumCfg(0.5), noise4)
            .reason == "insufficient-samples");

  // The test's only data touch is the count: half the budget.
  CHECK(noise1.touches().size() == 1);
  CHECK(noise1.EpsilonSpent() == doctest::Approx(0.5));
}

TEST_CASE("validate dispatch composes accept and reject") {
  // Achievable target and huge n: accepted.
  auto noise1 = Seeded(1);
  auto out1 = Validate(ConstantLosses(1000000, 0.1), std::nullopt,
                       LossCfg(0.2), noise1);
  CHECK(out1.verdict == Verdict::kAccept);

  // Impossible target with the minimizer supplied: rejected. The synthetic
  // class's best model has training loss 0.9 while the target asks for 0.5.
  auto noise2 = Seeded(2);
  auto out2 = Validate(ConstantLosses(100000, 0.92), ConstantLosses(100000, 0.9),
                       LossCfg(0.5), noise2);
  CHECK(out2.verdict == Verdict::kReject);
  CHECK(out2.spent.epsilon == doctest::Approx(1.0));

  // Tiny sum-stat sample: retry.
  auto noise3 = Seeded(3);
  auto out3 = Validate(EvalSample::Contributions(std::vector<double>(3, 0.5), 1.0),
                       std::nullopt, SumCfg(0.05), noise3);
  CHECK(out3.verdict == Verdict::kRetry);

  // The approximate-minimizer path is labeled guarantee-free.
  auto noise4 = Seeded(4);
  auto out4 = Validate(ConstantLosses(100000, 0.92), ConstantLosses(100000, 0.9),
                       LossCfg(0.5), noise4, MinimizerKind::kDpApproximation);
  CHECK(out4.reason.find("approximate-minimizer") != std::string::npos);

  // Metric mismatch is a caller bug.
  auto noise5 = Seeded(5);
  CHECK_THROWS_AS(
      LossAccept(CorrectFraction(10, 0.5), LossCfg(0.5), noise5),
      std::invalid_argument);
}

TEST_CASE("corrections only ever make bounds more conservative") {
  // In noise-off mode the DP-corrected accept bound dominates the
  // uncorrected statistical bound, and the corrected reject statistic is
  // dominated by the uncorrected one.
  for (int64_t n : {50, 500, 5000, 50000}) {
    ValidatorConfig cfg = LossCfg(0.5);
    ValidatorConfig uc = cfg;
    uc.dp_corrections = false;

    auto s = ConstantLosses(n, 0.3);
    auto n1 = NoiseOff(), n2 = NoiseOff();
    CHECK(LossAccept(s, cfg, n1).dp_bound >= LossAccept(s, uc, n2).dp_bound);

    auto n3 = NoiseOff(), n4 = NoiseOff();
    CHECK(LossReject(s, cfg, n3).dp_bound <= LossReject(s, uc, n4).dp_bound);

    auto acc = CorrectFraction(n, 0.8);
    ValidatorConfig acfg = AccCfg(0.9), auc = acfg;
    auc.dp_corrections = false;
    auto n5 = NoiseOff(), n6 = NoiseOff();
    CHECK(AccuracyAccept(acc, acfg, n5).dp_bound <=
          AccuracyAccept(acc, auc, n6).dp_bound);
    auto n7 = NoiseOff(), n8 = NoiseOff();
    CHECK(AccuracyReject(acc, acfg, n7).dp_bound >=
          AccuracyReject(acc, auc, n8).dp_bound);

    auto sum = EvalSample::Contributions(std::vector<double>(n, 0.4), 1.0);
    ValidatorConfig scfg = SumCfg(0.3), suc = scfg;
    suc.dp_corrections = false;
    auto n9 = NoiseOff(), n10 = NoiseOff();
    CHECK(SumStatAccept(sum, scfg, n9).dp_bound >=
          SumStatAccept(sum, suc, n10).dp_bound);
  }
}

TEST_CASE("each validator's data touches stay within the declared budget") {
  auto losses = ConstantLosses(1000, 0.4);
  auto acc = CorrectFraction(1000, 0.8);
  auto sum = EvalSample::Contributions(std::vector<double>(1000, 0.4), 1.0);

  auto n1 = Seeded(10);
  LossAccept(losses, LossCfg(0.5, 0.05, 0.8), n1);
  REQUIRE(n1.touches().size() == 2);
  CHECK(n1.touches()[0].sensitivity == 1.0);
  CHECK(n1.touches()[1].sensitivity == 1.0);  // B = 1
  CHECK(n1.EpsilonSpent() == doctest::Approx(0.8));

  auto n2 = Seeded(11);
  LossReject(losses, LossCfg(0.5, 0.05, 0.8), n2);
  CHECK(n2.touches().size() == 2);
  CHECK(n2.EpsilonSpent() == doctest::Approx(0.8));

  auto n3 = Seeded(12);
  AccuracyAccept(acc, AccCfg(0.9, 0.05, 0.6), n3);
  CHECK(n3.touches().size() == 2);
  CHECK(n3.EpsilonSpent() == doctest::Approx(0.6));

  auto n4 = Seeded(13);
  AccuracyReject(acc, AccCfg(0.9, 0.05, 0.6), n4);
  CHECK(n4.EpsilonSpent() == doctest::Approx(0.6));

  auto n5 = Seeded(14);
  auto out = SumStatAccept(sum, SumCfg(0.1, 0.05, 0.6), n5);
  CHECK(n5.touches().size() == 1);
  CHECK(n5.EpsilonSpent() == doctest::Approx(0.3));
  CHECK(out.spent.epsilon == doctest::Approx(0.3));
}

TEST_CASE("fixed seed gives bit-identical verdict and bound") {
  auto run = [] {
    auto noise = Seeded(77);
    return Validate(ConstantLosses(5000, 0.2), std::nullopt, LossCfg(0.3),
                    noise);
  };
  auto a = run();
  auto b = run();
  CHECK(a.verdict == b.verdict);
  CHECK(a.dp_bound == b.dp_bound);  // bitwise
}

TEST_CASE("one-sided soundness spot check under real noise") {
  // Smaller-scale mirror of the acceptance harness: with the true metric on
  // the violating side of the target, accepts stay below eta plus three
  // standard errors over 500 trials.
  const int kTrials = 500;
  const double eta = 0.05;
  const double se = std::sqrt(eta * (1.0 - eta) / kTrials);

  int loss_accepts = 0, acc_accepts = 0, false_rejects = 0;
  for (int t = 0; t < kTrials; ++t) {
    RngStream data = DeriveStream(9000 + t, "soundness-data");
    std::vector<double> losses(400);
    for (auto& v : losses) v = data.NextUniform() < 0.55 ? 1.0 : 0.0;
    auto noise1 = Seeded(20000 + t);
    // True loss 0.55 violates the 0.5 target.
    if (LossAccept(EvalSample::Losses(losses, 1.0), LossCfg(0.5), noise1)
            .verdict == Verdict::kAccept) {
      ++loss_accepts;
    }

    std::vector<double> correct(400);
    for (auto& v : correct) v = data.NextUniform() < 0.82 ? 1.0 : 0.0;
    auto noise2 = Seeded(30000 + t);
    // True accuracy 0.82 violates the 0.86 target.
    if (AccuracyAccept(EvalSample::Correctness(correct), AccCfg(0.86), noise2)
            .verdict == Verdict::kAccept) {
      ++acc_accepts;
    }

    auto noise3 = Seeded(40000 + t);
    // True loss 0.3 is achievable at target 0.5: rejecting would be false.
    if (LossReject(EvalSample::Losses(losses, 1.0), LossCfg(0.99), noise3)
            .verdict == Verdict::kReject) {
      ++false_rejects;
    }
  }
  CHECK(static_cast<double>(loss_accepts) / kTrials <= eta + 3.0 * se);
  CHECK(static_cast<double>(acc_accepts) / kTrials <= eta + 3.0 * se);
  CHECK(static_cast<double>(false_rejects) / kTrials <= eta + 3.0 * se);
}

}  // namespace
}  // namespace dpstream
