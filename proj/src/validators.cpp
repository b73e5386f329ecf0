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

#include "dpstream/validators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpstream/bounds.hpp"
#include "dpstream/event_log.hpp"

namespace dpstream {

std::string ToString(Metric m) {
  switch (m) {
    case Metric::kLoss:
      return "loss";
    case Metric::kAccuracy:
      return "accuracy";
    case Metric::kSumStat:
      return "sum_stat";
  }
  throw std::logic_error("unknown metric");
}

Metric MetricFromString(const std::string& s) {
  if (s == "loss") return Metric::kLoss;
  if (s == "accuracy") return Metric::kAccuracy;
  if (s == "sum_stat") return Metric::kSumStat;
  throw std::invalid_argument("unknown metric: " + s);
}

std::string ToString(Verdict v) {
  switch (v) {
    case Verdict::kAccept:
      return "ACCEPT";
    case Verdict::kReject:
      return "REJECT";
    case Verdict::kRetry:
      return "RETRY";
  }
  throw std::logic_error("unknown verdict");
}

void ValidatorConfig::Validate() const {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
  if (!(range_b > 0.0)) {
    throw std::invalid_argument("range_b must be positive");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("validation epsilon must be positive");
  }
  if (metric == Metric::kAccuracy) {
    if (!(target > 0.0 && target < 1.0)) {
      throw std::invalid_argument("accuracy target must lie in (0, 1)");
    }
  } else if (!(target > 0.0)) {
    throw std::invalid_argument("loss/error target must be positive");
  }
}

EvalSample EvalSample::Losses(std::span<const double> values, double range_b) {
  std::vector<double> clipped(values.begin(), values.end());
  for (double& v : clipped) v = std::clamp(v, 0.0, range_b);
  return EvalSample(Metric::kLoss, std::move(clipped));
}

EvalSample EvalSample::Correctness(std::span<const double> indicators) {
  std::vector<double> clipped(indicators.begin(), indicators.end());
  for (double& v : clipped) v = v != 0.0 ? 1.0 : 0.0;
  return EvalSample(Metric::kAccuracy, std::move(clipped));
}

EvalSample EvalSample::Contributions(std::span<const double> values,
                                     double range_b) {
  std::vector<double> clipped(values.begin(), values.end());
  for (double& v : clipped) v = std::clamp(v, 0.0, range_b);
  return EvalSample(Metric::kSumStat, std::move(clipped));
}

double EvalSample::Sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double EvalSample::SumSquares() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

std::string ValidationOutcome::LogRecord(const ValidatorConfig& cfg) const {
  std::string rec = "metric=" + ToString(cfg.metric) +
                    ",target=" + FormatDouble(cfg.target) +
                    ",eta=" + FormatDouble(cfg.eta) +
                    ",eps=" + FormatDouble(spent.epsilon) +
                    ",bound=" + FormatDouble(dp_bound) +
                    ",verdict=" + ToString(verdict);
  if (!reason.empty()) rec += ",reason=" + reason;
  return rec;
}

namespace {

void RequireMetric(const EvalSample& sample, Metric expected) {
  if (sample.metric() != expected) {
    throw std::invalid_argument("sample metric does not match validator");
  }
}

// ln(numerator / eta), the recurring Laplace tail quantile factor: an
// eta/3 one-sided share needs ln(3/(2 eta)), a two-sided eta/3 share
// ln(3/eta), an eta/2 one-sided share ln(2/eta).
double TailFactor(double numerator, double eta) {
  return std::log(numerator / eta);
}

ValidationOutcome InsufficientSamples(const PrivacyParams& spent) {
  ValidationOutcome out;
  out.verdict = Verdict::kRetry;
  out.reason = "insufficient-samples";
  out.spent = spent;
  return out;
}

}  // namespace

ValidationOutcome LossAccept(const EvalSample& test,
                             const ValidatorConfig& cfg, NoiseSource& noise) {
  cfg.Validate();
  RequireMetric(test, Metric::kLoss);
  const double eps = cfg.epsilon;
  const double B = cfg.range_b;
  const double n = static_cast<double>(test.n());

  const bool eb = cfg.accept_bound == AcceptBound::kEmpiricalBernstein;
  // Budget split: the count always takes eps/2; the remaining half goes to
  // the loss sum, or is shared with the sum of squares for the
  // empirical-Bernstein variant. Each tail correction gets an even share of
  // eta (three events for Bernstein/Hoeffding, four with the extra release).
  const double count_noise = noise.Draw(1.0, eps / 2.0);
  const double sum_noise = noise.Draw(B, eb ? eps / 4.0 : eps / 2.0);
  const double sumsq_noise = eb ? noise.Draw(B * B, eps / 4.0) : 0.0;

  const double count_tail = eb ? TailFactor(2.0, cfg.eta)       // ln(2/eta)
                               : TailFactor(1.5, cfg.eta);      // ln(3/(2 eta))
  const double conc_eta = eb ? cfg.eta / 4.0 : cfg.eta / 3.0;

  const PrivacyParams spent{eps, 0.0};
  const double n_dp = n + count_noise;
  const double n_lb =
      cfg.dp_corrections ? n_dp - (2.0 / eps) * count_tail : n_dp;
  if (!(n_lb > 0.0)) return InsufficientSamples(spent);

  const double sum_scale = eb ? 4.0 * B / eps : 2.0 * B / eps;
  const double sum_corr = cfg.dp_corrections ? sum_scale * count_tail : 0.0;
  double loss_ub = (test.Sum() + sum_noise + sum_corr) / n_lb;
  loss_ub = std::clamp(loss_ub, 0.0, B);

  double bound = 0.0;
  switch (cfg.accept_bound) {
    case AcceptBound::kBernstein:
      bound = BernsteinUpperBound({loss_ub, n_lb, conc_eta, B});
      break;
    case AcceptBound::kHoeffding:
      bound = loss_ub + HoeffdingTerm(n_lb, conc_eta, B);
      break;
    case AcceptBound::kEmpiricalBernstein: {
      const double sq_corr =
          cfg.dp_corrections ? (4.0 * B * B / eps) * count_tail : 0.0;
      double sq_ub = (test.SumSquares() + sumsq_noise + sq_corr) / n_lb;
      sq_ub = std::clamp(sq_ub, 0.0, B * B);
      bound = EmpiricalBernsteinUpperBound({loss_ub, n_lb, conc_eta, B}, sq_ub);
      break;
    }
  }

  ValidationOutcome out;
  out.verdict = bound <= cfg.target ? Verdict::kAccept : Verdict::kRetry;
  out.dp_bound = bound;
  out.spent = spent;
  return out;
}

ValidationOutcome LossReject(const EvalSample& train_minimizer,
                             const ValidatorConfig& cfg, NoiseSource& noise) {
  cfg.Validate();
  RequireMetric(train_minimizer, Metric::kLoss);
  const double eps = cfg.epsilon;
  const double B = cfg.range_b;
  const double n = static_cast<double>(train_minimizer.n());

  const double count_noise = noise.Draw(1.0, eps / 2.0);
  const double sum_noise = noise.Draw(B, eps / 2.0);
  const PrivacyParams spent{eps, 0.0};

  const double n_dp = n + count_noise;
  const double count_tail =
      cfg.dp_corrections ? (2.0 / eps) * TailFactor(3.0, cfg.eta) : 0.0;
  const double n_lb = n_dp - count_tail;
  const double n_ub = n_dp + count_tail;
  if (!(n_lb > 0.0)) return InsufficientSamples(spent);

  const double sum_corr =
      cfg.dp_corrections ? (2.0 * B / eps) * TailFactor(1.5, cfg.eta) : 0.0;
  const double loss_lb = (train_minimizer.Sum() + sum_noise - sum_corr) / n_ub;
  const double stat = loss_lb - HoeffdingTerm(n_lb, cfg.eta / 3.0, B);

  ValidationOutcome out;
  out.verdict = stat > cfg.target ? Verdict::kReject : Verdict::kRetry;
  out.dp_bound = stat;
  out.spent = spent;
  return out;
}

ValidationOutcome AccuracyAccept(const EvalSample& test,
                                 const ValidatorConfig& cfg,
                                 NoiseSource& noise) {
  cfg.Validate();
  RequireMetric(test, Metric::kAccuracy);
  const double eps = cfg.epsilon;
  const double n = static_cast<double>(test.n());

  const double k_dp = test.Sum() + noise.Draw(1.0, eps / 2.0);
  const double n_dp = n + noise.Draw(1.0, eps / 2.0);
  const PrivacyParams spent{eps, 0.0};

  const double corr =
      cfg.dp_corrections ? (2.0 / eps) * TailFactor(3.0, cfg.eta) : 0.0;
  const double k_adj = k_dp - corr;
  const double n_adj = n_dp + corr;
  if (!(n_adj > 0.0) || k_adj < 0.0) return InsufficientSamples(spent);

  const double lb = BinomialLowerBound(k_adj, n_adj, cfg.eta / 3.0);
  ValidationOutcome out;
  out.verdict = lb >= cfg.target ? Verdict::kAccept : Verdict::kRetry;
  out.dp_bound = lb;
  out.spent = spent;
  return out;
}

ValidationOutcome AccuracyReject(const EvalSample& train,
                                 const ValidatorConfig& cfg,
                                 NoiseSource& noise) {
  cfg.Validate();
  RequireMetric(train, Metric::kAccuracy);
  const double eps = cfg.epsilon;
  const double n = static_cast<double>(train.n());

  const double k_dp = train.Sum() + noise.Draw(1.0, eps / 2.0);
  const double n_dp = n + noise.Draw(1.0, eps / 2.0);
  const PrivacyParams spent{eps, 0.0};

  const double corr =
      cfg.dp_corrections ? (2.0 / eps) * TailFactor(3.0, cfg.eta) : 0.0;
  const double k_adj = k_dp + corr;
  const double n_adj = n_dp - corr;
  if (!(n_adj > 0.0)) return InsufficientSamples(spent);

  const double ub = BinomialUpperBound(std::max(0.0, k_adj), n_adj,
                                       cfg.eta / 3.0);
  ValidationOutcome out;
  out.verdict = ub < cfg.target ? Verdict::kReject : Verdict::kRetry;
  out.dp_bound = ub;
  out.spent = spent;
  return out;
}

ValidationOutcome SumStatAccept(const EvalSample& train,
                                const ValidatorConfig& cfg,
                                NoiseSource& noise) {
  cfg.Validate();
  RequireMetric(train, Metric::kSumStat);
  const double eps = cfg.epsilon;
  const double B = cfg.range_b;
  const double n = static_cast<double>(train.n());

  // The test only touches the sample size; the statistic's own noise is
  // already covered by the first correction term below.
  const double count_noise = noise.Draw(1.0, eps / 2.0);
  const PrivacyParams spent{eps / 2.0, 0.0};

  const double tail = TailFactor(2.0, cfg.eta);  // ln(2/eta)
  const double n_dp = n + count_noise -
                      (cfg.dp_corrections ? (2.0 / eps) * tail : 0.0);
  if (!(n_dp > 0.0)) return InsufficientSamples(spent);

  double lhs = HoeffdingTerm(n_dp, cfg.eta / 2.0, B);
  if (cfg.dp_corrections) lhs += (1.0 / n_dp) * (2.0 / eps) * tail;

  ValidationOutcome out;
  out.verdict = lhs <= cfg.target ? Verdict::kAccept : Verdict::kRetry;
  out.dp_bound = lhs;
  out.spent = spent;
  return out;
}

ValidationOutcome Validate(const EvalSample& test,
                           const std::optional<EvalSample>& train,
                           const ValidatorConfig& cfg, NoiseSource& noise,
                           MinimizerKind minimizer) {
  cfg.Validate();
  ValidationOutcome accept;
  switch (cfg.metric) {
    case Metric::kLoss:
      accept = LossAccept(test, cfg, noise);
      break;
    case Metric::kAccuracy:
      accept = AccuracyAccept(test, cfg, noise);
      break;
    case Metric::kSumStat:
      return SumStatAccept(test, cfg, noise);
  }
  if (accept.verdict == Verdict::kAccept || !train.has_value()) {
    return accept;
  }

  ValidationOutcome reject = cfg.metric == Metric::kLoss
                                 ? LossReject(*train, cfg, noise)
                                 : AccuracyReject(*train, cfg, noise);
  // The two tests ran on disjoint splits, so the joint spend is still eps.
  reject.spent = {cfg.epsilon, 0.0};
  if (minimizer == MinimizerKind::kDpApproximation) {
    if (!reject.reason.empty()) reject.reason += ";";
    reject.reason += "approximate-minimizer";
  }
  if (reject.verdict == Verdict::kReject) return reject;

  // Neither accepted nor rejected: keep the accept test's bound for logging.
  accept.verdict = Verdict::kRetry;
  accept.spent = {cfg.epsilon, 0.0};
  return accept;
}

}  // namespace dpstream
