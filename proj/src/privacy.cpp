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

#include "dpstream/privacy.hpp"

#include <cmath>
#include <stdexcept>

namespace dpstream {

namespace {

void CheckDeltaTilde(double delta_tilde) {
  if (!(delta_tilde > 0.0 && delta_tilde < 1.0)) {
    throw std::invalid_argument("delta_tilde must lie in (0, 1)");
  }
}

}  // namespace

void PrivacyParams::Validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1)");
  }
}

bool FitsWithin(const PrivacyParams& p, const PrivacyParams& cap) {
  return p.epsilon <= cap.epsilon && p.delta <= cap.delta;
}

PrivacyParams BasicCompose(std::span<const PrivacyParams> spends) {
  PrivacyParams out;
  for (const auto& s : spends) {
    out.epsilon += s.epsilon;
    out.delta += s.delta;
  }
  return out;
}

PrivacyParams StrongComposeFixed(std::span<const PrivacyParams> spends,
                                 double delta_tilde) {
  CheckDeltaTilde(delta_tilde);
  const double log_term = std::log(1.0 / delta_tilde);
  double linear = 0.0;
  double sq = 0.0;
  double delta_sum = 0.0;
  for (const auto& s : spends) {
    linear += (std::exp(s.epsilon) - 1.0) * s.epsilon;
    sq += 2.0 * s.epsilon * s.epsilon;
    delta_sum += s.delta;
  }
  return {linear + std::sqrt(sq * log_term), delta_tilde + delta_sum};
}

PrivacyParams StrongComposeAdaptive(std::span<const PrivacyParams> spends,
                                    double eps_g, double delta_tilde) {
  CheckDeltaTilde(delta_tilde);
  if (!(eps_g > 0.0)) {
    throw std::invalid_argument("eps_g must be positive");
  }
  const double log_term = std::log(1.0 / delta_tilde);
  double linear = 0.0;
  double sq_sum = 0.0;
  double delta_sum = 0.0;
  for (const auto& s : spends) {
    linear += (std::exp(s.epsilon) - 1.0) * s.epsilon / 2.0;
    sq_sum += s.epsilon * s.epsilon;
    delta_sum += s.delta;
  }
  const double floor_sq = eps_g * eps_g / (28.04 * log_term);
  const double log_factor =
      1.0 + 0.5 * std::log(sq_sum / floor_sq + 1.0);
  const double eps =
      linear + std::sqrt(2.0 * (sq_sum + floor_sq) * log_factor * log_term);
  return {eps, delta_tilde + delta_sum};
}

std::string ToString(AccountantKind kind) {
  switch (kind) {
    case AccountantKind::kBasic:
      return "basic";
    case AccountantKind::kStrongFixed:
      return "strong_fixed";
    case AccountantKind::kStrongAdaptive:
      return "strong_adaptive";
  }
  throw std::logic_error("unknown accountant kind");
}

AccountantKind AccountantFromString(const std::string& s) {
  if (s == "basic") return AccountantKind::kBasic;
  if (s == "strong_fixed") return AccountantKind::kStrongFixed;
  if (s == "strong_adaptive") return AccountantKind::kStrongAdaptive;
  throw std::invalid_argument("unknown accountant: " + s);
}

PrivacyParams ComposeWith(AccountantKind kind,
                          std::span<const PrivacyParams> spends, double eps_g,
                          double delta_tilde) {
  switch (kind) {
    case AccountantKind::kBasic:
      return BasicCompose(spends);
    case AccountantKind::kStrongFixed:
      return StrongComposeFixed(spends, delta_tilde);
    case AccountantKind::kStrongAdaptive:
      return StrongComposeAdaptive(spends, eps_g, delta_tilde);
  }
  throw std::logic_error("unknown accountant kind");
}

}  // namespace dpstream
