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

#ifndef DPSTREAM_PRIVACY_HPP_
#define DPSTREAM_PRIVACY_HPP_

#include <span>
#include <string>
#include <vector>

namespace dpstream {

// An (epsilon, delta) pair: the unit of budget request and spend.
// epsilon == 0 is permitted only as the "not used" sentinel in accounting;
// any spend request must carry epsilon > 0.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;

  // Throws std::invalid_argument unless epsilon >= 0 (finite) and
  // delta in [0, 1).
  void Validate() const;

  bool operator==(const PrivacyParams&) const = default;
};

// Componentwise comparison; true when both epsilon and delta fit under `cap`.
bool FitsWithin(const PrivacyParams& p, const PrivacyParams& cap);

// (sum of epsilons, sum of deltas). Empty input composes to (0, 0).
PrivacyParams BasicCompose(std::span<const PrivacyParams> spends);

// Strong composition with DP parameters fixed in advance:
//   epsilon = sum (e^ei - 1) ei + sqrt( sum 2 ei^2 * ln(1/delta_tilde) )
//   delta   = delta_tilde + sum di
// delta_tilde must lie in (0, 1).
PrivacyParams StrongComposeFixed(std::span<const PrivacyParams> spends,
                                 double delta_tilde);

// Strong composition under adaptively chosen DP parameters. Evaluates the
// bound's left-hand side:
//   sum (e^ei - 1) ei / 2
//   + sqrt( 2 (S + G) (1 + 0.5 ln(S/G + 1)) ln(1/delta_tilde) )
// with S = sum ei^2 and G = eps_g^2 / (28.04 ln(1/delta_tilde)); delta part
// is delta_tilde + sum di. The caller compares the epsilon against eps_g.
// The constant 28.04 is inherited from the composition bound as published.
PrivacyParams StrongComposeAdaptive(std::span<const PrivacyParams> spends,
                                    double eps_g, double delta_tilde);

enum class AccountantKind { kBasic, kStrongFixed, kStrongAdaptive };

std::string ToString(AccountantKind kind);
AccountantKind AccountantFromString(const std::string& s);

// Composed spend of `spends` under the chosen accountant. For strong modes
// delta_tilde is reserved out of the delta budget; for kBasic it is ignored.
PrivacyParams ComposeWith(AccountantKind kind,
                          std::span<const PrivacyParams> spends, double eps_g,
                          double delta_tilde);

}  // namespace dpstream

#endif  // DPSTREAM_PRIVACY_HPP_
