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

#ifndef DPSTREAM_LAPLACE_HPP_
#define DPSTREAM_LAPLACE_HPP_

#include <vector>

#include "dpstream/rng.hpp"

namespace dpstream {

// Quantile function of Laplace(0, scale) at u in (0, 1). Exactly 0 at
// u = 0.5 for any scale.
double LaplaceInvCdf(double u, double scale);

// One draw from Laplace(0, scale) via the inverse CDF applied to a single
// uniform draw from `rng`. scale must be positive.
double LaplaceSample(double scale, RngStream& rng);

// One mechanism invocation: a Laplace release of a quantity with the given
// sensitivity at the given scale. epsilon() is the privacy cost of the touch.
struct MechanismTouch {
  double sensitivity = 0.0;
  double scale = 0.0;

  double epsilon() const { return sensitivity / scale; }
};

// Noise tap handed to validators and training pipelines. Wraps a named rng
// stream, records every mechanism touch for privacy-cost audits, and carries
// the test-only noise-off switch (all draws return 0). Accounting code never
// sees a NoiseSource: the budget ledger works on declared PrivacyParams
// regardless of how the noise was produced.
class NoiseSource {
 public:
  explicit NoiseSource(RngStream rng, bool noise_off = false)
      : rng_(rng), noise_off_(noise_off) {}

  // Laplace noise for a release of sensitivity `sensitivity` paid for with
  // `epsilon_share` (> 0); scale = sensitivity / epsilon_share. The touch is
  // recorded even in noise-off mode so spend audits see the same trail.
  double Draw(double sensitivity, double epsilon_share);

  // Noise for a vector release whose components cover disjoint data shards
  // (one record contributes to exactly one component), so the release
  // composes in parallel: `count` iid draws, one recorded touch.
  std::vector<double> DrawVector(double sensitivity, double epsilon_share,
                                 size_t count);

  bool noise_off() const { return noise_off_; }
  const std::vector<MechanismTouch>& touches() const { return touches_; }

  // Sum of sensitivity/scale over all touches so far.
  double EpsilonSpent() const;

  void ResetAudit() { touches_.clear(); }

 private:
  RngStream rng_;
  bool noise_off_;
  std::vector<MechanismTouch> touches_;
};

}  // namespace dpstream

#endif  // DPSTREAM_LAPLACE_HPP_
