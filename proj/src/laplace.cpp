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

#include "dpstream/laplace.hpp"

#include <cmath>
#include <stdexcept>

namespace dpstream {

double LaplaceInvCdf(double u, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("laplace scale must be positive");
  }
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("uniform draw must lie in (0, 1)");
  }
  const double centered = u - 0.5;
  if (centered == 0.0) return 0.0;
  const double sign = centered > 0.0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(centered));
}

double LaplaceSample(double scale, RngStream& rng) {
  return LaplaceInvCdf(rng.NextUniform(), scale);
}

double NoiseSource::Draw(double sensitivity, double epsilon_share) {
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be positive");
  }
  if (!(epsilon_share > 0.0)) {
    throw std::invalid_argument("epsilon share must be positive");
  }
  const double scale = sensitivity / epsilon_share;
  touches_.push_back({sensitivity, scale});
  if (noise_off_) return 0.0;
  return LaplaceSample(scale, rng_);
}

std::vector<double> NoiseSource::DrawVector(double sensitivity,
                                            double epsilon_share,
                                            size_t count) {
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be positive");
  }
  if (!(epsilon_share > 0.0)) {
    throw std::invalid_argument("epsilon share must be positive");
  }
  const double scale = sensitivity / epsilon_share;
  touches_.push_back({sensitivity, scale});
  std::vector<double> out(count, 0.0);
  if (!noise_off_) {
    for (double& v : out) v = LaplaceSample(scale, rng_);
  }
  return out;
}

double NoiseSource::EpsilonSpent() const {
  double total = 0.0;
  for (const auto& t : touches_) total += t.epsilon();
  return total;
}

}  // namespace dpstream
