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

#include "dpstream/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boost/math/special_functions/beta.hpp"

namespace dpstream {

void BoundQuery::Validate() const {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("bound query value must be finite and >= 0");
  }
  if (!(n > 0.0)) {
    throw std::invalid_argument("bound query n must be positive");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("bound query eta must lie in (0, 1)");
  }
  if (!(range_b > 0.0)) {
    throw std::invalid_argument("bound query range_b must be positive");
  }
}

double BernsteinUpperBound(const BoundQuery& q) {
  q.Validate();
  const double log_term = std::log(1.0 / q.eta);
  return q.value + std::sqrt(2.0 * q.range_b * q.value * log_term / q.n) +
         4.0 * q.range_b * log_term / q.n;
}

double EmpiricalBernsteinUpperBound(const BoundQuery& q,
                                    double second_moment) {
  q.Validate();
  if (!(q.n > 1.0)) {
    throw std::invalid_argument("empirical Bernstein needs n > 1");
  }
  if (!(second_moment >= 0.0)) {
    throw std::invalid_argument("second moment must be >= 0");
  }
  const double log_term = std::log(1.0 / q.eta);
  return q.value + std::sqrt(2.0 * second_moment * log_term / q.n) +
         7.0 * q.range_b * log_term / (3.0 * (q.n - 1.0));
}

double HoeffdingTerm(double n, double eta, double range_b) {
  if (!(n > 0.0)) {
    throw std::invalid_argument("hoeffding term needs n > 0");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
  if (!(range_b > 0.0)) {
    throw std::invalid_argument("range_b must be positive");
  }
  return range_b * std::sqrt(std::log(1.0 / eta) / n);
}

double BinomialCdf(long long k, long long n, double p) {
  if (n <= 0) {
    throw std::invalid_argument("binomial cdf needs n > 0");
  }
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  // P(X <= k) = I_{1-p}(n - k, k + 1)
  return boost::math::ibeta(static_cast<double>(n - k),
                            static_cast<double>(k + 1), 1.0 - p);
}

namespace {

void CheckCiArgs(double n, double eta) {
  if (!(n > 0.0)) {
    throw std::invalid_argument("binomial interval needs n > 0");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
}

constexpr int kBisectionIters = 100;

}  // namespace

double BinomialLowerBound(double k, double n, double eta) {
  CheckCiArgs(n, eta);
  // Round toward the conservative side: a smaller k and a larger n both pull
  // the lower bound down.
  const long long ni = static_cast<long long>(std::ceil(n));
  long long ki = static_cast<long long>(
      std::floor(std::clamp(k, 0.0, static_cast<double>(ni))));
  if (ki <= 0) return 0.0;
  // Largest p with P(X >= ki) <= eta, i.e. 1 - CDF(ki - 1; ni, p) = eta.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (1.0 - BinomialCdf(ki - 1, ni, mid) < eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double BinomialUpperBound(double k, double n, double eta) {
  CheckCiArgs(n, eta);
  const long long ni = static_cast<long long>(std::floor(n));
  if (ni <= 0) {
    throw std::invalid_argument("binomial interval needs n >= 1");
  }
  long long ki = static_cast<long long>(
      std::ceil(std::clamp(k, 0.0, static_cast<double>(ni))));
  if (ki >= ni) return 1.0;
  // Smallest p with P(X <= ki) <= eta.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (BinomialCdf(ki, ni, mid) < eta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> BinomialCi(double k, double n, double eta) {
  return {BinomialLowerBound(k, n, eta), BinomialUpperBound(k, n, eta)};
}

}  // namespace dpstream
