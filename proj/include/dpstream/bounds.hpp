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

#ifndef DPSTREAM_BOUNDS_HPP_
#define DPSTREAM_BOUNDS_HPP_

#include <utility>

namespace dpstream {

// Inputs of a concentration bound: an empirical mean (or proportion), the
// effective sample size, the confidence slack eta, and the metric range B.
// Callers fold any union-bound factor into eta before passing it here.
struct BoundQuery {
  double value = 0.0;   // empirical mean, >= 0
  double n = 0.0;       // effective sample size, > 0
  double eta = 0.0;     // confidence slack, in (0, 1)
  double range_b = 1.0; // metric range bound B, > 0

  void Validate() const;
};

// Bernstein upper bound on the distribution mean:
//   value + sqrt(2 B value ln(1/eta) / n) + 4 B ln(1/eta) / n.
double BernsteinUpperBound(const BoundQuery& q);

// Empirical-Bernstein variant; `second_moment` is an upper bound on the
// empirical second moment (hence on the variance) of the sample:
//   value + sqrt(2 v ln(1/eta) / n) + 7 B ln(1/eta) / (3 (n - 1)).
// Requires n > 1.
double EmpiricalBernsteinUpperBound(const BoundQuery& q, double second_moment);

// Hoeffding deviation term B sqrt(ln(1/eta) / n).
double HoeffdingTerm(double n, double eta, double range_b);

// Exact binomial CDF P(X <= k) for X ~ Binomial(n, p), integer 0 <= k <= n.
double BinomialCdf(long long k, long long n, double p);

// One-sided Clopper-Pearson bounds on the success probability, found by
// bisection on the exact binomial CDF. The (k, n) arguments may be
// DP-noised reals: k is clamped to [0, n] and rounded toward the
// conservative side (floor for the lower bound, ceil for the upper bound);
// n is rounded the opposite way (ceil for lower, floor for upper).
double BinomialLowerBound(double k, double n, double eta);
double BinomialUpperBound(double k, double n, double eta);

// (BinomialLowerBound, BinomialUpperBound) at the same (k, n, eta).
std::pair<double, double> BinomialCi(double k, double n, double eta);

}  // namespace dpstream

#endif  // DPSTREAM_BOUNDS_HPP_
