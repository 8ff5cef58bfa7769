// Copyright 2026 The fairauction Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRAUCTION_STABILITY_HPP_
#define FAIRAUCTION_STABILITY_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "fairauction/alloc.hpp"

namespace fairauction {

// max_i max(v_i / w_i, w_i / v_i). A (0, 0) pair counts as 1 and a zero
// facing a positive value makes the result +inf.
double StabilityParam(const ValueVector& v, const ValueVector& w);

// f_ell(lambda) = 1 - lambda^(-2 ell); f(1) = 0, f(inf) = 1.
double FEll(double lambda, double ell);

// Worst-case welfare ratio of IPA(ell):
//   alpha_ell = 1 - (1 / (ell + 1)) (ell / (ell + 1))^ell.
double AlphaEll(double ell);

// min over x in (0, 1) of 1 - x^ell + x^(ell + 1), found numerically.
double AlphaEllNumeric(double ell);

// (x . v) / max_i v_i.
double WelfareRatio(const Allocation& x, const ValueVector& v);

// v with coordinate i divided by lambda^2. For a scale-free rule this is
// the same instance as (v_i / lambda, lambda v_{-i}), which is inside the
// lambda band around v.
ValueVector DirectedWorstCase(const ValueVector& v, int i, double lambda);

// Largest per-coordinate allocation change max_i |x_i(v) - x_i(v')| seen
// over the directed perturbations of every coordinate (downwards and
// upwards) and `samples` vectors drawn log-uniformly from the band
// [v_j / lambda, lambda v_j]. Exact for IPA, a heuristic for other rules.
double StabilityViolationSearch(const AllocationRule& rule, const ValueVector& v, double lambda,
                                int samples, std::uint64_t seed);
double StabilityViolationSearch(const AllocRuleSpec& spec, const ValueVector& v, double lambda,
                                int samples, std::uint64_t seed);

using FairnessFn = std::function<double(double)>;

// Upper bound on the welfare ratio of any prior-free rule that is value
// stable for f, from the two-vector argument:
//   1/k + f(lambda) + lambda^-2 (1 - 1/k - f(lambda)).
double PriorFreeUpperBound(const FairnessFn& f, double lambda, std::int64_t k);

struct UpperBoundMinimum {
  double lambda = 1.0;
  double bound = 1.0;
};

// Minimises PriorFreeUpperBound over lambda in (1, lambda_max]: a log grid
// followed by golden-section refinement around the best grid point.
UpperBoundMinimum MinPriorFreeUpperBound(const FairnessFn& f, std::int64_t k,
                                         double lambda_max = 1e4);

struct NearOptimalParams {
  double ell = 0.0;
  double beta = 0.0;
  // Welfare ratio guaranteed by capped IPA(ell, beta).
  double guarantee = 0.0;
};

// Capped-IPA parameters for a target ratio alpha in (0, 1):
// beta = alpha / (1 + alpha), ell = 1 / (2 ln(1/alpha)).
NearOptimalParams NearOptimalParamsFor(double alpha);

// min(beta, ln(x) beta / ln(1/alpha)) >= beta (1 - x^(-1/ln(1/alpha))) at
// every x in xs (x >= 1), to within 1e-12.
bool BoundingLogsCheck(double beta, double alpha, std::span<const double> xs);

struct GapConstruction {
  ValueVector v;
  ValueVector v_prime;
  double delta_x1 = 0.0;
};

// v = (x, ..., x), v' = (x^2, 1, ..., 1); delta_x1 = x'_1 - x_1 under
// IPA(ell). Tends to 1 - x^(-2 ell) as k grows.
GapConstruction OptimalityGapConstruction(double x, std::int64_t k, double ell);

struct GapBounds {
  double ub_limit = 0.0;
  double ratio_lb = 0.0;
};

// ub_limit = 2 ell / (2 ell + 1);
// ratio_lb = (2 ell + 1)/(ell + 1) (1/2 + (1/(2 ell)) (1 - ell^ell / (ell + 1)^ell)).
GapBounds ComputeGapBounds(double ell);

}  // namespace fairauction

#endif  // FAIRAUCTION_STABILITY_HPP_
