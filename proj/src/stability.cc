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

#include "fairauction/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairauction/rng.hpp"

namespace fairauction {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void RequireEll(double ell) {
  if (!(ell > 0.0) || std::isnan(ell)) {
    throw Error(ErrorCode::kInvalidEll, fmt::format("ell must be positive, got {}", ell));
  }
}

// Golden-section minimisation of a unimodal f on [a, b].
template <typename F>
double GoldenMin(F&& f, double a, double b, int iterations = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations && b - a > 1e-15 * (std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double StabilityParam(const ValueVector& v, const ValueVector& w) {
  if (v.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("vectors have lengths {} and {}", v.size(), w.size()));
  }
  ValidateValues(v);
  ValidateValues(w);
  double lambda = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0 && w[i] == 0.0) continue;
    if (v[i] == 0.0 || w[i] == 0.0) return kInf;
    lambda = std::max({lambda, v[i] / w[i], w[i] / v[i]});
  }
  return lambda;
}

double FEll(double lambda, double ell) {
  RequireEll(ell);
  if (!(lambda >= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda, fmt::format("lambda must be >= 1, got {}", lambda));
  }
  if (std::isinf(lambda)) return 1.0;
  return -std::expm1(-2.0 * ell * std::log(lambda));
}

double AlphaEll(double ell) {
  RequireEll(ell);
  if (std::isinf(ell)) return 1.0;
  // (ell / (ell + 1))^ell = exp(-ell log1p(1/ell)).
  return 1.0 - std::exp(-ell * std::log1p(1.0 / ell)) / (ell + 1.0);
}

double AlphaEllNumeric(double ell) {
  RequireEll(ell);
  auto objective = [ell](double x) { return 1.0 - std::pow(x, ell) + std::pow(x, ell + 1.0); };
  return objective(GoldenMin(objective, 0.0, 1.0));
}

double WelfareRatio(const Allocation& x, const ValueVector& v) {
  if (x.size() != v.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("allocation has length {}, values {}", x.size(), v.size()));
  }
  ValidateValues(v);
  const double vmax = v.maxCoeff();
  if (vmax == 0.0) throw Error(ErrorCode::kAllZeroValues, "welfare ratio undefined");
  return std::clamp(x.dot(v / vmax), 0.0, 1.0);
}

ValueVector DirectedWorstCase(const ValueVector& v, int i, double lambda) {
  if (i < 0 || i >= v.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, fmt::format("index {} out of range", i));
  }
  if (!(lambda >= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda, fmt::format("lambda must be >= 1, got {}", lambda));
  }
  ValueVector out = v;
  out[i] = v[i] / (lambda * lambda);
  return out;
}

double StabilityViolationSearch(const AllocationRule& rule, const ValueVector& v, double lambda,
                                int samples, std::uint64_t seed) {
  ValidateValues(v);
  if (!(lambda >= 1.0)) {
    throw Error(ErrorCode::kInvalidLambda, fmt::format("lambda must be >= 1, got {}", lambda));
  }
  if (samples < 1) throw Error(ErrorCode::kInvalidGrid, "samples must be >= 1");
  const Allocation base = rule(v);
  double worst = 0.0;
  auto consider = [&](const ValueVector& w) {
    worst = std::max(worst, (rule(w) - base).cwiseAbs().maxCoeff());
  };
  for (int i = 0; i < v.size(); ++i) {
    consider(DirectedWorstCase(v, i, lambda));
    ValueVector up = v;
    up[i] = v[i] * lambda * lambda;
    if (std::isfinite(up[i])) consider(up);
  }
  if (std::isfinite(lambda)) {
    Rng rng(seed);
    ValueVector w(v.size());
    for (int s = 0; s < samples; ++s) {
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        w[j] = v[j] > 0.0 ? v[j] * rng.LogUniform(1.0 / lambda, lambda) : 0.0;
      }
      consider(w);
    }
  }
  return worst;
}

double StabilityViolationSearch(const AllocRuleSpec& spec, const ValueVector& v, double lambda,
                                int samples, std::uint64_t seed) {
  return StabilityViolationSearch(MakeRule(spec), v, lambda, samples, seed);
}

double PriorFreeUpperBound(const FairnessFn& f, double lambda, std::int64_t k) {
  if (!(lambda > 1.0)) {
    throw Error(ErrorCode::kInvalidLambda, fmt::format("lambda must be > 1, got {}", lambda));
  }
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be >= 1");
  const double inv_k = 1.0 / static_cast<double>(k);
  const double fl = f(lambda);
  const double inv_sq = std::isinf(lambda) ? 0.0 : 1.0 / (lambda * lambda);
  return inv_k + fl + inv_sq * (1.0 - inv_k - fl);
}

UpperBoundMinimum MinPriorFreeUpperBound(const FairnessFn& f, std::int64_t k, double lambda_max) {
  if (!(lambda_max > 1.0)) {
    throw Error(ErrorCode::kInvalidLambda, "lambda_max must exceed 1");
  }
  constexpr int kGrid = 4000;
  const double log_max = std::log(lambda_max);
  auto at = [&](int j) { return std::exp(log_max * j / kGrid); };
  UpperBoundMinimum best{lambda_max, PriorFreeUpperBound(f, lambda_max, k)};
  int best_j = kGrid;
  for (int j = 1; j <= kGrid; ++j) {
    const double bound = PriorFreeUpperBound(f, at(j), k);
    if (bound < best.bound) {
      best = {at(j), bound};
      best_j = j;
    }
  }
  // Refine in log-lambda between the grid neighbours.
  const double lo = std::log(at(std::max(best_j - 1, 0)));
  const double hi = std::log(at(std::min(best_j + 1, kGrid)));
  auto objective = [&](double t) {
    const double lambda = std::exp(t);
    return lambda > 1.0 ? PriorFreeUpperBound(f, lambda, k) : kInf;
  };
  const double t = GoldenMin(objective, lo, hi);
  if (objective(t) < best.bound) best = {std::exp(t), objective(t)};
  return best;
}

NearOptimalParams NearOptimalParamsFor(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kAlphaOutOfRange, fmt::format("alpha must lie in (0,1), got {}", alpha));
  }
  const double log_inv = -std::log(alpha);
  NearOptimalParams out;
  out.beta = alpha / (1.0 + alpha);
  out.ell = 1.0 / (2.0 * log_inv);
  out.guarantee = out.beta / (2.0 * log_inv + 1.0);
  return out;
}

bool BoundingLogsCheck(double beta, double alpha, std::span<const double> xs) {
  const double log_inv = -std::log(alpha);
  for (double x : xs) {
    const double lhs = std::min(beta, std::log(x) * beta / log_inv);
    const double rhs = beta * -std::expm1(-std::log(x) / log_inv);
    if (lhs < rhs - 1e-12) return false;
  }
  return true;
}

GapConstruction OptimalityGapConstruction(double x, std::int64_t k, double ell) {
  if (!(x > 1.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kInvalidX, fmt::format("x must be > 1 and finite, got {}", x));
  }
  if (k < 2) throw Error(ErrorCode::kKTooSmall, "construction needs k >= 2");
  GapConstruction out;
  out.v = ValueVector::Constant(k, x);
  out.v_prime = ValueVector::Ones(k);
  out.v_prime[0] = x * x;
  out.delta_x1 = IpaAllocate(out.v_prime, ell)[0] - IpaAllocate(out.v, ell)[0];
  return out;
}

GapBounds ComputeGapBounds(double ell) {
  RequireEll(ell);
  GapBounds out;
  out.ub_limit = 2.0 * ell / (2.0 * ell + 1.0);
  // ell^ell / (ell + 1)^ell = exp(-ell log1p(1/ell)).
  const double tail = -std::expm1(-ell * std::log1p(1.0 / ell));
  out.ratio_lb = (2.0 * ell + 1.0) / (ell + 1.0) * (0.5 + tail / (2.0 * ell));
  return out;
}

}  // namespace fairauction
