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

#include "fairauction/alloc.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace fairauction {
namespace {

void ValidateEll(double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw Error(ErrorCode::kInvalidEll, fmt::format("ell must be positive and finite, got {}", ell));
  }
}

// (a / b)^p for 0 < a <= b. The ratio is formed first so that a common
// scale factor cancels exactly; when it underflows we fall back to logs.
double PowRatio(double a, double b, double p) {
  const double r = a / b;
  if (r >= DBL_MIN) return std::pow(r, p);
  return std::exp(p * (std::log(a) - std::log(b)));
}

std::vector<int> AscendingOrder(const ValueVector& v) {
  std::vector<int> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&v](int a, int b) { return v[a] < v[b]; });
  return order;
}

struct IpaScan {
  std::vector<int> order;  // ascending by value
  int first_survivor = 0;  // position in `order`
  Allocation allocation;
};

IpaScan RunIpa(const ValueVector& v, double ell) {
  ValidateValues(v);
  ValidateEll(ell);
  const int k = static_cast<int>(v.size());
  IpaScan scan;
  scan.order = AscendingOrder(v);
  const auto& order = scan.order;
  if (v[order[k - 1]] == 0.0) {
    scan.allocation = UniformAllocate(k);
    scan.first_survivor = 0;
    return scan;
  }
  int s = 0;
  while (v[order[s]] == 0.0) ++s;

  // tail[p] = sum_{q >= p} g(v_q) / g(v_p) = sum_{q >= p} (v_p / v_q)^ell,
  // which lies in [1, k - p] and never overflows.
  std::vector<double> tail(static_cast<std::size_t>(k), 1.0);
  for (int p = k - 2; p >= s; --p) {
    tail[p] = 1.0 + PowRatio(v[order[p]], v[order[p + 1]], ell) * tail[p + 1];
  }
  // Drop while (k - 1 - s) g(v_s) >= sum_{j >= s} g(v_j).
  while (static_cast<double>(k - 1 - s) >= tail[s]) ++s;
  scan.first_survivor = s;

  scan.allocation = Allocation::Zero(k);
  const double base = v[order[s]];
  const double scale = static_cast<double>(k - 1 - s) / tail[s];
  for (int p = s; p < k; ++p) {
    const double x = 1.0 - scale * PowRatio(base, v[order[p]], ell);
    scan.allocation[order[p]] = std::clamp(x, 0.0, 1.0);
  }
  return scan;
}

}  // namespace

void AllocRuleSpec::Validate() const {
  switch (kind) {
    case RuleKind::kIpa:
      ValidateEll(ell);
      break;
    case RuleKind::kCappedIpa:
      ValidateEll(ell);
      if (!(beta >= 0.0 && beta <= 1.0)) {
        throw Error(ErrorCode::kInvalidBeta, fmt::format("beta must lie in [0,1], got {}", beta));
      }
      break;
    case RuleKind::kProportional:
      if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw Error(ErrorCode::kInvalidExponent,
                    fmt::format("exponent must be positive and finite, got {}", exponent));
      }
      break;
    case RuleKind::kHighestBid:
    case RuleKind::kUniform:
      break;
  }
}

std::string_view AllocRuleSpec::Name() const { return RuleKindName(kind); }

double AllocRuleSpec::Parameter() const {
  switch (kind) {
    case RuleKind::kIpa:
    case RuleKind::kCappedIpa:
      return ell;
    case RuleKind::kProportional:
      return exponent;
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

std::optional<RuleKind> ParseRuleKind(std::string_view name) {
  if (name == "ipa") return RuleKind::kIpa;
  if (name == "capped-ipa") return RuleKind::kCappedIpa;
  if (name == "proportional" || name == "pa") return RuleKind::kProportional;
  if (name == "highest-bid") return RuleKind::kHighestBid;
  if (name == "uniform") return RuleKind::kUniform;
  return std::nullopt;
}

std::string_view RuleKindName(RuleKind kind) {
  switch (kind) {
    case RuleKind::kIpa: return "ipa";
    case RuleKind::kCappedIpa: return "capped-ipa";
    case RuleKind::kProportional: return "proportional";
    case RuleKind::kHighestBid: return "highest-bid";
    case RuleKind::kUniform: return "uniform";
  }
  return "unknown";
}

void ValidateValues(const ValueVector& v) {
  if (v.size() == 0) throw Error(ErrorCode::kEmptyVector, "value vector is empty");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorCode::kNonFiniteValue, fmt::format("value {} is not finite", i));
    }
    if (v[i] < 0.0) {
      throw Error(ErrorCode::kNegativeValue, fmt::format("value {} is negative ({})", i, v[i]));
    }
  }
}

std::vector<int> Support(const Allocation& x) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

Allocation IpaAllocate(const ValueVector& v, double ell) {
  return RunIpa(v, ell).allocation;
}

ThresholdSolution IpaAllocateThreshold(const ValueVector& v, double ell, double tol) {
  ValidateValues(v);
  ValidateEll(ell);
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tolerance must be positive");
  const Eigen::Index k = v.size();

  std::vector<double> positive;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (v[i] > 0.0) positive.push_back(v[i]);
  }
  ThresholdSolution out;
  if (positive.empty()) {
    out.allocation = UniformAllocate(k);
    return out;
  }
  if (positive.size() == 1) {
    // y(t) = 1 - t g(v_top) reaches 1 only in the limit t -> 0+.
    out.allocation = Allocation::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (v[i] > 0.0) out.allocation[i] = 1.0;
    }
    return out;
  }
  std::sort(positive.begin(), positive.end(), std::greater<>());
  // Measure g relative to the second-highest value, so that g <= 1 for the
  // top advertiser and g = 1 for the runner-up. Then y(1) <= 1 < y(0+) and
  // t* lies in [1/2, 1].
  const double ref = positive[1];
  Eigen::VectorXd g(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    g[i] = v[i] > 0.0 ? std::pow(ref / v[i], ell) : std::numeric_limits<double>::infinity();
  }
  auto mass = [&](double t) {
    double y = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) y += std::max(0.0, 1.0 - t * g[i]);
    return y;
  };

  constexpr int kMaxIterations = 200;
  double lo = 0.0;
  double hi = 1.0;
  int it = 0;
  while (hi - lo > tol) {
    if (++it > kMaxIterations) {
      throw Error(ErrorCode::kBisectionNotConverged,
                  fmt::format("bracket width {} after {} iterations", hi - lo, kMaxIterations));
    }
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  out.allocation.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) out.allocation[i] = std::max(0.0, 1.0 - t * g[i]);
  out.threshold = t * std::pow(ref, ell);
  out.iterations = it;
  return out;
}

Eigen::VectorXd RestrictedAlloc(const ValueVector& v, std::span<const int> serve_set,
                                double ell) {
  ValidateValues(v);
  ValidateEll(ell);
  if (serve_set.empty()) throw Error(ErrorCode::kEmptyServeSet, "serve set is empty");
  double vmax = 0.0;
  for (int i : serve_set) {
    if (i < 0 || i >= v.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, fmt::format("serve-set index {} out of range", i));
    }
    if (v[i] == 0.0) {
      throw Error(ErrorCode::kZeroValueInServeSet, fmt::format("advertiser {} has value 0", i));
    }
    vmax = std::max(vmax, v[i]);
  }
  // Normalise g by g(vmax) so every term is >= 1.
  double total = 0.0;
  for (int i : serve_set) total += std::pow(vmax / v[i], ell);
  const double m1 = static_cast<double>(serve_set.size() - 1);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (int i : serve_set) out[i] = 1.0 - m1 * std::pow(vmax / v[i], ell) / total;
  return out;
}

Allocation CappedIpaAllocate(const ValueVector& v, double ell, double beta) {
  AllocRuleSpec::CappedIpa(ell, beta).Validate();
  const Allocation ipa = IpaAllocate(v, ell);
  const double k = static_cast<double>(v.size());
  return (beta * ipa.array() + (1.0 - beta) / k).matrix();
}

Allocation ProportionalAllocate(const ValueVector& v, double exponent) {
  ValidateValues(v);
  AllocRuleSpec::Proportional(exponent).Validate();
  const double vmax = v.maxCoeff();
  if (vmax == 0.0) return UniformAllocate(v.size());
  Allocation x(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    x[i] = v[i] > 0.0 ? PowRatio(v[i], vmax, exponent) : 0.0;
  }
  return x / x.sum();
}

Allocation HighestBidAllocate(const ValueVector& v) {
  ValidateValues(v);
  const double vmax = v.maxCoeff();
  Allocation x = (v.array() == vmax).cast<double>().matrix();
  return x / x.sum();
}

Allocation UniformAllocate(Eigen::Index k) {
  if (k <= 0) throw Error(ErrorCode::kEmptyVector, "uniform allocation over zero advertisers");
  return Allocation::Constant(k, 1.0 / static_cast<double>(k));
}

Allocation Allocate(const AllocRuleSpec& spec, const ValueVector& v) {
  spec.Validate();
  switch (spec.kind) {
    case RuleKind::kIpa:
      return IpaAllocate(v, spec.ell);
    case RuleKind::kCappedIpa:
      return CappedIpaAllocate(v, spec.ell, spec.beta);
    case RuleKind::kProportional:
      return ProportionalAllocate(v, spec.exponent);
    case RuleKind::kHighestBid:
      return HighestBidAllocate(v);
    case RuleKind::kUniform:
      ValidateValues(v);
      return UniformAllocate(v.size());
  }
  return {};
}

AllocationRule MakeRule(const AllocRuleSpec& spec) {
  spec.Validate();
  return [spec](const ValueVector& v) { return Allocate(spec, v); };
}

std::vector<int> RegimeSignature(const AllocRuleSpec& spec, const ValueVector& v) {
  switch (spec.kind) {
    case RuleKind::kIpa:
    case RuleKind::kCappedIpa: {
      const IpaScan scan = RunIpa(v, spec.ell);
      if (v.maxCoeff() == 0.0) return {};
      std::vector<int> out(scan.order.begin() + scan.first_survivor, scan.order.end());
      std::sort(out.begin(), out.end());
      return out;
    }
    case RuleKind::kHighestBid:
      return Support(HighestBidAllocate(v));
    case RuleKind::kProportional: {
      ValidateValues(v);
      std::vector<int> out;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > 0.0) out.push_back(static_cast<int>(i));
      }
      return out;
    }
    case RuleKind::kUniform:
      return {};
  }
  return {};
}

}  // namespace fairauction
