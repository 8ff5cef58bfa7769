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

#include "fairauction/payments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fairauction {
namespace {

constexpr double kMonotoneSlack = 1e-12;
constexpr int kMaxChangesPerScanStep = 64;

void CheckIndex(const ValueVector& v, int i) {
  if (i < 0 || i >= v.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                fmt::format("advertiser index {} out of range for k={}", i, v.size()));
  }
}

// x_i and the regime label as functions of advertiser i's report.
class Slice {
 public:
  Slice(const AllocationRule& rule, const SignatureFn& signature, const ValueVector& v, int i)
      : rule_(rule), signature_(signature), values_(v), index_(i) {}

  double Alloc(double z) const {
    values_[index_] = z;
    return rule_(values_)[index_];
  }

  std::vector<int> Regime(double z) const {
    values_[index_] = z;
    return signature_(values_);
  }

 private:
  const AllocationRule& rule_;
  const SignatureFn& signature_;
  mutable ValueVector values_;
  int index_;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const Slice& f, int max_depth) : f_(f), max_depth_(max_depth) {}

  void Add(double a, double b, double tol, Integral& acc) const {
    if (!(b > a)) return;
    const double fa = f_.Alloc(a);
    const double fb = f_.Alloc(b);
    const double m = 0.5 * (a + b);
    const double fm = f_.Alloc(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Recurse(a, b, fa, fm, fb, whole, tol, max_depth_, acc);
  }

 private:
  void Recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
               int depth, Integral& acc) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f_.Alloc(lm);
    const double frm = f_.Alloc(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth <= 0 || !(m > a && b > m)) {
      acc.value += left + right + delta / 15.0;
      acc.error += std::abs(delta) / 15.0;
      return;
    }
    Recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc);
    Recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
  }

  const Slice& f_;
  int max_depth_;
};

// Splits [0, upper] into pieces on which the regime label is constant. Each
// piece is returned as a closed interval whose endpoints share its label;
// neighbouring pieces are separated by a gap of a few ulps.
std::vector<std::pair<double, double>> SmoothPieces(const Slice& f, double upper, int scan_points) {
  std::vector<double> scan{0.0, upper};
  for (int j = 1; j < scan_points; ++j) {
    scan.push_back(upper * j / scan_points);
    scan.push_back(upper * std::pow(10.0, -12.0 * (scan_points - j) / scan_points));
  }
  std::sort(scan.begin(), scan.end());
  scan.erase(std::unique(scan.begin(), scan.end()), scan.end());

  double prev_alloc = -1.0;
  std::vector<std::vector<int>> regimes;
  regimes.reserve(scan.size());
  for (double z : scan) {
    const double x = f.Alloc(z);
    if (x < prev_alloc - kMonotoneSlack) {
      throw Error(ErrorCode::kNonMonotoneRule,
                  fmt::format("allocation drops from {} to {} at report {}", prev_alloc, x, z));
    }
    prev_alloc = x;
    regimes.push_back(f.Regime(z));
  }

  std::vector<std::pair<double, double>> pieces;
  double start = scan.front();
  for (std::size_t j = 1; j < scan.size(); ++j) {
    if (regimes[j] == regimes[j - 1]) continue;
    // One or more changes inside (scan[j-1], scan[j]); peel them off left
    // to right by bisection.
    double left = scan[j - 1];
    std::vector<int> label = regimes[j - 1];
    for (int changes = 0; label != regimes[j] && changes < kMaxChangesPerScanStep; ++changes) {
      double lo = left;
      double hi = scan[j];
      for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() *
                                                   std::max(hi, 1e-300);
           ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f.Regime(mid) == label) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      pieces.emplace_back(start, lo);
      start = hi;
      left = hi;
      label = f.Regime(hi);
    }
  }
  pieces.emplace_back(start, scan.back());
  return pieces;
}

}  // namespace

PaymentResult PaymentIdentity(const AllocationRule& rule, const SignatureFn& signature,
                              const ValueVector& v, int i, const QuadratureConfig& quad) {
  ValidateValues(v);
  CheckIndex(v, i);
  if (!(quad.tol > 0.0) || quad.scan_points < 2 || quad.max_depth < 1) {
    throw Error(ErrorCode::kInvalidConfig, "quadrature settings out of range");
  }
  PaymentResult out;
  out.allocation_at_truth = rule(v)[i];
  const double vi = v[i];
  if (vi == 0.0) return out;

  const SignatureFn support_signature = [&rule](const ValueVector& w) {
    return Support(rule(w));
  };
  const Slice slice(rule, signature ? signature : support_signature, v, i);
  const AdaptiveSimpson simpson(slice, quad.max_depth);
  Integral acc;
  for (const auto& [a, b] : SmoothPieces(slice, vi, quad.scan_points)) {
    simpson.Add(a, b, quad.tol * (b - a) / vi, acc);
  }
  if (acc.error > quad.tol) {
    throw Error(ErrorCode::kQuadratureNotConverged,
                fmt::format("error estimate {} exceeds tolerance {}", acc.error, quad.tol));
  }
  const double revenue_cap = vi * out.allocation_at_truth;
  out.payment = std::clamp(revenue_cap - acc.value, 0.0, revenue_cap);
  out.quadrature_error_estimate = acc.error;
  return out;
}

PaymentResult PaymentIdentity(const AllocRuleSpec& spec, const ValueVector& v, int i,
                              const QuadratureConfig& quad) {
  const AllocationRule rule = MakeRule(spec);
  const SignatureFn signature = [spec](const ValueVector& w) { return RegimeSignature(spec, w); };
  return PaymentIdentity(rule, signature, v, i, quad);
}

bool CheckMonotone(const AllocationRule& rule, const ValueVector& v, int i, int grid) {
  ValidateValues(v);
  CheckIndex(v, i);
  if (grid < 2) throw Error(ErrorCode::kInvalidGrid, "grid needs at least 2 points");
  double base = v[i];
  if (base == 0.0) base = v.maxCoeff() > 0.0 ? v.maxCoeff() : 1.0;
  ValueVector w = v;
  w[i] = 0.0;
  double prev = rule(w)[i];
  for (int j = 0; j < grid; ++j) {
    w[i] = base * std::pow(10.0, -2.0 + 4.0 * j / (grid - 1));
    const double x = rule(w)[i];
    if (x < prev - kMonotoneSlack) return false;
    prev = x;
  }
  return true;
}

bool CheckMonotone(const AllocRuleSpec& spec, const ValueVector& v, int i, int grid) {
  return CheckMonotone(MakeRule(spec), v, i, grid);
}

double IcRegret(const AllocRuleSpec& spec, const ValueVector& v, int i, int deviations,
                const QuadratureConfig& quad) {
  ValidateValues(v);
  CheckIndex(v, i);
  if (deviations < 1) throw Error(ErrorCode::kInvalidGrid, "need at least one deviation");
  const double vi = v[i];
  // Zero value: truthful utility is 0 and any report pays p >= 0.
  if (vi == 0.0) return 0.0;

  const PaymentResult truth = PaymentIdentity(spec, v, i, quad);
  const double truthful_utility = vi * truth.allocation_at_truth - truth.payment;
  ValueVector w = v;
  double regret = 0.0;
  for (int j = -1; j < deviations; ++j) {
    const double z =
        j < 0 ? 0.0
              : vi * std::pow(10.0, deviations == 1 ? 0.0 : -3.0 + 6.0 * j / (deviations - 1));
    w[i] = z;
    const PaymentResult report = PaymentIdentity(spec, w, i, quad);
    regret = std::max(regret, vi * report.allocation_at_truth - report.payment - truthful_utility);
  }
  return regret;
}

}  // namespace fairauction
