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

#ifndef FAIRAUCTION_ALLOC_HPP_
#define FAIRAUCTION_ALLOC_HPP_

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairauction/error.hpp"

namespace fairauction {

// Per-auction advertiser values (nonnegative, finite, k >= 1).
using ValueVector = Eigen::VectorXd;
// A distribution over the k advertisers.
using Allocation = Eigen::VectorXd;

// Any allocation rule, as a pure function of the value vector.
using AllocationRule = std::function<Allocation(const ValueVector&)>;

enum class RuleKind { kIpa, kCappedIpa, kProportional, kHighestBid, kUniform };

struct AllocRuleSpec {
  RuleKind kind = RuleKind::kIpa;
  double ell = 1.0;       // IPA and capped IPA
  double beta = 1.0;      // capped IPA mixing weight
  double exponent = 1.0;  // proportional allocation

  static AllocRuleSpec Ipa(double ell) { return {RuleKind::kIpa, ell, 1.0, 1.0}; }
  static AllocRuleSpec CappedIpa(double ell, double beta) {
    return {RuleKind::kCappedIpa, ell, beta, 1.0};
  }
  static AllocRuleSpec Proportional(double exponent) {
    return {RuleKind::kProportional, 1.0, 1.0, exponent};
  }
  static AllocRuleSpec HighestBid() { return {RuleKind::kHighestBid, 1.0, 1.0, 1.0}; }
  static AllocRuleSpec Uniform() { return {RuleKind::kUniform, 1.0, 1.0, 1.0}; }

  // Throws InvalidEll / InvalidBeta / InvalidExponent.
  void Validate() const;

  // Short rule name as used on the command line and in CSV output.
  std::string_view Name() const;

  // The rule's shape parameter: ell for the IPA family, the exponent for
  // proportional allocation, NaN for parameterless rules.
  double Parameter() const;
};

std::optional<RuleKind> ParseRuleKind(std::string_view name);
std::string_view RuleKindName(RuleKind kind);

// Throws EmptyVector, NegativeValue or NonFiniteValue.
void ValidateValues(const ValueVector& v);

// Indices with strictly positive allocation, ascending.
std::vector<int> Support(const Allocation& x);

// Inverse proportional allocation with g(x) = x^-ell, via the sorted
// drop-index scan. O(k log k). Zero-valued advertisers get nothing unless
// every value is zero, in which case the result is uniform.
Allocation IpaAllocate(const ValueVector& v, double ell);

struct ThresholdSolution {
  Allocation allocation;
  // Threshold t* with sum_i max(0, 1 - t* v_i^-ell) = 1.
  double threshold = 0.0;
  int iterations = 0;
};

// The same allocation found by bisecting on the common threshold t.
// Independent of IpaAllocate; used as its oracle.
ThresholdSolution IpaAllocateThreshold(const ValueVector& v, double ell,
                                       double tol = 1e-12);

// 1 - (|S|-1) g(v_i) / sum_{j in S} g(v_j) for i in the serve set S, and 0
// elsewhere. Entries may be negative; this is not an Allocation.
Eigen::VectorXd RestrictedAlloc(const ValueVector& v,
                                std::span<const int> serve_set, double ell);

// beta * IPA(ell) + (1 - beta) * uniform.
Allocation CappedIpaAllocate(const ValueVector& v, double ell, double beta);

// x_i proportional to v_i^exponent; uniform when every value is zero.
Allocation ProportionalAllocate(const ValueVector& v, double exponent);

// Equal split over the argmax set; uniform when every value is zero.
Allocation HighestBidAllocate(const ValueVector& v);

Allocation UniformAllocate(Eigen::Index k);

Allocation Allocate(const AllocRuleSpec& spec, const ValueVector& v);

AllocationRule MakeRule(const AllocRuleSpec& spec);

// The discrete piece of the rule's domain that v falls in: the IPA support
// for the IPA family, the argmax set for highest-bid, the positive entries
// for proportional allocation. The allocation is smooth in v while this
// stays constant, which lets integrators split at the kinks.
std::vector<int> RegimeSignature(const AllocRuleSpec& spec,
                                 const ValueVector& v);

}  // namespace fairauction

#endif  // FAIRAUCTION_ALLOC_HPP_
