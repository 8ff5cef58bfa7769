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

#ifndef FAIRAUCTION_PAYMENTS_HPP_
#define FAIRAUCTION_PAYMENTS_HPP_

#include <functional>
#include <vector>

#include "fairauction/alloc.hpp"

namespace fairauction {

struct QuadratureConfig {
  double tol = 1e-8;
  int max_depth = 50;
  // Points per scan (uniform and geometric) used to locate regime changes.
  int scan_points = 64;
};

struct PaymentResult {
  double payment = 0.0;
  double allocation_at_truth = 0.0;
  double quadrature_error_estimate = 0.0;
};

// Maps a value vector to a label that is constant on each smooth piece of
// the rule. Defaults to the allocation's support when not supplied.
using SignatureFn = std::function<std::vector<int>(const ValueVector&)>;

// Truthful payment for advertiser i:
//   p_i(v) = v_i x_i(v) - int_0^{v_i} x_i(z, v_{-i}) dz.
// The integral is split at regime changes and each piece is integrated by
// adaptive Simpson. Throws NonMonotoneRule if x_i is seen to decrease in z.
PaymentResult PaymentIdentity(const AllocRuleSpec& spec, const ValueVector& v, int i,
                              const QuadratureConfig& quad = {});
PaymentResult PaymentIdentity(const AllocationRule& rule, const SignatureFn& signature,
                              const ValueVector& v, int i, const QuadratureConfig& quad = {});

// True iff x_i(z, v_{-i}) is non-decreasing (within 1e-12) over z = 0 and a
// geometric grid of `grid` points spanning [v_i / 100, 100 v_i].
bool CheckMonotone(const AllocRuleSpec& spec, const ValueVector& v, int i, int grid);
bool CheckMonotone(const AllocationRule& rule, const ValueVector& v, int i, int grid);

// Largest utility gain advertiser i can get by misreporting some z from
// {0} and a geometric grid of `deviations` points over [1e-3 v_i, 1e3 v_i].
// Never negative.
double IcRegret(const AllocRuleSpec& spec, const ValueVector& v, int i, int deviations,
                const QuadratureConfig& quad = {});

}  // namespace fairauction

#endif  // FAIRAUCTION_PAYMENTS_HPP_
