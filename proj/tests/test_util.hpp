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

#ifndef FAIRAUCTION_TESTS_TEST_UTIL_HPP_
#define FAIRAUCTION_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "fairauction/alloc.hpp"
#include "fairauction/rng.hpp"

namespace fairauction::testing {

inline ValueVector Vec(std::initializer_list<double> values) {
  ValueVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Log-normal values with the given log-scale spread.
inline ValueVector LogNormalValues(Rng& rng, int k, double sigma = 1.0) {
  ValueVector v(k);
  for (int i = 0; i < k; ++i) v[i] = std::exp(sigma * rng.Normal());
  return v;
}

inline int UniformInt(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.Below(static_cast<std::uint64_t>(hi - lo + 1)));
}

// Drop-and-recurse IPA: start from every positive advertiser, drop anyone
// with weight (|S| - 1) g_i / sum_S g > 1, repeat until stable. Quadratic
// and written straight from the definition; only used as a test oracle.
inline Allocation IpaByRepeatedRemoval(const ValueVector& v, double ell) {
  const Eigen::Index k = v.size();
  if (v.maxCoeff() == 0.0) return Allocation::Constant(k, 1.0 / k);
  std::vector<int> serve;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (v[i] > 0.0) serve.push_back(static_cast<int>(i));
  }
  while (true) {
    long double total = 0.0L;
    for (int i : serve) total += std::pow(static_cast<long double>(v[i]), -ell);
    std::vector<int> keep;
    for (int i : serve) {
      const long double w = (serve.size() - 1) * std::pow(static_cast<long double>(v[i]), -ell) / total;
      if (w <= 1.0L) keep.push_back(i);
    }
    if (keep.size() == serve.size()) {
      Allocation x = Allocation::Zero(k);
      for (int i : serve) {
        x[i] = static_cast<double>(1.0L - (serve.size() - 1) *
                                              std::pow(static_cast<long double>(v[i]), -ell) / total);
      }
      return x;
    }
    serve = std::move(keep);
  }
}

}  // namespace fairauction::testing

#endif  // FAIRAUCTION_TESTS_TEST_UTIL_HPP_
