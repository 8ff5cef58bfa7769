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

#ifndef FAIRAUCTION_SUBSET_HPP_
#define FAIRAUCTION_SUBSET_HPP_

#include <string>
#include <vector>

#include "fairauction/alloc.hpp"

namespace fairauction {

// Indices are 0-based in memory; the JSON form is 1-based.
struct SetCollection {
  int k = 0;
  std::vector<std::vector<int>> sets;

  // Throws InvalidCollection (empty set, index outside [0, k), k < 1).
  void Validate() const;

  // {"k": int, "sets": [[int, ...], ...]} with 1-based members.
  static SetCollection FromJson(const std::string& text);
  std::string ToJson() const;
};

// Disjoint nonempty cells covering [0, k).
struct ClusterPartition {
  std::vector<std::vector<int>> clusters;

  // Throws InvalidPartition.
  void Validate(int k) const;
};

// Groups advertisers with identical membership across every set of c.
// Members ascending; clusters ordered by smallest member.
ClusterPartition EquivalenceClusters(const SetCollection& c);

struct CollectionWidths {
  int width = 0;          // largest set
  int cluster_width = 0;  // most equivalence clusters inside one set
};

CollectionWidths ComputeCollectionWidths(const SetCollection& c);

// Largest part; throws SetCrossesPartition if some set spans two parts.
int PartitionedWidth(const SetCollection& c, const ClusterPartition& parts);

// Capped IPA (cap 1/n) across the equivalence clusters of c, each valued at
// its best member, then IPA(ell) inside each cluster.
Allocation ClusterCappedAlloc(const ValueVector& v, double ell, int n, const SetCollection& c);

// IPA(ell) across the parts, each valued at its best member, then
// proportional allocation with exponent 2 ell inside each part.
Allocation PartitionHierarchicalAlloc(const ValueVector& v, double ell,
                                      const ClusterPartition& parts);

// max over C in c of |sum_{i in C} x_i(v) - sum_{i in C} x_i(w)|; 0 for an
// empty collection.
double SubsetStabilityCheck(const AllocationRule& rule, const SetCollection& c,
                            const ValueVector& v, const ValueVector& w);
double SubsetStabilityCheck(const AllocRuleSpec& spec, const SetCollection& c,
                            const ValueVector& v, const ValueVector& w);

// Largest |sum_{i in S} (x_i - y_i)| over every subset S of every part.
// Parts of at most `exhaustive_limit` members are enumerated; larger parts
// use the sign-split extremum (all positive or all negative differences),
// which is the exact maximum.
double MaxPartSubsetDifference(const Allocation& x, const Allocation& y,
                               const ClusterPartition& parts, int exhaustive_limit = 12);

struct TvGapExample {
  ValueVector v;
  ValueVector v_prime;
  std::vector<int> group;  // first half, 0-based
  double lambda_p = 0.0;   // ((k/2 - 1) / (k/2))^(1/ell), below 1
  double similarity = 0.0; // 1 / lambda_p, the >= 1 band ratio between v and v'
  double group_diff = 0.0;
  double f_bound = 0.0;    // 1 - ((k/2 - 1) / (k/2))^2
};

// Two nearby vectors on which IPA(ell) moves all mass between the halves.
// Throws OddK or KTooSmall.
TvGapExample MakeTvGapExample(int k, double ell);

}  // namespace fairauction

#endif  // FAIRAUCTION_SUBSET_HPP_
