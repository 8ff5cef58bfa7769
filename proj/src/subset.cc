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

#include "fairauction/subset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include "json.hpp"

namespace fairauction {
namespace {

// Index of the part containing each advertiser.
std::vector<int> PartIndex(const ClusterPartition& parts, int k) {
  std::vector<int> owner(static_cast<std::size_t>(k), -1);
  for (std::size_t p = 0; p < parts.clusters.size(); ++p) {
    for (int i : parts.clusters[p]) owner[i] = static_cast<int>(p);
  }
  return owner;
}

ValueVector PartValues(const ValueVector& v, const ClusterPartition& parts) {
  ValueVector out(static_cast<Eigen::Index>(parts.clusters.size()));
  for (std::size_t p = 0; p < parts.clusters.size(); ++p) {
    double best = 0.0;
    for (int i : parts.clusters[p]) best = std::max(best, v[i]);
    out[static_cast<Eigen::Index>(p)] = best;
  }
  return out;
}

ValueVector Gather(const ValueVector& v, const std::vector<int>& idx) {
  ValueVector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out[static_cast<Eigen::Index>(j)] = v[idx[j]];
  return out;
}

template <typename Within>
Allocation Compose(const ValueVector& v, const ClusterPartition& parts, const Allocation& across,
                   Within&& within) {
  Allocation x = Allocation::Zero(v.size());
  for (std::size_t p = 0; p < parts.clusters.size(); ++p) {
    const auto& members = parts.clusters[p];
    const Allocation inner = within(Gather(v, members));
    for (std::size_t j = 0; j < members.size(); ++j) {
      x[members[j]] = inner[static_cast<Eigen::Index>(j)] * across[static_cast<Eigen::Index>(p)];
    }
  }
  return x;
}

}  // namespace

void SetCollection::Validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidCollection, "k must be >= 1");
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (sets[s].empty()) {
      throw Error(ErrorCode::kInvalidCollection, fmt::format("set {} is empty", s));
    }
    for (int i : sets[s]) {
      if (i < 0 || i >= k) {
        throw Error(ErrorCode::kInvalidCollection,
                    fmt::format("set {} has member {} outside [1, {}]", s, i + 1, k));
      }
    }
  }
}

SetCollection SetCollection::FromJson(const std::string& text) {
  SetCollection c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.k = j.at("k").get<int>();
    for (const auto& set : j.at("sets")) {
      std::vector<int> members;
      for (const auto& m : set) members.push_back(m.get<int>() - 1);
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      c.sets.push_back(std::move(members));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidCollection, e.what());
  }
  c.Validate();
  return c;
}

std::string SetCollection::ToJson() const {
  nlohmann::json j;
  j["k"] = k;
  j["sets"] = nlohmann::json::array();
  for (const auto& set : sets) {
    auto row = nlohmann::json::array();
    for (int i : set) row.push_back(i + 1);
    j["sets"].push_back(row);
  }
  return j.dump();
}

void ClusterPartition::Validate(int k) const {
  std::vector<int> seen(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (const auto& cell : clusters) {
    if (cell.empty()) throw Error(ErrorCode::kInvalidPartition, "empty cell");
    for (int i : cell) {
      if (i < 0 || i >= k) {
        throw Error(ErrorCode::kInvalidPartition, fmt::format("member {} outside [1, {}]", i + 1, k));
      }
      if (seen[i]++) {
        throw Error(ErrorCode::kInvalidPartition, fmt::format("member {} appears twice", i + 1));
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    if (!seen[i]) throw Error(ErrorCode::kInvalidPartition, fmt::format("member {} uncovered", i + 1));
  }
}

ClusterPartition EquivalenceClusters(const SetCollection& c) {
  c.Validate();
  std::vector<std::vector<bool>> signature(static_cast<std::size_t>(c.k),
                                           std::vector<bool>(c.sets.size(), false));
  for (std::size_t s = 0; s < c.sets.size(); ++s) {
    for (int i : c.sets[s]) signature[i][s] = true;
  }
  // Advertisers are visited in index order, so clusters come out ordered
  // by smallest member with ascending members.
  std::map<std::vector<bool>, std::size_t> slot;
  ClusterPartition out;
  for (int i = 0; i < c.k; ++i) {
    auto [it, fresh] = slot.try_emplace(signature[i], out.clusters.size());
    if (fresh) out.clusters.emplace_back();
    out.clusters[it->second].push_back(i);
  }
  return out;
}

CollectionWidths ComputeCollectionWidths(const SetCollection& c) {
  const ClusterPartition clusters = EquivalenceClusters(c);
  const std::vector<int> owner = PartIndex(clusters, c.k);
  CollectionWidths out;
  for (const auto& set : c.sets) {
    out.width = std::max(out.width, static_cast<int>(set.size()));
    // Every set is a union of whole clusters, so counting distinct owners
    // counts the clusters it contains.
    std::vector<int> owners;
    for (int i : set) owners.push_back(owner[i]);
    std::sort(owners.begin(), owners.end());
    const auto distinct = std::unique(owners.begin(), owners.end()) - owners.begin();
    out.cluster_width = std::max(out.cluster_width, static_cast<int>(distinct));
  }
  return out;
}

int PartitionedWidth(const SetCollection& c, const ClusterPartition& parts) {
  c.Validate();
  parts.Validate(c.k);
  const std::vector<int> owner = PartIndex(parts, c.k);
  for (std::size_t s = 0; s < c.sets.size(); ++s) {
    for (int i : c.sets[s]) {
      if (owner[i] != owner[c.sets[s].front()]) {
        throw Error(ErrorCode::kSetCrossesPartition,
                    fmt::format("set {} spans more than one part", s));
      }
    }
  }
  int width = 0;
  for (const auto& cell : parts.clusters) width = std::max(width, static_cast<int>(cell.size()));
  return width;
}

Allocation ClusterCappedAlloc(const ValueVector& v, double ell, int n, const SetCollection& c) {
  ValidateValues(v);
  if (n < 1) throw Error(ErrorCode::kInvalidConfig, "n must be >= 1");
  if (c.k != v.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("collection has k={}, values have {}", c.k, v.size()));
  }
  const ClusterPartition clusters = EquivalenceClusters(c);
  const Allocation across = CappedIpaAllocate(PartValues(v, clusters), ell, 1.0 / n);
  return Compose(v, clusters, across, [ell](const ValueVector& w) { return IpaAllocate(w, ell); });
}

Allocation PartitionHierarchicalAlloc(const ValueVector& v, double ell,
                                      const ClusterPartition& parts) {
  ValidateValues(v);
  parts.Validate(static_cast<int>(v.size()));
  const Allocation across = IpaAllocate(PartValues(v, parts), ell);
  return Compose(v, parts, across,
                 [ell](const ValueVector& w) { return ProportionalAllocate(w, 2.0 * ell); });
}

double SubsetStabilityCheck(const AllocationRule& rule, const SetCollection& c,
                            const ValueVector& v, const ValueVector& w) {
  if (v.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("vectors have lengths {} and {}", v.size(), w.size()));
  }
  if (c.k != v.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("collection has k={}, values have {}", c.k, v.size()));
  }
  c.Validate();
  const Allocation diff = rule(v) - rule(w);
  double worst = 0.0;
  for (const auto& set : c.sets) {
    double sum = 0.0;
    for (int i : set) sum += diff[i];
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

double SubsetStabilityCheck(const AllocRuleSpec& spec, const SetCollection& c,
                            const ValueVector& v, const ValueVector& w) {
  return SubsetStabilityCheck(MakeRule(spec), c, v, w);
}

double MaxPartSubsetDifference(const Allocation& x, const Allocation& y,
                               const ClusterPartition& parts, int exhaustive_limit) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "allocations differ in length");
  }
  parts.Validate(static_cast<int>(x.size()));
  const Allocation diff = x - y;
  double worst = 0.0;
  for (const auto& cell : parts.clusters) {
    const int m = static_cast<int>(cell.size());
    if (m <= exhaustive_limit) {
      for (unsigned mask = 1; mask < (1u << m); ++mask) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j) {
          if (mask & (1u << j)) sum += diff[cell[j]];
        }
        worst = std::max(worst, std::abs(sum));
      }
    } else {
      double pos = 0.0;
      double neg = 0.0;
      for (int i : cell) (diff[i] > 0.0 ? pos : neg) += diff[i];
      worst = std::max({worst, pos, -neg});
    }
  }
  return worst;
}

TvGapExample MakeTvGapExample(int k, double ell) {
  if (k % 2 != 0) throw Error(ErrorCode::kOddK, fmt::format("k must be even, got {}", k));
  if (k < 4) throw Error(ErrorCode::kKTooSmall, fmt::format("k must be >= 4, got {}", k));
  if (!(ell > 0.0)) throw Error(ErrorCode::kInvalidEll, "ell must be positive");
  const int half = k / 2;
  const double shrink = static_cast<double>(half - 1) / half;
  TvGapExample ex;
  ex.lambda_p = std::pow(shrink, 1.0 / ell);
  ex.similarity = 1.0 / ex.lambda_p;
  ex.v = ValueVector::Ones(k);
  ex.v.tail(half).setConstant(ex.lambda_p);
  ex.v_prime = ValueVector::Ones(k);
  ex.v_prime.head(half).setConstant(ex.lambda_p);
  for (int i = 0; i < half; ++i) ex.group.push_back(i);
  const Allocation x = IpaAllocate(ex.v, ell);
  const Allocation xp = IpaAllocate(ex.v_prime, ell);
  ex.group_diff = std::abs(x.head(half).sum() - xp.head(half).sum());
  ex.f_bound = 1.0 - shrink * shrink;
  return ex;
}

}  // namespace fairauction
