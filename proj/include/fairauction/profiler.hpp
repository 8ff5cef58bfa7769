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

#ifndef FAIRAUCTION_PROFILER_HPP_
#define FAIRAUCTION_PROFILER_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairauction/alloc.hpp"
#include "fairauction/dataset.hpp"

namespace fairauction {

// |a ∩ b| / |a ∪ b| over sorted, distinct id lists; 0 when both are empty.
double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct PairStats {
  std::string keyword_u;
  std::string keyword_v;
  double lambda_tilde = 1.0;  // max bid ratio over shared advertisers
  double d_tilde = 0.0;       // max allocation change over shared advertisers
  double jaccard = 0.0;
  std::vector<std::string> shared;
};

// Allocations are computed on each auction's full bid vector; both
// statistics are then restricted to the shared advertisers.
// Throws EmptyIntersection.
PairStats ComputePairStats(const AuctionInstance& u, const AuctionInstance& v,
                           const AllocRuleSpec& spec);

// Nearest-rank percentile: the ceil(p n / 100)-th smallest value.
double NearestRankPercentile(std::vector<double> values, int percentile);

struct ProfileConfig {
  double jaccard_min = 0.67;  // pairs qualify when jaccard >= jaccard_min
  double bucket_width = 0.1;
  double range_lo = 1.0;
  double range_hi = 2.0;
  int percentile = 90;
  std::size_t max_samples_per_bucket = 2000;
  std::uint64_t seed = 0;
  int threads = 1;

  // Throws InvalidConfig.
  void Validate() const;
};

struct ProfileBucket {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t pair_count = 0;
  std::uint64_t sampled_count = 0;
  double p90_diff = 0.0;       // the configured percentile of d~ over the sample
  double frac_diff_one = 0.0;  // share of the sample with d~ >= 1 - 1e-9
};

struct StabilityProfile {
  AllocRuleSpec algorithm;
  std::vector<ProfileBucket> buckets;
  std::uint64_t qualifying_pairs = 0;  // jaccard >= jaccard_min
  std::uint64_t discarded_pairs = 0;   // qualifying but similarity above range_hi
};

// Buckets are left-closed and right-open except the last, which is closed.
// Each bucket keeps a sample of at most max_samples_per_bucket pairs chosen
// by a seeded hash of the pair's auction keys, so the sample does not depend
// on enumeration order or thread count. Throws EmptyHorizon.
StabilityProfile BuildProfile(const Horizon& horizon, const AllocRuleSpec& spec,
                              const ProfileConfig& config);

struct WelfareTotals {
  double total_welfare = 0.0;
  double total_optimal = 0.0;
  double ratio = 0.0;
  std::size_t auctions = 0;
};

struct AlgorithmWelfare {
  AllocRuleSpec algorithm;
  WelfareTotals all;
  std::map<int, WelfareTotals> by_k;  // keyed by number of bidders
  std::vector<double> per_auction_ratio;
};

struct WelfareReport {
  std::vector<AlgorithmWelfare> algorithms;
};

// Ratio of summed welfare to summed optimum. Throws EmptyHorizon.
WelfareReport ComputeWelfareReport(const Horizon& horizon, std::span<const AllocRuleSpec> specs);

struct ParameterMatch {
  double ell = 0.0;
  double best_ell_prime = 0.0;
  double spread = 0.0;  // max over buckets of |ln(p90_a / p90_b)|
};

// For each profile in `a`, the candidate in `b` whose per-bucket p90 ratio
// is flattest. Buckets count when sampled in both and p90_b > 0; ties go to
// the smaller candidate. Throws NoComparableBuckets.
std::vector<ParameterMatch> MatchParameters(const std::map<double, StabilityProfile>& a,
                                            const std::map<double, StabilityProfile>& b);

inline constexpr std::string_view kProfileCsvHeader =
    "algorithm,ell,bucket_lo,bucket_hi,pair_count,sampled_count,p90_alloc_diff,frac_diff_one";
inline constexpr std::string_view kWelfareCsvHeader =
    "algorithm,ell,k_slice,total_welfare,total_optimal,ratio";

void WriteProfileCsv(std::ostream& out, std::span<const StabilityProfile> profiles);
// Throws SchemaMismatch / MalformedRow.
std::vector<StabilityProfile> ReadProfileCsv(std::istream& in);
void WriteWelfareCsv(std::ostream& out, const WelfareReport& report);
std::string MatchesToJson(std::span<const ParameterMatch> matches);

}  // namespace fairauction

#endif  // FAIRAUCTION_PROFILER_HPP_
