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

#ifndef FAIRAUCTION_DATASET_HPP_
#define FAIRAUCTION_DATASET_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fairauction/alloc.hpp"

namespace fairauction {

using Day = std::chrono::year_month_day;

// Strict YYYY-MM-DD; returns false on anything else or an invalid date.
bool ParseDay(std::string_view text, Day& out);
std::string FormatDay(const Day& day);
// "YYYY-MM"
std::string MonthLabel(const Day& day);

// One row of an auction log. Header (bit-exact):
//   day,period,seq,keyword_id,advertiser_id,bid
struct BidRecord {
  Day day;
  int period = 0;          // 15-minute slot, 0..95
  std::uint64_t seq = 0;   // larger is more recent within the period
  std::string keyword_id;
  std::string advertiser_id;
  double bid = 0.0;        // > 0
};

inline constexpr std::string_view kBidCsvHeader = "day,period,seq,keyword_id,advertiser_id,bid";

// Throws FileNotFound, SchemaMismatch or MalformedRow (with the 1-based
// line number in the message).
std::vector<BidRecord> IngestCsv(const std::filesystem::path& path);
std::vector<BidRecord> ParseBidCsv(std::istream& in);
void WriteBidCsv(std::ostream& out, const std::vector<BidRecord>& records);

// All bids on one keyword within one 15-minute slot.
struct AuctionInstance {
  std::string keyword_id;
  Day day;
  int period = 0;
  std::vector<std::string> advertisers;  // ascending, distinct
  ValueVector bids;                      // aligned with `advertisers`

  Eigen::Index size() const { return bids.size(); }
};

// Groups records by (keyword, day, period), keeps each advertiser's most
// recent bid (largest seq, then later input position) and drops groups with
// fewer than two advertisers. Output is sorted by (day, period, keyword).
std::vector<AuctionInstance> BuildAuctions(const std::vector<BidRecord>& records);

// One record per advertiser bid, seq 0; BuildAuctions inverts this.
std::vector<BidRecord> AuctionsToRecords(const std::vector<AuctionInstance>& auctions);

struct Horizon {
  std::string label;  // "YYYY-MM"
  std::vector<AuctionInstance> auctions;
};

// One horizon per calendar month, chronological.
std::vector<Horizon> PartitionHorizons(const std::vector<AuctionInstance>& auctions);

struct SyntheticConfig {
  int keywords = 200;
  int months = 3;
  int auctions_per_keyword = 4;  // per keyword per month
  int keywords_per_cluster = 5;
  // Advertiser pool per keyword cluster; the first `core_advertisers` bid
  // in every auction of the cluster, the rest with `peripheral_rate`.
  int advertisers = 6;
  int core_advertisers = 4;
  double peripheral_rate = 1.0;
  // Pools of consecutive clusters share this many advertisers.
  int cluster_overlap = 1;
  double bid_log_mean = 0.0;
  double bid_log_sigma = 1.0;
  // Upper similarity ratio targeted by each cluster, assigned round-robin:
  // all bids in a cluster stay within sqrt(target) of their base value, so
  // every same-cluster pair has similarity <= target.
  std::vector<double> pair_similarity_profile{1.1, 1.2, 1.3, 1.4, 1.5,
                                              1.6, 1.7, 1.8, 1.9, 2.0};
  // Fraction of clusters whose top two advertisers are planted within
  // `near_tie_gap` of each other, with a fair coin deciding the winner of
  // each auction. Other clusters keep a clear leader.
  double near_tie_fraction = 0.8;
  double near_tie_gap = 0.02;
  // Probability that a bid is preceded by a superseded earlier bid.
  double revision_rate = 0.1;
  int start_year = 2002;
  int start_month = 10;

  // Throws InvalidConfig.
  void Validate() const;

  static SyntheticConfig FromJson(const std::string& text);
  std::string ToJson() const;
};

// Deterministic in (seed, config).
std::vector<BidRecord> GenerateSynthetic(std::uint64_t seed, const SyntheticConfig& config);

}  // namespace fairauction

#endif  // FAIRAUCTION_DATASET_HPP_
