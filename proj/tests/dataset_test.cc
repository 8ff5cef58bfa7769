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

#include "fairauction/dataset.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairauction/profiler.hpp"

namespace fairauction {
namespace {

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidConfig;
}

std::vector<BidRecord> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseBidCsv(in);
}

std::string Header() { return std::string(kBidCsvHeader) + "\n"; }

std::string ErrorMessage(const std::string& text) {
  try {
    Parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents)
      : path_(std::filesystem::temp_directory_path() /
              ("fairauction_dataset_" + std::to_string(counter_++) + ".csv")) {
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

TEST(Dates, ParseAndFormat) {
  Day d;
  ASSERT_TRUE(ParseDay("2002-10-05", d));
  EXPECT_EQ(FormatDay(d), "2002-10-05");
  EXPECT_EQ(MonthLabel(d), "2002-10");
  EXPECT_FALSE(ParseDay("2002-02-30", d));
  EXPECT_FALSE(ParseDay("2002-1-05", d));
  EXPECT_FALSE(ParseDay("2002/10/05", d));
  EXPECT_FALSE(ParseDay("", d));
}

TEST(IngestCsv, WellFormedFile) {
  TempFile f(Header() +
             "2002-10-05,0,1,kw1,A,1.5\n"
             "2002-10-05,0,2,kw1,B,0.25\n"
             "2002-10-06,95,0,kw2,A,3");
  const auto records = IngestCsv(f.path());
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(FormatDay(records[2].day), "2002-10-06");
  EXPECT_EQ(records[2].period, 95);
  EXPECT_EQ(records[1].seq, 2u);
  EXPECT_EQ(records[0].keyword_id, "kw1");
  EXPECT_EQ(records[1].advertiser_id, "B");
  EXPECT_EQ(records[1].bid, 0.25);
}

TEST(IngestCsv, AcceptsCrLfAndTrailingNewline) {
  EXPECT_EQ(Parse(Header() + "2002-10-05,0,1,kw1,A,1.5\r\n2002-10-05,0,1,kw1,B,2\n").size(), 2u);
  EXPECT_TRUE(Parse(Header()).empty());
}

TEST(IngestCsv, RejectsBadRowsWithLineNumbers) {
  EXPECT_EQ(CodeOf([] { Parse(Header() + "2002-10-05,0,1,kw1,A,0\n"); }), ErrorCode::kMalformedRow);
  EXPECT_EQ(CodeOf([] { Parse(Header() + "2002-10-05,96,1,kw1,A,1\n"); }), ErrorCode::kMalformedRow);
  EXPECT_NE(ErrorMessage(Header() + "2002-10-05,0,1,kw1,A,1\n2002-10-05,0,1,kw1,A,-2\n").find("line 3"),
            std::string::npos);
  for (const std::string row : {"2002-13-05,0,1,kw1,A,1", "2002-10-05,x,1,kw1,A,1",
                                "2002-10-05,0,-1,kw1,A,1", "2002-10-05,0,1,,A,1",
                                "2002-10-05,0,1,kw1,,1", "2002-10-05,0,1,kw1,A,abc",
                                "2002-10-05,0,1,kw1,A,inf", "2002-10-05,0,1,kw1,A",
                                "2002-10-05,0,1,kw1,A,1,extra", ""}) {
    EXPECT_EQ(CodeOf([&] { Parse(Header() + row + "\n"); }), ErrorCode::kMalformedRow) << row;
  }
}

TEST(IngestCsv, SchemaAndFileErrors) {
  EXPECT_EQ(CodeOf([] { Parse("day,period,keyword_id,advertiser_id,bid\n"); }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(CodeOf([] { Parse(""); }), ErrorCode::kSchemaMismatch);
  EXPECT_EQ(CodeOf([] { IngestCsv("/nonexistent/bids.csv"); }), ErrorCode::kFileNotFound);
}

TEST(WriteBidCsv, RoundTripsExactly) {
  const auto records = GenerateSynthetic(5, [] {
    SyntheticConfig c;
    c.keywords = 10;
    return c;
  }());
  std::ostringstream out;
  WriteBidCsv(out, records);
  const auto back = Parse(out.str());
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    EXPECT_EQ(back[r].day, records[r].day);
    EXPECT_EQ(back[r].period, records[r].period);
    EXPECT_EQ(back[r].seq, records[r].seq);
    EXPECT_EQ(back[r].keyword_id, records[r].keyword_id);
    EXPECT_EQ(back[r].advertiser_id, records[r].advertiser_id);
    EXPECT_EQ(back[r].bid, records[r].bid);
  }
}

TEST(BuildAuctions, KeepsMostRecentBid) {
  const auto auctions = BuildAuctions(Parse(Header() +
                                            "2002-10-05,3,1,kw,A,1\n"
                                            "2002-10-05,3,2,kw,A,5\n"
                                            "2002-10-05,3,0,kw,B,2\n"));
  ASSERT_EQ(auctions.size(), 1u);
  EXPECT_EQ(auctions[0].advertisers, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(auctions[0].bids[0], 5.0);
  EXPECT_EQ(auctions[0].bids[1], 2.0);
}

TEST(BuildAuctions, EqualSeqFallsBackToInputOrder) {
  const auto auctions = BuildAuctions(Parse(Header() +
                                            "2002-10-05,3,4,kw,A,1\n"
                                            "2002-10-05,3,0,kw,B,2\n"
                                            "2002-10-05,3,4,kw,A,7\n"));
  ASSERT_EQ(auctions.size(), 1u);
  EXPECT_EQ(auctions[0].bids[0], 7.0);
}

TEST(BuildAuctions, DropsSingleAdvertiserGroups) {
  EXPECT_TRUE(BuildAuctions(Parse(Header() +
                                  "2002-10-05,3,1,kw,A,1\n"
                                  "2002-10-05,3,2,kw,A,5\n"))
                  .empty());
}

TEST(BuildAuctions, SeparatesPeriods) {
  const auto auctions = BuildAuctions(Parse(Header() +
                                            "2002-10-05,3,1,kw,A,1\n"
                                            "2002-10-05,3,1,kw,B,2\n"
                                            "2002-10-05,4,1,kw,A,1\n"
                                            "2002-10-05,4,1,kw,B,2\n"));
  ASSERT_EQ(auctions.size(), 2u);
  EXPECT_EQ(auctions[0].period, 3);
  EXPECT_EQ(auctions[1].period, 4);
}

TEST(BuildAuctions, IdempotentOnItsOwnOutput) {
  const auto auctions = BuildAuctions(GenerateSynthetic(9, SyntheticConfig{}));
  const auto again = BuildAuctions(AuctionsToRecords(auctions));
  ASSERT_EQ(again.size(), auctions.size());
  for (std::size_t a = 0; a < auctions.size(); ++a) {
    EXPECT_EQ(again[a].keyword_id, auctions[a].keyword_id);
    EXPECT_EQ(again[a].day, auctions[a].day);
    EXPECT_EQ(again[a].period, auctions[a].period);
    EXPECT_EQ(again[a].advertisers, auctions[a].advertisers);
    EXPECT_EQ(again[a].bids, auctions[a].bids);
  }
}

TEST(BuildAuctions, EveryAuctionHasTwoDistinctBidders) {
  for (const auto& a : BuildAuctions(GenerateSynthetic(10, SyntheticConfig{}))) {
    ASSERT_GE(a.size(), 2);
    ASSERT_TRUE(std::adjacent_find(a.advertisers.begin(), a.advertisers.end()) == a.advertisers.end());
    ASSERT_TRUE(std::is_sorted(a.advertisers.begin(), a.advertisers.end()));
    ASSERT_GT(a.bids.minCoeff(), 0.0);
  }
}

TEST(PartitionHorizons, Examples) {
  const auto two = PartitionHorizons(BuildAuctions(Parse(Header() +
                                                         "2002-11-01,0,1,kw,A,1\n"
                                                         "2002-11-01,0,1,kw,B,2\n"
                                                         "2002-10-05,0,1,kw,A,1\n"
                                                         "2002-10-05,0,1,kw,B,2\n")));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].label, "2002-10");
  EXPECT_EQ(two[1].label, "2002-11");
  const auto one = PartitionHorizons(BuildAuctions(Parse(Header() +
                                                         "2002-10-01,0,1,kw,A,1\n"
                                                         "2002-10-01,0,1,kw,B,2\n"
                                                         "2002-10-31,0,1,kw,A,1\n"
                                                         "2002-10-31,0,1,kw,B,2\n")));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].auctions.size(), 2u);
  EXPECT_TRUE(PartitionHorizons({}).empty());
}

TEST(PartitionHorizons, MonthsAreChronologicalAcrossYearBoundary) {
  SyntheticConfig c;
  c.keywords = 10;
  c.months = 5;
  const auto horizons = PartitionHorizons(BuildAuctions(GenerateSynthetic(3, c)));
  std::vector<std::string> labels;
  for (const auto& h : horizons) {
    labels.push_back(h.label);
    for (const auto& a : h.auctions) EXPECT_EQ(MonthLabel(a.day), h.label);
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"2002-10", "2002-11", "2002-12", "2003-01", "2003-02"}));
}

TEST(GenerateSynthetic, Deterministic) {
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream c;
  WriteBidCsv(a, GenerateSynthetic(42, SyntheticConfig{}));
  WriteBidCsv(b, GenerateSynthetic(42, SyntheticConfig{}));
  WriteBidCsv(c, GenerateSynthetic(43, SyntheticConfig{}));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(GenerateSynthetic, InvalidConfig) {
  SyntheticConfig c;
  c.advertisers = 0;
  EXPECT_EQ(CodeOf([&] { GenerateSynthetic(1, c); }), ErrorCode::kInvalidConfig);
  c = {};
  c.keywords = -1;
  EXPECT_EQ(CodeOf([&] { GenerateSynthetic(1, c); }), ErrorCode::kInvalidConfig);
  c = {};
  c.pair_similarity_profile = {0.9};
  EXPECT_EQ(CodeOf([&] { GenerateSynthetic(1, c); }), ErrorCode::kInvalidConfig);
  c = {};
  c.near_tie_fraction = 1.5;
  EXPECT_EQ(CodeOf([&] { GenerateSynthetic(1, c); }), ErrorCode::kInvalidConfig);
}

TEST(SyntheticConfig, JsonRoundTripAndUnknownKeys) {
  SyntheticConfig c;
  c.keywords = 17;
  c.pair_similarity_profile = {1.05, 1.5};
  const SyntheticConfig back = SyntheticConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.keywords, 17);
  EXPECT_EQ(back.pair_similarity_profile, c.pair_similarity_profile);
  EXPECT_EQ(SyntheticConfig::FromJson(R"({"months": 2})").months, 2);
  EXPECT_EQ(CodeOf([] { SyntheticConfig::FromJson(R"({"keywrods": 2})"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { SyntheticConfig::FromJson("[1"); }), ErrorCode::kInvalidConfig);
}

int ClusterOf(const std::string& keyword, int per_cluster) {
  return std::stoi(keyword.substr(2)) / per_cluster;
}

TEST(GenerateSynthetic, TightProfileKeepsSameClusterPairsTight) {
  SyntheticConfig c;
  c.pair_similarity_profile = {1.1};
  const auto horizons = PartitionHorizons(BuildAuctions(GenerateSynthetic(77, c)));
  std::size_t pairs = 0;
  std::size_t tight = 0;
  for (const auto& h : horizons) {
    for (std::size_t a = 0; a < h.auctions.size(); ++a) {
      for (std::size_t b = a + 1; b < h.auctions.size(); ++b) {
        const auto& u = h.auctions[a];
        const auto& v = h.auctions[b];
        if (ClusterOf(u.keyword_id, c.keywords_per_cluster) != ClusterOf(v.keyword_id, c.keywords_per_cluster)) {
          continue;
        }
        ++pairs;
        if (ComputePairStats(u, v, AllocRuleSpec::Uniform()).lambda_tilde < 1.1) ++tight;
      }
    }
  }
  ASSERT_GT(pairs, 1000u);
  EXPECT_GE(static_cast<double>(tight), 0.9 * static_cast<double>(pairs));
}

TEST(GenerateSynthetic, ProfilePopulatesEveryBucket) {
  const auto horizons = PartitionHorizons(BuildAuctions(GenerateSynthetic(78, SyntheticConfig{})));
  ASSERT_EQ(horizons.size(), 3u);
  const StabilityProfile p = BuildProfile(horizons[0], AllocRuleSpec::Ipa(1), ProfileConfig{});
  for (const auto& b : p.buckets) EXPECT_GT(b.pair_count, 0u) << b.lo;
}

}  // namespace
}  // namespace fairauction
