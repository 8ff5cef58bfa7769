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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "fairauction/rng.hpp"
#include "json.hpp"

namespace fairauction {
namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

template <typename T>
bool ParseInteger(std::string_view text, T& out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void Malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kMalformedRow, fmt::format("line {}: {}", line, why));
}

BidRecord ParseRow(std::string_view line, std::size_t line_no) {
  const auto fields = SplitFields(line);
  if (fields.size() != 6) Malformed(line_no, fmt::format("expected 6 fields, got {}", fields.size()));
  BidRecord r;
  if (!ParseDay(fields[0], r.day)) Malformed(line_no, "day is not a valid YYYY-MM-DD date");
  if (!ParseInteger(fields[1], r.period) || r.period < 0 || r.period > 95) {
    Malformed(line_no, "period must be an integer in [0, 95]");
  }
  if (!ParseInteger(fields[2], r.seq)) Malformed(line_no, "seq must be a nonnegative integer");
  if (fields[3].empty()) Malformed(line_no, "keyword_id is empty");
  if (fields[4].empty()) Malformed(line_no, "advertiser_id is empty");
  r.keyword_id = std::string(fields[3]);
  r.advertiser_id = std::string(fields[4]);
  const auto bid = fields[5];
  const auto [ptr, ec] = std::from_chars(bid.data(), bid.data() + bid.size(), r.bid);
  if (bid.empty() || ec != std::errc() || ptr != bid.data() + bid.size() || !std::isfinite(r.bid)) {
    Malformed(line_no, "bid is not a decimal number");
  }
  if (!(r.bid > 0.0)) Malformed(line_no, "bid must be positive");
  return r;
}

}  // namespace

bool ParseDay(std::string_view text, Day& out) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (!ParseInteger(text.substr(0, 4), y) || !ParseInteger(text.substr(5, 2), m) ||
      !ParseInteger(text.substr(8, 2), d)) {
    return false;
  }
  out = Day{year{y}, month{m}, day{d}};
  return out.ok();
}

std::string FormatDay(const Day& d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

std::string MonthLabel(const Day& d) {
  return fmt::format("{:04d}-{:02d}", static_cast<int>(d.year()), static_cast<unsigned>(d.month()));
}

std::vector<BidRecord> IngestCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  return ParseBidCsv(in);
}

std::vector<BidRecord> ParseBidCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kSchemaMismatch, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBidCsvHeader) {
    throw Error(ErrorCode::kSchemaMismatch,
                fmt::format("header must be '{}', got '{}'", kBidCsvHeader, line));
  }
  std::vector<BidRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(ParseRow(line, line_no));
  }
  return out;
}

void WriteBidCsv(std::ostream& out, const std::vector<BidRecord>& records) {
  out << kBidCsvHeader << '\n';
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{},{}\n", FormatDay(r.day), r.period, r.seq, r.keyword_id,
                       r.advertiser_id, r.bid);
  }
}

std::vector<AuctionInstance> BuildAuctions(const std::vector<BidRecord>& records) {
  using Key = std::tuple<int, unsigned, unsigned, int, std::string>;  // y, m, d, period, keyword
  struct Latest {
    std::uint64_t seq;
    std::size_t position;
    double bid;
  };
  std::map<Key, std::map<std::string, Latest>> groups;
  for (std::size_t pos = 0; pos < records.size(); ++pos) {
    const auto& r = records[pos];
    Key key{static_cast<int>(r.day.year()), static_cast<unsigned>(r.day.month()),
            static_cast<unsigned>(r.day.day()), r.period, r.keyword_id};
    auto& bids = groups[key];
    auto [it, fresh] = bids.try_emplace(r.advertiser_id, Latest{r.seq, pos, r.bid});
    if (!fresh && std::tie(r.seq, pos) > std::tie(it->second.seq, it->second.position)) {
      it->second = Latest{r.seq, pos, r.bid};
    }
  }
  std::vector<AuctionInstance> out;
  for (const auto& [key, bids] : groups) {
    if (bids.size() < 2) continue;
    AuctionInstance a;
    const auto& [y, m, d, period, keyword] = key;
    a.keyword_id = keyword;
    a.day = Day{year{y}, month{m}, day{d}};
    a.period = period;
    a.bids.resize(static_cast<Eigen::Index>(bids.size()));
    Eigen::Index j = 0;
    for (const auto& [advertiser, latest] : bids) {
      a.advertisers.push_back(advertiser);
      a.bids[j++] = latest.bid;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<BidRecord> AuctionsToRecords(const std::vector<AuctionInstance>& auctions) {
  std::vector<BidRecord> out;
  for (const auto& a : auctions) {
    for (std::size_t j = 0; j < a.advertisers.size(); ++j) {
      out.push_back(BidRecord{a.day, a.period, 0, a.keyword_id, a.advertisers[j],
                              a.bids[static_cast<Eigen::Index>(j)]});
    }
  }
  return out;
}

std::vector<Horizon> PartitionHorizons(const std::vector<AuctionInstance>& auctions) {
  std::map<std::string, std::vector<AuctionInstance>> by_month;
  for (const auto& a : auctions) by_month[MonthLabel(a.day)].push_back(a);
  std::vector<Horizon> out;
  for (auto& [label, list] : by_month) out.push_back(Horizon{label, std::move(list)});
  return out;
}

void SyntheticConfig::Validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (keywords < 1) fail("keywords must be >= 1");
  if (months < 1) fail("months must be >= 1");
  if (auctions_per_keyword < 1 || auctions_per_keyword > 28 * 96) {
    fail("auctions_per_keyword must be in [1, 2688]");
  }
  if (keywords_per_cluster < 1) fail("keywords_per_cluster must be >= 1");
  if (advertisers < 2) fail("advertisers must be >= 2");
  if (core_advertisers < 2 || core_advertisers > advertisers) {
    fail("core_advertisers must be in [2, advertisers]");
  }
  if (!(peripheral_rate >= 0.0 && peripheral_rate <= 1.0)) fail("peripheral_rate must be in [0,1]");
  if (cluster_overlap < 0 || cluster_overlap >= advertisers) {
    fail("cluster_overlap must be in [0, advertisers)");
  }
  if (!(bid_log_sigma >= 0.0) || !std::isfinite(bid_log_mean)) fail("bad bid distribution");
  if (pair_similarity_profile.empty()) fail("pair_similarity_profile is empty");
  for (double t : pair_similarity_profile) {
    if (!(t >= 1.0) || !std::isfinite(t)) fail("similarity targets must be finite and >= 1");
  }
  if (!(near_tie_fraction >= 0.0 && near_tie_fraction <= 1.0)) {
    fail("near_tie_fraction must be in [0,1]");
  }
  if (!(near_tie_gap >= 0.0 && near_tie_gap < 1.0)) fail("near_tie_gap must be in [0,1)");
  if (!(revision_rate >= 0.0 && revision_rate <= 1.0)) fail("revision_rate must be in [0,1]");
  if (start_month < 1 || start_month > 12) fail("start_month must be in [1,12]");
}

SyntheticConfig SyntheticConfig::FromJson(const std::string& text) {
  SyntheticConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "keywords") c.keywords = value.get<int>();
      else if (key == "months") c.months = value.get<int>();
      else if (key == "auctions_per_keyword") c.auctions_per_keyword = value.get<int>();
      else if (key == "keywords_per_cluster") c.keywords_per_cluster = value.get<int>();
      else if (key == "advertisers") c.advertisers = value.get<int>();
      else if (key == "core_advertisers") c.core_advertisers = value.get<int>();
      else if (key == "peripheral_rate") c.peripheral_rate = value.get<double>();
      else if (key == "cluster_overlap") c.cluster_overlap = value.get<int>();
      else if (key == "bid_log_mean") c.bid_log_mean = value.get<double>();
      else if (key == "bid_log_sigma") c.bid_log_sigma = value.get<double>();
      else if (key == "pair_similarity_profile") {
        c.pair_similarity_profile = value.get<std::vector<double>>();
      } else if (key == "near_tie_fraction") c.near_tie_fraction = value.get<double>();
      else if (key == "near_tie_gap") c.near_tie_gap = value.get<double>();
      else if (key == "revision_rate") c.revision_rate = value.get<double>();
      else if (key == "start_year") c.start_year = value.get<int>();
      else if (key == "start_month") c.start_month = value.get<int>();
      else throw Error(ErrorCode::kInvalidConfig, fmt::format("unknown key '{}'", key));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  c.Validate();
  return c;
}

std::string SyntheticConfig::ToJson() const {
  nlohmann::json j{{"keywords", keywords},
                   {"months", months},
                   {"auctions_per_keyword", auctions_per_keyword},
                   {"keywords_per_cluster", keywords_per_cluster},
                   {"advertisers", advertisers},
                   {"core_advertisers", core_advertisers},
                   {"peripheral_rate", peripheral_rate},
                   {"cluster_overlap", cluster_overlap},
                   {"bid_log_mean", bid_log_mean},
                   {"bid_log_sigma", bid_log_sigma},
                   {"pair_similarity_profile", pair_similarity_profile},
                   {"near_tie_fraction", near_tie_fraction},
                   {"near_tie_gap", near_tie_gap},
                   {"revision_rate", revision_rate},
                   {"start_year", start_year},
                   {"start_month", start_month}};
  return j.dump(2);
}

std::vector<BidRecord> GenerateSynthetic(std::uint64_t seed, const SyntheticConfig& config) {
  config.Validate();
  Rng rng(seed);
  const int clusters = (config.keywords + config.keywords_per_cluster - 1) / config.keywords_per_cluster;
  const int stride = config.advertisers - config.cluster_overlap;
  std::vector<BidRecord> out;

  // Near-tie clusters are stratified within each similarity target: the
  // r-th cluster of a target is a near tie when floor(r f + phase) steps,
  // so every target gets its share up to rounding instead of a binomial
  // draw that can starve the tightest bucket.
  const std::size_t targets = config.pair_similarity_profile.size();
  std::vector<double> phase(targets);
  for (double& u : phase) u = rng.Uniform01();

  for (int c = 0; c < clusters; ++c) {
    const std::size_t t = static_cast<std::size_t>(c) % targets;
    const double target = config.pair_similarity_profile[t];
    const double half_width = 0.5 * std::log(target);
    const double r = static_cast<double>(static_cast<std::size_t>(c) / targets);
    const double f = config.near_tie_fraction;
    const bool near_tie = std::floor((r + 1) * f + phase[t]) > std::floor(r * f + phase[t]);

    // Pool position 0 is the leader; position 1 ties with it in near-tie
    // clusters. Everyone else stays far enough below that band noise can
    // never lift them to the top.
    std::vector<double> base(static_cast<std::size_t>(config.advertisers));
    for (double& b : base) b = std::exp(config.bid_log_mean + config.bid_log_sigma * rng.Normal());
    std::sort(base.begin(), base.end(), std::greater<>());
    const double ceiling = base[0] / (target * (1.0 + config.near_tie_gap) * 1.05);
    std::size_t first_capped = 1;
    if (near_tie) {
      base[1] = base[0];
      first_capped = 2;
    }
    for (std::size_t j = first_capped; j < base.size(); ++j) base[j] = std::min(base[j], ceiling);

    std::vector<std::string> pool;
    for (int j = 0; j < config.advertisers; ++j) pool.push_back(fmt::format("adv{:05d}", c * stride + j));

    const int first_kw = c * config.keywords_per_cluster;
    const int last_kw = std::min(config.keywords, first_kw + config.keywords_per_cluster);
    for (int kw = first_kw; kw < last_kw; ++kw) {
      const std::string keyword = fmt::format("kw{:04d}", kw);
      for (int m = 0; m < config.months; ++m) {
        const int month_index = config.start_month - 1 + m;
        const year y{config.start_year + month_index / 12};
        const month mo{static_cast<unsigned>(month_index % 12 + 1)};
        const unsigned days = static_cast<unsigned>((y / mo / std::chrono::last).day());
        std::set<std::pair<unsigned, int>> slots;
        while (static_cast<int>(slots.size()) < config.auctions_per_keyword) {
          slots.emplace(1 + static_cast<unsigned>(rng.Below(days)), static_cast<int>(rng.Below(96)));
        }
        for (const auto& [d, period] : slots) {
          const Day when{y, mo, day{d}};
          const bool first_wins = rng.Bernoulli(0.5);
          for (int j = 0; j < config.advertisers; ++j) {
            const bool present = j < config.core_advertisers || rng.Bernoulli(config.peripheral_rate);
            if (!present) continue;
            double bid;
            if (near_tie && j < 2) {
              const bool wins = (j == 0) == first_wins;
              bid = wins ? base[0] * (1.0 + config.near_tie_gap * rng.Uniform(0.5, 1.0)) : base[0];
            } else {
              bid = base[static_cast<std::size_t>(j)] * std::exp(rng.Uniform(-half_width, half_width));
            }
            BidRecord current{when, period, 1, keyword, pool[static_cast<std::size_t>(j)], bid};
            if (rng.Bernoulli(config.revision_rate)) {
              BidRecord stale = current;
              stale.seq = 0;
              stale.bid = bid * std::exp(rng.Uniform(-1.0, 1.0));
              if (rng.Bernoulli(0.5)) {
                out.push_back(stale);
                out.push_back(current);
              } else {
                out.push_back(current);
                out.push_back(stale);
              }
            } else {
              out.push_back(current);
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace fairauction
