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

#include "fairauction/profiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "fairauction/rng.hpp"
#include "json.hpp"

namespace fairauction {
namespace {

constexpr double kDiffOneSlack = 1e-9;

std::string ParamField(const AllocRuleSpec& spec) {
  const double p = spec.Parameter();
  return std::isnan(p) ? std::string() : fmt::format("{}", p);
}

// Auctions with advertisers interned to integers, sorted by id.
struct CompactAuction {
  std::vector<int> ids;
  std::vector<double> bids;
  std::vector<double> alloc;
  std::uint64_t key = 0;
};

std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix64(h);
}

struct Sample {
  std::uint64_t priority;
  std::uint32_t u;
  std::uint32_t v;
  double d_tilde;

  bool operator<(const Sample& o) const {
    return std::tie(priority, u, v) < std::tie(o.priority, o.u, o.v);
  }
};

// Bottom-k sample by priority plus the bucket's total pair count.
struct Reservoir {
  std::priority_queue<Sample> heap;  // max-heap: top is the worst kept
  std::uint64_t pairs = 0;

  void Offer(const Sample& s, std::size_t cap) {
    ++pairs;
    if (heap.size() < cap) {
      heap.push(s);
    } else if (cap > 0 && s < heap.top()) {
      heap.pop();
      heap.push(s);
    }
  }
};

class Bucketing {
 public:
  explicit Bucketing(const ProfileConfig& c)
      : lo_(c.range_lo),
        width_(c.bucket_width),
        count_(static_cast<int>(std::llround((c.range_hi - c.range_lo) / c.bucket_width))) {
    for (int j = 0; j <= count_; ++j) edges_.push_back(std::round((lo_ + j * width_) * 1e12) / 1e12);
  }

  int count() const { return count_; }
  double edge(int j) const { return edges_[static_cast<std::size_t>(j)]; }

  // -1 when above the range.
  int Index(double lambda) const {
    if (lambda > edges_.back()) return -1;
    int j = std::clamp(static_cast<int>(std::floor((lambda - lo_) / width_)), 0, count_ - 1);
    while (j > 0 && lambda < edges_[static_cast<std::size_t>(j)]) --j;
    while (j < count_ - 1 && lambda >= edges_[static_cast<std::size_t>(j + 1)]) ++j;
    return j;
  }

 private:
  double lo_;
  double width_;
  int count_;
  std::vector<double> edges_;
};

}  // namespace

double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t inter = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

PairStats ComputePairStats(const AuctionInstance& u, const AuctionInstance& v,
                           const AllocRuleSpec& spec) {
  PairStats out;
  out.keyword_u = u.keyword_id;
  out.keyword_v = v.keyword_id;
  out.jaccard = Jaccard(u.advertisers, v.advertisers);
  const Allocation xu = Allocate(spec, u.bids);
  const Allocation xv = Allocate(spec, v.bids);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < u.advertisers.size() && j < v.advertisers.size()) {
    if (u.advertisers[i] < v.advertisers[j]) {
      ++i;
    } else if (v.advertisers[j] < u.advertisers[i]) {
      ++j;
    } else {
      const double bu = u.bids[static_cast<Eigen::Index>(i)];
      const double bv = v.bids[static_cast<Eigen::Index>(j)];
      out.shared.push_back(u.advertisers[i]);
      out.lambda_tilde = std::max({out.lambda_tilde, bu / bv, bv / bu});
      out.d_tilde = std::max(out.d_tilde, std::abs(xu[static_cast<Eigen::Index>(i)] -
                                                   xv[static_cast<Eigen::Index>(j)]));
      ++i;
      ++j;
    }
  }
  if (out.shared.empty()) {
    throw Error(ErrorCode::kEmptyIntersection,
                fmt::format("auctions for '{}' and '{}' share no advertiser", u.keyword_id, v.keyword_id));
  }
  return out;
}

double NearestRankPercentile(std::vector<double> values, int percentile) {
  if (values.empty()) return 0.0;
  const std::size_t n = values.size();
  std::size_t rank = (static_cast<std::size_t>(percentile) * n + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

void ProfileConfig::Validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (!(jaccard_min >= 0.0 && jaccard_min <= 1.0)) fail("jaccard_min must be in [0,1]");
  if (!(bucket_width > 0.0)) fail("bucket_width must be positive");
  if (!(range_lo >= 1.0 && range_hi > range_lo) || !std::isfinite(range_hi)) {
    fail("similarity range must satisfy 1 <= lo < hi");
  }
  const double buckets = (range_hi - range_lo) / bucket_width;
  if (buckets > 1e6 || std::abs(buckets - std::round(buckets)) > 1e-9 * std::max(1.0, buckets)) {
    fail("bucket_width must divide the similarity range");
  }
  if (percentile < 1 || percentile > 100) fail("percentile must be in [1,100]");
  if (max_samples_per_bucket < 1) fail("max_samples_per_bucket must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
}

StabilityProfile BuildProfile(const Horizon& horizon, const AllocRuleSpec& spec,
                              const ProfileConfig& config) {
  config.Validate();
  spec.Validate();
  if (horizon.auctions.empty()) {
    throw Error(ErrorCode::kEmptyHorizon, fmt::format("horizon '{}' has no auctions", horizon.label));
  }
  std::unordered_map<std::string, int> intern;
  std::vector<CompactAuction> auctions;
  auctions.reserve(horizon.auctions.size());
  for (const auto& a : horizon.auctions) {
    CompactAuction c;
    const Allocation x = Allocate(spec, a.bids);
    std::vector<std::tuple<int, double, double>> rows;
    for (std::size_t j = 0; j < a.advertisers.size(); ++j) {
      const int id = intern.try_emplace(a.advertisers[j], static_cast<int>(intern.size())).first->second;
      rows.emplace_back(id, a.bids[static_cast<Eigen::Index>(j)], x[static_cast<Eigen::Index>(j)]);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [id, bid, alloc] : rows) {
      c.ids.push_back(id);
      c.bids.push_back(bid);
      c.alloc.push_back(alloc);
    }
    c.key = HashString(fmt::format("{}|{}|{}", a.keyword_id, FormatDay(a.day), a.period));
    auctions.push_back(std::move(c));
  }

  const Bucketing bucketing(config);
  const std::size_t n = auctions.size();
  const std::size_t cap = config.max_samples_per_bucket;
  const std::uint64_t salt = Mix64(config.seed);

  struct Partial {
    std::vector<Reservoir> buckets;
    std::uint64_t qualifying = 0;
    std::uint64_t discarded = 0;
  };
  const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(n)));
  std::vector<Partial> partials(static_cast<std::size_t>(workers));

  auto work = [&](int worker) {
    Partial& part = partials[static_cast<std::size_t>(worker)];
    part.buckets.resize(static_cast<std::size_t>(bucketing.count()));
    for (std::size_t a = static_cast<std::size_t>(worker); a < n; a += static_cast<std::size_t>(workers)) {
      const CompactAuction& u = auctions[a];
      for (std::size_t b = a + 1; b < n; ++b) {
        const CompactAuction& v = auctions[b];
        std::size_t i = 0;
        std::size_t j = 0;
        std::size_t shared = 0;
        double lambda = 1.0;
        double diff = 0.0;
        while (i < u.ids.size() && j < v.ids.size()) {
          if (u.ids[i] < v.ids[j]) {
            ++i;
          } else if (v.ids[j] < u.ids[i]) {
            ++j;
          } else {
            ++shared;
            lambda = std::max({lambda, u.bids[i] / v.bids[j], v.bids[j] / u.bids[i]});
            diff = std::max(diff, std::abs(u.alloc[i] - v.alloc[j]));
            ++i;
            ++j;
          }
        }
        if (shared == 0) continue;
        const double jac = static_cast<double>(shared) /
                           static_cast<double>(u.ids.size() + v.ids.size() - shared);
        if (jac < config.jaccard_min) continue;
        ++part.qualifying;
        const int bucket = bucketing.Index(lambda);
        if (bucket < 0) {
          ++part.discarded;
          continue;
        }
        const std::uint64_t lo_key = std::min(u.key, v.key);
        const std::uint64_t hi_key = std::max(u.key, v.key);
        const std::uint64_t priority = Mix64(salt ^ Mix64(lo_key + Mix64(hi_key)));
        part.buckets[static_cast<std::size_t>(bucket)].Offer(
            Sample{priority, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), diff}, cap);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  StabilityProfile profile;
  profile.algorithm = spec;
  for (int j = 0; j < bucketing.count(); ++j) {
    std::vector<Sample> kept;
    ProfileBucket bucket;
    bucket.lo = bucketing.edge(j);
    bucket.hi = bucketing.edge(j + 1);
    for (auto& part : partials) {
      auto& reservoir = part.buckets[static_cast<std::size_t>(j)];
      bucket.pair_count += reservoir.pairs;
      while (!reservoir.heap.empty()) {
        kept.push_back(reservoir.heap.top());
        reservoir.heap.pop();
      }
    }
    std::sort(kept.begin(), kept.end());
    if (kept.size() > cap) kept.resize(cap);
    std::vector<double> diffs;
    std::size_t ones = 0;
    for (const auto& s : kept) {
      diffs.push_back(s.d_tilde);
      if (s.d_tilde >= 1.0 - kDiffOneSlack) ++ones;
    }
    bucket.sampled_count = diffs.size();
    if (!diffs.empty()) {
      bucket.p90_diff = NearestRankPercentile(diffs, config.percentile);
      bucket.frac_diff_one = static_cast<double>(ones) / static_cast<double>(diffs.size());
    }
    profile.buckets.push_back(bucket);
  }
  for (const auto& part : partials) {
    profile.qualifying_pairs += part.qualifying;
    profile.discarded_pairs += part.discarded;
  }
  return profile;
}

WelfareReport ComputeWelfareReport(const Horizon& horizon, std::span<const AllocRuleSpec> specs) {
  if (horizon.auctions.empty()) {
    throw Error(ErrorCode::kEmptyHorizon, fmt::format("horizon '{}' has no auctions", horizon.label));
  }
  auto finish = [](WelfareTotals& t) {
    t.ratio = t.total_optimal > 0.0 ? t.total_welfare / t.total_optimal : 0.0;
  };
  WelfareReport report;
  for (const auto& spec : specs) {
    AlgorithmWelfare w;
    w.algorithm = spec;
    for (const auto& a : horizon.auctions) {
      const double welfare = Allocate(spec, a.bids).dot(a.bids);
      const double optimal = a.bids.maxCoeff();
      for (WelfareTotals* t : {&w.all, &w.by_k[static_cast<int>(a.size())]}) {
        t->total_welfare += welfare;
        t->total_optimal += optimal;
        ++t->auctions;
      }
      w.per_auction_ratio.push_back(welfare / optimal);
    }
    finish(w.all);
    for (auto& [k, t] : w.by_k) finish(t);
    report.algorithms.push_back(std::move(w));
  }
  return report;
}

std::vector<ParameterMatch> MatchParameters(const std::map<double, StabilityProfile>& a,
                                            const std::map<double, StabilityProfile>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kNoComparableBuckets, "no profiles to match");
  std::vector<ParameterMatch> out;
  for (const auto& [ell, pa] : a) {
    bool found = false;
    ParameterMatch best{ell, 0.0, std::numeric_limits<double>::infinity()};
    for (const auto& [ell_prime, pb] : b) {
      const std::size_t buckets = std::min(pa.buckets.size(), pb.buckets.size());
      bool comparable = false;
      double spread = 0.0;
      for (std::size_t j = 0; j < buckets; ++j) {
        const auto& ba = pa.buckets[j];
        const auto& bb = pb.buckets[j];
        if (ba.sampled_count == 0 || bb.sampled_count == 0 || !(bb.p90_diff > 0.0)) continue;
        comparable = true;
        spread = std::max(spread, std::abs(std::log(ba.p90_diff / bb.p90_diff)));
      }
      if (!comparable) continue;
      if (!found || spread < best.spread) {
        best.best_ell_prime = ell_prime;
        best.spread = spread;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kNoComparableBuckets,
                  fmt::format("no candidate shares a nonzero bucket with ell={}", ell));
    }
    out.push_back(best);
  }
  return out;
}

void WriteProfileCsv(std::ostream& out, std::span<const StabilityProfile> profiles) {
  out << kProfileCsvHeader << '\n';
  for (const auto& p : profiles) {
    for (const auto& b : p.buckets) {
      out << fmt::format("{},{},{},{},{},{},{},{}\n", p.algorithm.Name(), ParamField(p.algorithm),
                         b.lo, b.hi, b.pair_count, b.sampled_count, b.p90_diff, b.frac_diff_one);
    }
  }
}

std::vector<StabilityProfile> ReadProfileCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kProfileCsvHeader) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("profile header must be '{}'", kProfileCsvHeader));
  }
  std::vector<StabilityProfile> out;
  std::size_t line_no = 1;
  auto number = [&line_no](const std::string& field, auto& value) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("line {}: bad number '{}'", line_no, field));
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (std::size_t comma; (comma = line.find(',', start)) != std::string::npos; start = comma + 1) {
      f.push_back(line.substr(start, comma - start));
    }
    f.push_back(line.substr(start));
    if (f.size() != 8) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("line {}: expected 8 fields", line_no));
    }
    const auto kind = ParseRuleKind(f[0]);
    if (!kind) throw Error(ErrorCode::kMalformedRow, fmt::format("line {}: unknown rule '{}'", line_no, f[0]));
    AllocRuleSpec spec;
    spec.kind = *kind;
    if (!f[1].empty()) {
      double param = 0.0;
      number(f[1], param);
      if (*kind == RuleKind::kProportional) {
        spec.exponent = param;
      } else {
        spec.ell = param;
      }
    }
    ProfileBucket b;
    number(f[2], b.lo);
    number(f[3], b.hi);
    number(f[4], b.pair_count);
    number(f[5], b.sampled_count);
    number(f[6], b.p90_diff);
    number(f[7], b.frac_diff_one);
    const bool same = !out.empty() && out.back().algorithm.kind == spec.kind &&
                      ParamField(out.back().algorithm) == ParamField(spec);
    if (!same) {
      out.emplace_back();
      out.back().algorithm = spec;
    }
    out.back().buckets.push_back(b);
  }
  return out;
}

void WriteWelfareCsv(std::ostream& out, const WelfareReport& report) {
  out << kWelfareCsvHeader << '\n';
  for (const auto& w : report.algorithms) {
    const std::string name(w.algorithm.Name());
    const std::string param = ParamField(w.algorithm);
    out << fmt::format("{},{},all,{},{},{}\n", name, param, w.all.total_welfare, w.all.total_optimal,
                       w.all.ratio);
    for (const auto& [k, t] : w.by_k) {
      out << fmt::format("{},{},{},{},{},{}\n", name, param, k, t.total_welfare, t.total_optimal, t.ratio);
    }
  }
}

std::string MatchesToJson(std::span<const ParameterMatch> matches) {
  auto arr = nlohmann::json::array();
  for (const auto& m : matches) {
    arr.push_back({{"ell", m.ell}, {"best_ell_prime", m.best_ell_prime}, {"spread", m.spread}});
  }
  return arr.dump();
}

}  // namespace fairauction
