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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and sizes are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fairauction/alloc.hpp"
#include "fairauction/dataset.hpp"
#include "fairauction/payments.hpp"
#include "fairauction/profiler.hpp"
#include "fairauction/stability.hpp"
#include "fairauction/subset.hpp"
#include "test_util.hpp"

namespace fairauction {
namespace {

using testing::IpaByRepeatedRemoval;
using testing::LogNormalValues;
using testing::UniformInt;
using testing::Vec;

// Collects failures for one criterion; the first few are echoed.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures_ <= 5) notes_.push_back(what);
  }
  int failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0 = none
  std::function<std::string(Check&)> body;
};

std::string Max(const char* name, double v) { return fmt::format("{}={:.3g}", name, v); }

// 1. Closed forms.
std::string ClosedForms(Check& c) {
  c.Expect(AlphaEll(1) == 0.75, fmt::format("alpha_1 = {:.17g}", AlphaEll(1)));
  c.Expect(std::abs(AlphaEll(2) - 23.0 / 27.0) <= 1e-12, fmt::format("alpha_2 = {:.17g}", AlphaEll(2)));
  c.Expect(FEll(2, 1) == 0.75, fmt::format("f_1(2) = {:.17g}", FEll(2, 1)));
  const GapBounds g = ComputeGapBounds(1);
  c.Expect(std::abs(g.ub_limit - 2.0 / 3.0) <= 1e-12, fmt::format("ub_limit = {:.17g}", g.ub_limit));
  c.Expect(std::abs(g.ratio_lb - 1.125) <= 1e-12, fmt::format("ratio_lb = {:.17g}", g.ratio_lb));
  return fmt::format("alpha_1={}, alpha_2={:.15f}, f_1(2)={}, gap=({:.15f}, {})", AlphaEll(1), AlphaEll(2),
                     FEll(2, 1), g.ub_limit, g.ratio_lb);
}

// 2. Sort-based IPA against the threshold-bisection formulation.
std::string FormulationEquivalence(Check& c) {
  Rng rng(0xA11CE);
  double worst = 0.0;
  double worst_removal = 0.0;
  for (int trial = 0; trial < 100000; ++trial) {
    const int k = UniformInt(rng, 2, 50);
    const double ell = rng.Uniform(0.1, 5.0);
    const ValueVector v = LogNormalValues(rng, k, 1.0);
    const Allocation x = IpaAllocate(v, ell);
    const double d = (x - IpaAllocateThreshold(v, ell).allocation).cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
    c.Expect(d <= 1e-9, fmt::format("trial {} k={} ell={} diff={:.3g}", trial, k, ell, d));
    if (trial % 10 == 0) {
      worst_removal = std::max(worst_removal, (x - IpaByRepeatedRemoval(v, ell)).cwiseAbs().maxCoeff());
    }
  }
  c.Expect(worst_removal <= 1e-9, fmt::format("drop-and-recurse oracle diff {:.3g}", worst_removal));
  return fmt::format("100000 instances, {}, drop-and-recurse {}", Max("max|diff|", worst),
                     Max("max|diff|", worst_removal));
}

struct Harness {
  ValueVector v;
  double lambda;
  double ell;
  double beta;
};

Harness Draw(Rng& rng) {
  const int k = UniformInt(rng, 2, 30);
  return {LogNormalValues(rng, k, 1.5), rng.Uniform(1.0, 10.0), rng.Uniform(0.1, 5.0), rng.Uniform01()};
}

// 3. Value stability of IPA, capped IPA and PA with doubled exponent.
std::string ValueStability(Check& c) {
  Rng rng(0x5EED);
  double slack_ipa = -1;
  double slack_capped = -1;
  double slack_pa = -1;
  for (int trial = 0; trial < 100000; ++trial) {
    const Harness h = Draw(rng);
    const double f = FEll(h.lambda, h.ell);
    const double ipa = StabilityViolationSearch(AllocRuleSpec::Ipa(h.ell), h.v, h.lambda, 4, trial);
    const double capped = StabilityViolationSearch(AllocRuleSpec::CappedIpa(h.ell, h.beta), h.v, h.lambda, 4, trial);
    const double pa = StabilityViolationSearch(AllocRuleSpec::Proportional(2 * h.ell), h.v, h.lambda, 8, trial);
    slack_ipa = std::max(slack_ipa, ipa - f);
    slack_capped = std::max(slack_capped, capped - h.beta * f);
    slack_pa = std::max(slack_pa, pa - f);
    c.Expect(ipa <= f + 1e-9, fmt::format("ipa trial {}: {:.17g} > {:.17g}", trial, ipa, f));
    c.Expect(capped <= h.beta * f + 1e-9, fmt::format("capped trial {}: {:.17g} > {:.17g}", trial, capped, h.beta * f));
    c.Expect(pa <= f + 1e-9, fmt::format("pa trial {}: {:.17g} > {:.17g}", trial, pa, f));
  }
  return fmt::format("100000 instances x 3 rules, max(search - bound): ipa {:.3g}, capped {:.3g}, pa {:.3g}",
                     slack_ipa, slack_capped, slack_pa);
}

// 4. Welfare lower bound and its tight family.
std::string WelfareBound(Check& c) {
  Rng rng(0x5EED);
  double slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100000; ++trial) {
    const Harness h = Draw(rng);
    const double r = WelfareRatio(IpaAllocate(h.v, h.ell), h.v);
    slack = std::min(slack, r - AlphaEll(h.ell));
    c.Expect(r >= AlphaEll(h.ell) - 1e-9, fmt::format("trial {}: ratio {:.17g} < alpha {:.17g}", trial, r, AlphaEll(h.ell)));
  }
  ValueVector tight = ValueVector::Constant(10000, 0.5);
  tight[0] = 1.0;
  const double r = WelfareRatio(IpaAllocate(tight, 1), tight);
  c.Expect(std::abs(r - 0.75) <= 1e-3, fmt::format("tight family ratio {:.6f}", r));
  return fmt::format("100000 instances, min(ratio - alpha)={:.3g}; tight family k=1e4 ratio={:.6f}", slack, r);
}

// 5. Optimality constructions.
std::string Optimality(Check& c) {
  const double dx = OptimalityGapConstruction(2, 100000, 1).delta_x1;
  c.Expect(std::abs(dx - 0.75) <= 1e-4, fmt::format("delta_x1 = {:.8f}", dx));
  const FairnessFn f1 = [](double l) { return FEll(l, 1); };
  const UpperBoundMinimum m = MinPriorFreeUpperBound(f1, 1000000);
  c.Expect(std::abs(m.bound - 0.750001) <= 2e-6, fmt::format("min bound = {:.9f}", m.bound));
  return fmt::format("delta_x1={:.8f}, min_lambda bound={:.9f} at lambda={:.6f}", dx, m.bound, m.lambda);
}

// 6. Payments: IC, IR and two closed forms.
std::string Payments(Check& c) {
  Rng rng(0xFEE);
  const std::vector<AllocRuleSpec> rules{AllocRuleSpec::Ipa(1), AllocRuleSpec::CappedIpa(1.5, 0.6),
                                         AllocRuleSpec::Proportional(2), AllocRuleSpec::HighestBid(),
                                         AllocRuleSpec::Uniform()};
  double worst_regret = 0.0;
  for (const auto& spec : rules) {
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = UniformInt(rng, 2, 8);
      const ValueVector v = LogNormalValues(rng, k, 1.0);
      const int i = UniformInt(rng, 0, k - 1);
      const double regret = IcRegret(spec, v, i, 16);
      worst_regret = std::max(worst_regret, regret);
      c.Expect(regret <= 1e-4, fmt::format("{} trial {}: regret {:.3g}", spec.Name(), trial, regret));
      const PaymentResult p = PaymentIdentity(spec, v, i);
      c.Expect(p.payment >= 0.0 && p.payment <= v[i] * p.allocation_at_truth,
               fmt::format("{} trial {}: IR violated ({} vs {})", spec.Name(), trial, p.payment,
                           v[i] * p.allocation_at_truth));
    }
  }
  const double ipa = PaymentIdentity(AllocRuleSpec::Ipa(1), Vec({2, 1}), 0).payment;
  c.Expect(std::abs(ipa - (std::log(3.0) - 2.0 / 3.0)) <= 1e-6, fmt::format("IPA [2,1] payment {:.10f}", ipa));
  double worst_second = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = UniformInt(rng, 2, 8);
    const ValueVector v = LogNormalValues(rng, k, 1.0);
    Eigen::Index top;
    v.maxCoeff(&top);
    ValueVector rest = v;
    rest[top] = 0.0;
    const double p = PaymentIdentity(AllocRuleSpec::HighestBid(), v, static_cast<int>(top)).payment;
    worst_second = std::max(worst_second, std::abs(p - rest.maxCoeff()));
  }
  c.Expect(worst_second <= 1e-9, fmt::format("highest-bid payment off second price by {:.3g}", worst_second));
  return fmt::format("5 rules x 1000 instances, {}; IPA [2,1] payment={:.9f} (ln3-2/3={:.9f}); "
                     "second-price {}",
                     Max("max regret", worst_regret), ipa, std::log(3.0) - 2.0 / 3.0, Max("max|err|", worst_second));
}

std::vector<std::vector<int>> RandomPartition(Rng& rng, int k, int cells) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = k - 1; i > 0; --i) std::swap(perm[i], perm[UniformInt(rng, 0, i)]);
  std::vector<std::vector<int>> out(cells);
  for (int i = 0; i < k; ++i) out[i < cells ? i : UniformInt(rng, 0, cells - 1)].push_back(perm[i]);
  for (auto& cell : out) std::sort(cell.begin(), cell.end());
  return out;
}

ValueVector Perturb(Rng& rng, const ValueVector& v, double lambda) {
  const bool corners = rng.Bernoulli(0.5);
  ValueVector w = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    w[i] *= corners ? (rng.Bernoulli(0.5) ? lambda : 1.0 / lambda) : rng.LogUniform(1.0 / lambda, lambda);
  }
  return w;
}

// 7. Subset fairness of the two composed rules and the gap witness.
std::string SubsetFairness(Check& c) {
  Rng rng(0x5B5E7);
  int checked2 = 0;
  int checked3 = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int k = UniformInt(rng, 2, 20);
    const int n = UniformInt(rng, 1, 4);
    const int cells = UniformInt(rng, 1, k);
    const auto partition = RandomPartition(rng, k, cells);
    SetCollection col{k, {}};
    for (int s = UniformInt(rng, 1, 6); s > 0; --s) {
      std::vector<int> idx(cells);
      std::iota(idx.begin(), idx.end(), 0);
      std::vector<int> set;
      const int take = UniformInt(rng, 1, std::min(n, cells));
      for (int t = 0; t < take; ++t) {
        std::swap(idx[t], idx[UniformInt(rng, t, cells - 1)]);
        set.insert(set.end(), partition[idx[t]].begin(), partition[idx[t]].end());
      }
      std::sort(set.begin(), set.end());
      col.sets.push_back(set);
    }
    if (ComputeCollectionWidths(col).cluster_width > n) continue;
    ++checked2;
    const double ell = rng.Uniform(0.1, 5);
    const double lambda = rng.Uniform(1, 5);
    const double f = FEll(lambda, ell);
    const ValueVector v = LogNormalValues(rng, k, 1.5);
    const ValueVector w = Perturb(rng, v, lambda);
    const AllocationRule cluster_capped = [&](const ValueVector& u) { return ClusterCappedAlloc(u, ell, n, col); };
    const Allocation x = cluster_capped(v);
    const Allocation y = cluster_capped(w);
    const double group = SubsetStabilityCheck(cluster_capped, col, v, w);
    c.Expect(group <= f + 1e-9, fmt::format("cluster-capped trial {}: group {:.17g} > {:.17g}", trial, group, f));
    const double single = (x - y).cwiseAbs().maxCoeff();
    c.Expect(single <= 2 * f + 1e-9, fmt::format("cluster-capped trial {}: single {:.17g} > {:.17g}", trial, single, 2 * f));
    const double ratio = WelfareRatio(x, v);
    c.Expect(ratio >= AlphaEll(ell) * AlphaEll(ell) / n - 1e-9,
             fmt::format("cluster-capped trial {}: welfare {:.17g}", trial, ratio));

    const ClusterPartition parts{RandomPartition(rng, k, UniformInt(rng, 1, k))};
    const int width = PartitionedWidth({k, {}}, parts);
    const Allocation hx = PartitionHierarchicalAlloc(v, ell, parts);
    const Allocation hy = PartitionHierarchicalAlloc(w, ell, parts);
    const double part_diff = MaxPartSubsetDifference(hx, hy, parts, 12);
    c.Expect(part_diff <= 2 * f + 1e-9, fmt::format("hierarchical trial {}: subset {:.17g} > {:.17g}", trial, part_diff, 2 * f));
    const double hratio = WelfareRatio(hx, v);
    c.Expect(hratio >= std::pow(width, -2.0 / ell) * AlphaEll(ell) - 1e-9,
             fmt::format("hierarchical trial {}: welfare {:.17g}", trial, hratio));
    ++checked3;
  }
  std::string gaps;
  for (int k : {4, 10, 100}) {
    const TvGapExample ex = MakeTvGapExample(k, 1);
    c.Expect(std::abs(ex.group_diff - 1.0) <= 1e-12 && ex.group_diff > ex.f_bound,
             fmt::format("tv gap k={}: diff {:.17g}, bound {:.17g}", k, ex.group_diff, ex.f_bound));
    gaps += fmt::format(" k={}:{:.12f}>{:.4f}", k, ex.group_diff, ex.f_bound);
  }
  const Allocation k4 = IpaAllocate(MakeTvGapExample(4, 1).v, 1);
  c.Expect((k4 - Vec({0.5, 0.5, 0, 0})).cwiseAbs().maxCoeff() <= 1e-15, "k=4 witness allocation");
  return fmt::format("cluster-capped {} instances, hierarchical {} instances; tv gap{}", checked2, checked3, gaps);
}

// 8. End-to-end pipeline on the default synthetic log.
std::string Pipeline(Check& c) {
  const SyntheticConfig config;
  const auto horizons = PartitionHorizons(BuildAuctions(GenerateSynthetic(2002, config)));
  c.Expect(horizons.size() == 3, fmt::format("{} horizons", horizons.size()));
  const ProfileConfig pcfg;
  std::string detail = fmt::format("{} keywords x {} months;", config.keywords, config.months);
  for (const auto& h : horizons) {
    // (a) planted winner flips in the tightest bucket, against an exhaustive count.
    // Default profile settings; flip status is shared cluster-wide, so
    // small sample caps are far noisier than their nominal size suggests.
    const StabilityProfile hb = BuildProfile(h, AllocRuleSpec::HighestBid(), pcfg);
    std::size_t pairs = 0;
    std::size_t flips = 0;
    for (std::size_t a = 0; a < h.auctions.size(); ++a) {
      for (std::size_t b = a + 1; b < h.auctions.size(); ++b) {
        if (Jaccard(h.auctions[a].advertisers, h.auctions[b].advertisers) < pcfg.jaccard_min) continue;
        const PairStats s = ComputePairStats(h.auctions[a], h.auctions[b], AllocRuleSpec::HighestBid());
        if (s.lambda_tilde >= 1.1) continue;
        ++pairs;
        if (s.d_tilde >= 1 - 1e-9) ++flips;
      }
    }
    const double planted = pairs == 0 ? 0.0 : static_cast<double>(flips) / static_cast<double>(pairs);
    const double recovered = hb.buckets[0].frac_diff_one;
    c.Expect(recovered > 0.0, fmt::format("{}: no flips in [1,1.1)", h.label));
    c.Expect(planted >= 0.3, fmt::format("{}: planted flip rate {:.4f} < 0.3", h.label, planted));
    c.Expect(std::abs(recovered - planted) <= 0.05,
             fmt::format("{}: recovered {:.4f} vs planted {:.4f}", h.label, recovered, planted));

    // (b) IPA profiles stay under the fairness function.
    std::map<double, StabilityProfile> ipa;
    for (double ell : {0.1, 1.0, 2.5}) {
      const StabilityProfile p = BuildProfile(h, AllocRuleSpec::Ipa(ell), pcfg);
      for (const auto& b : p.buckets) {
        c.Expect(b.p90_diff <= FEll(b.hi, ell) + 1e-9,
                 fmt::format("{} ell={} bucket {}: p90 {:.6f} > {:.6f}", h.label, ell, b.lo, b.p90_diff, FEll(b.hi, ell)));
      }
      ipa[ell] = p;
    }

    // (c) Welfare.
    const std::vector<AllocRuleSpec> specs{AllocRuleSpec::Ipa(0.1), AllocRuleSpec::Ipa(0.5), AllocRuleSpec::Ipa(1),
                                           AllocRuleSpec::Ipa(2.5)};
    const WelfareReport report = ComputeWelfareReport(h, specs);
    std::string ratios;
    for (const auto& w : report.algorithms) {
      const double ell = w.algorithm.ell;
      c.Expect(w.all.ratio >= AlphaEll(ell), fmt::format("{} ell={}: ratio {:.4f} < alpha", h.label, ell, w.all.ratio));
      if (ell >= 1) c.Expect(w.all.ratio >= 0.9, fmt::format("{} ell={}: ratio {:.4f} < 0.9", h.label, ell, w.all.ratio));
      ratios += fmt::format(" {}:{:.3f}", ell, w.all.ratio);
    }

    // (d) Matching is deterministic and self-match has zero spread.
    std::map<double, StabilityProfile> pa;
    for (double p : {0.5, 1.0, 2.0, 3.0, 4.0}) pa[p] = BuildProfile(h, AllocRuleSpec::Proportional(p), pcfg);
    const auto first = MatchParameters(ipa, pa);
    const auto second = MatchParameters(ipa, pa);
    bool same = first.size() == second.size();
    for (std::size_t i = 0; same && i < first.size(); ++i) {
      same = first[i].best_ell_prime == second[i].best_ell_prime && first[i].spread == second[i].spread;
    }
    c.Expect(same, fmt::format("{}: match not deterministic", h.label));
    for (const auto& m : MatchParameters(ipa, ipa)) {
      c.Expect(m.best_ell_prime == m.ell && m.spread == 0.0,
               fmt::format("{}: self-match ell={} -> {} spread {}", h.label, m.ell, m.best_ell_prime, m.spread));
    }
    std::string matches;
    for (const auto& m : first) matches += fmt::format(" {}->{}", m.ell, m.best_ell_prime);
    detail += fmt::format(" [{}: flips {:.3f} profiled / {:.3f} exhaustive over {} pairs; welfare{}; match{}]", h.label, recovered, planted,
                          pairs, ratios, matches);
  }
  return detail;
}

// 9. Two advertisers: IPA(ell) is stable for the half exponent.
std::string TwoAdvertisers(Check& c) {
  Rng rng(0x2);
  double slack = -1;
  for (int trial = 0; trial < 10000; ++trial) {
    const ValueVector v = LogNormalValues(rng, 2, 1.5);
    const double lambda = rng.Uniform(1.0, 10.0);
    const double ell = rng.Uniform(0.1, 5.0);
    const double worst = StabilityViolationSearch(AllocRuleSpec::Ipa(ell), v, lambda, 16, trial);
    const double bound = FEll(lambda, ell / 2);
    slack = std::max(slack, worst - bound);
    c.Expect(worst <= bound + 1e-9, fmt::format("trial {}: {:.17g} > {:.17g}", trial, worst, bound));
  }
  return fmt::format("10000 trials, max(search - f_(ell/2))={:.3g}", slack);
}

}  // namespace
}  // namespace fairauction

int main() {
  using namespace fairauction;
  const std::vector<Criterion> criteria{
      {1, "closed forms", 1, ClosedForms},
      {2, "formulation equivalence", 30, FormulationEquivalence},
      {3, "value stability", 120, ValueStability},
      {4, "welfare bound", 0, WelfareBound},
      {5, "optimality constructions", 0, Optimality},
      {6, "payments", 0, Payments},
      {7, "subset fairness", 0, SubsetFairness},
      {8, "synthetic pipeline", 60, Pipeline},
      {9, "two-advertiser half-exponent property", 0, TwoAdvertisers},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    Check check;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
      detail = crit.body(check);
    } catch (const std::exception& e) {
      check.Expect(false, fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (crit.time_limit_s > 0) {
      check.Expect(secs < crit.time_limit_s, fmt::format("took {:.2f} s, limit {} s", secs, crit.time_limit_s));
    }
    const bool ok = check.failures() == 0;
    failed += ok ? 0 : 1;
    fmt::print("{} [{}] {} ({:.2f} s): {}\n", ok ? "PASS" : "FAIL", crit.id, crit.title, secs, detail);
    for (const auto& note : check.notes()) fmt::print("       - {}\n", note);
    if (check.failures() > 5) fmt::print("       - ... {} failures in total\n", check.failures());
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
