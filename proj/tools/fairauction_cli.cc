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

// Command-line front end. Every subcommand is a thin wrapper over one library
// operation; results go to stdout (or --output) as JSON or CSV.
//
// Exit codes: 0 ok, 2 usage or validation, 3 empty result, 4 I/O.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "fairauction/alloc.hpp"
#include "fairauction/dataset.hpp"
#include "fairauction/error.hpp"
#include "fairauction/payments.hpp"
#include "fairauction/profiler.hpp"
#include "fairauction/stability.hpp"
#include "fairauction/subset.hpp"
#include "json.hpp"

namespace {

using fairauction::AllocRuleSpec;
using fairauction::Error;
using fairauction::ErrorCode;
using fairauction::RuleKind;
using fairauction::ValueVector;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitIo = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyHorizon:
    case ErrorCode::kNoComparableBuckets:
    case ErrorCode::kEmptyIntersection:
      return kExitEmpty;
    case ErrorCode::kFileNotFound:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

// JSON config: top-level keys are global flags, objects are subcommand
// sections, e.g. {"seed": 3, "profile": {"jaccard-min": 0.7}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConfigError("writing JSON configs is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw CLI::ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    Collect(j, {}, items);
    return items;
  }

 private:
  static std::string Scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError(fmt::format("unsupported config value {}", v.dump()));
  }

  static void Collect(const Json& obj, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        Collect(value, next, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

struct RuleFlags {
  std::string rule = "ipa";
  std::vector<double> ell{1.0};
  double beta = 1.0;
  std::vector<double> exponent{1.0};
  std::vector<std::string> specs;

  void Attach(CLI::App* app, bool lists) {
    app->add_option("--rule", rule, "Allocation rule: ipa, capped-ipa, proportional, highest-bid, uniform")
        ->capture_default_str();
    auto* e = app->add_option("--ell", ell, lists ? "IPA exponent(s), comma separated" : "IPA exponent")
                  ->capture_default_str();
    app->add_option("--beta", beta, "Cap for capped-ipa, in [0,1]")->capture_default_str();
    auto* x = app->add_option("--exponent", exponent,
                              lists ? "Proportional exponent(s), comma separated" : "Proportional exponent")
                  ->capture_default_str();
    if (lists) {
      e->delimiter(',');
      x->delimiter(',');
      app->add_option("--spec", specs,
                      "Rule spec kind[:param[:beta]] (repeatable), e.g. ipa:1, proportional:2, "
                      "capped-ipa:1:0.5; overrides --rule")
          ->delimiter(',');
    } else {
      e->expected(1);
      x->expected(1);
    }
  }

  static AllocRuleSpec Make(RuleKind kind, double param, double beta) {
    switch (kind) {
      case RuleKind::kIpa:
        return AllocRuleSpec::Ipa(param);
      case RuleKind::kCappedIpa:
        return AllocRuleSpec::CappedIpa(param, beta);
      case RuleKind::kProportional:
        return AllocRuleSpec::Proportional(param);
      case RuleKind::kHighestBid:
        return AllocRuleSpec::HighestBid();
      case RuleKind::kUniform:
        return AllocRuleSpec::Uniform();
    }
    return AllocRuleSpec::Uniform();
  }

  static RuleKind Kind(const std::string& name) {
    const auto kind = fairauction::ParseRuleKind(name);
    if (!kind) throw Error(ErrorCode::kInvalidConfig, fmt::format("unknown rule '{}'", name));
    return *kind;
  }

  static double Number(const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidConfig, fmt::format("'{}' is not a number", text));
  }

  static AllocRuleSpec FromString(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty() || parts.size() > 3) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("bad rule spec '{}'", text));
    }
    const RuleKind kind = Kind(parts[0]);
    const double param = parts.size() > 1 ? Number(parts[1]) : 1.0;
    const double beta = parts.size() > 2 ? Number(parts[2]) : 1.0;
    AllocRuleSpec spec = Make(kind, param, beta);
    spec.Validate();
    return spec;
  }

  AllocRuleSpec Single() const {
    AllocRuleSpec spec = Make(Kind(rule), Kind(rule) == RuleKind::kProportional ? exponent.at(0) : ell.at(0), beta);
    spec.Validate();
    return spec;
  }

  std::vector<AllocRuleSpec> All() const {
    std::vector<AllocRuleSpec> out;
    if (!specs.empty()) {
      for (const auto& s : specs) out.push_back(FromString(s));
      return out;
    }
    const RuleKind kind = Kind(rule);
    switch (kind) {
      case RuleKind::kIpa:
      case RuleKind::kCappedIpa:
        for (double e : ell) out.push_back(Make(kind, e, beta));
        break;
      case RuleKind::kProportional:
        for (double p : exponent) out.push_back(Make(kind, p, beta));
        break;
      default:
        out.push_back(Make(kind, 0.0, beta));
    }
    for (const auto& s : out) s.Validate();
    return out;
  }
};

Json SpecJson(const AllocRuleSpec& spec) {
  Json j;
  j["rule"] = std::string(spec.Name());
  switch (spec.kind) {
    case RuleKind::kIpa:
      j["ell"] = spec.ell;
      break;
    case RuleKind::kCappedIpa:
      j["ell"] = spec.ell;
      j["beta"] = spec.beta;
      break;
    case RuleKind::kProportional:
      j["exponent"] = spec.exponent;
      break;
    default:
      break;
  }
  return j;
}

Json VectorJson(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ValueVector ToVector(const std::vector<double>& values) {
  ValueVector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  fairauction::ValidateValues(v);
  return v;
}

// 1-based index from the command line to 0-based.
int ToIndex(int one_based, Eigen::Index k) {
  if (one_based < 1 || one_based > k) {
    throw Error(ErrorCode::kIndexOutOfRange, fmt::format("index {} outside [1, {}]", one_based, k));
  }
  return one_based - 1;
}

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_.open(path_, std::ios::binary);
      if (!file_) throw Error(ErrorCode::kFileNotFound, fmt::format("cannot write '{}'", path_));
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void Close() {
    stream().flush();
    if (!stream()) throw Error(ErrorCode::kFileNotFound, fmt::format("failed writing '{}'", path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fairauction::Horizon> LoadHorizons(const std::string& path) {
  return fairauction::PartitionHorizons(fairauction::BuildAuctions(fairauction::IngestCsv(path)));
}

fairauction::Horizon SelectHorizon(const std::string& path, const std::string& label) {
  auto horizons = LoadHorizons(path);
  if (label.empty()) {
    fairauction::Horizon all{"all", {}};
    for (auto& h : horizons) {
      for (auto& a : h.auctions) all.auctions.push_back(std::move(a));
    }
    if (all.auctions.empty()) throw Error(ErrorCode::kEmptyHorizon, "input has no auctions");
    return all;
  }
  for (auto& h : horizons) {
    if (h.label == label) return std::move(h);
  }
  throw Error(ErrorCode::kEmptyHorizon, fmt::format("no auctions in horizon '{}'", label));
}

std::vector<std::vector<int>> ParseParts(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    std::vector<std::vector<int>> parts;
    for (const auto& cell : j) {
      parts.emplace_back();
      for (const auto& m : cell) parts.back().push_back(m.get<int>() - 1);
    }
    return parts;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidPartition, fmt::format("parts must be a JSON list of lists: {}", e.what()));
  }
}

Json SetsJson(const std::vector<std::vector<int>>& sets) {
  Json arr = Json::array();
  for (const auto& s : sets) {
    Json cell = Json::array();
    for (int i : s) cell.push_back(i + 1);
    arr.push_back(cell);
  }
  return arr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair ad-auction toolkit: inverse proportional allocation, payments, stability, "
               "subset fairness and bid-log profiling."};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; top-level keys are global flags, objects are subcommand sections")
      ->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);

  // Shared flags; subcommands fall through to them, so they may appear
  // before or after the subcommand name and as top-level config keys.
  std::string output = "-";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--output,-o", output, "Output file, '-' for stdout")->capture_default_str();
  app.add_option("--seed", seed, "Random seed; required by gen-synth, profile and stability-check searches");
  app.add_option("--threads", threads, "Profiler worker threads (output does not depend on it)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // allocate
  auto* allocate = app.add_subcommand("allocate", "Allocate one auction");
  RuleFlags alloc_rule;
  alloc_rule.Attach(allocate, false);
  std::vector<double> values;
  allocate->add_option("--values", values, "Bids, comma separated")->required()->delimiter(',');

  // payments
  auto* payments = app.add_subcommand("payments", "Truthful payments via the payment identity");
  RuleFlags pay_rule;
  pay_rule.Attach(payments, false);
  std::vector<double> pay_values;
  int pay_index = 0;
  fairauction::QuadratureConfig quad;
  int deviations = 0;
  payments->add_option("--values", pay_values, "Bids, comma separated")->required()->delimiter(',');
  payments->add_option("--index", pay_index, "1-based advertiser (default: everyone)");
  payments->add_option("--tol", quad.tol, "Quadrature tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  payments->add_option("--max-depth", quad.max_depth, "Quadrature recursion depth")
      ->capture_default_str()
      ->check(CLI::Range(1, 200));
  payments->add_option("--ic-deviations", deviations, "Also report IC regret over this many misreports")
      ->check(CLI::NonNegativeNumber);

  // stability-check
  auto* stability = app.add_subcommand("stability-check", "Measure allocation change under bid perturbation");
  RuleFlags stab_rule;
  stab_rule.Attach(stability, false);
  std::vector<double> stab_values;
  std::vector<double> stab_other;
  double lambda = 0.0;
  int samples = 1000;
  stability->add_option("--values", stab_values, "Bids, comma separated")->required()->delimiter(',');
  auto* other_opt = stability->add_option("--other", stab_other, "Second bid vector to compare against")
                        ->delimiter(',');
  auto* lambda_opt = stability->add_option("--lambda", lambda, "Band ratio to search (>= 1)")->excludes(other_opt);
  stability->add_option("--samples", samples, "Random vectors drawn from the band")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  // subset-check
  auto* subset = app.add_subcommand("subset-check", "Group fairness over a set collection");
  std::string collection_path;
  std::string algorithm = "rule";
  RuleFlags subset_rule;
  subset_rule.Attach(subset, false);
  int cap_n = 0;
  std::string parts_text;
  std::vector<double> subset_values;
  std::vector<double> subset_other;
  subset->add_option("--collection", collection_path, "Collection JSON {\"k\":..,\"sets\":[[..]]}, 1-based")
      ->required();
  subset->add_option("--algorithm", algorithm, "rule, cluster-capped or hierarchical")
      ->capture_default_str()
      ->check(CLI::IsMember({"rule", "cluster-capped", "hierarchical"}));
  subset->add_option("--n", cap_n, "Cap parameter for cluster-capped (default: cluster width)");
  subset->add_option("--parts", parts_text, "Partition for hierarchical, JSON list of 1-based lists "
                                            "(default: equivalence clusters)");
  subset->add_option("--values", subset_values, "Bids, comma separated")->required()->delimiter(',');
  subset->add_option("--other", subset_other, "Second bid vector")->required()->delimiter(',');

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Closed-form welfare and fairness bounds");
  std::optional<double> bound_ell;
  std::optional<double> bound_alpha;
  std::int64_t bound_k = 10;
  std::vector<double> table_lambdas{1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
  bounds->add_option("--ell", bound_ell, "IPA exponent");
  bounds->add_option("--near-optimal-alpha", bound_alpha, "Target ratio for capped-IPA parameters");
  bounds->add_option("--k", bound_k, "Advertiser count for the prior-free bound")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bounds->add_option("--lambdas", table_lambdas, "Similarity ratios for the fairness table")->delimiter(',');

  // profile
  auto* profile = app.add_subcommand("profile", "Bid-stability profile of one horizon");
  std::string input;
  std::string horizon;
  RuleFlags prof_rule;
  prof_rule.Attach(profile, true);
  fairauction::ProfileConfig pcfg;
  profile->add_option("--input", input, "Bid CSV")->required();
  profile->add_option("--horizon", horizon, "Month label YYYY-MM (default: whole input)");
  profile->add_option("--jaccard-min", pcfg.jaccard_min, "Minimum bidder-set Jaccard")->capture_default_str();
  profile->add_option("--bucket-width", pcfg.bucket_width, "Similarity bucket width")->capture_default_str();
  profile->add_option("--range-lo", pcfg.range_lo, "Lowest similarity")->capture_default_str();
  profile->add_option("--range-hi", pcfg.range_hi, "Highest similarity")->capture_default_str();
  profile->add_option("--percentile", pcfg.percentile, "Reported percentile")->capture_default_str();
  profile->add_option("--max-samples", pcfg.max_samples_per_bucket, "Sampled pairs per bucket")
      ->capture_default_str();

  // welfare
  auto* welfare = app.add_subcommand("welfare", "Welfare ratio of each rule, overall and by bidder count");
  std::string welfare_input;
  std::string welfare_horizon;
  RuleFlags welfare_rule;
  welfare_rule.Attach(welfare, true);
  welfare->add_option("--input", welfare_input, "Bid CSV")->required();
  welfare->add_option("--horizon", welfare_horizon, "Month label YYYY-MM (default: whole input)");

  // match
  auto* match = app.add_subcommand("match", "Match IPA profiles to proportional profiles");
  std::string profiles_a;
  std::string profiles_b;
  match->add_option("--a", profiles_a, "Profile CSV whose parameters are matched")->required();
  match->add_option("--b", profiles_b, "Profile CSV of candidate parameters")->required();

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic bid log");
  std::string synth_config;
  fairauction::SyntheticConfig scfg;
  gen->add_option("--synth-config", synth_config, "Generator config JSON file");
  gen->add_option("--keywords", scfg.keywords, "Keywords")->capture_default_str();
  gen->add_option("--months", scfg.months, "Months")->capture_default_str();
  gen->add_option("--auctions-per-keyword", scfg.auctions_per_keyword, "Auctions per keyword per month")
      ->capture_default_str();
  gen->add_option("--advertisers", scfg.advertisers, "Advertisers per keyword cluster")->capture_default_str();
  gen->add_option("--similarity-profile", scfg.pair_similarity_profile,
                  "Per-cluster similarity targets, comma separated")
      ->delimiter(',');
  gen->add_option("--near-tie-fraction", scfg.near_tie_fraction, "Share of near-tie clusters")
      ->capture_default_str();

  for (auto* sub : {allocate, payments, stability, subset, bounds, profile, welfare, match, gen}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto need_seed = [&seed]() {
    if (!seed) throw Error(ErrorCode::kInvalidConfig, "--seed is required for this command");
    return *seed;
  };

  try {
    Output out(output);
    auto emit = [&out](const Json& j) { out.stream() << j.dump(2) << '\n'; };

    if (*allocate) {
      const AllocRuleSpec spec = alloc_rule.Single();
      Json j = SpecJson(spec);
      j["allocation"] = VectorJson(fairauction::Allocate(spec, ToVector(values)));
      emit(j);
    } else if (*payments) {
      const AllocRuleSpec spec = pay_rule.Single();
      const ValueVector v = ToVector(pay_values);
      std::vector<int> who;
      if (pay_index != 0) {
        who.push_back(ToIndex(pay_index, v.size()));
      } else {
        for (int i = 0; i < v.size(); ++i) who.push_back(i);
      }
      Json j = SpecJson(spec);
      j["payments"] = Json::array();
      for (int i : who) {
        const auto r = fairauction::PaymentIdentity(spec, v, i, quad);
        Json row{{"index", i + 1},
                 {"value", v[i]},
                 {"allocation", r.allocation_at_truth},
                 {"payment", r.payment},
                 {"quadrature_error_estimate", r.quadrature_error_estimate}};
        if (deviations > 0) row["ic_regret"] = fairauction::IcRegret(spec, v, i, deviations, quad);
        j["payments"].push_back(row);
      }
      emit(j);
    } else if (*stability) {
      const AllocRuleSpec spec = stab_rule.Single();
      const ValueVector v = ToVector(stab_values);
      Json j = SpecJson(spec);
      double lam = 0.0;
      double diff = 0.0;
      if (!stab_other.empty()) {
        const ValueVector w = ToVector(stab_other);
        lam = fairauction::StabilityParam(v, w);
        diff = (fairauction::Allocate(spec, v) - fairauction::Allocate(spec, w)).cwiseAbs().maxCoeff();
        j["mode"] = "compare";
      } else {
        if (lambda_opt->count() == 0) throw Error(ErrorCode::kInvalidLambda, "give --lambda or --other");
        lam = lambda;
        diff = fairauction::StabilityViolationSearch(spec, v, lam, samples, need_seed());
        j["mode"] = "search";
        j["samples"] = samples;
        j["seed"] = *seed;
      }
      j["lambda"] = std::isinf(lam) ? Json("inf") : Json(lam);
      j["max_diff"] = diff;
      if (spec.kind == RuleKind::kIpa || spec.kind == RuleKind::kCappedIpa) {
        const double bound = (spec.kind == RuleKind::kCappedIpa ? spec.beta : 1.0) * fairauction::FEll(lam, spec.ell);
        j["guaranteed_bound"] = bound;
        j["within_bound"] = diff <= bound + 1e-9;
      }
      emit(j);
    } else if (*subset) {
      const auto c = fairauction::SetCollection::FromJson(ReadFile(collection_path));
      const ValueVector v = ToVector(subset_values);
      const ValueVector w = ToVector(subset_other);
      const auto widths = fairauction::ComputeCollectionWidths(c);
      const auto clusters = fairauction::EquivalenceClusters(c);
      Json j;
      j["algorithm"] = algorithm;
      j["width"] = widths.width;
      j["cluster_width"] = widths.cluster_width;
      j["clusters"] = SetsJson(clusters.clusters);
      fairauction::AllocationRule rule;
      fairauction::ClusterPartition parts = clusters;
      if (algorithm == "rule") {
        const AllocRuleSpec spec = subset_rule.Single();
        j.update(SpecJson(spec));
        rule = fairauction::MakeRule(spec);
      } else if (algorithm == "cluster-capped") {
        const int n = cap_n > 0 ? cap_n : std::max(1, widths.cluster_width);
        const double ell = subset_rule.ell.at(0);
        j["ell"] = ell;
        j["n"] = n;
        rule = [&c, ell, n](const ValueVector& u) { return fairauction::ClusterCappedAlloc(u, ell, n, c); };
      } else {
        if (!parts_text.empty()) parts.clusters = ParseParts(parts_text);
        const double ell = subset_rule.ell.at(0);
        j["ell"] = ell;
        j["parts"] = SetsJson(parts.clusters);
        j["partitioned_width"] = fairauction::PartitionedWidth(c, parts);
        rule = [&parts, ell](const ValueVector& u) { return fairauction::PartitionHierarchicalAlloc(u, ell, parts); };
      }
      j["lambda"] = [&] {
        const double l = fairauction::StabilityParam(v, w);
        return std::isinf(l) ? Json("inf") : Json(l);
      }();
      j["max_group_diff"] = fairauction::SubsetStabilityCheck(rule, c, v, w);
      if (algorithm == "hierarchical") {
        j["max_part_subset_diff"] = fairauction::MaxPartSubsetDifference(rule(v), rule(w), parts);
      }
      j["allocation"] = VectorJson(rule(v));
      j["other_allocation"] = VectorJson(rule(w));
      emit(j);
    } else if (*bounds) {
      if (!bound_ell && !bound_alpha) throw Error(ErrorCode::kInvalidConfig, "give --ell and/or --near-optimal-alpha");
      Json j;
      if (bound_ell) {
        const double ell = *bound_ell;
        j["ell"] = ell;
        j["alpha_ell"] = fairauction::AlphaEll(ell);
        Json table = Json::array();
        for (double l : table_lambdas) table.push_back({{"lambda", l}, {"f_ell", fairauction::FEll(l, ell)}});
        j["f_ell"] = table;
        const fairauction::FairnessFn f = [ell](double l) { return fairauction::FEll(l, ell); };
        const auto m = fairauction::MinPriorFreeUpperBound(f, bound_k);
        j["prior_free_upper_bound"] = {{"k", bound_k}, {"lambda", m.lambda}, {"bound", m.bound}};
        const auto g = fairauction::ComputeGapBounds(ell);
        j["gap_bounds"] = {{"ub_limit", g.ub_limit}, {"ratio_lb", g.ratio_lb}};
      }
      if (bound_alpha) {
        const auto p = fairauction::NearOptimalParamsFor(*bound_alpha);
        j["near_optimal"] = {{"alpha", *bound_alpha}, {"ell", p.ell}, {"beta", p.beta}, {"guarantee", p.guarantee}};
      }
      emit(j);
    } else if (*profile) {
      pcfg.seed = need_seed();
      pcfg.threads = threads;
      pcfg.Validate();
      const auto specs = prof_rule.All();
      const auto h = SelectHorizon(input, horizon);
      std::vector<fairauction::StabilityProfile> profiles;
      for (const auto& spec : specs) profiles.push_back(fairauction::BuildProfile(h, spec, pcfg));
      fairauction::WriteProfileCsv(out.stream(), profiles);
    } else if (*welfare) {
      const auto specs = welfare_rule.All();
      const auto h = SelectHorizon(welfare_input, welfare_horizon);
      fairauction::WriteWelfareCsv(out.stream(), fairauction::ComputeWelfareReport(h, specs));
    } else if (*match) {
      auto load = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::kFileNotFound, path);
        std::map<double, fairauction::StabilityProfile> byParam;
        for (auto& p : fairauction::ReadProfileCsv(in)) {
          const double param = p.algorithm.Parameter();
          if (std::isnan(param)) continue;
          byParam[param] = std::move(p);
        }
        return byParam;
      };
      const auto matches = fairauction::MatchParameters(load(profiles_a), load(profiles_b));
      out.stream() << Json::parse(fairauction::MatchesToJson(matches)).dump(2) << '\n';
    } else if (*gen) {
      if (!synth_config.empty()) {
        fairauction::SyntheticConfig from_file = fairauction::SyntheticConfig::FromJson(ReadFile(synth_config));
        // Explicit flags still win over the file.
        if (gen->count("--keywords") > 0) from_file.keywords = scfg.keywords;
        if (gen->count("--months") > 0) from_file.months = scfg.months;
        if (gen->count("--auctions-per-keyword") > 0) from_file.auctions_per_keyword = scfg.auctions_per_keyword;
        if (gen->count("--advertisers") > 0) from_file.advertisers = scfg.advertisers;
        if (gen->count("--similarity-profile") > 0) from_file.pair_similarity_profile = scfg.pair_similarity_profile;
        if (gen->count("--near-tie-fraction") > 0) from_file.near_tie_fraction = scfg.near_tie_fraction;
        scfg = from_file;
      }
      fairauction::WriteBidCsv(out.stream(), fairauction::GenerateSynthetic(need_seed(), scfg));
    }
    out.Close();
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
