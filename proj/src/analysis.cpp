#include "matchwelfare/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "matchwelfare/matching.hpp"
#include "matchwelfare/profiles.hpp"
#include "matchwelfare/rng.hpp"

namespace matchwelfare {

namespace {

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const AssignmentDistribution& distribution_of(const MechanismResult& r) {
  if (!r.distribution) throw std::logic_error("mechanism result lacks a distribution");
  return *r.distribution;
}

// All strict orders on n items, lexicographic.
std::vector<std::vector<int>> all_orders(int n) {
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

std::uint64_t binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t t = 0; t < b; ++t) r = r * (a - t) / (t + 1);
  return r;
}

// Strict unit-range row with the given order and descending middle values.
std::vector<double> row_from_order(int n, const std::vector<int>& order,
                                   const std::vector<double>& middles) {
  std::vector<double> row(n, 0.0);
  row[order[0]] = 1.0;
  for (int t = 1; t + 1 < n; ++t) row[order[t]] = middles[t - 1];
  return row;
}

}  // namespace

RatioReport approximation_ratio_on(const ValuationProfile& p, const Mechanism& mech,
                                   const EvalMode& mode) {
  const auto violations = validate_profile(p);
  if (!violations.empty()) {
    throw validation_error("profile fails validation: row " + std::to_string(violations[0].row) +
                           ": " + violations[0].rule);
  }
  MechanismResult res;
  if (mode.kind == EvalMode::Kind::Exact) {
    if (!mech.eval_exact) throw refusal_error("mechanism has no exact evaluation");
    res = mech.eval_exact(p);
  } else {
    if (!mech.eval_mc) throw refusal_error("mechanism has no Monte-Carlo evaluation");
    res = mech.eval_mc(p, mode.samples, mode.seed);
  }
  const OptResult opt = optimal_matching(p);
  if (!(opt.welfare > 0.0)) throw validation_error("optimal welfare is zero");
  RatioReport report;
  report.mech_welfare = res.expected_welfare;
  report.opt_welfare = opt.welfare;
  report.ratio = res.expected_welfare / opt.welfare;
  report.provenance = res.method;
  return report;
}

TruthfulnessReport truthfulness_check_ordinal(const Mechanism& mech, int n,
                                              const std::vector<double>& value_grid) {
  if (!mech.ordinal) throw refusal_error("ordinal truthfulness check needs an ordinal mechanism");
  if (!mech.eval_exact) throw refusal_error("needs exact evaluation");
  if (n < 1 || n > 4) throw refusal_error("exhaustive ordinal check supports n <= 4");
  std::vector<double> grid = value_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double g : grid) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("grid values must lie in (0,1)");
  }
  const int middles_needed = std::max(0, n - 2);
  const std::uint64_t subsets = binomial(grid.size(), middles_needed);
  if (subsets == 0) throw std::invalid_argument("value grid too small for n-2 distinct middles");

  const auto orders = all_orders(n);
  const std::uint64_t per_agent = orders.size() * subsets;
  std::uint64_t profile_count = 1;
  for (int i = 0; i < n; ++i) profile_count *= per_agent;
  const std::uint64_t total = profile_count * n * orders.size();
  constexpr std::uint64_t kBudget = 2'000'000;
  if (total > kBudget) {
    throw refusal_error("exhaustive ordinal check would run " + std::to_string(total) +
                        " evaluations, over the budget of " + std::to_string(kBudget));
  }

  // Descending middle-value choices (combinations of the sorted grid).
  std::vector<std::vector<double>> middle_choices;
  std::vector<int> idx(middles_needed);
  std::iota(idx.begin(), idx.end(), 0);
  if (middles_needed == 0) {
    middle_choices.push_back({});
  } else {
    for (;;) {
      std::vector<double> pick(middles_needed);
      for (int t = 0; t < middles_needed; ++t) pick[t] = grid[idx[t]];
      middle_choices.push_back(std::move(pick));
      int pos = middles_needed - 1;
      while (pos >= 0 && idx[pos] == static_cast<int>(grid.size()) - middles_needed + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int t = pos + 1; t < middles_needed; ++t) idx[t] = idx[t - 1] + 1;
    }
  }

  TruthfulnessReport report;
  report.search_mode = TruthfulnessReport::SearchMode::ExhaustiveOrdinal;
  double max_gain = -1.0;

  std::vector<std::uint64_t> odo(n, 0);
  for (;;) {
    ValuationProfile p;
    p.n = n;
    p.normalization = Normalization::UnitRange;
    p.values.resize(n);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t oi = odo[i] / subsets;
      const std::uint64_t ci = odo[i] % subsets;
      p.values[i] = row_from_order(n, orders[oi], middle_choices[ci]);
    }
    const MechanismResult truth = mech.eval_exact(p);
    for (int a = 0; a < n; ++a) {
      const std::uint64_t oa = odo[a] / subsets;
      const std::uint64_t ca = odo[a] % subsets;
      for (std::size_t om = 0; om < orders.size(); ++om) {
        if (om == oa) continue;
        ValuationProfile q = p;
        q.values[a] = row_from_order(n, orders[om], middle_choices[ca]);
        const MechanismResult lied = mech.eval_exact(q);
        double eu = 0.0;
        for (int j = 0; j < n; ++j) {
          eu += distribution_of(lied).probs[a][j] * p.values[a][j];
        }
        const double gain = eu - truth.per_agent_utility[a];
        if (gain > max_gain) {
          max_gain = gain;
          if (gain > kTauTruth) {
            report.witness = TruthfulnessWitness{p, a, q, gain};
          }
        }
      }
    }
    int pos = n - 1;
    while (pos >= 0 && odo[pos] + 1 == per_agent) {
      odo[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++odo[pos];
  }
  report.max_regret = std::max(0.0, max_gain);
  if (report.max_regret <= kTauTruth) report.witness.reset();
  return report;
}

TruthfulnessReport truthfulness_check_cardinal(const Mechanism& mech,
                                               const std::vector<ValuationProfile>& profiles,
                                               double grid_resolution) {
  if (!mech.eval_exact) throw refusal_error("needs exact evaluation");
  if (!(grid_resolution > 0.0 && grid_resolution <= 0.5)) {
    throw std::invalid_argument("grid resolution must lie in (0, 0.5]");
  }
  std::vector<double> alphas;
  for (int t = 0;; ++t) {
    const double a = t * grid_resolution;
    if (a > 1.0 + 1e-12) break;
    // Keep reported rows strict: endpoints move just inside the open interval.
    alphas.push_back(std::clamp(a, kDeltaB, 1.0 - kDeltaB));
  }
  const auto orders = all_orders(3);

  TruthfulnessReport report;
  report.search_mode = TruthfulnessReport::SearchMode::GridCardinal;
  report.grid_resolution = grid_resolution;
  double max_gain = -1.0;

  for (const auto& p : profiles) {
    if (p.n != 3) throw refusal_error("cardinal misreport sweep is defined for n = 3");
    const MechanismResult truth = mech.eval_exact(p);
    for (int a = 0; a < 3; ++a) {
      for (const auto& order : orders) {
        for (double alpha : alphas) {
          ValuationProfile q = p;
          q.values[a] = row_from_order(3, order, {alpha});
          const MechanismResult lied = mech.eval_exact(q);
          double eu = 0.0;
          for (int j = 0; j < 3; ++j) {
            eu += distribution_of(lied).probs[a][j] * p.values[a][j];
          }
          const double gain = eu - truth.per_agent_utility[a];
          if (gain > max_gain) {
            max_gain = gain;
            if (gain > kTauTruth) {
              report.witness = TruthfulnessWitness{p, a, q, gain};
            }
          }
        }
      }
    }
  }
  report.max_regret = std::max(0.0, max_gain);
  if (report.max_regret <= kTauTruth) report.witness.reset();
  return report;
}

double cubic_lottery_regret(double alpha_step) {
  if (!(alpha_step > 0.0 && alpha_step <= 0.5)) {
    throw std::invalid_argument("alpha step must lie in (0, 0.5]");
  }
  std::vector<double> grid;
  for (int t = 0;; ++t) {
    const double a = t * alpha_step;
    if (a > 1.0 + 1e-12) break;
    grid.push_back(std::min(a, 1.0));
  }
  // Item values by true rank; a report permutes which rank receives which
  // lottery share.
  std::array<int, 3> perm = {0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  double max_gain = 0.0;
  for (double alpha : grid) {
    const std::array<double, 3> truth_value = {1.0, alpha, 0.0};
    const auto honest = cubic_lottery(alpha);
    double eu_truth = 0.0;
    for (int o = 0; o < 3; ++o) eu_truth += honest[o] * truth_value[o];
    for (const auto& rep : perms) {
      for (double alpha_rep : grid) {
        const auto lot = cubic_lottery(alpha_rep);
        double eu = 0.0;
        for (int o = 0; o < 3; ++o) eu += lot[o] * truth_value[rep[o]];
        max_gain = std::max(max_gain, eu - eu_truth);
      }
    }
  }
  return max_gain;
}

std::string to_string(MechProperty prop) {
  switch (prop) {
    case MechProperty::Anonymous: return "anonymous";
    case MechProperty::Neutral: return "neutral";
    case MechProperty::Ordinal: return "ordinal";
  }
  throw std::invalid_argument("unknown property");
}

BoundCheck property_check(const Mechanism& mech, MechProperty property, int n, int trials,
                          std::uint64_t seed) {
  if (!mech.eval_exact) throw refusal_error("property check needs exact evaluation");
  if (trials < 1) throw std::invalid_argument("needs trials >= 1");
  SplitMix64 rng(seed);
  double max_dev = 0.0;
  std::string note;

  for (int trial = 0; trial < trials; ++trial) {
    const ValuationProfile p = random_profile(n, Normalization::UnitRange, rng());
    const MechanismResult r1 = mech.eval_exact(p);
    const auto& d1 = distribution_of(r1);
    ValuationProfile q = p;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double dev = 0.0;
    switch (property) {
      case MechProperty::Anonymous: {
        shuffle(perm, rng);
        for (int i = 0; i < n; ++i) q.values[perm[i]] = p.values[i];
        const MechanismResult r2 = mech.eval_exact(q);
        const auto& d2 = distribution_of(r2);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            dev = std::max(dev, std::abs(d2.probs[perm[i]][j] - d1.probs[i][j]));
          }
        }
        break;
      }
      case MechProperty::Neutral: {
        shuffle(perm, rng);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) q.values[i][perm[j]] = p.values[i][j];
        }
        const MechanismResult r2 = mech.eval_exact(q);
        const auto& d2 = distribution_of(r2);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            dev = std::max(dev, std::abs(d2.probs[i][perm[j]] - d1.probs[i][j]));
          }
        }
        break;
      }
      case MechProperty::Ordinal: {
        // Re-value one row monotonically: fresh strict values, same ranking.
        const int a = static_cast<int>(rng.below(n));
        const std::vector<int> order = preference_order(p, a);
        std::vector<double> fresh(n);
        for (;;) {
          for (double& v : fresh) v = rng.uniform01();
          std::sort(fresh.begin(), fresh.end(), std::greater<>());
          bool dup = false;
          for (int t = 0; t + 1 < n; ++t) {
            if (fresh[t] == fresh[t + 1]) dup = true;
          }
          if (!dup) break;
        }
        for (int t = 0; t < n; ++t) q.values[a][order[t]] = fresh[t];
        const MechanismResult r2 = mech.eval_exact(q);
        const auto& d2 = distribution_of(r2);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            dev = std::max(dev, std::abs(d2.probs[i][j] - d1.probs[i][j]));
          }
        }
        break;
      }
    }
    if (dev > max_dev) {
      max_dev = dev;
      if (dev > tau_prob(n)) note = "deviation " + short_num(dev) + " at trial " + std::to_string(trial);
    }
  }

  BoundCheck check;
  check.name = to_string(property) + "(" + mech.name + ")";
  check.n = n;
  check.lhs = max_dev;
  check.rhs = tau_prob(n);
  check.direction = BoundCheck::Direction::LessEq;
  check.holds = max_dev <= check.rhs;
  check.note = note;
  return check;
}

BoundCheck verify_lemma4_bound(int n, double eps, int k,
                               const std::vector<std::uint64_t>& seeds,
                               std::uint64_t samples) {
  if (seeds.empty()) throw std::invalid_argument("needs at least one seed");
  if (!(eps > 0.0 && eps <= 1.0 / (static_cast<double>(n) * n * n))) {
    throw std::invalid_argument("needs 0 < eps <= 1/n^3");
  }
  if (static_cast<long long>(k) * k < n) throw std::invalid_argument("needs k >= sqrt(n)");
  if (k > n) throw std::invalid_argument("needs k <= n");

  double worst = std::numeric_limits<double>::infinity();
  bool exact = n <= kNExactMax;
  for (std::uint64_t seed : seeds) {
    const ValuationProfile p = gen_quasicombinatorial(n, eps, k, seed);
    const double opt = optimal_matching(p).welfare;
    double lower;
    if (exact) {
      lower = rp_exact(p).expected_welfare;
    } else {
      const MechanismResult r = rp_montecarlo(p, samples, seed);
      lower = r.expected_welfare - r.method.ci_radius;
    }
    worst = std::min(worst, lower / opt);
  }

  BoundCheck check;
  check.name = "lemma4";
  check.n = n;
  check.lhs = worst;
  check.rhs = (k - 11.0) / (8.0 * n) - n * eps / (2.0 * k);
  check.direction = BoundCheck::Direction::GreaterEq;
  check.holds = check.lhs >= check.rhs;
  check.note = std::string(exact ? "exact" : "mc-lower") + ", seeds=" + std::to_string(seeds.size()) +
               ", k=" + std::to_string(k) + ", eps=" + short_num(eps);
  return check;
}

Lemma6MisreportDetail verify_lemma6_misreport_detail(int n, int k) {
  const ValuationProfile truth_profile = gen_lemma6(n, k);
  if (k == 0) {
    // Recover the default actually used by the generator.
    int s = 1;
    while ((s + 1) * (s + 1) <= n) ++s;
    k = s - 1;
  }
  RpExactOptions opts;
  opts.size_guard = false;  // the family collapses to a small state space

  Lemma6MisreportDetail d;
  d.n = n;
  d.k = k;
  const MechanismResult truth = rp_exact(truth_profile, opts);
  const auto& dt = distribution_of(truth);
  for (int i = 2; i <= k + 1; ++i) {
    d.diag_prob = std::max(d.diag_prob, dt.probs[i - 1][i - 1]);
  }
  const double denom = (n - k) * (2.0 * n - (k + 1.0) * (k + 1.0));
  d.diag_bound = denom > 0.0 ? 4.0 * k * n / denom : 1.0;

  const std::vector<double>& reported_row = truth_profile.values[k + 1];
  for (int i = 2; i <= k + 1; ++i) {
    const ValuationProfile mis = gen_lemma6_misreport(n, k, i);
    const MechanismResult lied = rp_exact(mis, opts);
    const auto& dl = distribution_of(lied);
    double eu = 0.0;
    for (int j = 0; j < n; ++j) eu += dl.probs[i - 1][j] * reported_row[j];
    d.misreport_utility = std::max(d.misreport_utility, eu);
    d.top1_prob = std::max(d.top1_prob, dl.probs[i - 1][0]);
  }
  d.utility_bound = 4.0 / (n - k + 1.0);
  d.top1_bound = 1.0 / (n - k + 1.0) + tau_prob(n);
  d.holds = d.diag_prob <= d.diag_bound && d.misreport_utility <= d.utility_bound &&
            d.top1_prob <= d.top1_bound;
  return d;
}

BoundCheck verify_lemma6_misreport_bound(int n, int k) {
  const Lemma6MisreportDetail d = verify_lemma6_misreport_detail(n, k);
  BoundCheck check;
  check.name = "lemma6-misreport";
  check.n = n;
  check.lhs = d.misreport_utility;
  check.rhs = d.utility_bound;
  check.direction = BoundCheck::Direction::LessEq;
  check.holds = d.holds;
  check.note = "diag " + short_num(d.diag_prob) + "<=" + short_num(d.diag_bound) + "; top1 " +
               short_num(d.top1_prob) + "<=" + short_num(d.top1_bound) + "; k=" +
               std::to_string(d.k);
  return check;
}

BoundCheck verify_unit_sum_floor(int n, int trials, std::uint64_t seed) {
  if (n > 7) throw refusal_error("exact unit-sum floor check supports n <= 7");
  if (trials < 1) throw std::invalid_argument("needs trials >= 1");
  SplitMix64 rng(seed);
  double min_util = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const ValuationProfile p = random_profile(n, Normalization::UnitSum, rng());
    const MechanismResult r = rp_exact(p);
    for (double u : r.per_agent_utility) min_util = std::min(min_util, u);
  }
  BoundCheck check;
  check.name = "unit-sum-floor";
  check.n = n;
  check.lhs = min_util;
  check.rhs = 1.0 / n;
  check.direction = BoundCheck::Direction::GreaterEq;
  check.holds = check.lhs >= check.rhs - tau_prob(n);
  check.note = "trials=" + std::to_string(trials);
  return check;
}

BoundCheck pareto_expost_check(const ValuationProfile& p, const Mechanism& mech) {
  if (p.n > 5) throw refusal_error("ex-post efficiency check enumerates support; refusing n > 5");
  if (!mech.support) throw refusal_error("mechanism support unavailable");
  const std::vector<Matching> support = mech.support(p);

  int violations = 0;
  std::string note;
  for (const Matching& m : support) {
    // Edge a -> b when a strictly prefers b's item; any directed cycle is a
    // Pareto-improving trade among its members.
    std::vector<std::vector<int>> adj(p.n);
    for (int a = 0; a < p.n; ++a) {
      for (int b = 0; b < p.n; ++b) {
        if (a != b && p.values[a][m.assignment[b]] > p.values[a][m.assignment[a]]) {
          adj[a].push_back(b);
        }
      }
    }
    std::vector<int> color(p.n, 0);
    bool cycle = false;
    auto dfs = [&](auto&& self, int v) -> void {
      color[v] = 1;
      for (int w : adj[v]) {
        if (cycle) return;
        if (color[w] == 1) {
          cycle = true;
          return;
        }
        if (color[w] == 0) self(self, w);
      }
      color[v] = 2;
    };
    for (int v = 0; v < p.n && !cycle; ++v) {
      if (color[v] == 0) dfs(dfs, v);
    }
    if (cycle) {
      ++violations;
      if (note.empty()) {
        note = "improvable outcome (";
        for (int i = 0; i < p.n; ++i) {
          note += std::to_string(m.assignment[i] + 1);
          note += (i + 1 < p.n) ? "," : ")";
        }
      }
    }
  }

  BoundCheck check;
  check.name = "pareto-expost(" + mech.name + ")";
  check.n = p.n;
  check.lhs = violations;
  check.rhs = 0.0;
  check.direction = BoundCheck::Direction::LessEq;
  check.holds = violations == 0;
  check.note = note;
  return check;
}

}  // namespace matchwelfare
