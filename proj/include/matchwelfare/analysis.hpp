#pragma once
// Welfare-ratio evaluation, truthfulness checks, randomized property
// verification, ex-post efficiency, and the verified-inequality helpers used
// by the bounds suites.

#include "matchwelfare/mechanisms.hpp"

namespace matchwelfare {

// Validates the profile, evaluates the mechanism (exact or Monte-Carlo per
// mode), computes the optimal welfare, and reports the ratio with provenance.
RatioReport approximation_ratio_on(const ValuationProfile& p, const Mechanism& mech,
                                   const EvalMode& mode = {});

struct TruthfulnessWitness {
  ValuationProfile profile;    // true profile
  int agent = 0;               // 0-indexed
  ValuationProfile misreport;  // profile with the misreported row swapped in
  double gain = 0.0;
};

struct TruthfulnessReport {
  enum class SearchMode { ExhaustiveOrdinal, GridCardinal };
  double max_regret = 0.0;
  std::optional<TruthfulnessWitness> witness;  // present iff max_regret > kTauTruth
  SearchMode search_mode = SearchMode::ExhaustiveOrdinal;
  double grid_resolution = 0.0;  // GridCardinal only
};

// Exhaustive ordinal truthfulness: every assignment of strict orders crossed
// with grid-valued middle entries, every agent, every order misreport.  The
// mechanism must be ordinal; enumeration sizes beyond the internal budget are
// refused with the offending count in the message.
TruthfulnessReport truthfulness_check_ordinal(const Mechanism& mech, int n,
                                              const std::vector<double>& value_grid);

// Cardinal truthfulness over given three-agent unit-range profiles: order
// misreports crossed with a grid of reported middle values (grid endpoints
// are nudged inside the open interval to keep reports strict).
TruthfulnessReport truthfulness_check_cardinal(const Mechanism& mech,
                                               const std::vector<ValuationProfile>& profiles,
                                               double grid_resolution);

// Max regret of the cubic lottery as a one-agent, three-item mechanism: true
// middle value and reported (ranking, middle value) swept on a grid.
double cubic_lottery_regret(double alpha_step);

enum class MechProperty { Anonymous, Neutral, Ordinal };

std::string to_string(MechProperty prop);

// Randomized verification of a declared property on seeded random strict
// unit-range profiles; lhs is the largest distribution deviation observed.
BoundCheck property_check(const Mechanism& mech, MechProperty property, int n, int trials,
                          std::uint64_t seed);

// Welfare-ratio guarantee on seeded quasi-combinatorial profiles: worst
// observed RP/OPT ratio (exact for small n, Monte-Carlo lower confidence
// bound beyond) against the closed-form guarantee at (n, eps, k).
BoundCheck verify_lemma4_bound(int n, double eps, int k,
                               const std::vector<std::uint64_t>& seeds,
                               std::uint64_t samples = 1'000'000);

// Misreport analysis for the gen_lemma6 family at (n, k): the diagonal win
// probability of the near-indifferent agents, the deviating agent's reported
// utility, and the top-item lottery share, each against its closed form.
struct Lemma6MisreportDetail {
  int n = 0, k = 0;
  double diag_prob = 0.0, diag_bound = 0.0;
  double misreport_utility = 0.0, utility_bound = 0.0;
  double top1_prob = 0.0, top1_bound = 0.0;
  bool holds = false;
};
Lemma6MisreportDetail verify_lemma6_misreport_detail(int n, int k = 0);
BoundCheck verify_lemma6_misreport_bound(int n, int k = 0);

// Random priority under unit-sum valuations gives every agent at least a 1/n
// share of their total value; exact check over seeded profiles, n <= 7.
BoundCheck verify_unit_sum_floor(int n, int trials, std::uint64_t seed);

// Ex-post efficiency: no outcome in the mechanism's support admits a
// Pareto-improving trading cycle; n <= 5.
BoundCheck pareto_expost_check(const ValuationProfile& p, const Mechanism& mech);

}  // namespace matchwelfare
