#pragma once
// Mechanisms for assigning n items to n agents without transfers: random
// priority (exact, sampled, and an ordered-profile fast path), the uniform
// assignment, serial dictatorship, the cubic single-agent lottery, and the
// three-agent hybrid mechanism.  A Mechanism bundle carries capability flags
// plus evaluation closures, so analysis code can treat them uniformly.

#include <array>
#include <cstdint>
#include <functional>

#include "matchwelfare/core.hpp"

namespace matchwelfare {

// Exact random-priority evaluation refuses above this size by default and the
// message points at rp_montecarlo; structured profiles whose reachable state
// space stays small may opt out of the size guard (the memory budget below
// still applies and aborts runaway state growth).
inline constexpr int kNExactMax = 12;
inline constexpr std::uint64_t kStateBudgetBytes = 2'000'000'000;

struct RpExactOptions {
  bool size_guard = true;
  std::uint64_t state_budget_bytes = kStateBudgetBytes;
};

// Exact expected utilities of random priority (uniformly random agent order,
// each dictator takes their favorite remaining item) by memoized recursion on
// (remaining agents, remaining items) states.  Requires strict rows; n <= 32.
MechanismResult rp_exact(const ValuationProfile& p);
MechanismResult rp_exact(const ValuationProfile& p, const RpExactOptions& opts);

// Monte-Carlo estimate over sampled agent orders; ci_radius is the 99%
// Hoeffding half-width for expected welfare.
MechanismResult rp_montecarlo(const ValuationProfile& p, std::uint64_t samples,
                              std::uint64_t seed);

// Exact random priority for profiles where all agents rank the items in one
// common strict order (the assignment distribution is then uniform); refuses
// other profiles.  Linear memory, O(n^2) time, safe for n in the thousands.
MechanismResult rp_ordered_fastpath(const ValuationProfile& p);

// Deterministic serial dictatorship under the given agent order.
Matching serial_dictatorship(const ValuationProfile& p, const std::vector<int>& order);

// Every matching random priority outputs with positive probability, i.e. the
// serial-dictatorship outcomes over all n! orders, deduplicated; n <= 8.
std::vector<Matching> rp_support(const ValuationProfile& p);

// Assigns every item with probability 1/n to every agent.
MechanismResult uniform_mechanism(const ValuationProfile& p);

// Single-agent lottery over (best, middle, worst) given the middle value
// alpha in [0,1]: ((6 - 2a^3)/8, (1 + 3a^2)/8, (1 - 3a^2 + 2a^3)/8).
std::array<double, 3> cubic_lottery(double alpha);

// The three-agent hybrid mechanism: draw an agent order sigma uniformly;
// sigma(1) receives an item by the cubic lottery at its middle valuation,
// sigma(2) the favorite remaining item, sigma(3) the last item.  Exact
// enumeration over the 6 orders and 3 lottery outcomes.  Requires n = 3,
// strict rows, unit-range normalization.
MechanismResult hybrid_mechanism_exact(const ValuationProfile& p);

struct EvalMode {
  enum class Kind { Exact, MonteCarlo };
  Kind kind = Kind::Exact;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

// A mechanism as data: declared properties plus evaluation closures.  eval_mc
// and support are empty when the mechanism has no such evaluation.
struct Mechanism {
  std::string name;
  bool ordinal = false;
  bool anonymous = false;
  bool neutral = false;
  std::function<MechanismResult(const ValuationProfile&)> eval_exact;
  std::function<MechanismResult(const ValuationProfile&, std::uint64_t, std::uint64_t)>
      eval_mc;  // (profile, samples, seed)
  std::function<std::vector<Matching>(const ValuationProfile&)> support;
};

Mechanism make_rp();
Mechanism make_uniform();
Mechanism make_hybrid();
// Serial dictatorship under one fixed order: ordinal and neutral, not anonymous.
Mechanism make_fixed_dictatorship(std::vector<int> order);
// Deterministic maximum-welfare matching (lex tie-break): the welfare-optimal
// benchmark as a mechanism; cardinal, and neither anonymous nor neutral
// because of the tie-break.
Mechanism make_optimal_mechanism();

}  // namespace matchwelfare
