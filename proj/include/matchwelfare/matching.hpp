#pragma once
// Optimal-welfare oracle: maximum-weight perfect matching on the valuation
// matrix.  optimal_matching runs an O(n^3) Hungarian algorithm (shortest
// augmenting paths with dual potentials); optimal_matching_bruteforce
// enumerates all n! assignments and exists as the independent cross-check.
// Both resolve ties between optimal matchings the same way: the
// lexicographically smallest assignment vector wins.

#include "matchwelfare/core.hpp"

namespace matchwelfare {

struct OptResult {
  Matching matching;
  double welfare = 0.0;
};

OptResult optimal_matching(const ValuationProfile& p);

// Factorial enumeration; refuses n > 10.
OptResult optimal_matching_bruteforce(const ValuationProfile& p);

}  // namespace matchwelfare
