#pragma once
// Structured profile families, random profiles, the quasi-combinatorial
// reduction, and profile/mechanism transforms (tie-breaking, normalization
// embeddings, anonymization).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "matchwelfare/mechanisms.hpp"

namespace matchwelfare {

// Commonly ordered unit-range family parameterized only by n: the first
// floor(sqrt(n)) agents hold decreasing top blocks, everyone shares the same
// item ranking, and optimal welfare stays near sqrt(n) while random priority
// reaches only a constant.
ValuationProfile gen_lemma5(int n);

// Unit-range family with k+1 near-indifferent agents on a middle band and
// n-k-1 agents chasing item 1; row 1 and row k+2 are identical by
// construction.  Requires 2 <= k <= n-2 and a positive gap between the middle
// band and the tail (refused otherwise).  Default k (pass k = 0) is
// floor(sqrt(n)) - 1.
ValuationProfile gen_lemma6(int n, int k = 0);

// gen_lemma6 with row i (1-indexed, 2 <= i <= k+1) replaced by a copy of row
// k+2: the canonical misreport instance.
ValuationProfile gen_lemma6_misreport(int n, int k, int agent);

// Unit-sum family for perfect-square n: sqrt(n) base agents with near-unit
// diagonals plus replicated agents splitting their mass over the first
// sqrt(n) items.  Refuses non-square n.
ValuationProfile gen_lemma8(int n);

// Unit-sum analogue of gen_lemma6 (values scaled to a 1/10 band, residual
// mass on the diagonal).  Same k constraints and default as gen_lemma6.
ValuationProfile gen_lemma9(int n, int k = 0);

// The three-agent worst case for random priority: rows (1, 1-eps, 0),
// (1, eps, 0), (1, eps, 0); requires 0 < eps < 1/2.
ValuationProfile gen_n3_rp_worst(double eps);

// Seeded quasi-combinatorial profile: every value is exactly 1 or below eps,
// rows are strict, the first k agents desire distinct items 1..k, the rest
// desire a random item among 1..k; every row has exactly one 1 and a pinned 0.
ValuationProfile gen_quasicombinatorial(int n, double eps, int k, std::uint64_t seed);

// True when every value lies in [0, eps) or (1-eps, 1].
bool is_quasicombinatorial(const ValuationProfile& p, double eps);

// Random strict profile under the given normalization (uniform values,
// normalized per row); used by property and floor checks.
ValuationProfile random_profile(int n, Normalization norm, std::uint64_t seed);

// Pushes every middle-band value of a unit-range profile into [0, eps) or
// (1-eps, 1] by whole-band shifts, never increasing the evaluator's
// welfare ratio against the input's optimal matching.  The evaluator must be
// ordinal, anonymous, and neutral.  Returns the reduced profile and the
// ratio trajectory (first = input, last = output).
struct ReduceResult {
  ValuationProfile profile;
  std::vector<double> ratio_trajectory;
};
ReduceResult quasicombinatorial_reduce(const ValuationProfile& p, double eps,
                                       const Mechanism& evaluator);

// Strict tie-breaking: items tied within a row are separated by adding
// multiples of delta/n in priority order (priority[0] = most favored item,
// 0-indexed).  Refuses a delta large enough to reorder non-tied values.
ValuationProfile break_ties(const ValuationProfile& p, const std::vector<int>& priority,
                            double delta);

// Embeds a unit-sum profile on n items into a unit-range profile on n+1
// items: per-row minima are zeroed, every agent values the new item at 1,
// and one added agent wants the new item last.
ValuationProfile unitsum_to_unitrange_embed(const ValuationProfile& p);

// Zeroes each row minimum of a 0/1-normalized profile, yielding unit-range.
ValuationProfile zeroone_to_unitrange(const ValuationProfile& p);

// Uniformly random agent relabeling applied around a base mechanism: exact
// mode averages all n! relabelings (n <= 6), Monte-Carlo mode samples them.
Mechanism anonymize(const Mechanism& base);

// Declarative generator description, for configs and file round-trips.
struct GeneratorSpec {
  std::string family;  // "lemma5", "lemma6", "lemma8", "lemma9", "n3worst", "quasirandom"
  int n = 0;
  int k = 0;           // lemma6 / lemma9 / quasirandom
  double eps = 0.0;    // n3worst / quasirandom
  std::uint64_t seed = 0;  // quasirandom
};

ValuationProfile generate(const GeneratorSpec& spec);

}  // namespace matchwelfare
