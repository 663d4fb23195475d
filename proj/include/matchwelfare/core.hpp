#pragma once
// Domain types shared by every module: valuation profiles, matchings,
// assignment distributions, evaluation provenance, and the error taxonomy.
// Agents and items are 0-indexed in memory; file formats and human-facing
// reports are 1-indexed.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace matchwelfare {

// Library-wide tolerances.  Generators emit values that are exact or within a
// few ulps of their closed forms, so these stay deliberately tight.
inline constexpr double kTauNorm = 1e-9;     // normalization checks
inline constexpr double kTauTruth = 1e-9;    // truthfulness regret threshold
inline constexpr double kTauReduce = 1e-12;  // monotone-descent slack in reductions
inline constexpr double kDeltaB = 1e-6;      // boundary margin for the n=3 sweeps

// Probability-mass checks scale with n (n row sums of n terms each).
inline double tau_prob(int n) { return 1e-12 * static_cast<double>(n); }

// Error taxonomy.
//  - std::invalid_argument: structurally malformed input (shape, ranges, NaN).
//  - validation_error: well-shaped input violating a declared invariant.
//  - refusal_error: request outside a size/capability guard; the message says
//    what to use instead.
//  - budget_error: a resource cap was exceeded mid-computation.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct refusal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Normalization { UnitRange, UnitSum, ZeroOne };

std::string to_string(Normalization norm);
Normalization normalization_from_string(const std::string& s);

// Agent-by-item valuations.  Rows with exact ties are only accepted by
// validation when flagged; mechanisms that need strict preferences refuse
// tied rows regardless of the flag.
struct ValuationProfile {
  int n = 0;
  std::vector<std::vector<double>> values;  // values[i][j] = agent i's value for item j
  Normalization normalization = Normalization::UnitRange;
  bool ties_flagged = false;

  bool row_has_ties(int agent) const;
  bool has_ties() const;
};

// Structural checks only (square shape, finite entries, n >= 1); the
// normalization invariants are reported by validate_profile instead.
ValuationProfile make_profile(int n, std::vector<std::vector<double>> values,
                              Normalization normalization,
                              bool ties_flagged = false);
ValuationProfile make_profile(std::vector<std::vector<double>> values,
                              Normalization normalization,
                              bool ties_flagged = false);

struct Violation {
  int row = 0;  // 1-indexed for reporting
  std::string rule;
  double magnitude = 0.0;
};

// Returns every normalization violation (empty = valid).  Tie rows are a
// violation only when the profile is not ties_flagged.  For n = 1 the
// UnitRange minimum rule is waived (a single entry cannot be both 1 and 0).
std::vector<Violation> validate_profile(const ValuationProfile& p);

struct Matching {
  std::vector<int> assignment;  // assignment[i] = item given to agent i
};

bool is_permutation(const std::vector<int>& assignment, int n);

// Canonical welfare: sum of matched values in increasing agent order.  Every
// welfare comparison in the library uses this exact summation order so that
// equal matchings produce bit-identical totals.
double social_welfare(const ValuationProfile& p, const Matching& m);

// Items in strictly decreasing order of agent's value; refuses tied rows.
std::vector<int> preference_order(const ValuationProfile& p, int agent);

struct AssignmentDistribution {
  int n = 0;
  std::vector<std::vector<double>> probs;  // probs[i][j] = P[agent i receives item j]
};

bool is_doubly_stochastic(const AssignmentDistribution& d, double tol);

struct EvalMethod {
  enum class Kind { Exact, MonteCarlo };
  Kind kind = Kind::Exact;
  std::string algorithm;
  // Monte-Carlo provenance (zero / empty when exact):
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double ci_radius = 0.0;  // 99% Hoeffding half-width on expected welfare
  std::string rng;
};

struct MechanismResult {
  std::string mechanism;
  double expected_welfare = 0.0;
  std::vector<double> per_agent_utility;
  std::optional<AssignmentDistribution> distribution;
  EvalMethod method;
};

struct RatioReport {
  double mech_welfare = 0.0;
  double opt_welfare = 0.0;
  double ratio = 0.0;
  EvalMethod provenance;
};

// One verified inequality: `lhs direction rhs` plus context.  `note` carries
// witness details or sub-check summaries and stays out of tabular output.
struct BoundCheck {
  std::string name;
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  enum class Direction { GreaterEq, LessEq };
  Direction direction = Direction::GreaterEq;
  bool holds = false;
  std::string note;
};

}  // namespace matchwelfare
