#pragma once
// The complete three-agent ordinal landscape: enumeration of preference-order
// triples up to agent and item relabeling, fast cardinal evaluators over the
// (alpha1, alpha2, alpha3) cube of middle values, grid + coordinate-descent
// ratio minimization with boundary extrapolation, and whole-lab sweeps.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "matchwelfare/core.hpp"

namespace matchwelfare::n3 {

struct OrdinalClassN3 {
  std::array<std::array<int, 3>, 3> orders{};  // orders[agent] = items best->worst, 0-indexed
  int index = -1;                              // canonical class id (enumeration order)
  int orbit_size = 0;                          // raw order triples equivalent to this one
};

// Canonical representatives of the 6^3 order triples modulo agent and item
// relabeling; orbit sizes sum to 216.
std::vector<OrdinalClassN3> enumerate_classes();

enum class N3Mechanism { RP, HM, Uniform };

const char* to_string(N3Mechanism mech);
N3Mechanism n3_mechanism_from_string(const std::string& s);

// The unit-range profile realizing the class at cardinal point alpha
// (alpha[a] = agent a's value for its middle item).
ValuationProfile profile_at(const OrdinalClassN3& cls, const std::array<double, 3>& alpha);

// Expected welfare / optimal welfare at one cardinal point.
double ratio_at(const OrdinalClassN3& cls, N3Mechanism mech, const std::array<double, 3>& alpha);

struct MinimizeResult {
  std::array<double, 3> argmin{};
  double ratio = 0.0;               // at argmin, middles kept in [delta_b, 1-delta_b]
  double ratio_extrapolated = 0.0;  // Richardson step toward the cube boundary
  bool at_margin = false;           // some coordinate ended on the margin
};

// Full grid scan (points delta_b + t*step) followed by coordinate descent
// with endpoint handling, multistarted from the best grid basins.
MinimizeResult minimize_ratio(const OrdinalClassN3& cls, N3Mechanism mech, double grid_step,
                              int refine_rounds);

struct SurfaceRow {
  std::array<double, 3> alpha{};
  double ratio = 0.0;
};
std::vector<SurfaceRow> ratio_surface(const OrdinalClassN3& cls, N3Mechanism mech,
                                      double grid_step);

struct SweepResult {
  std::vector<OrdinalClassN3> classes;
  std::vector<MinimizeResult> per_class;
  double global_min = 0.0;  // extrapolated
  int global_class = -1;
  std::array<double, 3> global_argmin{};
};
SweepResult sweep_all_classes(N3Mechanism mech, double grid_step, int refine_rounds);

// Worker cap honoured by the sweeps: MATCHWELFARE_THREADS when set, hardware
// concurrency otherwise, always at least 1.
int worker_count();

}  // namespace matchwelfare::n3
