#include <doctest.h>

#include <cmath>

#include "matchwelfare/mechanisms.hpp"
#include "matchwelfare/profiles.hpp"
#include "matchwelfare/rng.hpp"

using namespace matchwelfare;

namespace {

double max_prob_gap(const AssignmentDistribution& a, const AssignmentDistribution& b) {
  double gap = 0.0;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      gap = std::max(gap, std::abs(a.probs[i][j] - b.probs[i][j]));
    }
  }
  return gap;
}

}  // namespace

TEST_CASE("random priority on the three-agent worst case") {
  const double eps = 0.01;
  const ValuationProfile p = gen_n3_rp_worst(eps);
  const MechanismResult r = rp_exact(p);
  CHECK(r.expected_welfare == doctest::Approx((4.0 + eps) / 3.0).epsilon(1e-13));
  // Identical rankings make the allocation uniform.
  REQUIRE(r.distribution.has_value());
  CHECK(is_doubly_stochastic(*r.distribution, 1e-12));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(r.distribution->probs[i][j] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    }
  }
  double sum = 0.0;
  for (double u : r.per_agent_utility) sum += u;
  CHECK(sum == doctest::Approx(r.expected_welfare).epsilon(1e-13));
}

TEST_CASE("rp_exact distribution is doubly stochastic on random profiles") {
  SplitMix64 seeder(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(seeder.below(5));
    const ValuationProfile p = random_profile(n, Normalization::UnitRange, seeder());
    const MechanismResult r = rp_exact(p);
    REQUIRE(r.distribution.has_value());
    REQUIRE(is_doubly_stochastic(*r.distribution, 1e-10));
    double ew = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) ew += r.distribution->probs[i][j] * p.values[i][j];
    }
    REQUIRE(ew == doctest::Approx(r.expected_welfare).epsilon(1e-10));
  }
}

TEST_CASE("rp_exact equals the anonymized fixed dictatorship") {
  const ValuationProfile p = random_profile(4, Normalization::UnitRange, 2024);
  const MechanismResult direct = rp_exact(p);
  const Mechanism averaged = anonymize(make_fixed_dictatorship({0, 1, 2, 3}));
  const MechanismResult via_avg = averaged.eval_exact(p);
  CHECK(max_prob_gap(*direct.distribution, *via_avg.distribution) < 1e-12);
  CHECK(direct.expected_welfare == doctest::Approx(via_avg.expected_welfare).epsilon(1e-12));
}

TEST_CASE("rp_ordered_fastpath agrees with rp_exact on commonly ordered profiles") {
  const ValuationProfile p = gen_lemma5(9);
  const MechanismResult fast = rp_ordered_fastpath(p);
  const MechanismResult slow = rp_exact(p);
  CHECK(fast.expected_welfare == doctest::Approx(slow.expected_welfare).epsilon(1e-12));
  CHECK(max_prob_gap(*fast.distribution, *slow.distribution) < 1e-12);

  const ValuationProfile mixed = random_profile(4, Normalization::UnitRange, 5);
  CHECK_THROWS_AS(rp_ordered_fastpath(mixed), refusal_error);
}

TEST_CASE("rp_montecarlo lands inside its confidence radius") {
  const ValuationProfile p = random_profile(5, Normalization::UnitRange, 31);
  const MechanismResult exact = rp_exact(p);
  const MechanismResult mc = rp_montecarlo(p, 200'000, 9);
  CHECK(mc.method.kind == EvalMethod::Kind::MonteCarlo);
  CHECK(mc.method.samples == 200'000);
  CHECK(std::abs(mc.expected_welfare - exact.expected_welfare) <= mc.method.ci_radius);
  CHECK(is_doubly_stochastic(*mc.distribution, 1e-2));

  // Same seed, same estimate.
  const MechanismResult mc2 = rp_montecarlo(p, 200'000, 9);
  CHECK(mc.expected_welfare == mc2.expected_welfare);
}

TEST_CASE("rp_exact guards and budget") {
  const ValuationProfile p13 = random_profile(13, Normalization::UnitRange, 8);
  CHECK_THROWS_AS(rp_exact(p13), refusal_error);
  CHECK_THROWS_WITH_AS(rp_exact(p13), doctest::Contains("rp_montecarlo"), refusal_error);

  RpExactOptions tight;
  tight.size_guard = false;
  tight.state_budget_bytes = 10'000;
  CHECK_THROWS_AS(rp_exact(p13, tight), budget_error);

  const ValuationProfile p33 = random_profile(33, Normalization::UnitRange, 8);
  RpExactOptions open;
  open.size_guard = false;
  CHECK_THROWS_AS(rp_exact(p33, open), refusal_error);

  const ValuationProfile tied = make_profile({{1.0, 0.5, 0.5}, {1.0, 0.5, 0.0}, {1.0, 0.5, 0.0}},
                                             Normalization::UnitRange, true);
  CHECK_THROWS_WITH_AS(rp_exact(tied), doctest::Contains("break_ties"), refusal_error);
}

TEST_CASE("serial dictatorship follows the picking order") {
  const ValuationProfile p = make_profile({{1.0, 0.5, 0.0}, {1.0, 0.0, 0.5}, {0.0, 1.0, 0.5}},
                                          Normalization::UnitRange);
  const Matching m = serial_dictatorship(p, {2, 0, 1});
  CHECK(m.assignment == std::vector<int>{0, 2, 1});
  CHECK_THROWS_AS(serial_dictatorship(p, {0, 0, 1}), std::invalid_argument);
}

TEST_CASE("rp_support enumerates the distinct dictatorship outcomes") {
  const ValuationProfile p = gen_n3_rp_worst(0.25);
  const auto support = rp_support(p);
  CHECK(support.size() == 6);
  for (const auto& m : support) CHECK(is_permutation(m.assignment, 3));
  for (std::size_t a = 0; a < support.size(); ++a) {
    for (std::size_t b = a + 1; b < support.size(); ++b) {
      CHECK(support[a].assignment != support[b].assignment);
    }
  }
  const ValuationProfile big = random_profile(9, Normalization::UnitRange, 3);
  CHECK_THROWS_AS(rp_support(big), refusal_error);
}

TEST_CASE("uniform mechanism averages the rows") {
  const ValuationProfile p = make_profile({{1.0, 0.4, 0.0}, {1.0, 0.1, 0.0}, {0.0, 1.0, 0.2}},
                                          Normalization::UnitRange);
  const MechanismResult r = uniform_mechanism(p);
  CHECK(r.per_agent_utility[0] == doctest::Approx(1.4 / 3.0).epsilon(1e-13));
  CHECK(r.expected_welfare == doctest::Approx((1.4 + 1.1 + 1.2) / 3.0).epsilon(1e-13));
  CHECK(is_doubly_stochastic(*r.distribution, 1e-13));
}

TEST_CASE("cubic lottery frozen values and simplex membership") {
  const auto mid = cubic_lottery(0.5);
  CHECK(mid[0] == doctest::Approx(0.71875).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(0.21875).epsilon(1e-15));
  CHECK(mid[2] == doctest::Approx(0.0625).epsilon(1e-15));

  const auto lo = cubic_lottery(0.0);
  CHECK(lo[0] == doctest::Approx(0.75).epsilon(1e-15));
  const auto hi = cubic_lottery(1.0);
  CHECK(hi[2] == doctest::Approx(0.0).epsilon(1e-15));

  for (int t = 0; t <= 100; ++t) {
    const auto probs = cubic_lottery(t / 100.0);
    CHECK(probs[0] + probs[1] + probs[2] == doctest::Approx(1.0).epsilon(1e-14));
    for (double q : probs) CHECK(q >= -1e-15);
  }
  CHECK_THROWS_AS(cubic_lottery(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(cubic_lottery(1.1), std::invalid_argument);
}

TEST_CASE("hybrid mechanism on the three-agent worst case") {
  const ValuationProfile p = gen_n3_rp_worst(1e-9);
  const MechanismResult r = hybrid_mechanism_exact(p);
  CHECK(r.expected_welfare == doctest::Approx(4.375 / 3.0).epsilon(1e-6));
  CHECK(is_doubly_stochastic(*r.distribution, 1e-12));

  const ValuationProfile p4 = random_profile(4, Normalization::UnitRange, 6);
  CHECK_THROWS_WITH_AS(hybrid_mechanism_exact(p4), doctest::Contains("n=3"), refusal_error);
  const ValuationProfile sum3 = random_profile(3, Normalization::UnitSum, 6);
  CHECK_THROWS_AS(hybrid_mechanism_exact(sum3), refusal_error);
}

TEST_CASE("hybrid beats plain random priority on its worst case") {
  const ValuationProfile p = gen_n3_rp_worst(0.01);
  const double hm = hybrid_mechanism_exact(p).expected_welfare;
  const double rp = rp_exact(p).expected_welfare;
  CHECK(hm > rp);
}

TEST_CASE("mechanism bundles declare their properties") {
  const Mechanism rp = make_rp();
  CHECK(rp.ordinal);
  CHECK(rp.anonymous);
  CHECK(rp.neutral);
  CHECK(bool(rp.eval_exact));
  CHECK(bool(rp.eval_mc));
  CHECK(bool(rp.support));

  const Mechanism uni = make_uniform();
  CHECK(uni.ordinal);
  CHECK(uni.anonymous);
  CHECK(uni.neutral);

  const Mechanism hm = make_hybrid();
  CHECK_FALSE(hm.ordinal);
  CHECK(hm.anonymous);
  CHECK(hm.neutral);

  const Mechanism dict = make_fixed_dictatorship({1, 0, 2});
  CHECK(dict.ordinal);
  CHECK_FALSE(dict.anonymous);
  CHECK(dict.neutral);

  const Mechanism opt = make_optimal_mechanism();
  CHECK_FALSE(opt.ordinal);
  CHECK_FALSE(opt.anonymous);
  CHECK_FALSE(opt.neutral);
}

TEST_CASE("mechanism closures agree with the direct calls") {
  const ValuationProfile p = random_profile(4, Normalization::UnitRange, 11);
  CHECK(make_rp().eval_exact(p).expected_welfare ==
        doctest::Approx(rp_exact(p).expected_welfare).epsilon(1e-13));
  CHECK(make_uniform().eval_exact(p).expected_welfare ==
        doctest::Approx(uniform_mechanism(p).expected_welfare).epsilon(1e-13));
}
