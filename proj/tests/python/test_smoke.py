"""End-to-end smoke tests for the python bindings."""

import pytest

import matchwelfare as mw


def test_profile_fields_and_welfare():
    p = mw.Profile([[0.6, 0.4], [0.7, 0.3]], "unit-sum")
    assert p.n == 2
    assert p.normalization == "unit-sum"
    assert not p.has_ties()
    assert mw.validate(p) == []
    assert mw.social_welfare(p, [1, 0]) == pytest.approx(1.1, abs=1e-12)


def test_validate_reports_rule_violations():
    p = mw.Profile([[1.2, -0.2], [0.6, 0.4]], "unit-range")
    rules = {v["rule"] for v in mw.validate(p)}
    assert "max != 1" in rules


def test_cubic_lottery_closed_form():
    probs = mw.cubic_lottery(0.5)
    assert probs == pytest.approx([0.71875, 0.21875, 0.0625], abs=1e-15)
    assert sum(mw.cubic_lottery(0.3)) == pytest.approx(1.0, abs=1e-12)


def test_generate_and_optimal_matching():
    p = mw.generate("lemma5", n=4)
    assert mw.preference_order(p, 0) == [0, 1, 2, 3]
    matching, welfare = mw.optimal_matching(p)
    assert matching == [0, 1, 2, 3]
    assert welfare == pytest.approx(1.8125, abs=1e-12)
    assert mw.serial_dictatorship(p, [2, 0, 1, 3]) == [1, 2, 0, 3]


def test_rp_exact_on_worst_case():
    eps = 0.01
    p = mw.generate("n3worst", eps=eps)
    r = mw.rp_exact(p)
    assert r["exact"] is True
    assert r["expected_welfare"] == pytest.approx((4 + eps) / 3, abs=1e-12)
    for row in r["probs"]:
        assert sum(row) == pytest.approx(1.0, abs=1e-12)
    ratio, mech_welfare, opt_welfare = mw.approximation_ratio(p)
    assert opt_welfare == pytest.approx(2 - eps, abs=1e-12)
    assert ratio == pytest.approx(mech_welfare / opt_welfare, abs=1e-12)


def test_rp_montecarlo_is_seeded_and_consistent():
    p = mw.random_profile(5, "unit-range", 2026)
    a = mw.rp_montecarlo(p, samples=20000, seed=7)
    b = mw.rp_montecarlo(p, samples=20000, seed=7)
    assert a["expected_welfare"] == b["expected_welfare"]
    assert a["exact"] is False
    exact = mw.rp_exact(p)
    assert abs(a["expected_welfare"] - exact["expected_welfare"]) <= a["ci_radius"]


def test_n3_sweep_summary():
    d = mw.n3_sweep("rp", grid=0.2, refine=5)
    assert len(d["classes"]) == 10
    assert sum(c["orbit_size"] for c in d["classes"]) == 216
    assert 0.6 < d["min_ratio"] < 0.7
