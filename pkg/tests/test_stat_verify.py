import json

import numpy as np
import pytest

from combwalk import (
    HazardFamily,
    CombSpec,
    VerificationScenario,
    constant_comb,
    drift_l1,
    empirical_char_fn,
    format_report,
    hill_estimate,
    ks_distance,
    power_comb,
    verify_regime,
)


# ---------------------------------------------------------------------------
# KS distance


def test_ks_exact_on_lattice_sample():
    n = 100
    x = (np.arange(1, n + 1) - 0.5) / n
    assert ks_distance(x, lambda v: v) == pytest.approx(0.5 / n)


def test_ks_detects_location_shift():
    x = np.random.default_rng(0).random(2000)
    assert ks_distance(x, lambda v: np.clip(v - 0.2, 0, 1)) > 0.15


def test_ks_uniform_draws_are_close():
    x = np.random.default_rng(5).random(100000)
    assert ks_distance(x, lambda v: v) < 0.008


def test_ks_two_sample():
    x = np.random.default_rng(1).random(5000)
    assert ks_distance(x, x) == 0.0
    assert ks_distance(x, x + 10.0) == 1.0
    y = np.random.default_rng(2).random(5000)
    d = ks_distance(x, y)
    assert 0.0 < d < 0.04


def test_ks_validation():
    with pytest.raises(ValueError):
        ks_distance([1.0], lambda v: v)
    with pytest.raises(ValueError):
        ks_distance([1.0, 2.0], [3.0])


# ---------------------------------------------------------------------------
# Hill estimator


def test_hill_on_exact_pareto():
    u = np.random.default_rng(3).random(1000000)
    x = u ** (-2.0)                      # tail index 1/2
    res = hill_estimate(x, 0.01)
    assert res.k == 10000
    assert res.alpha == pytest.approx(0.5, abs=0.03)
    assert res.ci[0] < res.alpha < res.ci[1]
    assert res.ci[1] - res.ci[0] < 0.05
    assert "HillResult" in repr(res)


def test_hill_is_scale_free():
    u = np.random.default_rng(4).random(20000)
    x = u ** (-1.0 / 1.3)
    a1 = hill_estimate(x, 0.05).alpha
    a2 = hill_estimate(1e6 * x, 0.05).alpha
    assert a1 == pytest.approx(a2, rel=1e-9)


def test_hill_on_run_length_draws():
    law = power_comb(0.7).down_law
    x = law.sample(np.random.default_rng(6), size=200000)
    res = hill_estimate(x, 0.01)
    assert res.alpha == pytest.approx(0.7, abs=0.06)


def test_hill_ignores_nonpositive_values():
    u = np.random.default_rng(7).random(50000)
    x = u ** (-2.0)
    salted = np.concatenate([x, -np.ones(100000), np.zeros(5000)])
    res = hill_estimate(salted, 0.01)
    assert res.k == 500
    assert res.alpha == pytest.approx(0.5, abs=0.1)


def test_hill_validation():
    with pytest.raises(ValueError):
        hill_estimate(np.ones(1000), 0.5)          # k_frac out of range
    with pytest.raises(ValueError, match="tail exceedances"):
        hill_estimate(np.arange(1, 500, dtype=float), 0.01)
    with pytest.raises(ValueError, match="declined"):
        hill_estimate(np.ones(10000), 0.01)        # flat top statistics


# ---------------------------------------------------------------------------
# empirical characteristic function


def test_ecf_trivial_points():
    x = np.random.default_rng(8).normal(size=1000)
    phi, se = empirical_char_fn(x, [0.0])
    assert phi[0] == pytest.approx(1.0 + 0.0j)
    assert se[0] == pytest.approx(0.0, abs=1e-15)


def test_ecf_symmetric_sample_is_real():
    x = np.random.default_rng(9).normal(size=4000)
    sym = np.concatenate([x, -x])
    phi, _ = empirical_char_fn(sym, [0.7, 1.9])
    assert np.max(np.abs(phi.imag)) < 1e-14


def test_ecf_matches_gaussian_within_se():
    x = np.random.default_rng(10).normal(size=200000)
    u = np.array([0.3, 1.0, 2.0])
    phi, se = empirical_char_fn(x, u)
    target = np.exp(-u ** 2 / 2.0)
    assert np.all(np.abs(phi - target) < 4.0 * se)
    assert np.all(se < 0.005)


def test_ecf_validation():
    with pytest.raises(ValueError):
        empirical_char_fn([], [1.0])


# ---------------------------------------------------------------------------
# drift deviation


def test_drift_l1_zigzag_is_exact():
    zig = constant_comb(1.0, 1.0)
    assert drift_l1(zig, 1000, 1000, seed=0) == 0.0
    assert drift_l1(zig, 1001, 1000, seed=0) == pytest.approx(1.0 / 1001)


def test_drift_l1_decays_with_n():
    comb = constant_comb(0.2, 0.4)
    d_short = drift_l1(comb, 2000, 2000, seed=12)
    d_long = drift_l1(comb, 50000, 2000, seed=12)
    assert d_long < 0.01
    assert d_long < d_short


def test_drift_l1_validation():
    with pytest.raises(ValueError):
        drift_l1(constant_comb(0.5, 0.5), 999, 2000, seed=0)


# ---------------------------------------------------------------------------
# scenario container


def scenario_dict():
    return {
        "name": "unit",
        "comb": constant_comb(0.5, 0.5).to_dict(),
        "regime": "gaussian",
        "u": 400,
        "replicas": 3000,
        "times": [2.0, 4.0],
        "tol_ks": 0.06,
        "seed": 3,
    }


def test_scenario_roundtrip():
    sc = VerificationScenario.from_dict(scenario_dict())
    d = sc.to_dict()
    assert d["u"] == 400.0 and d["replicas"] == 3000
    assert d["times"] == [2.0, 4.0]
    assert d["tol_increment"] == d["tol_ks"]
    again = VerificationScenario.from_dict(d)
    assert again.comb.to_dict() == sc.comb.to_dict()
    assert again.seed == 3


def test_scenario_sorts_times():
    d = scenario_dict()
    d["times"] = [2.0, 0.5, 1.0]
    sc = VerificationScenario.from_dict(d)
    assert sc.times == [0.5, 1.0, 2.0]


def test_scenario_validation():
    base = scenario_dict()
    for key, bad in (("replicas", 999), ("u", 0.0), ("times", []),
                     ("times", [-1.0, 2.0])):
        d = dict(base)
        d[key] = bad
        with pytest.raises(ValueError):
            VerificationScenario.from_dict(d)
    d = dict(base)
    d["u"], d["times"] = 0.5, [1.0]       # covers less than one step
    with pytest.raises(ValueError):
        VerificationScenario.from_dict(d)
    d = dict(base)
    del d["tol_ks"]
    with pytest.raises(ValueError, match="missing key"):
        VerificationScenario.from_dict(d)


def test_scenario_json_io(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(scenario_dict()))
    sc = VerificationScenario.from_json(p)
    assert sc.name == "unit"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ValueError, match="not valid JSON"):
        VerificationScenario.from_json(bad)


# ---------------------------------------------------------------------------
# end-to-end verification


def test_verify_gaussian_scenario_passes():
    sc = VerificationScenario.from_dict(scenario_dict())
    rep = verify_regime(sc)
    assert rep["pass"] is True
    names = [c["name"] for c in rep["checks"]]
    assert "marginal t=2" in names
    assert any(n.startswith("increment") for n in names)
    assert all(c["ks"] < c["tol"] for c in rep["checks"])


def test_verify_anomalous_scenario_passes():
    sc = VerificationScenario(power_comb(0.5), "anomalous", 400, 1500,
                              [1.0, 2.0], 0.08, seed=5)
    rep = verify_regime(sc)
    assert rep["pass"] is True
    mods = [c for c in rep["checks"] if c["name"].startswith("Lipschitz")]
    assert len(mods) == 1 and mods[0]["ks"] <= 1.0 + 1e-12


def test_verify_negative_control_fails():
    sc = VerificationScenario(power_comb(0.5), "anomalous", 400, 1500,
                              [1.0], 0.08, seed=5,
                              reference={"alpha": 0.85})
    rep = verify_regime(sc)
    assert rep["pass"] is False


def test_verify_regime_mismatch_raises():
    sc = VerificationScenario(constant_comb(0.5, 0.5), "anomalous", 400,
                              1500, [1.0], 0.08)
    with pytest.raises(ValueError, match="classifies as"):
        verify_regime(sc)


def test_verify_deterministic_across_threads():
    sc = VerificationScenario.from_dict(scenario_dict())
    rep1 = verify_regime(sc, threads=1)
    rep2 = verify_regime(sc, threads=4)
    assert [c["ks"] for c in rep1["checks"]] == \
        [c["ks"] for c in rep2["checks"]]
    rep3 = verify_regime(sc, seed=99)
    assert rep3["seed"] == 99
    assert [c["ks"] for c in rep3["checks"]] != \
        [c["ks"] for c in rep1["checks"]]


def test_report_formatting():
    sc = VerificationScenario.from_dict(scenario_dict())
    text = format_report(verify_regime(sc))
    assert "scenario : unit" in text
    assert "[PASS]" in text
    assert text.rstrip().endswith("RESULT: PASS")
    fake = {"name": "x", "regime": "gaussian", "u": 1.0, "replicas": 1000,
            "times": [1.0], "seed": 0, "threads": 1, "runtime_s": 0.1,
            "checks": [{"name": "c", "ks": 0.5, "tol": 0.1, "pass": False}],
            "pass": False}
    text = format_report(fake)
    assert "[FAIL]" in text and "RESULT: FAIL" in text
