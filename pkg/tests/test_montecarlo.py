import math

import pytest

from subscan import (
    Dims,
    ValidationError,
    canonical_support,
    estimate_risk,
    make_support,
    max_gauss_exceedance,
    sweep,
    vector_critical_value,
    vector_risk,
    wilson_interval,
)
from subscan.thresholds import critical_value

Z = 1.959963984540054  # standard normal 0.975 quantile


def wilson_reference(failures, trials):
    # independent transcription of the score interval
    p = failures / trials
    center = (p + Z * Z / (2 * trials)) / (1 + Z * Z / trials)
    half = Z * math.sqrt(p * (1 - p) / trials + Z * Z / (4 * trials * trials)) / (1 + Z * Z / trials)
    return center - half, center + half


def test_wilson_interval_endpoints_closed_form():
    for trials in (50, 200, 1000):
        low, high = wilson_interval(0, trials)
        assert low == 0.0
        assert high == pytest.approx(Z * Z / (trials + Z * Z), rel=1e-12)
        low, high = wilson_interval(trials, trials)
        assert high == 1.0
        assert low == pytest.approx(trials / (trials + Z * Z), rel=1e-12)


def test_wilson_interval_interior_matches_reference():
    for failures, trials in ((3, 50), (77, 200), (150, 200)):
        low, high = wilson_interval(failures, trials)
        ref_low, ref_high = wilson_reference(failures, trials)
        assert low == pytest.approx(ref_low, abs=1e-12)
        assert high == pytest.approx(ref_high, abs=1e-12)
        assert 0.0 <= low <= failures / trials <= high <= 1.0


def test_wilson_guards():
    with pytest.raises(ValidationError):
        wilson_interval(-1, 10)
    with pytest.raises(ValidationError):
        wilson_interval(11, 10)
    with pytest.raises(ValidationError):
        wilson_interval(0, 0)


def test_risk_at_zero_signal_is_chance_level():
    est = estimate_risk(Dims(20, 20, 3, 3), 0.0, 200, seed=11, selector_method="exact")
    assert est.risk >= 0.99
    assert est.failures <= est.trials
    assert 0.0 <= est.ci_low <= est.risk <= est.ci_high <= 1.0


def test_risk_vanishes_well_above_critical():
    d = Dims(20, 20, 3, 3)
    est = estimate_risk(d, 2.0 * critical_value(d), 100, seed=12, selector_method="exact")
    assert est.risk <= 0.1


def test_huge_signal_degenerate_counts():
    est = estimate_risk(Dims(15, 15, 2, 2), 100.0, 50, seed=13, selector_method="exact")
    assert est.failures == 0
    assert est.risk == 0.0
    assert est.ci_low == 0.0
    assert est.mean_overlap == 1.0


def test_estimate_risk_deterministic_across_workers():
    d = Dims(20, 20, 3, 3)
    runs = [
        estimate_risk(d, 1.8, 40, seed=21, selector_method="heuristic", restarts=8, workers=w)
        for w in (1, 4)
    ]
    assert runs[0] == runs[1]


def test_estimate_risk_unaffected_by_thread_env(monkeypatch):
    d = Dims(15, 15, 2, 2)
    serial = estimate_risk(d, 2.0, 24, seed=22, selector_method="exact", workers=1)
    monkeypatch.setenv("SUBSCAN_THREADS", "3")
    via_env = estimate_risk(d, 2.0, 24, seed=22, selector_method="exact")
    assert serial == via_env


def test_risk_does_not_depend_on_planted_location():
    # same protocol, two different planted blocks: estimates agree within
    # twice the combined interval half-widths
    d = Dims(20, 20, 3, 3)
    a = critical_value(d)
    corner = estimate_risk(d, a, 150, seed=31, selector_method="exact")
    middle = estimate_risk(
        d, a, 150, seed=31, selector_method="exact",
        support=make_support(d, [7, 11, 16], [2, 9, 14]),
    )
    half = (corner.ci_high - corner.ci_low) / 2 + (middle.ci_high - middle.ci_low) / 2
    assert abs(corner.risk - middle.risk) <= 2 * half


def test_sweep_single_point_composition():
    d = Dims(20, 20, 3, 3)
    result = sweep(d, [1.0], 50, seed=41, selector_method="exact")
    a_star = critical_value(d)
    assert result.a_star_used == a_star
    (a, est), = result.grid
    assert a == a_star
    assert est == estimate_risk(d, a_star, 50, seed=41, selector_method="exact")


def test_sweep_guards():
    d = Dims(20, 20, 3, 3)
    with pytest.raises(ValidationError):
        sweep(d, [], 10, seed=0)
    with pytest.raises(ValidationError):
        sweep(d, [1.0, 0.5], 10, seed=0)
    with pytest.raises(ValidationError):
        sweep(d, [-1.0, 0.5], 10, seed=0)


def test_sweep_monotone_with_common_random_numbers():
    # exact selector + shared noise: per-trial success is monotone in a, so
    # the risk curve cannot increase along the grid
    d = Dims(20, 20, 3, 3)
    result = sweep(d, [0.4, 0.8, 1.2, 2.0], 100, seed=51, selector_method="exact")
    risks = [est.risk for _, est in result.grid]
    assert all(hi <= lo for lo, hi in zip(risks, risks[1:]))
    assert risks[0] > risks[-1]


def test_sweep_csv_rows_shape():
    d = Dims(15, 15, 2, 2)
    result = sweep(d, [0.5, 1.0], 20, seed=61, selector_method="exact")
    rows = result.csv_rows()
    assert rows[0] == "a,multiplier,risk,ci_low,ci_high,mean_overlap,trials"
    assert len(rows) == 3
    assert all(len(line.split(",")) == 7 for line in rows[1:])


def test_sweep_serializable():
    import json

    d = Dims(15, 15, 2, 2)
    result = sweep(d, [1.0], 20, seed=71, selector_method="exact")
    blob = json.loads(json.dumps(result.to_dict()))
    assert blob["grid"][0]["trials"] == 20


# --- vector case


def test_vector_risk_consistent_regime():
    a = 2.0 * vector_critical_value(10_000, 10)
    est = vector_risk(10_000, 10, a, 200, seed=81)
    assert est.risk <= 0.05
    assert est.selector_method == "vector"


def test_vector_risk_impossible_regime():
    a = 0.5 * vector_critical_value(10_000, 10)
    est = vector_risk(10_000, 10, a, 200, seed=82)
    assert est.risk >= 0.9


def test_vector_risk_zero_signal():
    est = vector_risk(500, 4, 0.0, 100, seed=83)
    assert est.risk >= 0.99


def test_vector_risk_guards():
    with pytest.raises(ValidationError):
        vector_risk(10, 1, 1.0, 100, seed=0)
    with pytest.raises(ValidationError):
        vector_risk(10, 10, 1.0, 100, seed=0)


def test_vector_risk_deterministic_across_workers():
    runs = [vector_risk(2000, 5, 3.0, 60, seed=84, workers=w) for w in (1, 3)]
    assert runs[0] == runs[1]


# --- gaussian maxima


def test_max_gauss_single_draw_is_half():
    prob = max_gauss_exceedance(1, 5.0, 1000, seed=91)
    assert abs(prob - 0.5) <= 0.05


def test_max_gauss_monotone_in_threshold():
    probs = [max_gauss_exceedance(2000, t, 200, seed=92) for t in (0.6, 0.9, 1.1, 1.4)]
    assert all(hi <= lo for lo, hi in zip(probs, probs[1:]))


def test_max_gauss_guards():
    with pytest.raises(ValidationError):
        max_gauss_exceedance(0, 1.0, 400, seed=0)
    with pytest.raises(ValidationError):
        max_gauss_exceedance(10, 1.0, 99, seed=0)


def test_estimate_risk_guards():
    d = Dims(10, 10, 2, 2)
    with pytest.raises(ValidationError):
        estimate_risk(d, 1.0, 0, seed=0)
    with pytest.raises(ValidationError):
        estimate_risk(d, 1.0, 10, seed=0, selector_method="magic")


def test_estimate_risk_brute_force_route():
    d = Dims(8, 8, 2, 2)
    exact = estimate_risk(d, 2.5, 30, seed=95, selector_method="exact")
    brute = estimate_risk(d, 2.5, 30, seed=95, selector_method="brute_force")
    assert exact.failures == brute.failures
    assert exact.mean_overlap == brute.mean_overlap
