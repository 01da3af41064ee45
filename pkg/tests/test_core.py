import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elasticlb import MeasureKind, MeasureParams, TimeSeries, ValidationError, Window, make_spec
from elasticlb.core import delete_cost, match_cost, parse_window, resolve_window, znormalize

from conftest import ALL_KINDS


def test_defaults_per_measure():
    assert MeasureParams.defaults("erp").g == 0.0
    assert MeasureParams.defaults("msm").c == 0.5
    twed = MeasureParams.defaults("twed")
    assert (twed.lam, twed.nu) == (1.0, 0.0001)
    assert MeasureParams.defaults("lcss").epsilon == 0.2
    assert MeasureParams.defaults("edr").epsilon == 0.1
    sw = MeasureParams.defaults("swale")
    assert (sw.epsilon, sw.p, sw.r) == (0.2, 5.0, 1.0)


@pytest.mark.parametrize("bad", [{"c": -1}, {"nu": -0.1}, {"lam": -1}, {"epsilon": -0.2},
                                 {"p": 1.0, "r": 2.0}, {"r": -0.5}, {"g": math.nan}])
def test_invalid_params_rejected(bad):
    with pytest.raises(ValidationError):
        make_spec("swale", **bad)


def test_unknown_measure_and_param():
    with pytest.raises(ValidationError):
        make_spec("foo")
    with pytest.raises(ValidationError):
        make_spec("dtw", zeta=1.0)


def test_timeseries_validation():
    with pytest.raises(ValidationError):
        TimeSeries([])
    with pytest.raises(ValidationError):
        TimeSeries([1.0, math.nan])
    with pytest.raises(ValidationError):
        TimeSeries([[1.0, 2.0]])
    ts = TimeSeries([1, 2, 3], label=7)
    assert len(ts) == 3 and ts.label == 7
    with pytest.raises(ValueError):
        ts.values[0] = 5.0


def test_window_parsing_and_rounding():
    assert parse_window("=7").radius == 7
    assert parse_window("0.05").fraction == 0.05
    assert parse_window(None).is_full
    assert parse_window("full").is_full
    # round half away from zero: 0.05 * 150 = 7.5 -> 8; 0.05 * 30 = 1.5 -> 2
    assert Window(fraction=0.05).radius_for(150, 150) == 8
    assert Window(fraction=0.05).radius_for(30, 30) == 2
    assert Window(fraction=0.05).radius_for(24, 24) == 1
    with pytest.raises(ValidationError):
        parse_window("=1.5")
    with pytest.raises(ValidationError):
        Window(radius=-1)


def test_infeasible_window_raises():
    with pytest.raises(ValidationError):
        resolve_window(1, 5, 8)
    assert resolve_window(3, 5, 8) == 3


def test_erp_costs_match_worked_example():
    s = make_spec("erp", g=1.0)
    assert match_cost(s, [5.0], 0, [6.0], 0) == 1.0
    assert delete_cost(s, [0.0], 0) == 1.0
    X = [5, 2, 3, 7, 4]
    assert [delete_cost(s, X, i) for i in range(5)] == [16, 1, 4, 36, 9]


def test_msm_delete_constant():
    s = make_spec("msm")
    assert all(delete_cost(s, [3.0, -1.0, 8.0], i) == 0.5 for i in range(3))


@pytest.mark.parametrize("name", ALL_KINDS)
def test_identity_match_cost(name):
    s = make_spec(name)
    x = [0.4, 1.2, 1.2, -0.3]
    expected = 1.0 if name == "swale" else 0.0
    assert match_cost(s, x, 2, x, 2) == expected


def test_twed_match_cost_formula():
    s = make_spec("twed", nu=0.0001)
    rng = np.random.default_rng(5)
    for _ in range(50):
        x, q = rng.standard_normal(6), rng.standard_normal(6)
        i, j = 2, 2 + int(rng.integers(-1, 3))
        # |x_i - q_j| + |x_{i-1} - q_{j-1}| + nu (|t_i - t_j| + |t_{i-1} - t_{j-1}|)
        expect = abs(x[i] - q[j]) + abs(x[i - 1] - q[j - 1]) + 0.0001 * (abs(i - j) + abs(i - j))
        assert match_cost(s, x, i, q, j) == pytest.approx(expect, rel=1e-12)
    # padding at the first element
    assert match_cost(s, [2.0, 1.0], 0, [0.5, 1.0], 0) == pytest.approx(1.5)
    assert delete_cost(s, [2.0, 1.0], 0) == pytest.approx(2.0 + 0.0001 + 1.0)


def test_dtw_delete_is_window_minimum():
    s = make_spec("dtw")
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(1, 10))
        x, q = rng.standard_normal(n), rng.standard_normal(n)
        w = int(rng.integers(0, n))
        i = int(rng.integers(0, n))
        scan = min(match_cost(s, x, i, q, j) for j in range(n) if abs(i - j) <= w)
        assert delete_cost(s, x, i, q, w) == pytest.approx(scan)
    with pytest.raises(ValidationError):
        delete_cost(s, [1.0], 0)


def test_costs_non_negative_random_contexts():
    rng = np.random.default_rng(2024)
    specs = [make_spec(k) for k in ALL_KINDS]
    for _ in range(10_000 // len(specs)):
        x = rng.standard_normal(3) * 3
        q = rng.standard_normal(3) * 3
        for s in specs:
            assert match_cost(s, x, 1, q, 1) >= 0
            assert delete_cost(s, x, 1, q, 1) >= 0


def test_index_out_of_range():
    with pytest.raises(ValidationError):
        match_cost(make_spec("dtw"), [1.0], 1, [1.0], 0)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ALL_KINDS), st.floats(0, 50), st.floats(0, 50), st.integers(1, 20), st.integers(1, 20))
def test_transforms_monotone(name, a, b, n, m):
    s = make_spec(name)
    lo, hi = min(a, b), max(a, b)
    if s.kind == MeasureKind.LCSS:
        # similarity: higher raw means smaller distance; lb raw is a distance
        lo, hi = min(lo, min(n, m)), min(hi, min(n, m))
        assert s.trans(lo, n, m) >= s.trans(hi, n, m)
    else:
        assert s.trans(lo, n, m) <= s.trans(hi, n, m)
    assert s.lb_trans(lo, n, m) <= s.lb_trans(hi, n, m)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(ALL_KINDS), st.floats(0, 10), st.integers(1, 10), st.integers(1, 10),
       st.floats(0, 60))
def test_lb_raw_cutoff_consistent(name, kappa, n, m, raw):
    s = make_spec(name)
    t = s.lb_raw_cutoff(kappa, n, m)
    if raw > t:
        assert s.lb_trans(raw, n, m) > kappa - 1e-12


def test_znormalize():
    z = znormalize([1.0, 2.0, 3.0])
    assert abs(z.mean()) < 1e-12 and abs(z.std() - 1) < 1e-12
    assert np.all(znormalize([4.0, 4.0]) == 0)
