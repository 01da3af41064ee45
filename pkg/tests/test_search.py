import math

import numpy as np
import pytest

from elasticlb import ValidationError, elastic_distance, make_spec
from elasticlb.search import (Cascade, ExactnessError, SearchStats, inflate, nn_search, run_1nn_benchmark,
                              search_many, tlb_ratios, tlb_summary)

import oracles as O
from conftest import ALL_KINDS


def walks(rng, count, lo=20, hi=24):
    return [np.cumsum(rng.standard_normal(int(rng.integers(lo, hi + 1)))) * 0.3 for _ in range(count)]


def cascades_for(name):
    base = ["glb", "bglb", "glb,bglb"]
    if name == "dtw":
        base += ["kimfl,keogh,bglb", "kim"]
    if name in ("twed", "lcss", "edr", "swale"):
        base += ["dbglb"]
    return base


@pytest.mark.parametrize("name", ALL_KINDS)
def test_nn_matches_naive_scan(name):
    s = make_spec(name)
    rng = np.random.default_rng(ALL_KINDS.index(name) + 100)
    train, queries = walks(rng, 200), walks(rng, 50)
    w = "=4"
    dist = lambda a, b: elastic_distance(s, a, b, w).distance
    expect = [O.naive_nn(dist, train, q) for q in queries]
    for c in cascades_for(name):
        for ea in (True, False):
            res, stats = search_many(s, train, queries, w, Cascade.parse(c, early_abandon=ea))
            assert [(r.index, r.distance) for r in res] == expect
            assert stats.candidates == 200 * 50
            assert stats.pruned + stats.exact_dp_calls == stats.candidates


def test_query_in_train_found_at_zero():
    s = make_spec("erp")
    rng = np.random.default_rng(1)
    train = walks(rng, 30)
    r = nn_search(s, train, train[7], 0.1)
    assert r.index == 7 and r.distance == 0.0


def test_ties_keep_lowest_index():
    s = make_spec("dtw")
    x = [0.0, 1.0, 2.0, 1.0]
    train = [[5.0, 5.0, 5.0, 5.0], list(x), list(x), [0.0, 1.0, 2.0, 1.5]]
    assert nn_search(s, train, x, 1).index == 1


def test_exactly_one_candidate_and_self_distance_swale():
    s = make_spec("swale")
    r = nn_search(s, [[1.0, 2.0]], [1.0, 2.0], None)
    assert r.index == 0 and r.distance == pytest.approx(2.0)


def test_threads_do_not_change_results():
    s = make_spec("msm")
    rng = np.random.default_rng(4)
    train, queries = walks(rng, 60), walks(rng, 12)
    a, sa = search_many(s, train, queries, "=4", threads=1)
    b, sb = search_many(s, train, queries, "=4", threads=4)
    assert [(r.index, r.distance) for r in a] == [(r.index, r.distance) for r in b]
    assert sa.exact_dp_calls == sb.exact_dp_calls
    with pytest.raises(ValidationError):
        search_many(s, train, queries, "=4", threads=0)


def test_cascade_parsing_and_checks():
    assert Cascade.parse("kimfl+bglb").name == "kimfl+bglb"
    assert Cascade.parse("none").stages == ()
    assert Cascade.default_for("dtw").name == "kimfl+bglb"
    assert Cascade.default_for("erp").name == "bglb"
    with pytest.raises(ValidationError):
        nn_search(make_spec("erp"), [[1.0]], [1.0], None, "keogh")
    with pytest.raises(ValidationError):
        Cascade(boundary_mode="x")


def test_inflate():
    assert inflate(math.inf) == math.inf
    assert inflate(2.0) > 2.0 and inflate(0.0) == 0.0


@pytest.mark.parametrize("name", ["erp", "msm", "twed", "lcss", "edr", "swale"])
def test_bglb_prunes_at_least_as_much_as_glb(name):
    s = make_spec(name)
    rng = np.random.default_rng(9)
    train, queries = walks(rng, 80), walks(rng, 15)
    _, g = search_many(s, train, queries, "=4", "glb")
    _, b = search_many(s, train, queries, "=4", "bglb")
    assert b.exact_dp_calls <= g.exact_dp_calls


def test_stats_merge():
    a = SearchStats(1, 10, {"glb": 3}, 7, 2, 0.5)
    a.merge(SearchStats(2, 5, {"glb": 1, "kim": 1}, 3, 0, 0.25))
    assert (a.queries, a.candidates, a.pruned, a.exact_dp_calls) == (3, 15, 5, 10)
    assert a.pruning_ratio == pytest.approx(5 / 15)
    assert SearchStats().pruning_ratio == 0.0


def test_tlb_reference_points():
    s = make_spec("erp")
    rng = np.random.default_rng(2)
    train, test = walks(rng, 8), walks(rng, 5)
    r, excl = tlb_ratios(s, train, test, "=4", "none")
    assert excl == 0 and np.all(r == 0)
    exact = lambda a, b, w: elastic_distance(s, a, b, w).distance
    summ = tlb_summary(s, train, test, "=4", exact)
    assert summ.mean == pytest.approx(1.0) and summ.pairs == 40
    t = tlb_summary(s, train, test, "=4", "bglb")
    assert 0 <= t.min <= t.mean <= t.max <= 1 + 1e-9


def test_tlb_zero_pairs():
    s = make_spec("erp")
    r, excl = tlb_ratios(s, [[1.0, 2.0]], [[1.0, 2.0], [1.0, 3.0]], None, "glb")
    assert excl == 1 and r.size == 1
    with pytest.raises(ValidationError):
        tlb_summary(s, [[1.0, 2.0]], [[1.0, 2.0]], None, "glb")


def test_benchmark_rows():
    s = make_spec("erp")
    rng = np.random.default_rng(3)
    train, test = walks(rng, 30), walks(rng, 6)
    yl = list(range(30))
    rows = run_1nn_benchmark(s, train, test, "=4", ["glb", "bglb"], yl, yl[:6], dataset="toy")
    assert [r["bound"] for r in rows] == ["none", "glb", "bglb"]
    assert rows[0]["dp_calls"] == 30 * 6 and rows[0]["pruned"] == 0
    assert all(r["dataset"] == "toy" and r["queries"] == 6 for r in rows)
    assert rows[1]["dp_calls"] + rows[1]["pruned"] == 180


def test_benchmark_detects_inexact_bound(monkeypatch):
    from elasticlb import search as S
    s = make_spec("erp")
    rng = np.random.default_rng(3)
    train, test = walks(rng, 20), walks(rng, 4)
    orig = S._stage_value

    def broken(stage, *a, **k):
        v = orig(stage, *a, **k)
        return v * 10 + 1 if stage.value == "glb" else v

    monkeypatch.setattr(S, "_stage_value", broken)
    with pytest.raises(ExactnessError):
        run_1nn_benchmark(s, train, test, "=4", ["glb"])
