"""Acceptance criteria, each run at its stated size and tolerance.

Criterion 6 reads UCR files from ``$ELASTICLB_UCR_DIR`` (default
``/root/ucr_data``) and is skipped when they are missing.
"""
import math
import os
import time

import numpy as np
import pytest

from elasticlb import MeasureKind, bglb, build_envelope, elastic_distance, glb, make_spec
from elasticlb import bounds as B
from elasticlb.clustering import DbscanParams, dbscan
from elasticlb.envelopes import naive_envelope
from elasticlb.graph import InducedGraph, min_edge_cover
from elasticlb.io import load_ucr_tsv
from elasticlb.search import Cascade, search_many, tlb_summary
from elasticlb.verify import check_pair, property_sweep, sample_pair

import oracles as O
from conftest import record

TOL = 1e-9
UCR_DIR = os.environ.get("ELASTICLB_UCR_DIR", "/root/ucr_data")
UCR_SETS = ["GunPoint", "ArrowHead", "ItalyPowerDemand"]
FILTERED = ["erp", "msm", "twed", "lcss", "edr", "swale"]


def test_c1_golden_examples():
    erp = make_spec("erp", g=1.0)
    raw = elastic_distance(erp, [0, 5, 3, 7, 4], [6, 3, 6, 5, 2], None).raw
    X, Q = [5, 2, 3, 7, 4], [2, 3, 4, 5, 10]
    b = bglb(erp, X, Q, 1, boundary_mode="none")
    g = glb(erp, X, Q, 1, boundary_mode="none")
    checks = [abs(raw - 5) <= TOL, abs(b.forward[0] - 5) <= TOL, abs(b.forward[1] - 8) <= TOL,
              abs(b.reverse[0] - 9) <= TOL, abs(b.reverse[1] - 4) <= TOL, abs(b.value - 13) <= TOL,
              abs(g.value - 9) <= TOL]
    ok = all(checks)
    record(1, ok, f"ERP={raw!r}, directions {b.forward}/{b.reverse}, BGLB={b.value!r}, GLB={g.value!r}")
    assert ok


@pytest.fixture(scope="module")
def validity_sweep():
    rng = np.random.default_rng(20240601)
    failures = {"validity": [], "dominance": []}
    t0 = time.perf_counter()
    pairs = 0
    for kind in MeasureKind:
        spec = make_spec(kind)
        for _ in range(10_000):
            x, q, w = sample_pair(rng, 2, 12)
            pairs += 1
            for f in check_pair(spec, x, q, w, None, chain=False):
                key = "dominance" if "below glb" in f else "validity"
                failures[key].append(f"{f} (x={list(x)}, q={list(q)}, w={w})")
    return failures, pairs, time.perf_counter() - t0


def test_c2_validity(validity_sweep):
    failures, pairs, secs = validity_sweep
    ok = not failures["validity"] and secs < 60
    record(2, ok, f"{pairs} pairs, {len(failures['validity'])} violations, {secs:.1f} s")
    assert not failures["validity"], failures["validity"][:5]
    assert secs < 60


def test_c3_dominance(validity_sweep):
    failures, pairs, _ = validity_sweep
    ok = not failures["dominance"]
    record(3, ok, f"{pairs} pairs, {len(failures['dominance'])} pairs where BGLB or DBGLB fell below GLB")
    assert ok, failures["dominance"][:5]


def test_c4_weight_cover_dp_chain():
    t0 = time.perf_counter()
    rep = property_sweep(tuple(MeasureKind), trials=1000, seed=7, max_len=12, max_total=20, chain=True)
    ok = rep.ok and rep.trials == 7000
    record(4, ok, f"{rep.trials} pairs with n+m<=20, {len(rep.failures)} failures, "
                  f"{time.perf_counter() - t0:.1f} s")
    assert ok, rep.failures[:5]


def _dataset(rng, size, lo, hi):
    protos = [np.cumsum(rng.standard_normal(hi)) * 0.4 for _ in range(3)]
    out = []
    for _ in range(size):
        n = int(rng.integers(lo, hi + 1))
        p = protos[int(rng.integers(3))][:n]
        out.append(p + 0.3 * rng.standard_normal(n))
    return out


def test_c5_workload_exactness():
    rng = np.random.default_rng(555)
    mismatches = []
    runs = 0
    for kind in MeasureKind:
        spec = make_spec(kind)
        names = [b for b in ("kimfl", "kim", "keogh", "glb", "bglb", "dbglb") if B.supports(b, kind)]
        combos = names + ["glb,bglb"] + (["kimfl,keogh,bglb"] if kind == MeasureKind.DTW else [])
        for k in range(20):
            window = "=3" if k % 2 == 0 else 0.1
            lo, hi = (18, 21) if k % 2 == 0 else (20, 20)
            train, test = _dataset(rng, 40, lo, hi), _dataset(rng, 8, lo, hi)
            ref, _ = search_many(spec, train, test, window, Cascade.unfiltered())
            ref = [(r.index, r.distance) for r in ref]
            data = train[:30]
            D = [[elastic_distance(spec, a, b, window).distance for b in data] for a in data]
            off = np.asarray(D)[~np.eye(len(data), dtype=bool)]
            params = DbscanParams(eps=float(np.quantile(off, 0.1)), min_pts=3)
            base = dbscan(spec, data, params, window, Cascade.unfiltered())
            for c in combos:
                for ea in (True, False):
                    cas = Cascade.parse(c, early_abandon=ea)
                    got, _ = search_many(spec, train, test, window, cas)
                    runs += 1
                    if [(r.index, r.distance) for r in got] != ref:
                        mismatches.append(f"{spec.name} dataset {k} nn {cas.name}")
                res = dbscan(spec, data, params, window, Cascade.parse(c))
                runs += 1
                if not (np.array_equal(res.labels, base.labels) and np.array_equal(res.core, base.core)):
                    mismatches.append(f"{spec.name} dataset {k} dbscan {c}")
    ok = not mismatches
    record(5, ok, f"{runs} filtered runs on 20 datasets per measure, {len(mismatches)} mismatches")
    assert ok, mismatches[:5]


def _ucr_available():
    return all(os.path.exists(os.path.join(UCR_DIR, f"{d}_{s}.tsv")) for d in UCR_SETS for s in ("TRAIN", "TEST"))


@pytest.mark.slow
@pytest.mark.skipif(not _ucr_available(), reason="UCR files not found; set ELASTICLB_UCR_DIR")
def test_c6_real_data_ordering():
    lines, bad = [], []
    for ds in UCR_SETS:
        tr = load_ucr_tsv(os.path.join(UCR_DIR, f"{ds}_TRAIN.tsv")).values
        te = load_ucr_tsv(os.path.join(UCR_DIR, f"{ds}_TEST.tsv")).values
        for m in FILTERED:
            spec = make_spec(m)
            tg = tlb_summary(spec, tr, te, 0.05, "glb").mean
            tb = tlb_summary(spec, tr, te, 0.05, "bglb").mean
            rg, sg = search_many(spec, tr, te, 0.05, "glb")
            rb, sb = search_many(spec, tr, te, 0.05, "bglb")
            assert [r.index for r in rg] == [r.index for r in rb]
            row = f"{ds}/{m}: TLB {tg:.4f}->{tb:.4f}, DP calls {sg.exact_dp_calls}->{sb.exact_dp_calls}"
            lines.append(row)
            print(row)
            if not (tb > tg and sb.exact_dp_calls < sg.exact_dp_calls):
                bad.append(row)
    ok = not bad
    record(6, ok, f"{len(lines)} dataset/measure cases, {len(bad)} without strict improvement")
    assert ok, bad


def _random_graph(rng, n, m):
    w = max(int(rng.integers(0, max(n, m) + 1)), abs(n - m))
    cross = np.full((n, m), np.inf)
    for i in range(n):
        for j in range(m):
            if abs(i - j) <= w:
                cross[i, j] = rng.choice([0.0, 1.0, 2.0, rng.random() * 5])
    return InducedGraph(cross, rng.choice([0.5, 1.0, 3.0], n) * rng.random(n) * 2,
                        rng.choice([0.5, 1.0, 3.0], m) * rng.random(m) * 2, w)


def test_c7_oracle_self_consistency():
    rng = np.random.default_rng(77)
    cover_bad, subset_checked = 0, 0
    for _ in range(1000):
        n = int(rng.integers(1, 10))
        m = int(rng.integers(1, 11 - n))
        g = _random_graph(rng, n, m)
        got = min_edge_cover(g).weight
        ref = O.cover_by_matchings(g.cross, g.self_x, g.self_q)
        if int(np.isfinite(g.cross).sum()) + n + m <= 14:
            subset_checked += 1
            ref2 = O.cover_by_subsets(g.cross, g.self_x, g.self_q)
            if abs(ref - ref2) > TOL:
                cover_bad += 1
        if abs(got - ref) > TOL * max(1.0, ref):
            cover_bad += 1
    env_bad = 0
    for _ in range(10_000):
        n = int(rng.integers(1, 40))
        w = int(rng.integers(0, 45))
        length = int(rng.integers(max(1, n - w), n + w + 1))
        x = rng.integers(-3, 4, n).astype(float) if rng.random() < 0.5 else rng.standard_normal(n)
        a, b = build_envelope(x, w, length), naive_envelope(x, w, length)
        if not (np.array_equal(a.upper, b.upper) and np.array_equal(a.lower, b.lower)):
            env_bad += 1
    ok = cover_bad == 0 and env_bad == 0
    record(7, ok, f"1000 covers ({subset_checked} also by edge subsets), {cover_bad} mismatches; "
                  f"10000 envelopes, {env_bad} mismatches")
    assert ok
