import numpy as np
import pytest

from elasticlb import ValidationError, elastic_distance, make_spec
from elasticlb.clustering import NOISE, DbscanParams, auto_eps, dbscan, range_query

import oracles as O
from conftest import ALL_KINDS


def blobs(rng, k=3, per=12, n=16):
    out = []
    for c in range(k):
        proto = np.cumsum(rng.standard_normal(n))
        out += [proto + 0.25 * rng.standard_normal(n) for _ in range(per)]
    out += [np.cumsum(rng.standard_normal(n)) * 2 for _ in range(4)]
    order = rng.permutation(len(out))
    return [out[i] for i in order]


def matrix(s, data, w):
    N = len(data)
    return np.array([[elastic_distance(s, data[i], data[j], w).distance for j in range(N)] for i in range(N)])


@pytest.mark.parametrize("name", ALL_KINDS)
def test_dbscan_matches_naive(name):
    s = make_spec(name)
    rng = np.random.default_rng(50 + ALL_KINDS.index(name))
    data = blobs(rng)
    D = matrix(s, data, "=2")
    off = D[~np.eye(len(data), dtype=bool)]
    eps = float(np.quantile(off, 0.15))
    labels, core = O.naive_dbscan(D, eps, 4)
    cascades = ["none", "glb", "bglb"] + (["dbglb"] if name in ("twed", "lcss", "edr", "swale") else [])
    for c in cascades:
        res = dbscan(s, data, DbscanParams(eps=eps, min_pts=4), "=2", c)
        assert np.array_equal(res.labels, labels)
        assert np.array_equal(res.core, core)


def test_everything_one_cluster_or_all_noise():
    s = make_spec("erp")
    rng = np.random.default_rng(0)
    data = blobs(rng)
    big = dbscan(s, data, DbscanParams(eps=1e9, min_pts=3), "=2")
    assert big.n_clusters == 1 and np.all(big.labels == 0) and big.core.all()
    tiny = dbscan(s, data, DbscanParams(eps=1e-12, min_pts=2), "=2")
    assert np.all(tiny.labels == NOISE) and tiny.n_clusters == 0
    single = dbscan(s, data, DbscanParams(eps=1e-12, min_pts=1), "=2")
    assert sorted(single.labels) == list(range(len(data)))


def test_bglb_needs_no_more_dp_than_glb():
    s = make_spec("msm")
    data = blobs(np.random.default_rng(5))
    g = dbscan(s, data, DbscanParams(eps=2.0, min_pts=4), "=2", "glb")
    b = dbscan(s, data, DbscanParams(eps=2.0, min_pts=4), "=2", "bglb")
    assert b.stats.exact_dp_calls <= g.stats.exact_dp_calls
    assert np.array_equal(b.labels, g.labels)


def test_range_query_inclusive():
    s = make_spec("erp")
    data = [[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]
    d = elastic_distance(s, data[0], data[1], 1).distance
    assert range_query(s, data, 0, d, 1) == [0, 1]
    with pytest.raises(ValidationError):
        range_query(s, data, 5, 1.0, 1)


def test_params_validation():
    for bad in (dict(), dict(eps=1.0, eps_percentile=0.1), dict(eps=-1.0), dict(eps=float("inf")),
                dict(eps=1.0, min_pts=0), dict(eps_percentile=1.5)):
        with pytest.raises(ValidationError):
            DbscanParams(**bad)


def test_auto_eps():
    s = make_spec("edr")
    with pytest.raises(ValidationError):
        auto_eps(s, [[1.0, 1.0]] * 4, 0.5, None)
    data = [[0.0, 0.0]] * 3 + [[5.0, 5.0]]
    assert auto_eps(s, data, 0.0, None) == pytest.approx(2.0)
    rng = np.random.default_rng(1)
    big = blobs(rng, per=20)
    assert auto_eps(s, big, 0.3, "=2", seed=3) == auto_eps(s, big, 0.3, "=2", seed=3)
    res = dbscan(s, big, DbscanParams(eps_percentile=0.3, min_pts=4), "=2")
    assert res.eps > 0
