"""Brute-force graph oracle for the lower bounds.

The pair ``(x, q)`` induces a bipartite graph whose cross edges join ``x[i]``
and ``q[j]`` for ``|i - j| <= w`` with the match cost, plus a self-loop on
every element carrying its deletion cost. Every admissible DP path yields an
edge cover no more expensive than the path, so the minimum edge cover
weight is sandwiched between any dual-feasible weight sum and the DP value.
These routines are meant for small inputs and for checking the bounds.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (MeasureKind, MeasureSpec, TSLike, ValidationError, WindowLike, as_values,
                   delete_cost, match_cost, resolve_window)
from .dp import raw_cost

__all__ = [
    "InducedGraph",
    "CoverResult",
    "ChainReport",
    "build_graph",
    "min_edge_cover",
    "check_dual_feasible",
    "verify_bound_chain",
    "dp_raw_lb_domain",
]

DUAL_TOL = 1e-9


@dataclass(frozen=True)
class InducedGraph:
    """Bipartite graph of a series pair.

    ``cross[i, j]`` is the edge weight or ``inf`` if ``x[i]`` and ``q[j]`` are
    not window-adjacent; ``self_x`` and ``self_q`` are the self-loop weights.
    """

    cross: np.ndarray
    self_x: np.ndarray
    self_q: np.ndarray
    radius: int

    @property
    def n(self) -> int:
        return int(self.self_x.shape[0])

    @property
    def m(self) -> int:
        return int(self.self_q.shape[0])

    def edges(self) -> List[Tuple[int, int, float]]:
        """Cross edges as ``(i, j, weight)`` triples."""
        ii, jj = np.nonzero(np.isfinite(self.cross))
        return [(int(i), int(j), float(self.cross[i, j])) for i, j in zip(ii, jj)]


@dataclass(frozen=True)
class CoverResult:
    """Minimum edge cover: total weight, chosen cross edges and self-loops."""

    weight: float
    cross: Tuple[Tuple[int, int], ...]
    loops_x: Tuple[int, ...]
    loops_q: Tuple[int, ...]


def build_graph(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None) -> InducedGraph:
    """Construct the induced graph of ``(x, q)`` under ``spec`` and the band."""
    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    cross = np.full((n, m), np.inf)
    for i in range(n):
        for j in range(max(0, i - w), min(m, i + w + 1)):
            cross[i, j] = match_cost(spec, xv, i, qv, j)
    self_x = np.array([delete_cost(spec, xv, i, qv, w) for i in range(n)])
    self_q = np.array([delete_cost(spec, qv, j, xv, w) for j in range(m)])
    if np.any(cross < 0) or np.any(self_x < 0) or np.any(self_q < 0):
        raise ValidationError("negative edge weight; check the measure parameters")
    return InducedGraph(cross, self_x, self_q, w)


def _cheapest(graph: InducedGraph):
    mu_x = np.minimum(graph.self_x, graph.cross.min(axis=1))
    mu_q = np.minimum(graph.self_q, graph.cross.min(axis=0))
    return mu_x, mu_q


def _cover_enumerate(graph: InducedGraph) -> CoverResult:
    # Every cover contains, for each vertex of the smaller side, one edge
    # covering it; the remaining vertices of the larger side then each pay
    # their cheapest incident edge. Enumerating the per-vertex choices of the
    # smaller side is therefore exhaustive.
    cross = graph.cross
    loops_a, loops_b = graph.self_x, graph.self_q
    flipped = graph.n > graph.m
    if flipped:
        cross = cross.T
        loops_a, loops_b = loops_b, loops_a
    na, nb = cross.shape
    mu_b = np.minimum(loops_b, cross.min(axis=0))
    unc = np.zeros(1 << nb)
    for mask in range(1 << nb):
        unc[mask] = sum(mu_b[v] for v in range(nb) if not mask >> v & 1)
    options = []
    for a in range(na):
        opts = [(float(loops_a[a]), 0, -1)]
        opts += [(float(cross[a, b]), 1 << b, b) for b in range(nb) if np.isfinite(cross[a, b])]
        options.append(opts)
    best = math.inf
    best_pick = None
    for pick in itertools.product(*options):
        mask = 0
        s = 0.0
        for cost, bit, _ in pick:
            s += cost
            mask |= bit
        total = s + unc[mask]
        if total < best:
            best = total
            best_pick = pick
    covered = 0
    pairs, la, lb = [], [], []
    for a, (_, bit, b) in enumerate(best_pick):
        if b < 0:
            la.append(a)
        else:
            pairs.append((a, b))
        covered |= bit
    for b in range(nb):
        if not covered >> b & 1:
            a_best = int(np.argmin(cross[:, b]))
            if cross[a_best, b] < loops_b[b]:
                pairs.append((a_best, b))
            else:
                lb.append(b)
    if flipped:
        pairs = [(b, a) for a, b in pairs]
        la, lb = lb, la
    return CoverResult(float(best), tuple(sorted(pairs)), tuple(sorted(la)), tuple(sorted(lb)))


def _cover_assignment(graph: InducedGraph) -> CoverResult:
    # min cover = sum of cheapest incident edges + min-weight matching on the
    # reduced weights w(i, j) - mu_x[i] - mu_q[j]
    n, m = graph.n, graph.m
    mu_x, mu_q = _cheapest(graph)
    finite = np.isfinite(graph.cross)
    reduced = np.where(finite, graph.cross - mu_x[:, None] - mu_q[None, :], 0.0)
    big = 1.0 + float(np.abs(reduced).sum())
    cost = np.zeros((n + m, m + n))
    cost[:n, :m] = np.where(finite & (reduced < 0), reduced, big)
    cost[:n, m:] = big
    cost[np.arange(n), m + np.arange(n)] = 0.0
    cost[n:, :m] = big
    cost[n + np.arange(m), np.arange(m)] = 0.0
    rows, cols = linear_sum_assignment(cost)
    pairs = set()
    matched_x, matched_q = set(), set()
    for r, c in zip(rows, cols):
        if r < n and c < m and cost[r, c] < big:
            pairs.add((int(r), int(c)))
            matched_x.add(int(r))
            matched_q.add(int(c))
    loops_x, loops_q = [], []
    for i in range(n):
        if i in matched_x:
            continue
        j = int(np.argmin(graph.cross[i]))
        if graph.cross[i, j] < graph.self_x[i]:
            pairs.add((i, j))
        else:
            loops_x.append(i)
    for j in range(m):
        if j in matched_q:
            continue
        i = int(np.argmin(graph.cross[:, j]))
        if graph.cross[i, j] < graph.self_q[j]:
            pairs.add((i, j))
        else:
            loops_q.append(j)
    weight = sum(graph.cross[i, j] for i, j in pairs) + graph.self_x[loops_x].sum() + graph.self_q[loops_q].sum()
    return CoverResult(float(weight), tuple(sorted(pairs)), tuple(loops_x), tuple(loops_q))


def min_edge_cover(graph: InducedGraph, method: str = "auto", max_vertices: int = 24) -> CoverResult:
    """Exact minimum-weight edge cover of an induced graph.

    Parameters
    ----------
    graph : InducedGraph
    method : {"auto", "enumerate", "assignment"}
        ``"enumerate"`` tries every choice of covering edge for each vertex
        of the smaller side; ``"assignment"`` solves the equivalent matching
        problem. ``"auto"`` enumerates up to 10 vertices.
    max_vertices : int
        Refuse larger graphs; this is an oracle, not a production solver.
    """
    total = graph.n + graph.m
    if total > max_vertices:
        raise ValidationError(f"graph has {total} vertices; the oracle is limited to {max_vertices}")
    if method == "auto":
        method = "enumerate" if total <= 10 else "assignment"
    if method == "enumerate":
        if min(graph.n, graph.m) > 8:
            raise ValidationError("enumeration is limited to 8 vertices on the smaller side")
        return _cover_enumerate(graph)
    if method == "assignment":
        return _cover_assignment(graph)
    raise ValidationError(f"unknown cover method {method!r}")


def check_dual_feasible(graph: InducedGraph, d_x, d_q, tol: float = DUAL_TOL) -> bool:
    """Whether vertex weights satisfy every edge constraint of the graph.

    Needs ``d >= 0``, each self-loop at least its vertex weight and each
    cross edge at least the sum of its endpoint weights, up to ``tol``
    scaled by the edge weight.
    """
    d_x = np.asarray(d_x, dtype=np.float64)
    d_q = np.asarray(d_q, dtype=np.float64)
    if d_x.shape != (graph.n,) or d_q.shape != (graph.m,):
        raise ValidationError("weight vectors do not match the graph sizes")
    if np.any(d_x < -tol) or np.any(d_q < -tol):
        return False
    if np.any(d_x > graph.self_x + tol * np.maximum(1.0, graph.self_x)):
        return False
    if np.any(d_q > graph.self_q + tol * np.maximum(1.0, graph.self_q)):
        return False
    finite = np.isfinite(graph.cross)
    sums = d_x[:, None] + d_q[None, :]
    slack = np.where(finite, graph.cross - sums + tol * np.maximum(1.0, np.abs(graph.cross)), 0.0)
    return bool(np.all(slack >= 0))


def dp_raw_lb_domain(spec: MeasureSpec, x, q, w: int) -> float:
    """Exact DP value expressed in the raw domain of the lower bounds.

    For LCSS with similarity ``s`` this is ``n + m - 2 s``: the cost of the
    matching path under the 0/1 graph costs.
    """
    xv, qv = as_values(x), as_values(q)
    raw = raw_cost(spec, xv, qv, w)
    if spec.kind == MeasureKind.LCSS:
        return len(xv) + len(qv) - 2.0 * raw
    return float(raw)


@dataclass(frozen=True)
class ChainReport:
    """Weight sum, edge cover and DP value for one pair, with the checks applied."""

    dual_sum: float
    cover: float
    dp_raw: float
    boundary_bound_raw: float
    distance: float
    cover_distance: float
    feasible: bool
    violations: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.feasible and not self.violations


def _le(a: float, b: float, tol: float) -> bool:
    return a <= b + tol * max(1.0, abs(b))


def verify_bound_chain(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None,
                       tol: float = DUAL_TOL, method: str = "auto") -> ChainReport:
    """Check weight sum <= minimum edge cover <= DP value for one pair.

    The weights are the full-range augmented assignments of both directions
    and both plain envelope assignments; each must be dual-feasible. The
    bound with explicit first/last-step terms is checked against the DP value
    directly, since its boundary term is not a vertex weighting.
    """
    from . import bounds as B

    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    graph = build_graph(spec, xv, qv, w)
    res = B.bglb(spec, xv, qv, w, boundary_mode="none", return_weights=True)
    wt = res.weights
    assignments = [
        (wt["base_x"], wt["aug_q"]),
        (wt["aug_x"], wt["base_q"]),
        (wt["base_x"], np.zeros(m)),
        (np.zeros(n), wt["base_q"]),
    ]
    feasible = all(check_dual_feasible(graph, a, b, tol) for a, b in assignments)
    dual_sum = max(float(a.sum() + b.sum()) for a, b in assignments)
    cover = min_edge_cover(graph, method=method).weight
    dp_raw = dp_raw_lb_domain(spec, xv, qv, w)
    inner = B.bglb(spec, xv, qv, w, boundary_mode="glb")
    inner_raw = _raw_of(inner)
    distance = spec.trans(raw_cost(spec, xv, qv, w), n, m)
    cover_distance = spec.lb_trans(cover, n, m)
    bad = []
    if not _le(dual_sum, cover, tol):
        bad.append(f"weight sum {dual_sum!r} exceeds cover {cover!r}")
    if not _le(cover, dp_raw, tol):
        bad.append(f"cover {cover!r} exceeds DP value {dp_raw!r}")
    if not _le(inner_raw, dp_raw, tol):
        bad.append(f"boundary-mode bound {inner_raw!r} exceeds DP value {dp_raw!r}")
    if not _le(cover_distance, distance, tol):
        bad.append(f"transformed cover {cover_distance!r} exceeds distance {distance!r}")
    return ChainReport(dual_sum, float(cover), dp_raw, inner_raw, distance, cover_distance, feasible,
                       tuple(bad))


def _raw_of(res) -> float:
    return res.bdy + max(res.forward[0] + res.forward[1], res.reverse[0] + res.reverse[1])
