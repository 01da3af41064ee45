"""Exact DBSCAN over an elastic distance with lower-bound filtered range queries."""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .bounds import BoundKind
from .core import MeasureSpec, TSLike, ValidationError, WindowLike, parse_window, resolve_window
from .dp import raw_cost
from .search import Cascade, SearchStats, _filtered_distance, _prepare_all, _Prepared

__all__ = ["NOISE", "DbscanParams", "Clustering", "range_query", "dbscan", "auto_eps"]

log = logging.getLogger(__name__)

NOISE = -1
AUTO_EPS_PAIRS = 500


@dataclass(frozen=True)
class DbscanParams:
    """DBSCAN settings.

    Give either ``eps`` or ``eps_percentile``; the latter picks ``eps`` as
    that quantile of distances between up to 500 randomly sampled pairs.
    """

    eps: Optional[float] = None
    min_pts: int = 5
    eps_percentile: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if (self.eps is None) == (self.eps_percentile is None):
            raise ValidationError("give exactly one of eps and eps_percentile")
        if self.eps is not None and not (math.isfinite(self.eps) and self.eps > 0):
            raise ValidationError(f"eps must be a positive finite number, got {self.eps!r}")
        if self.eps_percentile is not None and not 0.0 <= self.eps_percentile <= 1.0:
            raise ValidationError("eps_percentile must lie in [0, 1]")
        if isinstance(self.min_pts, bool) or int(self.min_pts) != self.min_pts or self.min_pts < 1:
            raise ValidationError(f"min_pts must be a positive integer, got {self.min_pts!r}")


@dataclass
class Clustering:
    """Cluster labels (``NOISE`` for noise), core flags, the eps used and query statistics."""

    labels: np.ndarray
    core: np.ndarray
    eps: float
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max() + 1) if self.labels.size else 0


def _range(spec, cascade: Cascade, items: List[_Prepared], center: int, eps: float, window,
           stats: SearchStats) -> List[int]:
    q = items[center]
    out = []
    stats.queries += 1
    for idx, c in enumerate(items):
        stats.candidates += 1
        w = resolve_window(window, len(c.values), len(q.values))
        d = _filtered_distance(spec, cascade, c, q, w, eps, stats)
        if d <= eps:
            out.append(idx)
    return out


def range_query(spec: MeasureSpec, data: Sequence[TSLike], center: int, eps: float,
                window: WindowLike = None, cascade: Union[Cascade, str, Sequence, None] = None,
                stats: Optional[SearchStats] = None) -> List[int]:
    """Indices ``i`` (ascending, including ``center``) with distance to ``data[center]`` at most ``eps``.

    A candidate is discarded without DP only when a bound exceeds ``eps``.
    """
    cascade = Cascade.default_for(spec.kind) if cascade is None else Cascade.parse(cascade)
    cascade.check(spec)
    items = _prepare_all(data)
    if not 0 <= center < len(items):
        raise ValidationError(f"center index {center} out of range")
    return _range(spec, cascade, items, center, float(eps), parse_window(window),
                  stats if stats is not None else SearchStats())


def auto_eps(spec: MeasureSpec, data: Sequence[TSLike], percentile: float, window: WindowLike = None,
             seed: int = 0, max_pairs: int = AUTO_EPS_PAIRS) -> float:
    """Pick eps as a quantile of exact distances over randomly sampled pairs.

    Uses all pairs when there are at most ``max_pairs`` of them. Zero
    distances are kept in the sample; if the chosen quantile is zero the
    smallest positive sampled distance is used instead.

    Raises
    ------
    ValidationError
        If every sampled distance is zero.
    """
    items = _prepare_all(data)
    N = len(items)
    if N < 2:
        raise ValidationError("need at least two series to choose eps automatically")
    window = parse_window(window)
    total = N * (N - 1) // 2
    rng = np.random.default_rng(seed)
    if total <= max_pairs:
        pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]
    else:
        pairs = []
        seen = set()
        while len(pairs) < max_pairs:
            i, j = (int(v) for v in rng.choice(N, size=2, replace=False))
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                pairs.append(key)
    dists = np.empty(len(pairs))
    for k, (i, j) in enumerate(pairs):
        a, b = items[i].values, items[j].values
        w = resolve_window(window, len(a), len(b))
        dists[k] = spec.trans(float(raw_cost(spec, a, b, w)), len(a), len(b))
    positive = dists[dists > 0]
    if positive.size == 0:
        raise ValidationError("all sampled distances are zero; cannot choose eps automatically")
    eps = float(np.quantile(dists, percentile))
    if eps <= 0:
        eps = float(positive.min())
        log.warning("eps quantile is zero; using smallest positive sampled distance %.12g", eps)
    return eps


def dbscan(spec: MeasureSpec, data: Sequence[TSLike], params: DbscanParams, window: WindowLike = None,
           cascade: Union[Cascade, str, Sequence, None] = None) -> Clustering:
    """Density-based clustering with exact range queries.

    Points are visited in index order and clusters are expanded breadth
    first, so the labelling is deterministic; a border point reachable from
    several clusters joins the first one that reaches it. Every point is range
    queried exactly once, which also fixes its core flag.
    """
    cascade = Cascade.default_for(spec.kind) if cascade is None else Cascade.parse(cascade)
    cascade.check(spec)
    items = _prepare_all(data)
    window = parse_window(window)
    eps = params.eps
    if eps is None:
        eps = auto_eps(spec, items, params.eps_percentile, window, params.seed)
    N = len(items)
    labels = np.full(N, -2, dtype=np.int64)  # -2 = unvisited
    core = np.zeros(N, dtype=bool)
    stats = SearchStats()
    cluster = -1
    for p in range(N):
        if labels[p] != -2:
            continue
        nbrs = _range(spec, cascade, items, p, eps, window, stats)
        if len(nbrs) < params.min_pts:
            labels[p] = NOISE
            continue
        cluster += 1
        core[p] = True
        labels[p] = cluster
        queue = deque(nbrs)
        while queue:
            r = queue.popleft()
            if labels[r] == NOISE:
                labels[r] = cluster
                continue
            if labels[r] != -2:
                continue
            labels[r] = cluster
            rn = _range(spec, cascade, items, r, eps, window, stats)
            if len(rn) >= params.min_pts:
                core[r] = True
                queue.extend(rn)
    return Clustering(labels, core, float(eps), stats)
