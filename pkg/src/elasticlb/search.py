"""Exact 1-NN search behind a cascade of lower bounds, plus TLB evaluation."""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import bounds as B
from .bounds import BoundKind
from .core import (MeasureKind, MeasureSpec, TSLike, ValidationError, WindowLike, as_values, parse_window,
                   resolve_window)
from .dp import _ea, raw_cost
from .envelopes import Envelope, build_envelope

__all__ = [
    "Cascade",
    "SearchStats",
    "NNResult",
    "ExactnessError",
    "nn_search",
    "search_many",
    "evaluate_tlb",
    "tlb_summary",
    "TLBSummary",
    "run_1nn_benchmark",
]

log = logging.getLogger(__name__)

# Relative slack for pruning decisions so that rounding in a bound can never
# discard a candidate whose exact distance ties the threshold.
PRUNE_RTOL = 1e-9


class ExactnessError(RuntimeError):
    """A filtered search disagreed with the unfiltered one."""


def inflate(cutoff: float) -> float:
    if not math.isfinite(cutoff):
        return cutoff
    return cutoff + PRUNE_RTOL * abs(cutoff)


@dataclass(frozen=True)
class Cascade:
    """Ordered bounds applied before the exact DP.

    Parameters
    ----------
    stages : tuple of BoundKind
        Bounds in evaluation order; empty means no filtering.
    early_abandon : bool
        Abandon the DP once it exceeds the current threshold.
    boundary_mode : {"glb", "none"}
        Passed to the graph bounds.
    """

    stages: Tuple[BoundKind, ...] = (BoundKind.BGLB,)
    early_abandon: bool = True
    boundary_mode: str = "glb"

    def __post_init__(self):
        stages = tuple(BoundKind.parse(s) for s in self.stages)
        stages = tuple(s for s in stages if s != BoundKind.NONE)
        object.__setattr__(self, "stages", stages)
        if self.boundary_mode not in B.BOUNDARY_MODES:
            raise ValidationError(f"boundary_mode must be one of {B.BOUNDARY_MODES}")

    @classmethod
    def parse(cls, text: Union[str, Sequence, "Cascade", None], **kw) -> "Cascade":
        """``"kimfl,bglb"`` or ``"none"`` or a sequence of bound names."""
        if isinstance(text, Cascade):
            return text
        if text is None:
            return cls(**kw)
        if isinstance(text, str):
            parts = [p for p in text.replace("+", ",").split(",") if p.strip()]
        else:
            parts = list(text)
        return cls(tuple(parts), **kw)

    @classmethod
    def default_for(cls, kind: Union[str, MeasureKind], **kw) -> "Cascade":
        """KimFL then BGLB for DTW, BGLB alone otherwise."""
        kind = MeasureKind.parse(kind)
        if kind == MeasureKind.DTW:
            return cls((BoundKind.KIM_FL, BoundKind.BGLB), **kw)
        return cls((BoundKind.BGLB,), **kw)

    @classmethod
    def unfiltered(cls, early_abandon: bool = False) -> "Cascade":
        return cls((), early_abandon=early_abandon)

    @property
    def name(self) -> str:
        return "+".join(s.value for s in self.stages) if self.stages else "none"

    def check(self, spec: MeasureSpec) -> None:
        for s in self.stages:
            B._require(s, spec)


@dataclass
class SearchStats:
    """Counters for a batch of searches or range queries."""

    queries: int = 0
    candidates: int = 0
    pruned_by_stage: Dict[str, int] = field(default_factory=dict)
    exact_dp_calls: int = 0
    abandoned: int = 0
    wall_time: float = 0.0

    @property
    def pruned(self) -> int:
        return sum(self.pruned_by_stage.values())

    @property
    def pruning_ratio(self) -> float:
        return self.pruned / self.candidates if self.candidates else 0.0

    def merge(self, other: "SearchStats") -> "SearchStats":
        self.queries += other.queries
        self.candidates += other.candidates
        for k, v in other.pruned_by_stage.items():
            self.pruned_by_stage[k] = self.pruned_by_stage.get(k, 0) + v
        self.exact_dp_calls += other.exact_dp_calls
        self.abandoned += other.abandoned
        self.wall_time += other.wall_time
        return self


class NNResult(NamedTuple):
    index: int
    distance: float
    stats: SearchStats


class _Prepared:
    """A validated series with envelopes cached per (radius, target length)."""

    __slots__ = ("values", "_env")

    def __init__(self, series: TSLike):
        self.values = as_values(series)
        self._env: Dict[Tuple[int, int], Envelope] = {}

    def envelope(self, w: int, length: int) -> Envelope:
        key = (w, length)
        env = self._env.get(key)
        if env is None:
            env = build_envelope(self.values, w, length)
            self._env[key] = env
        return env


def _prepare_all(series: Iterable[TSLike]) -> List[_Prepared]:
    out = [s if isinstance(s, _Prepared) else _Prepared(s) for s in series]
    if not out:
        raise ValidationError("the reference collection is empty")
    return out


def _stage_value(stage: BoundKind, spec, cand: _Prepared, query: _Prepared, w: int, cut: float,
                 mode: str) -> float:
    xv, qv = cand.values, query.values
    n, m = len(xv), len(qv)
    if stage == BoundKind.KIM_FL:
        return B.lb_kim_fl(xv, qv)
    if stage == BoundKind.KIM:
        return B.lb_kim(xv, qv)
    env_q = query.envelope(w, n)
    env_x = cand.envelope(w, m)
    if stage == BoundKind.KEOGH:
        return max(B._keogh_one(xv, env_q), B._keogh_one(qv, env_x))
    interior = mode == "glb"
    if stage == BoundKind.DBGLB:
        res = B._dual(spec, xv, qv, w, interior, env_q, env_x, cut, False)
    else:
        res = B._graph(spec, xv, qv, w, interior, env_q, env_x, cut, stage == BoundKind.BGLB, False)
    return res.value


def _radius(window, n: int, m: int) -> int:
    return resolve_window(window, n, m)


def _filtered_distance(spec, cascade: Cascade, cand: _Prepared, query: _Prepared, w: int,
                       threshold: float, stats: SearchStats) -> float:
    """Exact distance of ``cand`` or ``inf`` once it is proved above ``threshold``."""
    cut = inflate(threshold)
    for stage in cascade.stages:
        v = _stage_value(stage, spec, cand, query, w, cut, cascade.boundary_mode)
        if v > cut:
            key = stage.value
            stats.pruned_by_stage[key] = stats.pruned_by_stage.get(key, 0) + 1
            return math.inf
    stats.exact_dp_calls += 1
    if cascade.early_abandon and math.isfinite(threshold):
        res = _ea(spec, cand.values, query.values, w, cut)
        if res.abandoned:
            stats.abandoned += 1
        return res.distance
    xv, qv = cand.values, query.values
    return spec.trans(float(raw_cost(spec, xv, qv, w)), len(xv), len(qv))


def nn_search(spec: MeasureSpec, train: Sequence[TSLike], query: TSLike, window: WindowLike = None,
              cascade: Union[Cascade, str, Sequence, None] = None) -> NNResult:
    """Exact nearest neighbour of ``query`` in ``train``.

    Candidates are scanned in index order with a best-so-far threshold; a
    candidate is skipped when a cascade bound exceeds it. Ties keep the lowest
    index. The result always equals an unfiltered scan.

    Returns
    -------
    NNResult
        ``(index, distance, stats)``.
    """
    cascade = Cascade.default_for(spec.kind) if cascade is None else Cascade.parse(cascade)
    cascade.check(spec)
    cands = _prepare_all(train)
    q = query if isinstance(query, _Prepared) else _Prepared(query)
    return _nn(spec, cands, q, parse_window(window), cascade)


def _nn(spec, cands: List[_Prepared], q: _Prepared, window, cascade: Cascade) -> NNResult:
    stats = SearchStats(queries=1)
    t0 = time.perf_counter()
    best, best_i = math.inf, -1
    m = len(q.values)
    for idx, c in enumerate(cands):
        stats.candidates += 1
        w = _radius(window, len(c.values), m)
        d = _filtered_distance(spec, cascade, c, q, w, best, stats)
        if d < best:
            best, best_i = d, idx
    stats.wall_time = time.perf_counter() - t0
    return NNResult(best_i, best, stats)


def search_many(spec: MeasureSpec, train: Sequence[TSLike], queries: Sequence[TSLike],
                window: WindowLike = None, cascade: Union[Cascade, str, Sequence, None] = None,
                threads: int = 1) -> Tuple[List[NNResult], SearchStats]:
    """Run :func:`nn_search` for every query; returns per-query results and merged stats.

    ``threads > 1`` spreads queries over a thread pool; the kernels release
    the GIL. Results do not depend on the thread count.
    """
    cascade = Cascade.default_for(spec.kind) if cascade is None else Cascade.parse(cascade)
    cascade.check(spec)
    cands = _prepare_all(train)
    qs = _prepare_all(queries)
    window = parse_window(window)
    if threads < 1:
        raise ValidationError("threads must be at least 1")
    t0 = time.perf_counter()
    if threads == 1 or len(qs) < 2:
        results = [_nn(spec, cands, q, window, cascade) for q in qs]
    else:
        # warm the envelope caches serially so workers only read them
        for c in cands:
            for q in qs[:1]:
                w = _radius(window, len(c.values), len(q.values))
                c.envelope(w, len(q.values))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda q: _nn(spec, cands, q, window, cascade), qs))
    total = SearchStats()
    for r in results:
        total.merge(r.stats)
    total.wall_time = time.perf_counter() - t0
    return results, total


@dataclass(frozen=True)
class TLBSummary:
    """Mean, extremes and count of bound/distance ratios; ``excluded`` counts zero-distance pairs."""

    mean: float
    min: float
    max: float
    pairs: int
    excluded: int


def tlb_ratios(spec: MeasureSpec, train: Sequence[TSLike], test: Sequence[TSLike],
               window: WindowLike = None, bound: Union[str, BoundKind] = BoundKind.BGLB,
               boundary_mode: str = "glb") -> Tuple[np.ndarray, int]:
    """Per-pair ``LB / distance`` over all train-test pairs with non-zero distance.

    ``bound`` may also be a callable ``f(x, q, w) -> float``.
    """
    custom = bound if callable(bound) else None
    if custom is None:
        bound = BoundKind.parse(bound)
        B._require(bound, spec)
    cands = _prepare_all(train)
    qs = _prepare_all(test)
    window = parse_window(window)
    ratios = []
    excluded = 0
    for q in qs:
        m = len(q.values)
        for c in cands:
            w = _radius(window, len(c.values), m)
            d = spec.trans(float(raw_cost(spec, c.values, q.values, w)), len(c.values), m)
            if d == 0.0:
                excluded += 1
                continue
            if custom is not None:
                lb = float(custom(c.values, q.values, w))
            elif bound == BoundKind.NONE:
                lb = 0.0
            else:
                lb = _stage_value(bound, spec, c, q, w, math.inf, boundary_mode)
            ratios.append(lb / d)
    return np.asarray(ratios, dtype=np.float64), excluded


def tlb_summary(spec: MeasureSpec, train: Sequence[TSLike], test: Sequence[TSLike],
                window: WindowLike = None, bound: Union[str, BoundKind] = BoundKind.BGLB,
                boundary_mode: str = "glb") -> TLBSummary:
    """Summary statistics of :func:`tlb_ratios`.

    Raises
    ------
    ValidationError
        If every pair has distance zero.
    """
    r, excluded = tlb_ratios(spec, train, test, window, bound, boundary_mode)
    if r.size == 0:
        raise ValidationError("every train-test pair has distance zero; tightness is undefined")
    return TLBSummary(float(r.mean()), float(r.min()), float(r.max()), int(r.size), excluded)


def evaluate_tlb(spec: MeasureSpec, train: Sequence[TSLike], test: Sequence[TSLike],
                 window: WindowLike = None, bound: Union[str, BoundKind] = BoundKind.BGLB,
                 boundary_mode: str = "glb") -> float:
    """Mean tightness ``LB / distance`` over train-test pairs, skipping zero distances."""
    return tlb_summary(spec, train, test, window, bound, boundary_mode).mean


def run_1nn_benchmark(spec: MeasureSpec, train: Sequence[TSLike], test: Sequence[TSLike],
                      window: WindowLike = None, cascades: Optional[Sequence] = None,
                      train_labels: Optional[Sequence] = None, test_labels: Optional[Sequence] = None,
                      threads: int = 1, dataset: str = "") -> List[dict]:
    """1-NN classification of ``test`` against ``train`` under several cascades.

    An unfiltered pass is always run first and serves as the speedup
    reference. Every cascade must return the same neighbours.

    Returns
    -------
    list of dict
        One row per cascade with the columns of the 1-NN results table.

    Raises
    ------
    ExactnessError
        If a cascade returns a different neighbour index or distance.
    """
    window = parse_window(window)
    cands = _prepare_all(train)
    qs = _prepare_all(test)
    plans = [Cascade.unfiltered()]
    for c in (cascades if cascades is not None else [Cascade.default_for(spec.kind)]):
        c = Cascade.parse(c)
        if c.stages:
            plans.append(c)
    rows = []
    reference = None
    base_time = None
    for plan in plans:
        results, stats = search_many(spec, cands, qs, window, plan, threads)
        got = [(r.index, r.distance) for r in results]
        if reference is None:
            reference = got
            base_time = stats.wall_time
        else:
            for k, ((i0, d0), (i1, d1)) in enumerate(zip(reference, got)):
                if i0 != i1 or d0 != d1:
                    raise ExactnessError(
                        f"cascade {plan.name} returned neighbour {i1} ({d1!r}) for query {k}; "
                        f"unfiltered scan gave {i0} ({d0!r})")
        accuracy = math.nan
        if train_labels is not None and test_labels is not None:
            pred = [train_labels[i] for i, _ in got]
            accuracy = float(np.mean([p == t for p, t in zip(pred, test_labels)]))
        rows.append({
            "dataset": dataset,
            "measure": spec.name,
            "bound": plan.name,
            "window": str(window),
            "queries": stats.queries,
            "candidates": stats.candidates,
            "pruned": stats.pruned,
            "dp_calls": stats.exact_dp_calls,
            "pruning_ratio": stats.pruning_ratio,
            "wall_ms": stats.wall_time * 1000.0,
            "speedup": base_time / stats.wall_time if stats.wall_time > 0 else math.nan,
            "accuracy": accuracy,
        })
    return rows
