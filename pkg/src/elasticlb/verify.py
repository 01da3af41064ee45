"""Randomised property sweep over the bounds and the graph oracle."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import bounds as B
from .bounds import BoundKind
from .core import MeasureKind, MeasureSpec, make_spec
from .dp import elastic_distance, elastic_distance_ea
from .graph import verify_bound_chain

__all__ = ["sample_pair", "check_pair", "SweepReport", "property_sweep", "WINDOW_CHOICES"]

WINDOW_CHOICES = (0, 1, 2, None)
REL_TOL = 1e-9


def sample_pair(rng: np.random.Generator, min_len: int = 2, max_len: int = 12,
                max_total: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, int]:
    """Draw ``(x, q, w)`` with ``w`` from {0, 1, 2, full} and ``|len(x) - len(q)| <= w``.

    Half of the draws use Gaussian values, the rest a coarse grid that makes
    ties and threshold hits common.
    """
    choice = WINDOW_CHOICES[int(rng.integers(len(WINDOW_CHOICES)))]
    hi_n = max_len if max_total is None else min(max_len, max_total // 2)
    n = int(rng.integers(min_len, hi_n + 1))
    lo_m, hi_m = min_len, max_len
    if max_total is not None:
        hi_m = min(hi_m, max_total - n)
    if choice is not None:
        lo_m, hi_m = max(lo_m, n - choice), min(hi_m, n + choice)
    m = int(rng.integers(lo_m, hi_m + 1))
    w = max(n, m) if choice is None else choice
    if rng.random() < 0.5:
        x, q = rng.standard_normal(n), rng.standard_normal(m)
    else:
        x, q = rng.integers(-4, 5, n) / 4.0, rng.integers(-4, 5, m) / 4.0
    return x, q, w


def _le(a: float, b: float) -> bool:
    return a <= b + REL_TOL * max(1.0, abs(b))


def check_pair(spec: MeasureSpec, x, q, w: int, rng: Optional[np.random.Generator] = None,
               chain: bool = True) -> List[str]:
    """Return the list of violated properties for one pair (empty when all hold)."""
    bad = []
    d = elastic_distance(spec, x, q, w).distance
    name = spec.name
    for mode in B.BOUNDARY_MODES:
        vals = {}
        for bk in (BoundKind.GLB, BoundKind.BGLB, BoundKind.DBGLB, BoundKind.KIM_FL, BoundKind.KIM,
                   BoundKind.KEOGH):
            if not B.supports(bk, spec.kind) or (mode == "none" and bk in B._DTW_ONLY):
                continue
            v = B.lower_bound(bk, spec, x, q, w, boundary_mode=mode).value
            vals[bk] = v
            if not _le(v, d):
                bad.append(f"{name}: {bk.value}[{mode}] = {v!r} exceeds distance {d!r}")
        if vals[BoundKind.BGLB] < vals[BoundKind.GLB]:
            bad.append(f"{name}: bglb below glb [{mode}]")
        if BoundKind.DBGLB in vals and vals[BoundKind.DBGLB] < vals[BoundKind.GLB]:
            bad.append(f"{name}: dbglb below glb [{mode}]")
    if rng is not None:
        kappa = float(d * rng.uniform(0.0, 1.5)) if math.isfinite(d) else 1.0
        for bk in (BoundKind.GLB, BoundKind.BGLB, BoundKind.DBGLB):
            if not B.supports(bk, spec.kind):
                continue
            r = B.lower_bound(bk, spec, x, q, w, cutoff=kappa)
            if r.early_stopped and not d > kappa:
                bad.append(f"{name}: {bk.value} stopped at cutoff {kappa!r} but distance is {d!r}")
        ea = elastic_distance_ea(spec, x, q, w, kappa)
        if d <= kappa and (ea.abandoned or ea.distance != d):
            bad.append(f"{name}: early abandoning changed a distance within the cutoff")
        if d > kappa and not ea.abandoned:
            bad.append(f"{name}: early abandoning missed a distance above the cutoff")
    if chain:
        rep = verify_bound_chain(spec, x, q, w)
        if not rep.feasible:
            bad.append(f"{name}: weights are not dual-feasible")
        bad.extend(f"{name}: {v}" for v in rep.violations)
    return bad


@dataclass
class SweepReport:
    """Failures found by :func:`property_sweep`, with the number of pairs examined."""

    trials: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _worker(kinds, trials, seed_seq, max_len, max_total, chain):
    rng = np.random.default_rng(seed_seq)
    out = SweepReport()
    for kind in kinds:
        spec = make_spec(kind)
        for _ in range(trials):
            x, q, w = sample_pair(rng, 2, max_len, max_total)
            fails = check_pair(spec, x, q, w, rng, chain)
            out.trials += 1
            for f in fails:
                out.failures.append(f"{f} (x={list(x)}, q={list(q)}, w={w})")
    return out


def property_sweep(kinds: Sequence[MeasureKind] = tuple(MeasureKind), trials: int = 1000, seed: int = 0,
                   max_len: int = 10, max_total: int = 20, chain: bool = True,
                   threads: int = 1) -> SweepReport:
    """Check every bound and the oracle chain on ``trials`` random pairs per measure.

    The seed is split into one independent stream per worker, so a run is
    reproducible for a fixed seed and thread count.
    """
    threads = max(1, int(threads))
    per = [trials // threads + (1 if k < trials % threads else 0) for k in range(threads)]
    seqs = np.random.SeedSequence(seed).spawn(threads)
    if threads == 1:
        parts = [_worker(kinds, per[0], seqs[0], max_len, max_total, chain)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: _worker(kinds, a[0], a[1], max_len, max_total, chain),
                                  zip(per, seqs)))
    report = SweepReport()
    for p in parts:
        report.trials += p.trials
        report.failures.extend(p.failures)
    return report
