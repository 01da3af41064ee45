"""Exact banded elastic distances, with optional early abandoning."""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels as K
from .core import MeasureKind, MeasureSpec, TSLike, WindowLike, as_values, resolve_window

__all__ = ["DPResult", "elastic_distance", "elastic_distance_ea", "raw_cost"]

_CUT_RTOL = 1e-12


@dataclass(frozen=True)
class DPResult:
    """Outcome of one DP evaluation.

    ``raw`` is the accumulated table value (the LCSS similarity for LCSS),
    ``distance`` its transformed value. Abandoned runs report ``inf`` for both
    and ``abandoned=True``.
    """

    raw: float
    distance: float
    abandoned: bool = False


def _run(spec: MeasureSpec, x, q, w: int, raw_cut: float):
    if spec.kind == MeasureKind.LCSS:
        return K.dp_lcss(spec.param_array, x, q, w, raw_cut)
    return K.dp_min(int(spec.kind), spec.param_array, x, q, w, raw_cut)


def raw_cost(spec: MeasureSpec, x, q, w: int) -> float:
    """Raw DP value on validated arrays with an integer radius (no checks)."""
    if spec.kind == MeasureKind.LCSS:
        return K.dp_lcss(spec.param_array, x, q, w, -math.inf)[0]
    return K.dp_min(int(spec.kind), spec.param_array, x, q, w, math.inf)[0]


def elastic_distance(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None) -> DPResult:
    """Exact elastic distance between ``x`` and ``q`` inside the band.

    Parameters
    ----------
    spec : MeasureSpec
    x, q : array-like
        Non-empty finite series; lengths may differ.
    window : Window, int, float, str or None
        Band radius; ``None`` is unconstrained.

    Raises
    ------
    ValidationError
        On malformed series or a radius below ``|len(x) - len(q)|``.
    """
    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    raw = raw_cost(spec, xv, qv, w)
    return DPResult(float(raw), spec.trans(float(raw), n, m), False)


def elastic_distance_ea(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None,
                        cutoff: float = math.inf) -> DPResult:
    """Elastic distance that stops once it provably exceeds ``cutoff``.

    If the true distance is at most ``cutoff`` the result equals
    :func:`elastic_distance`. Otherwise ``abandoned`` is set and the
    distance is reported as ``inf``.
    """
    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    return _ea(spec, xv, qv, w, cutoff)


def _ea(spec: MeasureSpec, xv, qv, w: int, cutoff: float) -> DPResult:
    n, m = len(xv), len(qv)
    raw_cut = spec.dp_raw_cutoff(cutoff, n, m)
    # the cut only stops the table early; the exact test against cutoff follows
    if math.isfinite(raw_cut):
        slack = _CUT_RTOL * max(1.0, abs(raw_cut))
        raw_cut = raw_cut - slack if spec.kind == MeasureKind.LCSS else raw_cut + slack
    raw, abandoned = _run(spec, xv, qv, w, raw_cut)
    if abandoned:
        return DPResult(math.inf, math.inf, True)
    d = spec.trans(float(raw), n, m)
    if d > cutoff:
        return DPResult(math.inf, math.inf, True)
    return DPResult(float(raw), d, False)
