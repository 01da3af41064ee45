"""Lower bounds on the elastic distances.

Graph bounds assign non-negative weights to the elements of both series
such that every DP step of cost ``c`` newly covers elements whose weights
sum to at most ``c``; the weight sum then cannot exceed the DP value.

* ``glb``: one side gets the clipped-envelope weight of each element.
* ``bglb``: the other side additionally gets whatever its own envelope
  weight exceeds the largest first-side weight in its window.
* ``dbglb``: both sides get base weights and the mass that a single
  diagonal step could account for twice is cancelled by a max transport.

With ``boundary_mode="glb"`` the first and last elements of each series are
taken out of the weight sums and replaced by an explicit bound on the first
and last DP steps.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

import numpy as np

from . import _kernels as K
from .core import (MeasureKind, MeasureSpec, TSLike, ValidationError, WindowLike, as_values,
                   resolve_window)
from .envelopes import Envelope, build_envelope

__all__ = [
    "BoundKind",
    "BoundResult",
    "delta",
    "gamma",
    "boundary_term",
    "glb",
    "bglb",
    "dbglb",
    "lb_kim_fl",
    "lb_kim",
    "lb_keogh",
    "lower_bound",
    "supports",
]

BOUNDARY_MODES = ("glb", "none")


class BoundKind(str, enum.Enum):
    """Names of the available bounds. ``NONE`` means no filtering."""

    NONE = "none"
    KIM_FL = "kimfl"
    KIM = "kim"
    KEOGH = "keogh"
    GLB = "glb"
    BGLB = "bglb"
    DBGLB = "dbglb"

    @classmethod
    def parse(cls, name: Union[str, "BoundKind"]) -> "BoundKind":
        if isinstance(name, BoundKind):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        aliases = {"lbkimfl": "kimfl", "lbkim": "kim", "lbkeogh": "keogh", "": "none"}
        key = aliases.get(key, key)
        for k in cls:
            if k.value == key:
                return k
        valid = ", ".join(k.value for k in cls)
        raise ValidationError(f"unknown bound {name!r}; expected one of {valid}")


_DTW_ONLY = {BoundKind.KIM_FL, BoundKind.KIM, BoundKind.KEOGH}
_DUAL_OK = {MeasureKind.TWED, MeasureKind.LCSS, MeasureKind.EDR, MeasureKind.SWALE}


def supports(bound: Union[str, BoundKind], kind: Union[str, MeasureKind]) -> bool:
    """Whether ``bound`` is defined for measure ``kind``."""
    bound = BoundKind.parse(bound)
    kind = MeasureKind.parse(kind)
    if bound in _DTW_ONLY:
        return kind == MeasureKind.DTW
    if bound == BoundKind.DBGLB:
        return kind in _DUAL_OK
    return True


def _require(bound: BoundKind, spec: MeasureSpec) -> None:
    if not supports(bound, spec.kind):
        raise ValidationError(f"bound {bound.value} is not defined for measure {spec.name}")


@dataclass(frozen=True)
class BoundResult:
    """A lower bound value and how it was assembled.

    ``base`` and ``aug`` belong to the direction that produced ``value``;
    ``forward`` and ``reverse`` hold ``(base, aug)`` of both directions.
    ``early_stopped`` means the evaluation proved the bound exceeds the
    cutoff, in which case ``value`` is ``inf``.
    """

    value: float
    bdy: float = 0.0
    base: float = 0.0
    aug: float = 0.0
    early_stopped: bool = False
    forward: Tuple[float, float] = (0.0, 0.0)
    reverse: Tuple[float, float] = (0.0, 0.0)
    weights: Optional[Dict[str, np.ndarray]] = field(default=None, compare=False, repr=False)


def _check_mode(mode: str) -> bool:
    if mode not in BOUNDARY_MODES:
        raise ValidationError(f"boundary_mode must be one of {BOUNDARY_MODES}, got {mode!r}")
    return mode == "glb"


def _env(series: np.ndarray, w: int, length: int, given: Optional[Envelope]) -> Envelope:
    if given is not None:
        if len(given) != length or given.radius != w:
            raise ValidationError("precomputed envelope does not match the target length or radius")
        return given
    return build_envelope(series, w, length)


def delta(spec: MeasureSpec, x: float, b: float, del_cost: float) -> float:
    """Base weight ``min(M(x, b), D(x))`` of a value outside its envelope.

    ``b`` is the envelope end nearest to ``x`` and ``del_cost`` the deletion
    cost of ``x``. Values inside the envelope get weight 0 without calling this.
    """
    if del_cost < 0:
        raise ValidationError("deletion cost must be non-negative")
    return float(min(spec.value_cost(float(x), float(b)), del_cost))


def gamma(spec: MeasureSpec, q: float, b: float, del_cost: float, u_delta: float) -> float:
    """Augmented weight ``min(max(M(q, b) - u_delta, 0), D(q))``.

    ``u_delta`` is the largest partner base weight inside the window of ``q``.
    """
    if del_cost < 0 or u_delta < 0:
        raise ValidationError("deletion cost and partner weight must be non-negative")
    return float(min(max(spec.value_cost(float(q), float(b)) - u_delta, 0.0), del_cost))


def boundary_term(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None) -> float:
    """Raw lower bound on the combined cost of the first and last DP steps."""
    xv, qv = as_values(x), as_values(q)
    w = resolve_window(window, len(xv), len(qv))
    return float(K.boundary(int(spec.kind), spec.param_array, xv, qv, w))


def _prepare(spec, x, q, window, boundary_mode, env_x, env_q):
    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    interior = _check_mode(boundary_mode)
    eq = _env(qv, w, n, env_q)
    ex = _env(xv, w, m, env_x)
    return xv, qv, n, m, w, interior, eq, ex


def _graph(spec: MeasureSpec, xv, qv, w, interior, eq, ex, cutoff, with_aug, keep):
    n, m = len(xv), len(qv)
    kind = int(spec.kind)
    P = spec.param_array
    bdy = float(K.boundary(kind, P, xv, qv, w)) if interior else 0.0
    raw_cut = spec.lb_raw_cutoff(cutoff, n, m)
    du1, dv1, dv2, du2 = np.zeros(n), np.zeros(m), np.zeros(m), np.zeros(n)
    parts = np.zeros(4)
    raw, stopped = K.graph_bound(kind, P, xv, qv, w, eq.upper, eq.lower, ex.upper, ex.lower,
                                 bdy, raw_cut, interior, with_aug, du1, dv1, dv2, du2, parts)
    weights = None
    if keep:
        weights = {"base_x": du1, "aug_q": dv1, "base_q": dv2, "aug_x": du2}
    b1, a1, b2, a2 = (float(v) for v in parts)
    if stopped:
        return BoundResult(math.inf, bdy, b1, a1, True, (b1, a1), (b2, a2), weights)
    if b1 + a1 >= b2 + a2:
        base, aug = b1, a1
    else:
        base, aug = b2, a2
    return BoundResult(spec.lb_trans(float(raw), n, m), bdy, base, aug, False, (b1, a1), (b2, a2), weights)


def glb(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None, cutoff: float = math.inf,
        boundary_mode: str = "glb", env_x: Optional[Envelope] = None, env_q: Optional[Envelope] = None,
        return_weights: bool = False) -> BoundResult:
    """Envelope graph bound, symmetrised over both directions.

    Parameters
    ----------
    spec : MeasureSpec
    x, q : array-like
    window : window-like
    cutoff : float
        Distance-domain threshold for early stopping.
    boundary_mode : {"glb", "none"}
        ``"glb"`` bounds the first and last DP steps explicitly and keeps
        only interior elements in the sums; ``"none"`` sums every element.
    env_x, env_q : Envelope, optional
        Precomputed envelopes of ``x`` (at ``len(q)`` positions) and of ``q``
        (at ``len(x)`` positions) with the resolved radius.
    return_weights : bool
        Attach the per-element weight vectors to the result.
    """
    xv, qv, n, m, w, interior, eq, ex = _prepare(spec, x, q, window, boundary_mode, env_x, env_q)
    return _graph(spec, xv, qv, w, interior, eq, ex, cutoff, False, return_weights)


def bglb(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None, cutoff: float = math.inf,
         boundary_mode: str = "glb", env_x: Optional[Envelope] = None, env_q: Optional[Envelope] = None,
         return_weights: bool = False) -> BoundResult:
    """Augmented graph bound; never smaller than :func:`glb` with the same arguments.

    See :func:`glb` for the parameters. Early stopping is checked after every
    weight, so a stopped evaluation costs at most one pass per series.
    """
    xv, qv, n, m, w, interior, eq, ex = _prepare(spec, x, q, window, boundary_mode, env_x, env_q)
    return _graph(spec, xv, qv, w, interior, eq, ex, cutoff, True, return_weights)


def dbglb(spec: MeasureSpec, x: TSLike, q: TSLike, window: WindowLike = None, cutoff: float = math.inf,
          boundary_mode: str = "glb", env_x: Optional[Envelope] = None, env_q: Optional[Envelope] = None,
          return_weights: bool = False) -> BoundResult:
    """Two-sided base-weight bound with transport cancellation.

    Defined for TWED, LCSS, EDR and SWALE. Equals the boundary term plus both
    base sums minus the maximum mass that can be moved between window-feasible
    pairs; never smaller than :func:`glb`.
    """
    bound = BoundKind.DBGLB
    _require(bound, spec)
    xv, qv, n, m, w, interior, eq, ex = _prepare(spec, x, q, window, boundary_mode, env_x, env_q)
    return _dual(spec, xv, qv, w, interior, eq, ex, cutoff, return_weights)


def _dual(spec, xv, qv, w, interior, eq, ex, cutoff, keep):
    n, m = len(xv), len(qv)
    kind = int(spec.kind)
    P = spec.param_array
    bdy = float(K.boundary(kind, P, xv, qv, w)) if interior else 0.0
    raw_cut = spec.lb_raw_cutoff(cutoff, n, m)
    du, dv = np.zeros(n), np.zeros(m)
    parts = np.zeros(4)
    raw, stopped = K.dual_bound(kind, P, xv, qv, w, eq.upper, eq.lower, ex.upper, ex.lower,
                                bdy, raw_cut, interior, du, dv, parts)
    weights = {"base_x": du, "base_q": dv} if keep else None
    b1, r1, b2, r2 = (float(v) for v in parts)
    if stopped:
        return BoundResult(math.inf, bdy, b1, r1, True, (b1, r1), (b2, r2), weights)
    base, aug = (b1, r1) if b1 + r1 >= b2 + r2 else (b2, r2)
    return BoundResult(spec.lb_trans(float(raw), n, m), bdy, base, aug, False, (b1, r1), (b2, r2), weights)


def lb_kim_fl(x: TSLike, q: TSLike) -> float:
    """Largest of the first-element and last-element absolute differences."""
    xv, qv = as_values(x), as_values(q)
    return float(max(abs(xv[0] - qv[0]), abs(xv[-1] - qv[-1])))


def lb_kim(x: TSLike, q: TSLike) -> float:
    """First, last, maximum and minimum absolute differences, maximised."""
    xv, qv = as_values(x), as_values(q)
    return float(max(abs(xv[0] - qv[0]), abs(xv[-1] - qv[-1]),
                     abs(xv.max() - qv.max()), abs(xv.min() - qv.min())))


def _keogh_one(xv: np.ndarray, env: Envelope) -> float:
    d = xv - np.clip(xv, env.lower, env.upper)
    return float(np.sqrt(np.dot(d, d)))


def lb_keogh(x: TSLike, q: TSLike, window: WindowLike = None, env_x: Optional[Envelope] = None,
             env_q: Optional[Envelope] = None, symmetric: bool = True) -> float:
    """Envelope bound for DTW: distance of each series to the other's envelope.

    With ``symmetric`` the larger of the two directions is returned.
    """
    xv, qv = as_values(x), as_values(q)
    n, m = len(xv), len(qv)
    w = resolve_window(window, n, m)
    v = _keogh_one(xv, _env(qv, w, n, env_q))
    if symmetric:
        v = max(v, _keogh_one(qv, _env(xv, w, m, env_x)))
    return v


def lower_bound(bound: Union[str, BoundKind], spec: MeasureSpec, x: TSLike, q: TSLike,
                window: WindowLike = None, cutoff: float = math.inf, boundary_mode: str = "glb",
                env_x: Optional[Envelope] = None, env_q: Optional[Envelope] = None) -> BoundResult:
    """Evaluate the named bound.

    Raises
    ------
    ValidationError
        If the bound is not defined for ``spec``'s measure.
    """
    bound = BoundKind.parse(bound)
    _require(bound, spec)
    if bound == BoundKind.NONE:
        return BoundResult(0.0)
    if bound == BoundKind.GLB:
        return glb(spec, x, q, window, cutoff, boundary_mode, env_x, env_q)
    if bound == BoundKind.BGLB:
        return bglb(spec, x, q, window, cutoff, boundary_mode, env_x, env_q)
    if bound == BoundKind.DBGLB:
        return dbglb(spec, x, q, window, cutoff, boundary_mode, env_x, env_q)
    if bound == BoundKind.KIM_FL:
        v = lb_kim_fl(x, q)
    elif bound == BoundKind.KIM:
        v = lb_kim(x, q)
    else:
        v = lb_keogh(x, q, window, env_x, env_q)
    return BoundResult(v, base=v)
