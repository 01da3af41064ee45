"""Measure definitions, parameters, windows and per-step costs.

Indices in the public API are 0-based. A collection of series of lengths
``n`` and ``m`` is compared within a Sakoe-Chiba band of radius ``w``: cell
``(i, j)`` is admissible iff ``|i - j| <= w``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields, replace
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

__all__ = [
    "MeasureKind",
    "MeasureParams",
    "MeasureSpec",
    "TimeSeries",
    "Window",
    "ValidationError",
    "make_spec",
    "as_values",
    "resolve_window",
    "match_cost",
    "delete_cost",
    "znormalize",
]


class ValidationError(ValueError):
    """Raised for malformed inputs or out-of-range parameters."""


class MeasureKind(enum.IntEnum):
    """The supported elastic measures. Integer values are kernel codes."""

    DTW = 0
    ERP = 1
    MSM = 2
    TWED = 3
    LCSS = 4
    EDR = 5
    SWALE = 6

    @classmethod
    def parse(cls, name: Union[str, "MeasureKind"]) -> "MeasureKind":
        if isinstance(name, MeasureKind):
            return name
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            valid = ", ".join(k.name.lower() for k in cls)
            raise ValidationError(f"unknown measure {name!r}; expected one of {valid}") from None

    @property
    def padded(self) -> bool:
        """True for measures whose DP starts at a virtual (0, 0) origin with gap moves."""
        return self in (MeasureKind.ERP, MeasureKind.LCSS, MeasureKind.EDR, MeasureKind.SWALE)

    @property
    def label(self) -> str:
        return self.name.lower()


# Order of the parameter vector handed to the numba kernels.
P_G, P_C, P_NU, P_LAM, P_EPS, P_P, P_R = range(7)


@dataclass(frozen=True)
class MeasureParams:
    """Numeric parameters shared by all measures; each measure reads its own.

    Parameters
    ----------
    g : float
        ERP gap value.
    c : float
        MSM split/merge constant.
    nu, lam : float
        TWED stiffness and deletion penalty.
    epsilon : float
        Matching threshold for LCSS, EDR and SWALE.
    p, r : float
        SWALE gap/mismatch penalty and match reward, ``0 <= r <= p``.
    """

    g: float = 0.0
    c: float = 0.5
    nu: float = 0.0001
    lam: float = 1.0
    epsilon: float = 0.2
    p: float = 5.0
    r: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float, np.floating, np.integer)) or not math.isfinite(float(v)):
                raise ValidationError(f"parameter {f.name} must be a finite number, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        for name in ("c", "nu", "lam", "epsilon", "p"):
            if getattr(self, name) < 0:
                raise ValidationError(f"parameter {name} must be non-negative, got {getattr(self, name)}")
        if not 0.0 <= self.r <= self.p:
            raise ValidationError(f"SWALE requires 0 <= r <= p, got r={self.r}, p={self.p}")

    @classmethod
    def defaults(cls, kind: Union[str, MeasureKind]) -> "MeasureParams":
        """Default parameters for ``kind`` (the epsilon default depends on the measure)."""
        kind = MeasureKind.parse(kind)
        eps = {MeasureKind.LCSS: 0.2, MeasureKind.EDR: 0.1, MeasureKind.SWALE: 0.2}.get(kind, 0.2)
        return cls(epsilon=eps)

    def as_array(self) -> np.ndarray:
        return np.array([self.g, self.c, self.nu, self.lam, self.epsilon, self.p, self.r], dtype=np.float64)


@dataclass(frozen=True)
class MeasureSpec:
    """A measure together with its parameters.

    The cost methods describe the measure as a weighted bipartite graph:
    ``match_cost`` is the cost of aligning two elements and ``delete_cost``
    the cost of covering one element alone. For LCSS these are the
    distance-oriented 0/1 costs used by the lower bounds.
    """

    kind: MeasureKind
    params: MeasureParams = field(default_factory=MeasureParams)

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind.parse(self.kind))
        if not isinstance(self.params, MeasureParams):
            raise ValidationError("params must be a MeasureParams instance")

    @cached_property
    def param_array(self) -> np.ndarray:
        arr = self.params.as_array()
        arr.setflags(write=False)
        return arr

    @property
    def name(self) -> str:
        return self.kind.label

    # -- value transforms -------------------------------------------------

    def trans(self, raw: float, n: int, m: int) -> float:
        """Map the raw accumulated DP value to the reported distance."""
        if self.kind == MeasureKind.DTW:
            return math.sqrt(raw) if math.isfinite(raw) else math.inf
        if self.kind == MeasureKind.LCSS:
            if not math.isfinite(raw):
                return math.inf
            return 1.0 - raw / min(n, m)
        return float(raw)

    def lb_trans(self, raw: float, n: int, m: int) -> float:
        """Map a raw lower-bound sum into the distance domain (monotone)."""
        if not math.isfinite(raw):
            return math.inf
        if self.kind == MeasureKind.DTW:
            return math.sqrt(max(raw, 0.0))
        if self.kind == MeasureKind.LCSS:
            return max(0.0, 1.0 - (n + m - raw) / (2.0 * min(n, m)))
        return float(raw)

    def lb_raw_cutoff(self, cutoff: float, n: int, m: int) -> float:
        """Largest raw bound value ``t`` such that ``raw > t`` implies ``lb_trans(raw) > cutoff``."""
        if cutoff is None or math.isinf(cutoff) and cutoff > 0 or math.isnan(cutoff):
            return math.inf
        if cutoff < 0:
            return -math.inf
        if self.kind == MeasureKind.DTW:
            return cutoff * cutoff
        if self.kind == MeasureKind.LCSS:
            if cutoff >= 1.0:
                return math.inf
            return n + m - 2.0 * min(n, m) * (1.0 - cutoff)
        return float(cutoff)

    def dp_raw_cutoff(self, cutoff: float, n: int, m: int) -> float:
        """Raw threshold for early abandoning the exact DP.

        For LCSS the DP maximises a similarity and the returned value is the
        smallest similarity that keeps the distance within ``cutoff``.
        """
        if cutoff is None or math.isnan(cutoff) or (math.isinf(cutoff) and cutoff > 0):
            return -math.inf if self.kind == MeasureKind.LCSS else math.inf
        if self.kind == MeasureKind.LCSS:
            if cutoff < 0:
                return math.inf
            return (1.0 - cutoff) * min(n, m)
        if cutoff < 0:
            return -math.inf
        if self.kind == MeasureKind.DTW:
            return cutoff * cutoff
        return float(cutoff)

    # -- element costs ----------------------------------------------------

    def initial_cell(self, x1: float, q1: float) -> float:
        """Cost of the forced first cell for corner-anchored measures (0 for padded ones)."""
        if self.kind.padded:
            return 0.0
        d = x1 - q1
        return d * d if self.kind == MeasureKind.DTW else abs(d)

    def value_cost(self, a: float, b: float) -> float:
        """Context-free match cost between two values, used against envelope bounds."""
        d = a - b
        k = self.kind
        if k in (MeasureKind.DTW, MeasureKind.ERP):
            return d * d
        if k in (MeasureKind.MSM, MeasureKind.TWED):
            return abs(d)
        eps = self.params.epsilon
        if k == MeasureKind.SWALE:
            return self.params.r if abs(d) <= eps else self.params.p
        return 0.0 if abs(d) <= eps else 1.0


TSLike = Union["TimeSeries", Sequence[float], np.ndarray]


@dataclass(frozen=True)
class TimeSeries:
    """An immutable finite real sequence with an optional class label."""

    values: np.ndarray
    label: Any = None

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values))

    def __len__(self) -> int:
        return int(self.values.shape[0])


def _check_values(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValidationError(f"time series must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("time series must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("time series contains NaN or infinite values")
    arr.setflags(write=False)
    return arr


def as_values(series: TSLike) -> np.ndarray:
    """Return a validated contiguous float64 array for ``series``."""
    if isinstance(series, TimeSeries):
        return series.values
    if isinstance(series, np.ndarray) and series.dtype == np.float64 and series.ndim == 1 \
            and series.flags.c_contiguous and series.size > 0 and np.all(np.isfinite(series)):
        return series
    try:
        return _check_values(series)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"cannot interpret input as a real sequence: {exc}") from None


def znormalize(values: TSLike) -> np.ndarray:
    """Zero-mean unit-variance copy; a constant series maps to zeros."""
    x = np.asarray(as_values(values), dtype=np.float64)
    sd = x.std()
    if sd == 0.0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


@dataclass(frozen=True)
class Window:
    """Sakoe-Chiba band given as an absolute radius or a fraction of the length.

    Exactly one of ``radius`` and ``fraction`` may be set; neither means the
    unconstrained (full) window.
    """

    radius: Optional[int] = None
    fraction: Optional[float] = None

    def __post_init__(self):
        if self.radius is not None and self.fraction is not None:
            raise ValidationError("give either radius or fraction, not both")
        if self.radius is not None:
            if isinstance(self.radius, bool) or int(self.radius) != self.radius or self.radius < 0:
                raise ValidationError(f"window radius must be a non-negative integer, got {self.radius!r}")
            object.__setattr__(self, "radius", int(self.radius))
        if self.fraction is not None:
            f = float(self.fraction)
            if not math.isfinite(f) or f < 0:
                raise ValidationError(f"window fraction must be non-negative, got {self.fraction!r}")
            object.__setattr__(self, "fraction", f)

    @classmethod
    def full(cls) -> "Window":
        return cls()

    @property
    def is_full(self) -> bool:
        return self.radius is None and self.fraction is None

    def radius_for(self, n: int, m: int) -> int:
        """Resolve to an integer radius for lengths ``n`` and ``m`` without validation."""
        if self.radius is not None:
            return min(self.radius, max(n, m))
        if self.fraction is not None:
            # round half away from zero
            return min(int(math.floor(self.fraction * max(n, m) + 0.5)), max(n, m))
        return max(n, m)

    def __str__(self) -> str:
        if self.radius is not None:
            return f"={self.radius}"
        if self.fraction is not None:
            return f"{self.fraction:g}"
        return "full"


WindowLike = Union[Window, int, float, None, str]


def parse_window(text: WindowLike) -> Window:
    """Interpret ``text`` as a window.

    ``None``/``"full"`` is unconstrained, an int or ``"=7"`` is an absolute
    radius and a float or ``"0.05"`` is a fraction of the length.
    """
    if isinstance(text, Window):
        return text
    if text is None:
        return Window()
    if isinstance(text, bool):
        raise ValidationError("window must not be a boolean")
    if isinstance(text, (int, np.integer)):
        return Window(radius=int(text))
    if isinstance(text, (float, np.floating)):
        return Window(fraction=float(text))
    s = str(text).strip().lower()
    if s in ("", "full", "none", "inf"):
        return Window()
    try:
        if s.startswith("="):
            v = float(s[1:])
            if v != int(v):
                raise ValidationError(f"absolute window must be an integer, got {text!r}")
            return Window(radius=int(v))
        return Window(fraction=float(s))
    except ValueError:
        raise ValidationError(f"cannot parse window {text!r}") from None


def resolve_window(window: WindowLike, n: int, m: int) -> int:
    """Integer band radius for lengths ``n`` and ``m``.

    Raises
    ------
    ValidationError
        If the radius is smaller than ``|n - m|``, so that no warping path exists.
    """
    w = parse_window(window).radius_for(n, m)
    if w < abs(n - m):
        raise ValidationError(
            f"window radius {w} is smaller than the length difference |{n} - {m}|; no admissible path")
    return w


def make_spec(kind: Union[str, MeasureKind], params: Optional[Mapping[str, float]] = None,
              **overrides: float) -> MeasureSpec:
    """Build a :class:`MeasureSpec` from measure defaults plus overrides.

    >>> make_spec("erp", g=1.0).params.g
    1.0
    """
    kind = MeasureKind.parse(kind)
    base = MeasureParams.defaults(kind)
    merged = dict(params or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "lambda" in merged:
        merged["lam"] = merged.pop("lambda")
    if "eps" in merged:
        merged["epsilon"] = merged.pop("eps")
    unknown = set(merged) - {f.name for f in fields(MeasureParams)}
    if unknown:
        raise ValidationError(f"unknown measure parameter(s): {', '.join(sorted(unknown))}")
    return MeasureSpec(kind, replace(base, **merged))


def _msm_cost(new: float, a: float, b: float, c: float) -> float:
    if a <= new <= b or a >= new >= b:
        return c
    return c + min(abs(new - a), abs(new - b))


def match_cost(spec: MeasureSpec, x: TSLike, i: int, q: TSLike, j: int) -> float:
    """Cost of aligning ``x[i]`` with ``q[j]`` as a graph edge.

    TWED includes its neighbour and timestamp terms, with a zero element and
    zero timestamp padding before each series. LCSS uses the 0/1 mismatch
    indicator.
    """
    xv, qv = as_values(x), as_values(q)
    _check_index(i, len(xv))
    _check_index(j, len(qv))
    if spec.kind == MeasureKind.TWED:
        xp = xv[i - 1] if i > 0 else 0.0
        qp = qv[j - 1] if j > 0 else 0.0
        return abs(xv[i] - qv[j]) + abs(xp - qp) + 2.0 * spec.params.nu * abs(i - j)
    return spec.value_cost(float(xv[i]), float(qv[j]))


def delete_cost(spec: MeasureSpec, x: TSLike, i: int, other: Optional[TSLike] = None,
                window: WindowLike = None) -> float:
    """Cost of covering ``x[i]`` without a partner (graph self-loop).

    For DTW this is the cheapest match of ``x[i]`` inside the window of
    ``other``, which must then be given.
    """
    xv = as_values(x)
    _check_index(i, len(xv))
    k, prm = spec.kind, spec.params
    if k == MeasureKind.DTW:
        if other is None:
            raise ValidationError("DTW deletion cost needs the other series")
        qv = as_values(other)
        w = resolve_window(window, len(xv), len(qv))
        lo, hi = max(0, i - w), min(len(qv) - 1, i + w)
        if lo > hi:
            return math.inf
        return float(np.min((xv[i] - qv[lo:hi + 1]) ** 2))
    if k == MeasureKind.ERP:
        return (xv[i] - prm.g) ** 2
    if k == MeasureKind.MSM:
        return prm.c
    if k == MeasureKind.TWED:
        prev = xv[i - 1] if i > 0 else 0.0
        return abs(xv[i] - prev) + prm.nu + prm.lam
    if k == MeasureKind.SWALE:
        return prm.p
    return 1.0


def _check_index(i: int, n: int) -> None:
    if not 0 <= i < n:
        raise ValidationError(f"index {i} out of range for length {n}")


def collection_values(series: Iterable[TSLike]) -> list:
    """Validate every element of ``series`` and return the list of arrays."""
    return [as_values(s) for s in series]
