"""Sliding-window envelopes.

The envelope of a series ``x`` of radius ``w`` evaluated at position ``p``
is the max/min over the indices ``[p - w, p + w]`` clipped to ``x``. Both
sides are computed in a single pass with monotone deques.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .core import TSLike, ValidationError, as_values

__all__ = ["Envelope", "build_envelope", "weight_upper_envelope", "naive_envelope"]


@dataclass(frozen=True)
class Envelope:
    """Upper and lower envelope arrays plus the radius they were built with."""

    upper: np.ndarray
    lower: np.ndarray
    radius: int

    def __len__(self) -> int:
        return int(self.upper.shape[0])


def _check_radius(w) -> int:
    if isinstance(w, bool) or int(w) != w or w < 0:
        raise ValidationError(f"envelope radius must be a non-negative integer, got {w!r}")
    return int(w)


def build_envelope(series: TSLike, w: int, length: Optional[int] = None) -> Envelope:
    """Envelope of ``series`` with radius ``w`` at positions ``0..length-1``.

    Parameters
    ----------
    series : array-like
        Source values.
    w : int
        Window radius.
    length : int, optional
        Number of target positions, default ``len(series)``. Positions past
        the end of ``series`` use the clipped window; ``length - 1 - w`` must
        not exceed the last index.

    Returns
    -------
    Envelope
    """
    x = as_values(series)
    w = _check_radius(w)
    out_len = x.shape[0] if length is None else int(length)
    if out_len < 1:
        raise ValidationError("envelope length must be positive")
    if out_len - 1 - w > x.shape[0] - 1:
        raise ValidationError(
            f"radius {w} too small to reach series of length {x.shape[0]} from position {out_len - 1}")
    upper = np.empty(out_len)
    lower = np.empty(out_len)
    K.envelope(x, w, out_len, upper, lower)
    return Envelope(upper, lower, w)


def weight_upper_envelope(weights, w: int, length: Optional[int] = None) -> np.ndarray:
    """Windowed maximum of a non-negative weight vector, as used by the augmented bound."""
    d = np.ascontiguousarray(weights, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise ValidationError("weights must be a non-empty 1-D array")
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise ValidationError("weights must be finite and non-negative")
    w = _check_radius(w)
    out_len = d.shape[0] if length is None else int(length)
    out = np.empty(out_len)
    K.window_max(d, w, out_len, out)
    return out


def naive_envelope(series: TSLike, w: int, length: Optional[int] = None) -> Envelope:
    """Reference O(n*w) envelope by direct scanning."""
    x = as_values(series)
    out_len = x.shape[0] if length is None else int(length)
    upper = np.empty(out_len)
    lower = np.empty(out_len)
    for p in range(out_len):
        lo, hi = max(0, p - w), min(x.shape[0] - 1, p + w)
        seg = x[lo:hi + 1]
        upper[p] = seg.max()
        lower[p] = seg.min()
    return Envelope(upper, lower, int(w))
