"""scikit-learn compatible wrappers around the search and clustering functions.

Inputs are either a 2-D array of shape ``(n_series, length)`` or a sequence
of 1-D sequences, which may have different lengths.
"""
from __future__ import annotations

from typing import List, Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .clustering import DbscanParams, dbscan
from .core import MeasureSpec, ValidationError, as_values, make_spec, parse_window, resolve_window
from .dp import raw_cost
from .search import Cascade, search_many

__all__ = ["check_collection", "ElasticNNClassifier", "ElasticDBSCAN", "PairwiseElasticDistance"]


def check_collection(X, name: str = "X") -> List[np.ndarray]:
    """Validate a collection of series and return it as a list of float arrays.

    Raises
    ------
    ValidationError
        If ``X`` is empty, has more than two dimensions or holds a non-finite
        or empty series.
    """
    if isinstance(X, np.ndarray):
        if X.ndim == 1 and X.dtype != object:
            raise ValidationError(f"{name} must be 2-D (n_series, length); got a single series")
        if X.ndim > 2:
            raise ValidationError(f"{name} must be at most 2-D, got shape {X.shape}")
    try:
        items = [as_values(row) for row in X]
    except TypeError:
        raise ValidationError(f"{name} is not a collection of series") from None
    if not items:
        raise ValidationError(f"{name} is empty")
    return items


def _spec(measure, measure_params) -> MeasureSpec:
    return make_spec(measure, measure_params or {})


class ElasticNNClassifier(ClassifierMixin, BaseEstimator):
    """Exact 1-nearest-neighbour classifier under an elastic distance.

    Parameters
    ----------
    measure : str
        Measure name.
    measure_params : dict, optional
        Overrides of the measure defaults, e.g. ``{"g": 1.0}``.
    window : float, int, str or None
        Band as a fraction, absolute radius or ``None`` for unconstrained.
    cascade : str or sequence, optional
        Bounds applied before the DP, default depends on the measure.
    boundary_mode : {"glb", "none"}
    early_abandon : bool
    n_jobs : int
        Worker threads for ``predict``.

    Attributes
    ----------
    classes_ : ndarray
    stats_ : SearchStats
        Counters of the last ``predict``/``kneighbors`` call.
    """

    def __init__(self, measure: str = "dtw", measure_params: Optional[dict] = None, window=0.05,
                 cascade=None, boundary_mode: str = "glb", early_abandon: bool = True, n_jobs: int = 1):
        self.measure = measure
        self.measure_params = measure_params
        self.window = window
        self.cascade = cascade
        self.boundary_mode = boundary_mode
        self.early_abandon = early_abandon
        self.n_jobs = n_jobs

    def _cascade(self) -> Cascade:
        kw = dict(boundary_mode=self.boundary_mode, early_abandon=self.early_abandon)
        if self.cascade is None:
            return Cascade.default_for(self.spec_.kind, **kw)
        return Cascade.parse(self.cascade, **kw)

    def fit(self, X, y):
        self.spec_ = _spec(self.measure, self.measure_params)
        self.window_ = parse_window(self.window)
        self.train_ = check_collection(X)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != len(self.train_):
            raise ValidationError("y must be 1-D with one label per series")
        self.classes_, self._y_index = np.unique(y, return_inverse=True)
        self._cascade().check(self.spec_)
        return self

    def kneighbors(self, X):
        """Distance to and index of the nearest training series, each of shape ``(n, 1)``."""
        check_is_fitted(self, "train_")
        queries = check_collection(X)
        results, stats = search_many(self.spec_, self.train_, queries, self.window_, self._cascade(),
                                     threads=max(1, int(self.n_jobs)))
        self.stats_ = stats
        dist = np.array([[r.distance] for r in results])
        idx = np.array([[r.index] for r in results], dtype=np.int64)
        return dist, idx

    def predict(self, X):
        _, idx = self.kneighbors(X)
        return self.classes_[self._y_index[idx[:, 0]]]


class ElasticDBSCAN(ClusterMixin, BaseEstimator):
    """DBSCAN under an elastic distance with exact, bound-filtered range queries.

    Parameters
    ----------
    eps : float, optional
        Neighbourhood radius (inclusive). If omitted, ``eps_percentile``
        selects it from sampled pair distances.
    eps_percentile : float
        Quantile used when ``eps`` is None.
    min_samples : int
        Neighbours (including the point) needed for a core point.
    measure, measure_params, window, cascade :
        As in :class:`ElasticNNClassifier`.
    random_state : int
        Seed for the pair sample of the automatic eps.

    Attributes
    ----------
    labels_ : ndarray of int
        Cluster ids, ``-1`` for noise.
    core_sample_indices_ : ndarray
    eps_ : float
    stats_ : SearchStats
    """

    def __init__(self, eps: Optional[float] = None, eps_percentile: float = 0.05, min_samples: int = 5,
                 measure: str = "dtw", measure_params: Optional[dict] = None, window=0.05, cascade=None,
                 random_state: int = 0):
        self.eps = eps
        self.eps_percentile = eps_percentile
        self.min_samples = min_samples
        self.measure = measure
        self.measure_params = measure_params
        self.window = window
        self.cascade = cascade
        self.random_state = random_state

    def fit(self, X, y=None):
        spec = _spec(self.measure, self.measure_params)
        data = check_collection(X)
        if self.eps is not None:
            params = DbscanParams(eps=self.eps, min_pts=self.min_samples)
        else:
            params = DbscanParams(eps_percentile=self.eps_percentile, min_pts=self.min_samples,
                                  seed=int(self.random_state))
        cascade = None if self.cascade is None else Cascade.parse(self.cascade)
        res = dbscan(spec, data, params, self.window, cascade)
        self.labels_ = res.labels
        self.core_sample_indices_ = np.flatnonzero(res.core)
        self.eps_ = res.eps
        self.stats_ = res.stats
        return self


class PairwiseElasticDistance(TransformerMixin, BaseEstimator):
    """Map each series to its distances from the series seen in ``fit``.

    Useful for feeding precomputed distances to other estimators.
    """

    def __init__(self, measure: str = "dtw", measure_params: Optional[dict] = None, window=0.05):
        self.measure = measure
        self.measure_params = measure_params
        self.window = window

    def fit(self, X, y=None):
        self.spec_ = _spec(self.measure, self.measure_params)
        self.reference_ = check_collection(X)
        self.window_ = parse_window(self.window)
        return self

    def transform(self, X):
        check_is_fitted(self, "reference_")
        queries = check_collection(X)
        out = np.empty((len(queries), len(self.reference_)))
        spec = self.spec_
        for a, q in enumerate(queries):
            for b, r in enumerate(self.reference_):
                w = resolve_window(self.window_, len(q), len(r))
                out[a, b] = spec.trans(float(raw_cost(spec, q, r, w)), len(q), len(r))
        return out
