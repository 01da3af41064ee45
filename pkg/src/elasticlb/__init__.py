"""Elastic time-series distances, graph lower bounds, exact 1-NN search and DBSCAN."""
from .core import (MeasureKind, MeasureParams, MeasureSpec, TimeSeries, ValidationError, Window,
                   delete_cost, make_spec, match_cost, resolve_window)
from .dp import DPResult, elastic_distance, elastic_distance_ea
from .envelopes import Envelope, build_envelope, weight_upper_envelope
from .bounds import (BoundKind, BoundResult, bglb, dbglb, glb, lb_keogh, lb_kim, lb_kim_fl,
                     lower_bound)

__version__ = "0.1.0"
