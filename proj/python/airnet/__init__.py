"""Queueing-network delay analysis core (compiled extension re-exports)."""

from ._airnet import (
    __version__,
    dbscan,
    entropy,
    gc_distance_nm,
    kdistance_epsilon,
    resample,
    run_profile,
    score,
)

__all__ = [
    "__version__",
    "dbscan",
    "entropy",
    "gc_distance_nm",
    "kdistance_epsilon",
    "resample",
    "run_profile",
    "score",
]
