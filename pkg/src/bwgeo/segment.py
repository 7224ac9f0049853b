"""Value types shared by the geometry modules."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = ["OpenInterval", "GeodesicSegment"]


@dataclass(frozen=True)
class OpenInterval:
    """Open interval ``(lo, hi)`` around 0; either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < 0.0 < self.hi):
            raise ValueError(f"interval ({self.lo}, {self.hi}) must contain 0")

    def __contains__(self, t):
        return self.lo < t < self.hi

    @property
    def bounded(self):
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    """Curve ``t -> (1-t)^2 Sigma + t^2 Lambda + 2 t (1-t) M`` on ``[0, 1]``.

    Every geodesic segment produced by this package has this form; only
    the mixed term ``M`` differs. ``provenance`` records how the segment
    was built (rotation, ball parameter, whether endpoints were swapped).
    """

    sigma: np.ndarray
    lam: np.ndarray
    mixed: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.sigma.shape[0]

    def eval(self, t):
        """Evaluate at a scalar ``t`` (returns ``(n, n)``) or an array of times."""
        if np.ndim(t) == 0:
            t = float(t)
            if t == 0.0:
                return self.sigma.copy()
            if t == 1.0:
                return self.lam.copy()
            return (1 - t) ** 2 * self.sigma + t**2 * self.lam + 2 * t * (1 - t) * self.mixed
        ts = np.asarray(t, dtype=np.float64)
        out = _kernels.segment_grid(self.sigma, self.lam, self.mixed, ts)
        out[ts == 0.0] = self.sigma
        out[ts == 1.0] = self.lam
        return out

    __call__ = eval

    def reversed(self):
        """Same curve traversed from ``Lambda`` to ``Sigma``."""
        prov = dict(self.provenance)
        prov["reversed"] = not prov.get("reversed", False)
        return GeodesicSegment(self.lam, self.sigma, self.mixed, prov)

    def velocity(self, t=0.0):
        """Exact derivative of the quadratic curve at ``t``."""
        return -2 * (1 - t) * self.sigma + 2 * t * self.lam + (2 - 4 * t) * self.mixed
