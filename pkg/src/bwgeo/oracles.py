"""Brute-force reference checks.

These routines are slow on purpose and share no code path with the closed
forms they verify beyond the distance itself. They exist for tests and
diagnostics; the geometry modules never call them.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cov import bw_distance
from .linalg import DEFAULT_TOL, sym

__all__ = [
    "CurveSampler",
    "polyline_length",
    "check_minimizing",
    "random_orthogonal",
    "procrustes_sampled",
    "velocity_check",
]


@dataclass(frozen=True)
class CurveSampler:
    """A curve ``t -> c(t)`` of symmetric matrices on ``[a, b]``."""

    func: object
    a: float = 0.0
    b: float = 1.0

    def __call__(self, t):
        return np.asarray(self.func(t), dtype=np.float64)

    def grid(self, n):
        return np.linspace(self.a, self.b, n + 1)


def _as_sampler(c):
    return c if isinstance(c, CurveSampler) else CurveSampler(c)


def polyline_length(c, n, tol=DEFAULT_TOL):
    """Length of the inscribed polyline on a uniform grid with ``n`` steps."""
    if n < 2:
        raise ValueError("n must be at least 2")
    c = _as_sampler(c)
    pts = [c(t) for t in c.grid(n)]
    return float(sum(bw_distance(sym(p), sym(q), tol) for p, q in zip(pts[:-1], pts[1:])))


def _grid_distances(mats, tol):
    mats = np.stack([sym(m) for m in mats])
    roots = _kernels.sqrt_psd_batch(mats, tol.rank_rel)
    traces = np.trace(mats, axis1=1, axis2=2)
    return np.sqrt(_kernels.pairwise_bw_sq(roots, traces))


def check_minimizing(seg, n, tol=1e-7, tols=DEFAULT_TOL):
    """Pairwise proportionality test on the grid ``t_i = i / n``.

    Returns ``(ok, worst)`` where ``worst`` is the largest value of
    ``|d(seg(s), seg(t)) - (t - s) d(seg(0), seg(1))|`` over grid pairs.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    ts = np.linspace(0.0, 1.0, n + 1)
    dist = _grid_distances(seg.eval(ts), tols)
    total = bw_distance(seg.eval(0.0), seg.eval(1.0), tols)
    gaps = np.abs(ts[None, :] - ts[:, None])
    worst = float(np.max(np.abs(dist - gaps * total)))
    return worst <= tol, worst


def random_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix from a QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def procrustes_sampled(x, y, trials, seed=0):
    """Smallest ``||Y R^T - X||_F`` over ``trials`` random orthogonal ``R``.

    An upper bound on the distance between ``X X^T`` and ``Y Y^T``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(seed)
    k = x.shape[1]
    best = np.inf
    for _ in range(trials):
        rot = random_orthogonal(k, rng)
        best = min(best, float(np.linalg.norm(y @ rot.T - x)))
    return best


def velocity_check(seg, v_claimed, h=1e-6):
    """Forward-difference residual ``||(seg(h) - seg(0)) / h - V||_max``."""
    if not 0.0 < h <= 1e-3:
        raise ValueError("h must lie in (0, 1e-3]")
    fd = (seg.eval(h) - seg.eval(0.0)) / h
    return float(np.max(np.abs(fd - np.asarray(v_claimed, dtype=np.float64))))
