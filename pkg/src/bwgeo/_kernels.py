"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``BWGEO_USE_NUMBA`` is not
set to ``0``. Both paths are always importable as ``numpy_kernels`` and
(when available) ``numba_kernels`` so they can be compared directly.
"""

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------------------
# pure numpy
# ---------------------------------------------------------------------------


def _np_sylvester_eigbasis(bp, a):
    return bp / (a[:, None] + a[None, :])


def _np_segment_grid(sigma, lam, mixed, ts):
    ts = np.asarray(ts, dtype=np.float64)
    w0 = ((1.0 - ts) ** 2)[:, None, None]
    w1 = (ts**2)[:, None, None]
    wm = (2.0 * ts * (1.0 - ts))[:, None, None]
    return w0 * sigma[None] + w1 * lam[None] + wm * mixed[None]


def _np_sqrt_psd_batch(mats, rank_rel):
    d, u = np.linalg.eigh(mats)
    scale = np.max(np.abs(d), axis=-1, keepdims=True)
    d = np.where(d > rank_rel * scale, d, 0.0)
    return (u * np.sqrt(d)[..., None, :]) @ np.swapaxes(u, -1, -2)


def _np_pairwise_bw_sq(sqrts, traces):
    prods = sqrts[:, None] @ sqrts[None, :]
    nuc = np.linalg.svd(prods, compute_uv=False).sum(axis=-1)
    d2 = np.triu(np.maximum(traces[:, None] + traces[None, :] - 2.0 * nuc, 0.0), k=1)
    # exact zero diagonal and symmetry, matching the numba kernel
    return d2 + d2.T


numpy_kernels = SimpleNamespace(
    name="numpy",
    sylvester_eigbasis=_np_sylvester_eigbasis,
    segment_grid=_np_segment_grid,
    sqrt_psd_batch=_np_sqrt_psd_batch,
    pairwise_bw_sq=_np_pairwise_bw_sq,
)

# ---------------------------------------------------------------------------
# numba
# ---------------------------------------------------------------------------

numba_kernels = None

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None

if njit is not None:

    @njit(cache=True)
    def _nb_sylvester_eigbasis(bp, a):
        k = a.shape[0]
        z = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                z[i, j] = bp[i, j] / (a[i] + a[j])
        return z

    @njit(cache=True)
    def _nb_segment_grid(sigma, lam, mixed, ts):
        m = ts.shape[0]
        n = sigma.shape[0]
        out = np.empty((m, n, n))
        for p in range(m):
            t = ts[p]
            w0 = (1.0 - t) * (1.0 - t)
            w1 = t * t
            wm = 2.0 * t * (1.0 - t)
            for i in range(n):
                for j in range(n):
                    out[p, i, j] = w0 * sigma[i, j] + w1 * lam[i, j] + wm * mixed[i, j]
        return out

    @njit(cache=True)
    def _nb_sqrt_psd_batch(mats, rank_rel):
        m = mats.shape[0]
        n = mats.shape[1]
        out = np.empty((m, n, n))
        for p in range(m):
            d, u = np.linalg.eigh(np.ascontiguousarray(mats[p]))
            scale = 0.0
            for i in range(n):
                if abs(d[i]) > scale:
                    scale = abs(d[i])
            for i in range(n):
                d[i] = np.sqrt(d[i]) if d[i] > rank_rel * scale else 0.0
            out[p] = (u * d) @ u.T
        return out

    @njit(cache=True)
    def _nb_pairwise_bw_sq(sqrts, traces):
        m = sqrts.shape[0]
        d2 = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                _, s, _ = np.linalg.svd(sqrts[i] @ sqrts[j])
                val = traces[i] + traces[j] - 2.0 * s.sum()
                if val < 0.0:
                    val = 0.0
                d2[i, j] = val
                d2[j, i] = val
        return d2

    numba_kernels = SimpleNamespace(
        name="numba",
        sylvester_eigbasis=_nb_sylvester_eigbasis,
        segment_grid=_nb_segment_grid,
        sqrt_psd_batch=_nb_sqrt_psd_batch,
        pairwise_bw_sq=_nb_pairwise_bw_sq,
    )


def _select():
    flag = os.environ.get("BWGEO_USE_NUMBA", "1").strip().lower()
    if numba_kernels is not None and flag not in ("0", "false", "no", "off"):
        return numba_kernels
    return numpy_kernels


active = _select()
BACKEND = active.name


def sylvester_eigbasis(bp, a):
    """Divide ``bp`` entrywise by ``a_i + a_j``."""
    return active.sylvester_eigbasis(
        np.ascontiguousarray(bp, dtype=np.float64), np.ascontiguousarray(a, dtype=np.float64)
    )


def segment_grid(sigma, lam, mixed, ts):
    """Evaluate ``(1-t)^2 S + t^2 L + 2t(1-t) M`` on every ``t`` in ``ts``."""
    return active.segment_grid(
        np.ascontiguousarray(sigma, dtype=np.float64),
        np.ascontiguousarray(lam, dtype=np.float64),
        np.ascontiguousarray(mixed, dtype=np.float64),
        np.ascontiguousarray(ts, dtype=np.float64),
    )


def sqrt_psd_batch(mats, rank_rel):
    """Symmetric square roots of a stack of PSD matrices.

    Eigenvalues at or below ``rank_rel`` times the largest magnitude are
    set to zero before taking roots.
    """
    return active.sqrt_psd_batch(np.ascontiguousarray(mats, dtype=np.float64), float(rank_rel))


def pairwise_bw_sq(sqrts, traces):
    """Squared Bures-Wasserstein distances between all pairs of a stack.

    ``sqrts[i]`` is the square root of the i-th matrix and ``traces[i]``
    its trace. Uses the nuclear norm of ``sqrt_i @ sqrt_j``.
    """
    return active.pairwise_bw_sq(
        np.ascontiguousarray(sqrts, dtype=np.float64),
        np.ascontiguousarray(traces, dtype=np.float64),
    )
