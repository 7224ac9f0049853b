"""Dense linear-algebra primitives with an explicit tolerance policy.

Every rank or zero decision made anywhere in the package goes through the
helpers in this module, so the geometry modules above it can be written as
if arithmetic were exact.

Symmetric matrices and factors are plain ``numpy.ndarray`` objects of
dtype float64. Zero-dimensional blocks (``n x 0``, ``0 x 0``) are valid
inputs and outputs everywhere.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import (
    AsymmetricInput,
    ConvergenceFailure,
    DimensionMismatch,
    FactorMismatch,
    NotPsd,
    NotSpd,
    RankDeficient,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "sym",
    "symmetrize",
    "eig_sym",
    "rank_with_tol",
    "sqrt_psd",
    "pinv_sym",
    "sylvester_spd",
    "polar_orthogonal",
    "orth_complement",
    "spectral_norm",
    "kernel_basis",
    "intersect_nontrivial",
    "eigenspaces",
    "check_factor",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used for rank, symmetry and equality decisions.

    Attributes
    ----------
    rank_rel : float
        Relative threshold: a value counts as nonzero when its magnitude
        exceeds ``rank_rel`` times the reference scale (by default the
        largest magnitude in the same spectrum).
    sym_abs : float
        Largest accepted entry of ``|M - M^T|`` before an input is rejected.
    eig_cluster : float
        Relative gap under which neighbouring eigenvalues share an eigenspace.
    geo_tol : float
        Default tolerance for geometric equality checks.
    """

    rank_rel: float = 1e-9
    sym_abs: float = 1e-8
    eig_cluster: float = 1e-7
    geo_tol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "sym_abs", "eig_cluster", "geo_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.rank_rel < 1:
            raise ValueError("rank_rel must be < 1")


DEFAULT_TOL = Tolerances()


def _as_square(m):
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def sym(m):
    """Symmetric part ``(M + M^T) / 2``."""
    m = np.asarray(m, dtype=np.float64)
    return 0.5 * (m + m.T)


def symmetrize(m, tol=DEFAULT_TOL):
    """Return ``(M + M^T)/2`` after checking that ``M`` is nearly symmetric.

    Raises
    ------
    AsymmetricInput
        If ``max |M - M^T|`` exceeds ``tol.sym_abs``.
    """
    a = _as_square(m)
    if not np.all(np.isfinite(a)):
        raise AsymmetricInput("matrix has non-finite entries")
    if a.size and np.max(np.abs(a - a.T)) > tol.sym_abs:
        raise AsymmetricInput(f"asymmetry {np.max(np.abs(a - a.T)):.3g} exceeds {tol.sym_abs:g}")
    return 0.5 * (a + a.T)


def eig_sym(s):
    """Eigendecomposition of a symmetric matrix.

    Returns
    -------
    U : ndarray (n, n)
        Orthogonal matrix of eigenvectors (columns).
    d : ndarray (n,)
        Eigenvalues in ascending order, ``S = U diag(d) U^T``.
    """
    a = _as_square(s)
    if a.shape[0] == 0:
        return np.zeros((0, 0)), np.zeros(0)
    try:
        d, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    return u, d


def rank_with_tol(values, tol=DEFAULT_TOL, scale=None):
    """Count entries of ``values`` that are numerically nonzero.

    An entry counts when ``|v| > tol.rank_rel * ref`` where ``ref`` is
    ``scale`` if given, else ``max |v|``. An all-zero list has rank 0.
    """
    v = np.abs(np.asarray(values, dtype=np.float64)).ravel()
    if v.size == 0:
        return 0
    ref = float(np.max(v)) if scale is None else float(scale)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(v > tol.rank_rel * ref))


def _zero_band(d, tol, scale=None):
    if scale is None:
        scale = float(np.max(np.abs(d))) if d.size else 0.0
    return tol.rank_rel * scale


def sqrt_psd(s, tol=DEFAULT_TOL, scale=None):
    """Symmetric PSD square root.

    Eigenvalues inside the band ``[-rank_rel * lmax, rank_rel * lmax]`` are
    treated as zero, so rounding noise on a singular input does not turn
    into ``sqrt(eps)``-sized garbage in the result. ``scale`` replaces
    ``lmax`` when the input is a product whose own spectrum may be pure noise.

    Raises
    ------
    NotPsd
        If an eigenvalue lies below ``-rank_rel * lmax``.
    """
    u, d = eig_sym(s)
    if d.size == 0:
        return np.zeros((0, 0))
    band = _zero_band(d, tol, scale)
    if d[0] < -band:
        raise NotPsd(f"smallest eigenvalue {d[0]:.3g} is below the clipping band")
    root = np.where(d > band, np.sqrt(np.clip(d, 0.0, None)), 0.0)
    return sym((u * root) @ u.T)


def pinv_sym(s, tol=DEFAULT_TOL, scale=None):
    """Moore-Penrose inverse of a symmetric matrix via its eigenbasis."""
    u, d = eig_sym(s)
    if d.size == 0:
        return np.zeros((0, 0))
    band = _zero_band(d, tol, scale)
    inv = np.zeros_like(d)
    keep = np.abs(d) > band
    inv[keep] = 1.0 / d[keep]
    return sym((u * inv) @ u.T)


def sylvester_spd(a, b, tol=DEFAULT_TOL):
    """Solve ``A Z + Z A = B`` for symmetric ``Z`` with ``A`` SPD.

    In the eigenbasis ``A = U diag(a) U^T`` the solution is
    ``Z'_ij = B'_ij / (a_i + a_j)`` with ``B' = U^T B U``.
    """
    a_ = _as_square(a)
    b_ = _as_square(b)
    if a_.shape != b_.shape:
        raise DimensionMismatch(f"A is {a_.shape}, B is {b_.shape}")
    if a_.shape[0] == 0:
        return np.zeros((0, 0))
    u, ev = eig_sym(a_)
    if ev[0] <= _zero_band(ev, tol):
        raise NotSpd(f"A has non-positive eigenvalue {ev[0]:.3g}")
    zp = _kernels.sylvester_eigbasis(u.T @ b_ @ u, ev)
    return sym(u @ zp @ u.T)


def _closest_orthogonal(m):
    """Orthogonal polar factor of ``m`` (maximizes ``tr(Q^T m)``)."""
    p, _, qt = np.linalg.svd(m)
    return p @ qt


def polar_orthogonal(m, tol=DEFAULT_TOL):
    """Polar decomposition ``M = H R`` with ``H = (M M^T)^{1/2}`` and ``R`` orthogonal.

    When ``M`` is singular, ``R`` is fixed on ``range(M^T)`` and free on its
    complement. The free part is chosen as the orthogonal map between the
    two null spaces closest to the identity, so e.g. ``diag(5, 0)`` gives
    ``R = I``. This choice does not depend on the signs returned by the SVD.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0)), np.zeros((0, 0))
    u, s, vt = np.linalg.svd(a)
    v = vt.T
    h = sym((u * s) @ u.T)
    r = rank_with_tol(s, tol)
    rot = u[:, :r] @ v[:, :r].T
    if r < n:
        u0, v0 = u[:, r:], v[:, r:]
        # R v0 must land in span(u0); among these maps pick the one maximizing tr(R).
        w = _closest_orthogonal(u0.T @ v0)
        rot = rot + u0 @ w @ v0.T
    return h, rot


def orth_complement(x, tol=DEFAULT_TOL):
    """Orthonormal basis of the orthogonal complement of ``range(X)``.

    Raises
    ------
    RankDeficient
        If ``X`` does not have full column rank.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {x.shape}")
    n, k = x.shape
    if k == 0:
        return np.eye(n)
    u, s, _ = np.linalg.svd(x, full_matrices=True)
    if rank_with_tol(s, tol) < k:
        raise RankDeficient(f"factor of shape {x.shape} is rank deficient")
    return u[:, k:]


def spectral_norm(m):
    """Largest singular value; 0 for empty or zero matrices."""
    a = np.asarray(m, dtype=np.float64)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def kernel_basis(s, tol=DEFAULT_TOL):
    """Orthonormal basis of the numerical kernel of a symmetric matrix."""
    u, d = eig_sym(s)
    if d.size == 0:
        return np.zeros((0, 0))
    band = _zero_band(d, tol)
    mask = np.abs(d) <= band
    return u[:, mask]


def intersect_nontrivial(basis, m, tol=DEFAULT_TOL, scale=None):
    """Decide whether ``span(basis)`` meets ``ker(M)`` nontrivially.

    ``M`` may be rectangular: only its kernel matters. The decision is made on
    the smallest singular value of ``M @ basis`` compared with
    ``rank_rel * max(||M||_2, scale)``.
    """
    b = np.asarray(basis, dtype=np.float64)
    a = np.asarray(m, dtype=np.float64)
    if b.ndim != 2 or b.shape[1] == 0:
        return False
    prod = a @ b
    if prod.shape[0] < prod.shape[1] or prod.size == 0:
        return True
    ref = spectral_norm(a)
    if scale is not None:
        ref = max(ref, float(scale))
    if ref == 0.0:
        return True
    smin = np.linalg.svd(prod, compute_uv=False)[-1]
    return bool(smin <= tol.rank_rel * ref)


def eigenspaces(s, tol=DEFAULT_TOL):
    """Group the eigenpairs of a symmetric matrix into eigenspaces.

    Consecutive eigenvalues whose gap is at most ``eig_cluster`` times the
    spectral scale are merged. Returns a list of ``(value, basis)`` pairs in
    ascending order of value, where ``value`` is the cluster mean.
    """
    u, d = eig_sym(s)
    if d.size == 0:
        return []
    scale = float(np.max(np.abs(d)))
    gap = tol.eig_cluster * scale
    groups = []
    start = 0
    for i in range(1, d.size + 1):
        if i == d.size or d[i] - d[i - 1] > gap:
            groups.append((float(np.mean(d[start:i])), u[:, start:i]))
            start = i
    return groups


def check_factor(x, sigma, tol=DEFAULT_TOL):
    """Raise ``FactorMismatch`` unless ``X X^T`` matches ``Sigma``.

    The residual is measured entrywise, relative to ``max(1, max|Sigma|)``
    and compared with ``tol.sym_abs``.
    """
    x = np.asarray(x, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != sigma.shape[0]:
        raise FactorMismatch(f"factor shape {x.shape} does not fit {sigma.shape}")
    if sigma.size == 0:
        return x
    err = np.max(np.abs(x @ x.T - sigma))
    if err > tol.sym_abs * max(1.0, float(np.max(np.abs(sigma)))):
        raise FactorMismatch(f"X X^T differs from Sigma by {err:.3g}")
    return x
