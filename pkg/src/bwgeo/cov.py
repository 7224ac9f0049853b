"""The metric space of covariance matrices of any rank.

Distances, registration of factors, and the complete family of minimizing
geodesic segments between two PSD matrices. The family is indexed by a
``(k-r) x (l-r)`` matrix in the closed unit ball of the spectral norm, where
``k >= l`` are the two ranks and ``r = rank(Sigma @ Lambda)``.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, NonConstantRank, NotPsd, ParamOutOfBall
from .linalg import (
    DEFAULT_TOL,
    eig_sym,
    pinv_sym,
    polar_orthogonal,
    rank_with_tol,
    spectral_norm,
    sqrt_psd,
    sym,
    symmetrize,
)
from .segment import GeodesicSegment

__all__ = [
    "CovPoint",
    "AlignedFactors",
    "BallParam",
    "Count",
    "GeodesicCount",
    "RankProfile",
    "as_cov",
    "bw_distance",
    "register",
    "rank_product",
    "aligned_factors",
    "minimizing_geodesic",
    "canonical_geodesic",
    "count_minimizing_geodesics",
    "is_minimal_rank_param",
    "rank_profile",
    "interpolate",
]


@dataclass(frozen=True, eq=False)
class CovPoint:
    """A certified PSD matrix.

    Attributes
    ----------
    mat : ndarray (n, n)
        The symmetrized input.
    k : int
        Numerical rank.
    U, d : ndarray
        Eigenvectors and eigenvalues (ascending). Eigenvalues inside the rank
        band are stored as exact zeros.
    clip : float
        Magnitude of the most negative eigenvalue that was clipped to zero.
    """

    mat: np.ndarray
    k: int
    U: np.ndarray
    d: np.ndarray
    clip: float = 0.0

    @classmethod
    def from_matrix(cls, m, tol=DEFAULT_TOL):
        s = symmetrize(m, tol)
        u, d = eig_sym(s)
        if d.size == 0:
            return cls(s, 0, u, d)
        band = tol.rank_rel * float(np.max(np.abs(d)))
        if d[0] < -band:
            raise NotPsd(f"smallest eigenvalue {d[0]:.3g} is below the clipping band")
        clip = float(max(0.0, -d[0]))
        d = np.where(d > band, d, 0.0)
        return cls(s, int(np.count_nonzero(d)), u, d, clip)

    @property
    def n(self):
        return self.mat.shape[0]

    def factor(self):
        """Thin factor ``U_k D_k^{1/2}`` (``n x k``), columns by decreasing eigenvalue."""
        idx = np.argsort(self.d)[::-1][: self.k]
        return self.U[:, idx] * np.sqrt(self.d[idx])

    def sqrt(self):
        return sym((self.U * np.sqrt(self.d)) @ self.U.T)


def as_cov(x, tol=DEFAULT_TOL):
    return x if isinstance(x, CovPoint) else CovPoint.from_matrix(x, tol)


def _pair(sigma, lam, tol):
    sigma, lam = as_cov(sigma, tol), as_cov(lam, tol)
    if sigma.n != lam.n:
        raise DimensionMismatch(f"dimensions differ: {sigma.n} vs {lam.n}")
    return sigma, lam


def bw_distance(sigma, lam, tol=DEFAULT_TOL):
    """Bures-Wasserstein distance ``tr(S + L - 2 (S^{1/2} L S^{1/2})^{1/2})^{1/2}``.

    The trace of the square root is evaluated as the nuclear norm of
    ``X0^T Y0`` for thin factors, which keeps singular inputs accurate.
    """
    sigma, lam = _pair(sigma, lam, tol)
    x0, y0 = sigma.factor(), lam.factor()
    cross = np.linalg.svd(x0.T @ y0, compute_uv=False).sum() if x0.size and y0.size else 0.0
    d2 = sigma.d.sum() + lam.d.sum() - 2.0 * cross
    return float(np.sqrt(max(d2, 0.0)))


def register(x, y, tol=DEFAULT_TOL):
    """Orthogonal ``R`` with ``X^T Y = (X^T Lambda X)^{1/2} R``.

    Then ``||Y R^T - X||_F`` equals the distance between ``X X^T`` and
    ``Y Y^T``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"factor shapes differ: {x.shape} vs {y.shape}")
    return polar_orthogonal(x.T @ y, tol)[1]


def rank_product(sigma, lam, tol=DEFAULT_TOL):
    """Rank ``r`` of ``Sigma Lambda``, computed as the rank of ``X0^T Y0``."""
    sigma, lam = _pair(sigma, lam, tol)
    x0, y0 = sigma.factor(), lam.factor()
    if x0.size == 0 or y0.size == 0:
        return 0
    s = np.linalg.svd(x0.T @ y0, compute_uv=False)
    return rank_with_tol(s, tol, scale=spectral_norm(x0) * spectral_norm(y0))


@dataclass(frozen=True, eq=False)
class AlignedFactors:
    """Square factors ``X, Y`` with ``X^T Y = Diag(D_r, 0)``.

    ``X`` has ``k`` active leading columns and ``Y`` has ``l`` (``k >= l``);
    the remaining columns are zero.
    """

    X: np.ndarray
    Y: np.ndarray
    D_r: np.ndarray
    n: int
    k: int
    l: int  # noqa: E741
    r: int

    @property
    def dims(self):
        n, k, l, r = self.n, self.k, self.l, self.r
        return (r, k - r, l - r, n - k, n - l)

    @property
    def X_r(self):
        return self.X[:, : self.r]

    @property
    def X_kr(self):
        return self.X[:, self.r : self.k]

    @property
    def Y_r(self):
        return self.Y[:, : self.r]

    @property
    def Y_lr(self):
        return self.Y[:, self.r : self.l]

    @property
    def ball_shape(self):
        return (self.k - self.r, self.l - self.r)


def aligned_factors(sigma, lam, tol=DEFAULT_TOL):
    """Factors of ``Sigma`` and ``Lambda`` aligned by an SVD of ``X0^T Y0``.

    Requires ``rank(Sigma) >= rank(Lambda)``.
    """
    sigma, lam = _pair(sigma, lam, tol)
    n, k, l = sigma.n, sigma.k, lam.k  # noqa: E741
    if k < l:
        raise DimensionMismatch(f"aligned_factors expects rank(Sigma) >= rank(Lambda), got {k} < {l}")
    x0, y0 = sigma.factor(), lam.factor()
    x = np.zeros((n, n))
    y = np.zeros((n, n))
    if l == 0:
        x[:, :k] = x0
        return AlignedFactors(x, y, np.zeros(0), n, k, l, 0)
    uk, s, vlt = np.linalg.svd(x0.T @ y0)
    r = rank_with_tol(s, tol, scale=spectral_norm(x0) * spectral_norm(y0))
    x[:, :k] = x0 @ uk
    y[:, :l] = y0 @ vlt.T
    return AlignedFactors(x, y, s[:r].copy(), n, k, l, r)


@dataclass(frozen=True, eq=False)
class BallParam:
    """Matrix ``R0`` of shape ``(k-r, l-r)`` with spectral norm at most one."""

    R0: np.ndarray

    def __post_init__(self):
        r0 = np.asarray(self.R0, dtype=np.float64)
        if r0.ndim != 2:
            raise DimensionMismatch(f"R0 must be a matrix, got shape {r0.shape}")
        object.__setattr__(self, "R0", r0)

    @property
    def norm(self):
        return spectral_norm(self.R0)


def _oriented(sigma, lam, tol):
    sigma, lam = _pair(sigma, lam, tol)
    if sigma.k < lam.k:
        return lam, sigma, True
    return sigma, lam, False


def minimizing_geodesic(sigma, lam, r0=None, tol=DEFAULT_TOL):
    """Minimizing geodesic indexed by a ball parameter ``R0``.

    The mixed term is ``sym(X_r Y_r^T + X_{k-r} R0 Y_{l-r}^T)`` in aligned
    factors. ``R0=None`` selects the zero parameter. When ``rank(Sigma) <
    rank(Lambda)`` the roles are swapped internally (``R0`` is then read in
    the swapped orientation); the returned segment always runs from
    ``Sigma`` to ``Lambda``.

    Raises
    ------
    DimensionMismatch
        If ``R0`` does not have shape ``(k-r, l-r)``.
    ParamOutOfBall
        If ``||R0||_2 > 1`` beyond ``tol.geo_tol``.
    """
    a, b, swapped = _oriented(sigma, lam, tol)
    al = aligned_factors(a, b, tol)
    shape = al.ball_shape
    if r0 is None:
        r0 = np.zeros(shape)
    r0 = r0.R0 if isinstance(r0, BallParam) else np.asarray(r0, dtype=np.float64)
    if r0.ndim != 2 or r0.shape != shape:
        raise DimensionMismatch(f"R0 must have shape {shape}, got {r0.shape}")
    if spectral_norm(r0) > 1.0 + tol.geo_tol:
        raise ParamOutOfBall(f"||R0||_2 = {spectral_norm(r0):.6g} > 1")
    mixed = sym(al.X_r @ al.Y_r.T + al.X_kr @ r0 @ al.Y_lr.T)
    src, dst = (b, a) if swapped else (a, b)
    prov = {"R0": r0, "swapped": swapped, "dims": (al.n, al.k, al.l, al.r)}
    return GeodesicSegment(src.mat, dst.mat, mixed, prov)


def canonical_geodesic(sigma, lam, tol=DEFAULT_TOL):
    """Minimizing geodesic of the zero ball parameter, in closed form.

    Mixed term ``sym(S^{1/2} ((S^{1/2} L S^{1/2})^{1/2})^+ S^{1/2} L)``, valid
    for any ranks.
    """
    sigma, lam = _pair(sigma, lam, tol)
    root = sigma.sqrt()
    scale = float(np.max(np.abs(sigma.d), initial=0.0)) * float(np.linalg.norm(lam.mat, 2))
    mid = sqrt_psd(sym(root @ lam.mat @ root), tol, scale)
    mixed = sym(root @ pinv_sym(mid, tol, np.sqrt(scale)) @ root @ lam.mat)
    return GeodesicSegment(sigma.mat, lam.mat, mixed, {"R0": "zero", "kind": "canonical"})


class Count(enum.Enum):
    One = "one"
    Two = "two"
    Infinite = "infinite"
    NotApplicable = "n/a"


@dataclass(frozen=True)
class GeodesicCount:
    """Number of minimizing geodesics.

    ``in_stratum`` counts those of minimal rank (staying in the stratum of
    the higher-rank endpoint on ``[0, 1)``); ``in_cov`` counts all of them.
    """

    in_stratum: Count
    in_cov: Count
    n: int = 0
    k: int = 0
    l: int = 0  # noqa: E741
    r: int = 0

    def as_dict(self):
        return {
            "in_stratum": self.in_stratum.value,
            "in_cov": self.in_cov.value,
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "r": self.r,
        }


def count_minimizing_geodesics(sigma, lam, tol=DEFAULT_TOL):
    """Classify the number of minimizing geodesics between two PSD matrices."""
    a, b, _ = _oriented(sigma, lam, tol)
    k, l = a.k, b.k  # noqa: E741
    r = rank_product(a, b, tol)
    in_cov = Count.One if r == l else Count.Infinite
    if r == l:
        in_stratum = Count.One
    elif k == l and r == k - 1:
        in_stratum = Count.Two
    else:
        in_stratum = Count.Infinite
    return GeodesicCount(in_stratum, in_cov, a.n, k, l, r)


def is_minimal_rank_param(dims, r0, tol=DEFAULT_TOL):
    """True iff ``R0`` has orthonormal columns (``R0^T R0 = I``).

    ``dims`` is an ``AlignedFactors`` or a ``(k, l, r)`` triple. An empty
    parameter (``l == r``) qualifies.
    """
    if isinstance(dims, AlignedFactors):
        k, l, r = dims.k, dims.l, dims.r  # noqa: E741
    else:
        k, l, r = dims  # noqa: E741
    r0 = r0.R0 if isinstance(r0, BallParam) else np.asarray(r0, dtype=np.float64)
    if r0.shape != (k - r, l - r):
        raise DimensionMismatch(f"R0 must have shape {(k - r, l - r)}, got {r0.shape}")
    if l - r == 0:
        return True
    return bool(np.max(np.abs(r0.T @ r0 - np.eye(l - r))) <= tol.geo_tol)


@dataclass(frozen=True)
class RankProfile:
    points: list
    rank: int
    constant: bool


def rank_profile(seg, grid_size=9, tol=DEFAULT_TOL, strict=True):
    """Numerical ranks of a segment on a uniform interior grid of ``(0, 1)``.

    Raises
    ------
    NonConstantRank
        If ``strict`` and the interior ranks differ.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    ts = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    mats = seg.eval(ts)
    ranks = [rank_with_tol(np.linalg.eigvalsh(m), tol) for m in mats]
    points = [(float(t), int(p)) for t, p in zip(ts, ranks)]
    constant = len(set(ranks)) == 1
    if strict and not constant:
        raise NonConstantRank(f"interior ranks vary: {sorted(set(ranks))}")
    return RankProfile(points, max(ranks), constant)


def interpolate(sigma, lam, t, tol=DEFAULT_TOL):
    """Point at time ``t`` in ``[0, 1]`` on the canonical geodesic."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return canonical_geodesic(sigma, lam, tol).eval(t)
