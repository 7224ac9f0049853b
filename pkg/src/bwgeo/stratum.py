"""Bures-Wasserstein geometry on the manifold of PSD matrices of fixed rank k.

Points are handled through the quotient ``X -> X X^T`` of full-rank
``n x k`` factors. Unless a factor is passed explicitly, the canonical
factor ``X = U D^{1/2}`` from the eigendecomposition ``Sigma = U D U^T`` is
used, and all rotation-indexed quantities refer to it.
"""

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cov import aligned_factors, as_cov, rank_product
from .exceptions import NotPreimage, NotPsd, NotTangent, NotUnique, RankMismatch
from .linalg import (
    DEFAULT_TOL,
    check_factor,
    eig_sym,
    eigenspaces,
    intersect_nontrivial,
    orth_complement,
    pinv_sym,
    spectral_norm,
    sqrt_psd,
    sym,
    sylvester_spd,
    symmetrize,
)
from .segment import GeodesicSegment, OpenInterval
from .spd import OutOfDomainWarning

__all__ = [
    "StratumPoint",
    "StratumTangent",
    "RotationCandidate",
    "LogKind",
    "LogFamily",
    "project_tangent",
    "horizontal_lift_stratum",
    "metric_stratum",
    "exp_stratum",
    "definition_interval_stratum",
    "cut_time_stratum",
    "is_preimage",
    "tangent_from_rotation",
    "rotation_from_tangent",
    "logarithms_stratum",
    "log_map_stratum",
    "geodesic_stratum_by_rotation",
]


@dataclass(frozen=True, eq=False)
class StratumPoint:
    """PSD matrix of rank ``k`` stored as ``U diag(D) U^T``.

    ``U`` (``n x k``) has orthonormal columns sorted by decreasing ``D``;
    ``U_perp`` completes it to an orthogonal matrix.
    """

    mat: np.ndarray
    k: int
    U: np.ndarray
    D: np.ndarray
    U_perp: np.ndarray

    @classmethod
    def from_matrix(cls, m, tol=DEFAULT_TOL):
        s = symmetrize(m, tol)
        u, d = eig_sym(s)
        if d.size == 0:
            return cls(s, 0, u, d, u)
        band = tol.rank_rel * float(np.max(np.abs(d)))
        if d[0] < -band:
            raise NotPsd(f"smallest eigenvalue {d[0]:.3g} is below the clipping band")
        order = np.argsort(d)[::-1]
        u, d = u[:, order], d[order]
        k = int(np.count_nonzero(d > band))
        return cls(s, k, u[:, :k], d[:k], u[:, k:])

    @property
    def n(self):
        return self.mat.shape[0]

    @property
    def X(self):
        """Canonical factor ``U D^{1/2}``."""
        return self.U * np.sqrt(self.D)

    @property
    def pinv(self):
        return (self.U / self.D) @ self.U.T

    @property
    def proj_perp(self):
        return self.U_perp @ self.U_perp.T


def as_stratum(x, tol=DEFAULT_TOL):
    return x if isinstance(x, StratumPoint) else StratumPoint.from_matrix(x, tol)


@dataclass(frozen=True, eq=False)
class StratumTangent:
    """Tangent vector at a stratum point, with cached derived quantities.

    Attributes
    ----------
    S : ndarray (n, n)
        ``U S_D(U^T V U) U^T``.
    F0 : ndarray (k, k)
        ``S_D(U^T V U)``; its spectrum governs the cut time.
    N : ndarray (n-k, k)
        ``U_perp^T V U D^{-1}``. ``M0 = N^T N`` and ``ker(M0) = ker(N)``.
    """

    base: StratumPoint
    v: np.ndarray
    S: np.ndarray
    F0: np.ndarray
    N: np.ndarray

    @classmethod
    def at(cls, base, v, tol=DEFAULT_TOL, check=True):
        base = as_stratum(base, tol)
        v = symmetrize(v, tol)
        if check and base.n:
            normal = base.U_perp.T @ v @ base.U_perp
            if normal.size and np.max(np.abs(normal)) > tol.geo_tol * max(1.0, float(np.max(np.abs(v)))):
                raise NotTangent("U_perp^T V U_perp is not zero; use project_tangent")
        u = base.U
        f0 = sylvester_spd(np.diag(base.D), u.T @ v @ u, tol) if base.k else np.zeros((0, 0))
        n_fac = (base.U_perp.T @ v @ u) / base.D
        return cls(base, v, u @ f0 @ u.T, f0, n_fac)

    @property
    def M0(self):
        return self.N.T @ self.N

    @property
    def W(self):
        """Quadratic coefficient of the geodesic ``Sigma + tV + t^2 W``."""
        b = self.base
        p = b.proj_perp
        s, v = self.S, self.v
        return sym(s @ b.mat @ s + s @ v @ p + p @ v @ s + p @ v @ b.pinv @ v @ p)


def _tangent(sigma, v, tol):
    if isinstance(v, StratumTangent):
        return v
    return StratumTangent.at(sigma, v, tol)


def project_tangent(sigma, w, tol=DEFAULT_TOL):
    """Orthogonal projection ``W - P W P`` with ``P = I - U U^T``."""
    sigma = as_stratum(sigma, tol)
    w = symmetrize(w, tol)
    p = sigma.proj_perp
    return StratumTangent.at(sigma, w - p @ w @ p, tol, check=False)


def horizontal_lift_stratum(x, v, tol=DEFAULT_TOL):
    """Horizontal lift of ``V`` at a full-rank factor ``X`` (``n x k``).

    ``V# = X (X^T X)^{-1} F + X_perp K`` with ``F = S_{X^T X}(X^T V X)`` and
    ``K = X_perp^T V X (X^T X)^{-1}``.
    """
    x = np.asarray(x, dtype=np.float64)
    if isinstance(v, StratumTangent):
        check_factor(x, v.base.mat, tol)
        vm = v.v
    else:
        vm = _tangent(x @ x.T, v, tol).v
    g = x.T @ x
    g_inv = np.linalg.inv(g)
    f = sylvester_spd(g, x.T @ vm @ x, tol)
    x_perp = orth_complement(x, tol)
    k_mat = x_perp.T @ vm @ x @ g_inv
    return x @ g_inv @ f + x_perp @ k_mat


def metric_stratum(sigma, v, w, tol=DEFAULT_TOL):
    """Inner product ``tr(S_V Sigma S_W) + tr(V Sigma^+ W (I - U U^T))``."""
    sigma = as_stratum(sigma, tol)
    tv, tw = _tangent(sigma, v, tol), _tangent(sigma, w, tol)
    first = np.trace(tv.S @ sigma.mat @ tw.S)
    second = np.trace(tv.v @ sigma.pinv @ tw.v @ sigma.proj_perp)
    return float(first + second)


def _spectral_cases(values, tol):
    """Open interval from the smallest and largest relevant eigenvalues."""
    if len(values) == 0:
        return OpenInterval(-math.inf, math.inf)
    lo_val, hi_val = min(values), max(values)
    band = tol.rank_rel * max(abs(lo_val), abs(hi_val))
    lo = -1.0 / hi_val if hi_val > band else -math.inf
    hi = -1.0 / lo_val if lo_val < -band else math.inf
    return OpenInterval(lo, hi)


def _definition_set(tan, tol):
    """Eigenvalues of F0 whose eigenspace meets ker(M0) nontrivially."""
    b = tan.base
    if b.k == 0:
        return []
    ref = spectral_norm(tan.v) / float(np.min(b.D))
    return [lam for lam, basis in eigenspaces(tan.F0, tol) if intersect_nontrivial(basis, tan.N, tol, scale=ref)]


def definition_interval_stratum(sigma, v, tol=DEFAULT_TOL):
    """Maximal open interval on which ``Exp_Sigma(tV)`` keeps rank ``k``."""
    sigma = as_stratum(sigma, tol)
    return _spectral_cases(_definition_set(_tangent(sigma, v, tol), tol), tol)


def cut_time_stratum(sigma, v, tol=DEFAULT_TOL, backward=False):
    """Cut time ``-1/lmin(F0)`` if ``lmin < 0`` else ``inf``.

    With ``backward=True`` returns the cut time of ``-V``, i.e. ``1/lmax(F0)``
    if ``lmax > 0`` else ``inf``.
    """
    sigma = as_stratum(sigma, tol)
    tan = _tangent(sigma, v, tol)
    if sigma.k == 0:
        return math.inf
    ev = np.linalg.eigvalsh(tan.F0)
    band = tol.rank_rel * float(np.max(np.abs(ev)))
    if backward:
        return 1.0 / ev[-1] if ev[-1] > band else math.inf
    return -1.0 / ev[0] if ev[0] < -band else math.inf


def exp_stratum(sigma, v, t=1.0, tol=DEFAULT_TOL, *, flag=False):
    """Geodesic ``Sigma + tV + t^2 W`` of the stratum.

    Outside the definition interval the value is still returned together
    with an ``OutOfDomainWarning`` (or as ``(matrix, inside)`` when ``flag``).
    """
    sigma = as_stratum(sigma, tol)
    tan = _tangent(sigma, v, tol)
    out = sym(sigma.mat + t * tan.v + t * t * tan.W)
    inside = t in definition_interval_stratum(sigma, tan, tol)
    if flag:
        return out, inside
    if not inside:
        warnings.warn(f"t={t} lies outside the definition interval", OutOfDomainWarning, stacklevel=2)
    return out


@dataclass(frozen=True, eq=False)
class RotationCandidate:
    """Classification of a rotation ``R`` for factors ``X``, ``Y``.

    ``symmetric_ok``: ``H = X^T Y R^T`` is symmetric (solves the exponential
    equation). ``preimage_ok``: the geodesic additionally stays in the
    stratum up to time 1. ``log_ok``: ``H`` is PSD, so the geodesic is
    minimizing.
    """

    R: np.ndarray
    H: np.ndarray
    symmetric_ok: bool
    preimage_ok: bool
    log_ok: bool


def _inv_sqrt_spd(g):
    u, d = eig_sym(g)
    return sym((u / np.sqrt(d)) @ u.T)


def is_preimage(x, y, r, tol=DEFAULT_TOL):
    """Classify ``R`` as a solution, preimage and/or logarithm index.

    ``R`` is a preimage index when ``H`` is symmetric and, for every negative
    eigenvalue ``mu`` of ``A = G^{-1/2} H G^{-1/2}`` (``G = X^T X``), the
    eigenspace of ``A`` at ``mu`` meets ``ker(mu^2 I - B)`` trivially, with
    ``B = G^{-1/2} R Y^T Y R^T G^{-1/2}``.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    h = x.T @ y @ r.T
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    symmetric_ok = bool(h.size == 0 or np.max(np.abs(h - h.T)) <= tol.sym_abs * scale)
    if not symmetric_ok:
        return RotationCandidate(r, h, False, False, False)
    hs = sym(h)
    g_mhalf = _inv_sqrt_spd(x.T @ x)
    a = sym(g_mhalf @ hs @ g_mhalf)
    # On an eigenspace of A, mu^2 I - B acts as A^2 - B = -C^T C.
    c = orth_complement(x, tol).T @ y @ r.T @ g_mhalf
    ref = spectral_norm(y) * spectral_norm(g_mhalf)
    preimage_ok = True
    for mu, basis in eigenspaces(a, tol):
        band = tol.rank_rel * max(spectral_norm(a), 1e-300)
        if mu < -band and intersect_nontrivial(basis, c, tol, scale=ref):
            preimage_ok = False
            break
    log_ok = False
    if preimage_ok:
        ev = np.linalg.eigvalsh(hs) if hs.size else np.zeros(0)
        log_ok = bool(ev.size == 0 or ev[0] >= -tol.rank_rel * float(np.max(np.abs(ev))))
    return RotationCandidate(r, h, True, preimage_ok, log_ok)


def tangent_from_rotation(x, y, r, tol=DEFAULT_TOL):
    """Preimage tangent ``V = 2 sym(X R Y^T) - 2 Sigma`` indexed by ``R``.

    Raises
    ------
    NotPreimage
        If ``R`` is not a preimage index for ``(X, Y)``.
    """
    cand = is_preimage(x, y, r, tol)
    if not cand.preimage_ok:
        raise NotPreimage("rotation does not index a preimage")
    x = np.asarray(x, dtype=np.float64)
    sigma = x @ x.T
    v = 2.0 * sym(x @ cand.R @ np.asarray(y, dtype=np.float64).T) - 2.0 * sigma
    return project_tangent(StratumPoint.from_matrix(sigma, tol), v, tol)


def rotation_from_tangent(sigma, lam, v, x, y, tol=DEFAULT_TOL):
    """Inverse of ``tangent_from_rotation``.

    ``X + V#_X = Y R^T``, hence ``R^T = (Y^T Y)^{-1} Y^T (X + V#_X)``.
    """
    sigma = as_stratum(sigma, tol)
    lam = as_stratum(lam, tol)
    x = check_factor(x, sigma.mat, tol)
    y = check_factor(y, lam.mat, tol)
    lift = horizontal_lift_stratum(x, _tangent(sigma, v, tol), tol)
    r = np.linalg.solve(y.T @ y, y.T @ (x + lift)).T
    k = r.shape[0]
    if k and np.max(np.abs(r.T @ r - np.eye(k))) > tol.sym_abs:
        raise NotPreimage("tangent does not reach Lambda: recovered R is not orthogonal")
    if not is_preimage(x, y, r, tol).preimage_ok:
        raise NotPreimage("recovered rotation is not a preimage index")
    return r


class LogKind(enum.Enum):
    Unique = "unique"
    Pair = "pair"
    Family = "orthogonal-family"


@dataclass(frozen=True, eq=False)
class LogFamily:
    """All logarithms of ``Lambda`` from ``Sigma`` in the stratum.

    In aligned factors (``X^T Y = Diag(D_r, 0)``, ``D_r > 0``) the logarithm
    rotations are exactly ``Diag(I_r, Q)`` with ``Q`` orthogonal of size
    ``k - r``; ``tangent(Q)`` and ``geodesic(Q)`` synthesize any member.
    """

    kind: LogKind
    k: int
    r: int
    X: np.ndarray
    Y: np.ndarray
    sigma: np.ndarray
    lam: np.ndarray

    @property
    def param_size(self):
        return self.k - self.r

    def rotation(self, q=None):
        m = self.param_size
        q = np.eye(m) if q is None else np.asarray(q, dtype=np.float64)
        if q.shape != (m, m) or (m and np.max(np.abs(q.T @ q - np.eye(m))) > 1e-8):
            raise ValueError(f"parameter must be an orthogonal {m}x{m} matrix")
        rot = np.eye(self.k)
        rot[self.r :, self.r :] = q
        return rot

    def mixed(self, q=None):
        return sym(self.X @ self.rotation(q) @ self.Y.T)

    def tangent(self, q=None):
        return 2.0 * self.mixed(q) - 2.0 * self.sigma

    def geodesic(self, q=None):
        return GeodesicSegment(self.sigma, self.lam, self.mixed(q), {"kind": "log", "Q": q})

    def members(self):
        """Parameters of every member (Unique, Pair) or a few samples (Family)."""
        m = self.param_size
        if self.kind is LogKind.Unique:
            return [np.zeros((0, 0))]
        if self.kind is LogKind.Pair:
            return [np.array([[1.0]]), np.array([[-1.0]])]
        refl = np.eye(m)
        refl[-1, -1] = -1.0
        return [np.eye(m), refl]


def logarithms_stratum(sigma, lam, tol=DEFAULT_TOL):
    """Logarithm family of ``Lambda`` from ``Sigma`` (both of rank ``k``).

    Raises
    ------
    RankMismatch
        If the two matrices have different ranks.
    """
    cs, cl = as_cov(sigma, tol), as_cov(lam, tol)
    if cs.k != cl.k:
        raise RankMismatch(f"ranks differ: {cs.k} vs {cl.k}")
    al = aligned_factors(cs, cl, tol)
    k, r = al.k, al.r
    if r == k:
        kind = LogKind.Unique
    elif r == k - 1:
        kind = LogKind.Pair
    else:
        kind = LogKind.Family
    return LogFamily(kind, k, r, al.X[:, :k], al.Y[:, :k], cs.mat, cl.mat)


def log_map_stratum(sigma, lam, tol=DEFAULT_TOL):
    """Unique logarithm when ``rank(Sigma Lambda) = k``.

    ``V = 2 sym(S^{1/2} ((S^{1/2} L S^{1/2})^{1/2})^+ S^{1/2} L) - 2 S``.

    Raises
    ------
    NotUnique
        If ``rank(Sigma Lambda) < k``.
    RankMismatch
        If the ranks of ``Sigma`` and ``Lambda`` differ.
    """
    s = as_stratum(sigma, tol)
    cs, cl = as_cov(s.mat, tol), as_cov(lam, tol)
    if cs.k != cl.k:
        raise RankMismatch(f"ranks differ: {cs.k} vs {cl.k}")
    r = rank_product(cs, cl, tol)
    if r < cs.k:
        raise NotUnique(f"rank(Sigma Lambda) = {r} < k = {cs.k}")
    root = cs.sqrt()
    mid = sqrt_psd(sym(root @ cl.mat @ root), tol)
    v = 2.0 * sym(root @ pinv_sym(mid, tol) @ root @ cl.mat) - 2.0 * cs.mat
    return project_tangent(s, v, tol)


def geodesic_stratum_by_rotation(sigma, lam, r, x=None, y=None, tol=DEFAULT_TOL):
    """Geodesic ``(1-t)^2 Sigma + t^2 Lambda + 2t(1-t) sym(X R Y^T)``.

    ``x`` and ``y`` default to the canonical factors of the endpoints.

    Raises
    ------
    NotPreimage
        If ``R`` fails the preimage test for ``(X, Y)``.
    """
    s, l_ = as_stratum(sigma, tol), as_stratum(lam, tol)
    x = s.X if x is None else check_factor(x, s.mat, tol)
    y = l_.X if y is None else check_factor(y, l_.mat, tol)
    cand = is_preimage(x, y, r, tol)
    if not cand.preimage_ok:
        raise NotPreimage("rotation does not index a preimage")
    mixed = sym(x @ cand.R @ y.T)
    return GeodesicSegment(s.mat, l_.mat, mixed, {"R": cand.R, "X": x, "Y": y, "log": cand.log_ok})
