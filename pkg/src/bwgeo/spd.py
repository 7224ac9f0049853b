"""Bures-Wasserstein geometry on the open cone of SPD matrices."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import NotSpd
from .linalg import (
    DEFAULT_TOL,
    check_factor,
    eig_sym,
    sqrt_psd,
    sym,
    symmetrize,
)
from .segment import GeodesicSegment, OpenInterval

__all__ = [
    "SpdPoint",
    "FullTangent",
    "OutOfDomainWarning",
    "metric_full",
    "exp_full",
    "definition_interval_full",
    "cut_time_full",
    "log_full",
    "geodesic_full",
    "horizontal_lift_full",
]


class OutOfDomainWarning(UserWarning):
    """A geodesic was evaluated outside its definition interval."""


@dataclass(frozen=True, eq=False)
class SpdPoint:
    """A symmetric positive definite matrix with its eigendecomposition."""

    mat: np.ndarray
    U: np.ndarray
    d: np.ndarray

    @classmethod
    def from_matrix(cls, m, tol=DEFAULT_TOL):
        s = symmetrize(m, tol)
        u, d = eig_sym(s)
        if d.size and not d[0] > tol.rank_rel * max(abs(d[-1]), abs(d[0])):
            raise NotSpd(f"smallest eigenvalue {d[0]:.3g} is not positive")
        return cls(s, u, d)

    @property
    def n(self):
        return self.mat.shape[0]

    def sqrt(self):
        return sym((self.U * np.sqrt(self.d)) @ self.U.T)

    def inv_sqrt(self):
        return sym((self.U / np.sqrt(self.d)) @ self.U.T)


def as_spd(x, tol=DEFAULT_TOL):
    return x if isinstance(x, SpdPoint) else SpdPoint.from_matrix(x, tol)


@dataclass(frozen=True, eq=False)
class FullTangent:
    """Tangent vector ``v`` at ``base`` with cached Sylvester solution ``s``.

    ``s`` solves ``base.mat @ s + s @ base.mat = v``.
    """

    base: SpdPoint
    v: np.ndarray
    s: np.ndarray

    @classmethod
    def at(cls, base, v, tol=DEFAULT_TOL):
        base = as_spd(base, tol)
        v = symmetrize(v, tol)
        return cls(base, v, _sylvester_at(base, v))


def _sylvester_at(base, v):
    u, d = base.U, base.d
    vp = u.T @ v @ u
    return sym(u @ _kernels.sylvester_eigbasis(vp, d) @ u.T)


def _tangent(sigma, v, tol):
    if isinstance(v, FullTangent):
        return v
    return FullTangent.at(sigma, v, tol)


def metric_full(sigma, v, w, tol=DEFAULT_TOL):
    """Bures-Wasserstein inner product ``tr(S_V Sigma S_W)`` at an SPD point."""
    sigma = as_spd(sigma, tol)
    sv = _tangent(sigma, v, tol).s
    sw = _tangent(sigma, w, tol).s
    return float(np.trace(sv @ sigma.mat @ sw))


def _extreme_eigs(s, tol):
    _, ev = eig_sym(s)
    if ev.size == 0:
        return 0.0, 0.0, 0.0
    band = tol.rank_rel * float(np.max(np.abs(ev)))
    return float(ev[0]), float(ev[-1]), band


def definition_interval_full(sigma, v, tol=DEFAULT_TOL):
    """Maximal open interval on which ``t -> Exp_Sigma(tV)`` stays SPD.

    With ``lmin, lmax`` the extreme eigenvalues of ``S_Sigma(V)``, the
    endpoints are ``-1/lmax`` (when ``lmax > 0``) and ``-1/lmin`` (when
    ``lmin < 0``), and infinite otherwise.
    """
    sigma = as_spd(sigma, tol)
    lmin, lmax, band = _extreme_eigs(_tangent(sigma, v, tol).s, tol)
    lo = -1.0 / lmax if lmax > band else -math.inf
    hi = -1.0 / lmin if lmin < -band else math.inf
    return OpenInterval(lo, hi)


def cut_time_full(sigma, v, tol=DEFAULT_TOL):
    """Forward cut time: ``-1/lmin(S_Sigma(V))`` if that is negative, else ``inf``."""
    sigma = as_spd(sigma, tol)
    lmin, _, band = _extreme_eigs(_tangent(sigma, v, tol).s, tol)
    return -1.0 / lmin if lmin < -band else math.inf


def exp_full(sigma, v, t=1.0, tol=DEFAULT_TOL, *, flag=False):
    """Geodesic ``Sigma + tV + t^2 S Sigma S`` with ``S = S_Sigma(V)``.

    Outside the definition interval the polynomial is still evaluated; an
    ``OutOfDomainWarning`` is emitted. With ``flag=True`` the return value
    is ``(matrix, inside)`` and no warning is emitted.
    """
    sigma = as_spd(sigma, tol)
    tan = _tangent(sigma, v, tol)
    out = sigma.mat + t * tan.v + t * t * (tan.s @ sigma.mat @ tan.s)
    out = sym(out)
    inside = t in definition_interval_full(sigma, tan, tol)
    if flag:
        return out, inside
    if not inside:
        warnings.warn(f"t={t} lies outside the definition interval", OutOfDomainWarning, stacklevel=2)
    return out


def _mixed_full(sigma, lam, tol):
    r = sigma.sqrt()
    mid = sqrt_psd(sym(r @ lam.mat @ r), tol)
    return sym(r @ mid @ sigma.inv_sqrt())


def log_full(sigma, lam, tol=DEFAULT_TOL):
    """Unique logarithm ``2 sym(S^{1/2} (S^{1/2} L S^{1/2})^{1/2} S^{-1/2}) - 2 S``."""
    sigma = as_spd(sigma, tol)
    lam = as_spd(lam, tol)
    return 2.0 * _mixed_full(sigma, lam, tol) - 2.0 * sigma.mat


def geodesic_full(sigma, lam, tol=DEFAULT_TOL):
    """Minimizing geodesic segment between two SPD matrices."""
    sigma = as_spd(sigma, tol)
    lam = as_spd(lam, tol)
    mixed = _mixed_full(sigma, lam, tol)
    return GeodesicSegment(sigma.mat, lam.mat, mixed, {"kind": "full"})


def horizontal_lift_full(sigma, v, x, tol=DEFAULT_TOL):
    """Horizontal lift ``S_Sigma(V) X`` of ``V`` at a factor ``X`` of ``Sigma``."""
    sigma = as_spd(sigma, tol)
    x = check_factor(x, sigma.mat, tol)
    return _tangent(sigma, v, tol).s @ x
