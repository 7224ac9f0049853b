"""Shared generators for seeded random test instances."""

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def random_orthonormal(rng, n, k):
    q, r = np.linalg.qr(rng.standard_normal((n, max(k, 1))))
    return (q * np.sign(np.diag(r)))[:, :k]


def random_spd(rng, n, lo=0.5, hi=3.0):
    q = random_orthonormal(rng, n, n)
    return (q * rng.uniform(lo, hi, n)) @ q.T


def random_factor(rng, n, k, lo=0.5, hi=1.5):
    """Well-conditioned ``n x k`` factor with singular values in ``[lo, hi]``."""
    if k == 0:
        return np.zeros((n, 0))
    return random_orthonormal(rng, n, k) * rng.uniform(lo, hi, k) @ random_orthonormal(rng, k, k).T


def random_psd(rng, n, k):
    x = random_factor(rng, n, k)
    return x @ x.T


def pair_with_ranks(rng, n, k, l, r):  # noqa: E741
    """PSD pair with ``rank(Sigma) = k``, ``rank(Lambda) = l``, ``rank(Sigma Lambda) = r``.

    Requires ``r <= min(k, l)`` and ``l - r <= n - k``.
    """
    assert r <= min(k, l) and l - r <= n - k
    q = random_orthonormal(rng, n, n)
    xs, perp = q[:, :k], q[:, k:]
    x0 = xs * rng.uniform(0.5, 1.5, k) @ random_orthonormal(rng, k, k).T
    cols = []
    if r:
        inside = xs @ random_orthonormal(rng, k, r)
        mix = perp @ rng.standard_normal((n - k, r)) * 0.5 if n > k else 0.0
        cols.append(inside + mix)
    if l - r:
        cols.append(perp[:, : l - r] @ random_orthonormal(rng, l - r, l - r))
    y0 = np.hstack(cols) if cols else np.zeros((n, 0))
    y0 = y0 * rng.uniform(0.7, 1.3, l) if l else y0
    return x0 @ x0.T, y0 @ y0.T


def table_rows(n):
    """``(k, l, r)`` instances covering every row of the count table at size ``n``."""
    cands = [(n, n, n), (n, n - 1, n - 1), (n, 1, 1)]
    for k in range(1, n):
        cands += [(k, k, k), (k, k, k - 1), (k, k, k - 2)]
        cands += [(k, l, l) for l in range(1, k)]  # noqa: E741
        cands += [(k, l, l - 1) for l in range(1, k)]  # noqa: E741
    ok = {c for c in cands if min(c) >= 0 and c[2] <= c[1] <= c[0] and c[1] - c[2] <= n - c[0]}
    return sorted(ok, reverse=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
