import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import random_psd

from bwgeo import _kernels, bw_distance
from bwgeo.linalg import sqrt_psd

BACKENDS = [k for k in (_kernels.numpy_kernels, _kernels.numba_kernels) if k is not None]


@pytest.fixture(params=BACKENDS, ids=lambda k: k.name)
def kern(request):
    return request.param


def test_sylvester(kern, rng):
    a = rng.uniform(0.5, 3.0, 5)
    bp = rng.standard_normal((5, 5))
    np.testing.assert_allclose(kern.sylvester_eigbasis(bp, a), bp / (a[:, None] + a[None, :]), rtol=1e-14)


def test_segment_grid(kern, rng):
    s, l, m = (random_psd(rng, 3, 3) for _ in range(3))  # noqa: E741
    ts = np.linspace(0.0, 1.0, 6)
    out = kern.segment_grid(s, l, m, ts)
    for t, g in zip(ts, out):
        np.testing.assert_allclose(g, (1 - t) ** 2 * s + t**2 * l + 2 * t * (1 - t) * m, atol=1e-14)


def test_sqrt_batch(kern, rng):
    mats = np.stack([random_psd(rng, 4, k) for k in (0, 1, 3, 4)])
    roots = kern.sqrt_psd_batch(mats, 1e-9)
    for m, r in zip(mats, roots):
        np.testing.assert_allclose(r @ r, m, atol=1e-12)
        np.testing.assert_allclose(r, sqrt_psd(m), atol=1e-12)


def test_pairwise(kern, rng):
    mats = np.stack([random_psd(rng, 3, k) for k in (1, 2, 3, 3)])
    roots = np.stack([sqrt_psd(m) for m in mats])
    d2 = kern.pairwise_bw_sq(roots, np.trace(mats, axis1=1, axis2=2))
    np.testing.assert_array_equal(d2, d2.T)
    np.testing.assert_array_equal(np.diag(d2), 0.0)
    for i in range(4):
        for j in range(4):
            assert d2[i, j] == pytest.approx(bw_distance(mats[i], mats[j]) ** 2, abs=1e-11)


def test_backends_agree(rng):
    if _kernels.numba_kernels is None:
        pytest.skip("numba unavailable")
    mats = np.stack([random_psd(rng, 4, 4) for _ in range(5)])
    a = _kernels.numpy_kernels.sqrt_psd_batch(mats, 1e-9)
    b = _kernels.numba_kernels.sqrt_psd_batch(mats, 1e-9)
    np.testing.assert_allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("off", "numpy")])
def test_env_flag(flag, expected):
    env = {**os.environ, "BWGEO_USE_NUMBA": flag}
    out = subprocess.run(
        [sys.executable, "-c", "import bwgeo; print(bwgeo.BACKEND)"], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == expected
