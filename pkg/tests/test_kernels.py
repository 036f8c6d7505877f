"""The numba and numpy flavours of every kernel must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from fredres import _accel, kernels
from _helpers import cnormal

NB = kernels.IMPLEMENTATIONS["numba"]
NP = kernels.IMPLEMENTATIONS["numpy"]


def _case(rng, name):
    if name == "cauchy_product":
        return cnormal(rng, 5, 3, 3), cnormal(rng, 3, 3, 3), 6
    if name == "taylor_inverse":
        g = cnormal(rng, 4, 3, 3)
        g[0] += 4 * np.eye(3)
        return g, 7
    if name == "horner_many":
        return cnormal(rng, 5, 2, 2), cnormal(rng, 9)
    if name == "inverse_many":
        return cnormal(rng, 6, 3, 3) + 3 * np.eye(3)
    if name == "ar_recursion":
        c = cnormal(rng, 3, 2, 2)
        c[0] = np.eye(2)
        return 0.3 * c, cnormal(rng, 50, 2)
    if name == "fir_filter":
        return cnormal(rng, 4, 2, 2), cnormal(rng, 30, 2)


@pytest.mark.parametrize("name", sorted(NP))
def test_parity(name, rng):
    args = _case(rng, name)
    if not isinstance(args, tuple):
        args = (args,)
    args = tuple(np.ascontiguousarray(a) if isinstance(a, np.ndarray) else a for a in args)
    np.testing.assert_allclose(NB[name](*args), NP[name](*args), atol=1e-12)


def test_short_series_inverse(rng):
    g = np.stack([np.eye(2), 0.5 * np.eye(2)]).astype(complex)
    for impl in (NB, NP):
        h = impl["taylor_inverse"](g, 5)
        np.testing.assert_allclose(h[:, 0, 0], (-0.5) ** np.arange(6))


def test_zero_length_product():
    assert kernels.cauchy_product(np.ones((2, 1, 1)), np.ones((2, 1, 1)), 0).shape == (0, 1, 1)


def test_backend_flag():
    assert kernels.BACKEND == ("numba" if _accel.USE_NUMBA else "numpy")
    env = dict(os.environ, FREDRES_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from fredres import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
