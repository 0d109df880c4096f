import math
import os
import subprocess
import sys

import numpy as np
import pytest

from cusp_certify import _kernels_py, kernels
from cusp_certify.isometry import HeisenbergElement, dilation, heisenberg_to_matrix, random_member
from cusp_certify.siegel import SiegelPoint, act, distance

compiled = pytest.importorskip("cusp_certify._kernels")


def test_fallback_displacement_matches_distance(rng):
    for _ in range(100):
        n = int(rng.integers(2, 5))
        m = random_member(n, rng, scale=0.6)
        p = SiegelPoint(tuple(rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)), rng.normal(),
                        math.exp(rng.normal()))
        assert _kernels_py.displacement(m.matrix, p.pack()) == pytest.approx(distance(p, act(m, p)),
                                                                              rel=1e-9, abs=1e-10)


def test_backends_agree_on_displacement(rng):
    for _ in range(200):
        n = int(rng.integers(2, 5))
        m = random_member(n, rng, scale=0.6).matrix
        x = np.concatenate([rng.normal(size=2 * (n - 1)), [rng.normal(), rng.normal()]])
        a, b = compiled.displacement(m, x), _kernels_py.displacement(m, x)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-13)


def test_backends_agree_on_descent(rng):
    mats = [dilation(2.0).matrix, heisenberg_to_matrix(HeisenbergElement.vertical(2.0)).matrix,
            random_member(3, rng, scale=0.6).matrix]
    for m in mats:
        n = m.shape[0] - 1
        x0 = rng.normal(size=2 * n)
        a = compiled.descend(m, x0, 1.0, 1e-6, 1e-12, 200)
        b = _kernels_py.descend(m, x0, 1.0, 1e-6, 1e-12, 200)
        assert a.fun == pytest.approx(b.fun, abs=1e-9)
        assert a.converged == b.converged


def test_outside_domain_is_infinite():
    m = np.eye(3, dtype=complex)
    # log u = -800 underflows u to zero: the point is on the boundary, not inside
    x = np.array([0.0, 0.0, 0.0, -800.0])
    assert math.isinf(_kernels_py.displacement(m, x)) and math.isinf(compiled.displacement(m, x))


def test_backend_selection_env():
    env = dict(os.environ, CUSP_CERTIFY_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from cusp_certify import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND == "compiled"
