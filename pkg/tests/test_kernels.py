import os
import subprocess
import sys

import numpy as np
import pytest

from index7.eisenstein import make_kernel
from index7.kernels import BACKEND, PythonChiKernel, compiled_kernel_class
from index7.permgroup import CANONICAL_IDS, chi, get_group

Compiled = compiled_kernel_class()
needs_ext = pytest.mark.skipif(Compiled is None, reason="compiled extension not built")


@pytest.mark.parametrize("gid", CANONICAL_IDS)
def test_python_kernel_matches_reference(gid):
    g = get_group(gid)
    k = make_kernel(g, PythonChiKernel)
    for c in range(1, 40):
        row = k.chi_row(c)
        ref = [chi(c, D, g) for D in range(1, g.width * c + 1)]
        assert row.tolist() == ref, (gid, c)


@needs_ext
@pytest.mark.parametrize("gid", CANONICAL_IDS)
def test_compiled_matches_python(gid):
    kc, kp = make_kernel(gid, Compiled), make_kernel(gid, PythonChiKernel)
    for c in list(range(1, 120)) + [997, 1024, 4099]:
        assert np.array_equal(kc.chi_row(c), kp.chi_row(c)), (gid, c)
    xc = kc.x_values(1, 150, [1, 2, 5], 1)
    xp = kp.x_values(1, 150, [1, 2, 5], 1)
    assert np.max(np.abs(xc - xp)) < 1e-9


@needs_ext
def test_compiled_point_queries():
    kc = make_kernel("H1", Compiled)
    g = get_group("H1")
    rng = np.random.default_rng(3)
    for c, d in rng.integers(-5000, 5000, size=(300, 2)):
        if np.gcd(c, d) == 1:
            assert kc.chi(int(c), int(d)) == chi(int(c), int(d), g)


@needs_ext
def test_compiled_threads_bit_identical():
    kc = make_kernel("G1", Compiled)
    a = kc.x_values(1, 3000, [1, 4], 1)
    b = kc.x_values(1, 3000, [1, 4], 4)
    assert np.array_equal(a, b)


def test_backend_selection_env():
    code = "import index7.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, INDEX7_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    expected = "python" if Compiled is None or os.environ.get("INDEX7_PURE_PYTHON") else "cython"
    assert BACKEND == expected
