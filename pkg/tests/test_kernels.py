import os
import subprocess
import sys

import pytest

from macc2d import kernels
from macc2d.arrays import Epda, verify_epda
from macc2d.constructions import search_epda


def test_backend_reported():
    assert kernels.BACKEND in kernels.available_backends()


def test_env_forces_pure_python():
    env = dict(os.environ, MACC2D_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import macc2d.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.search_kernel(2, 2, 1, 1, 1, backend="fortran")


@pytest.mark.parametrize("backend", kernels.available_backends())
def test_each_backend_finds_valid_arrays(backend):
    for args in [(4, 2, 4, 2, 2), (2, 1, 2, 1, 1), (3, 2, 3, 1, 3)]:
        a = search_epda(*args[:4], s_max=args[4] * 4, backend=backend)
        assert a is not None and verify_epda(a).passed


@pytest.mark.parametrize("backend", kernels.available_backends())
def test_kernel_grid_is_raw_rows(backend):
    grid, nodes = kernels.search_kernel(2, 2, 1, 1, 1, backend=backend)
    assert nodes > 0
    assert verify_epda(Epda(2, 1, 2, 1, 1, grid)).passed
