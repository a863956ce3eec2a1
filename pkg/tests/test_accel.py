import os
import subprocess
import sys

import pytest

from oscint import _kernels
from oscint._accel import NUMBA_AVAILABLE, NUMBA_ENABLED

PROBE = (
    "from oscint import _kernels, _accel;"
    "print(_accel.NUMBA_ENABLED, _kernels.linear_trajectory is _kernels.linear_trajectory_py)"
)


def _probe(value):
    env = dict(os.environ)
    env.pop("OSCINT_DISABLE_NUMBA", None)
    if value is not None:
        env["OSCINT_DISABLE_NUMBA"] = value
    r = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True,
                       check=True)
    return r.stdout.split()


@pytest.mark.parametrize("value", ["1", "true", "YES"])
def test_flag_selects_numpy(value):
    assert _probe(value) == ["False", "True"]


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")
def test_default_selects_numba():
    assert _probe(None) == ["True", "False"]
    assert _probe("0") == ["True", "False"]


def test_selected_kernel_consistent():
    if NUMBA_ENABLED:
        assert _kernels.linear_trajectory is _kernels.linear_trajectory_jit
    else:
        assert _kernels.linear_trajectory is _kernels.linear_trajectory_py
