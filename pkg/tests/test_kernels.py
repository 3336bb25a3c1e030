import os
import subprocess
import sys

import numpy as np
import pytest

from ergolab import _accel
from ergolab.kernels import counts_numpy, occurrence_counts, occurrences, occurrences_numpy


@pytest.mark.parametrize("sigma,n", [("0", 5), ("01", 7), ("110", 9), ("0101", 12)])
def test_numba_and_numpy_agree(sigma, n):
    a = occurrences(sigma, n, use_numba=True)
    b = occurrences(sigma, n, use_numba=False)
    assert a.dtype == b.dtype == np.uint8
    assert np.array_equal(a, b)
    assert np.array_equal(occurrence_counts(sigma, n, True), occurrence_counts(sigma, n, False))


def test_rows_follow_word_order():
    occ = occurrences("1", 3, use_numba=False)
    # row r is the word whose binary value is r, first letter most significant
    assert occ.shape == (8, 3)
    assert occ[0b101].tolist() == [1, 0, 1]
    assert counts_numpy(1, 1, 3)[0b111] == 3
    assert occurrences_numpy(1, 1, 3).sum() == 12


def test_env_flag_disables_numba():
    env = dict(os.environ, ERGOLAB_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from ergolab import _accel; print(_accel.USE_NUMBA)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "False"


def test_flag_reflects_availability():
    assert _accel.USE_NUMBA in (True, False)
    if not _accel.HAVE_NUMBA:
        assert not _accel.USE_NUMBA
