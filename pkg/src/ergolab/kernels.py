"""Brute-force occurrence kernels over every word of a fixed length.

Words of length ``N`` are encoded as integers with the first bit as the most
significant one.  ``occ[x, i]`` is 1 when the pattern occurs in ``x`` starting
at 0-based position ``i``.  These kernels back the exhaustive oracles; the
exact closed forms never call them.
"""

from __future__ import annotations

import numpy as np

from . import _accel


def _occurrences_loop(pattern, k, n):
    N = n + k - 1
    total = 1 << N
    mask = (1 << k) - 1
    out = np.zeros((total, n), dtype=np.uint8)
    for x in range(total):
        for i in range(n):
            if (x >> (N - i - k)) & mask == pattern:
                out[x, i] = 1
    return out


def _counts_loop(pattern, k, n):
    N = n + k - 1
    total = 1 << N
    mask = (1 << k) - 1
    out = np.zeros(total, dtype=np.int64)
    for x in range(total):
        c = 0
        for i in range(n):
            if (x >> (N - i - k)) & mask == pattern:
                c += 1
        out[x] = c
    return out


_occurrences_jit = _accel.jit(_occurrences_loop)
_counts_jit = _accel.jit(_counts_loop)


def occurrences_numpy(pattern: int, k: int, n: int) -> np.ndarray:
    N = n + k - 1
    xs = np.arange(1 << N, dtype=np.int64)
    mask = (1 << k) - 1
    shifts = np.arange(N - k, N - k - n, -1, dtype=np.int64)
    windows = (xs[:, None] >> shifts[None, :]) & mask
    return (windows == pattern).astype(np.uint8)


def counts_numpy(pattern: int, k: int, n: int) -> np.ndarray:
    return occurrences_numpy(pattern, k, n).sum(axis=1, dtype=np.int64)


def occurrences(sigma: str, n: int, use_numba: bool = None) -> np.ndarray:
    """Occurrence matrix of ``sigma`` over all words of length ``n + |sigma| - 1``."""
    k = len(sigma)
    use = _accel.USE_NUMBA if use_numba is None else use_numba
    fn = _occurrences_jit if use else occurrences_numpy
    return fn(int(sigma, 2), k, n)


def occurrence_counts(sigma: str, n: int, use_numba: bool = None) -> np.ndarray:
    """Number of occurrences of ``sigma`` at positions ``0..n-1`` of each word."""
    k = len(sigma)
    use = _accel.USE_NUMBA if use_numba is None else use_numba
    fn = _counts_jit if use else counts_numpy
    return fn(int(sigma, 2), k, n)
