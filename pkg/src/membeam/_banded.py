"""Helpers for symmetric banded matrices in LAPACK lower-banded storage.

A symmetric matrix A with semi-bandwidth ``bw`` is stored as an array
``band`` of shape ``(bw + 1, n)`` with ``band[d, j] = A[j + d, j]`` for
``0 <= d <= bw`` and ``j + d < n`` (unused trailing entries are zero).
"""
from __future__ import annotations

import numpy as np


def band_from_dense(a: np.ndarray, bw: int) -> np.ndarray:
    n = a.shape[0]
    band = np.zeros((bw + 1, n))
    for d in range(bw + 1):
        band[d, : n - d] = np.diagonal(a, -d)
    return band


def band_to_dense(band: np.ndarray) -> np.ndarray:
    bw = band.shape[0] - 1
    n = band.shape[1]
    a = np.zeros((n, n))
    for d in range(bw + 1):
        idx = np.arange(n - d)
        a[idx + d, idx] = band[d, : n - d]
        if d > 0:
            a[idx, idx + d] = band[d, : n - d]
    return a


def band_matvec(band: np.ndarray, x: np.ndarray) -> np.ndarray:
    """y = A x for symmetric lower-banded A."""
    n = band.shape[1]
    y = band[0] * x
    for d in range(1, band.shape[0]):
        bd = band[d, : n - d]
        y[d:] += bd * x[: n - d]
        y[: n - d] += bd * x[d:]
    return y


def band_quadform(band: np.ndarray, x: np.ndarray) -> float:
    """x^T A x for symmetric lower-banded A."""
    n = band.shape[1]
    total = float(np.dot(band[0] * x, x))
    for d in range(1, band.shape[0]):
        bd = band[d, : n - d]
        total += 2.0 * float(np.dot(bd * x[: n - d], x[d:]))
    return total
