"""Cubic-Hermite discretization of the clamped-free beam on (0, 1).

Unit length, density and flexural rigidity throughout.

DOF layout
----------
Node i sits at x = i*h, h = 1/n_elements.  Each node carries a pair
(deflection w, rotation w_x).  Node 0 is clamped (both dofs removed), so
the free vector is

    [w_1, w_x_1, w_2, w_x_2, ..., w_n, w_x_n]        (2*n entries)

and the tip deflection lives at index 2*n - 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._banded import band_from_dense, band_quadform, band_to_dense
from .errors import InputError, NumericError

BANDWIDTH = 3  # semi-bandwidth of the assembled matrices

# 3-point Gauss-Legendre on [0, 1]
_GAUSS_XI = 0.5 + 0.5 * np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GAUSS_W = 0.5 * np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


def element_stiffness(h: float) -> np.ndarray:
    """4x4 bending stiffness block for one element of length h."""
    h2 = h * h
    return (1.0 / h**3) * np.array(
        [
            [12.0, 6.0 * h, -12.0, 6.0 * h],
            [6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2],
            [-12.0, -6.0 * h, 12.0, -6.0 * h],
            [6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2],
        ]
    )


def element_mass(h: float) -> np.ndarray:
    """4x4 consistent mass block for one element of length h."""
    h2 = h * h
    return (h / 420.0) * np.array(
        [
            [156.0, 22.0 * h, 54.0, -13.0 * h],
            [22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2],
            [54.0, 13.0 * h, 156.0, -22.0 * h],
            [-13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2],
        ]
    )


def _hermite(xi: np.ndarray, h: float):
    """Shape functions and x-derivatives at local coordinate xi in [0, 1]."""
    n = np.array(
        [
            1.0 - 3.0 * xi**2 + 2.0 * xi**3,
            h * (xi - 2.0 * xi**2 + xi**3),
            3.0 * xi**2 - 2.0 * xi**3,
            h * (-(xi**2) + xi**3),
        ]
    )
    dn = np.array(
        [
            (-6.0 * xi + 6.0 * xi**2) / h,
            1.0 - 4.0 * xi + 3.0 * xi**2,
            (6.0 * xi - 6.0 * xi**2) / h,
            -2.0 * xi + 3.0 * xi**2,
        ]
    )
    return n, dn


@dataclass
class BeamAssembly:
    """Mass/stiffness matrices (lower banded storage) for the clamped beam."""

    n_elements: int
    h: float
    m_band: np.ndarray
    k_band: np.ndarray
    cross_mat: np.ndarray  # dense bilinear form for int x * v * u_x dx
    tip_index: int

    @property
    def n_dof(self) -> int:
        return 2 * self.n_elements

    def mass_dense(self) -> np.ndarray:
        return band_to_dense(self.m_band)

    def stiffness_dense(self) -> np.ndarray:
        return band_to_dense(self.k_band)


def assemble(n_elements: int) -> BeamAssembly:
    """Assemble mass, stiffness and cross-term matrices with the clamp applied."""
    if n_elements < 2:
        raise InputError("need at least 2 elements")
    n = n_elements
    h = 1.0 / n
    ndof_full = 2 * (n + 1)
    m_full = np.zeros((ndof_full, ndof_full))
    k_full = np.zeros((ndof_full, ndof_full))
    c_full = np.zeros((ndof_full, ndof_full))

    ke = element_stiffness(h)
    me = element_mass(h)
    for e in range(n):
        x0 = e * h
        # C[a, b] = int x * N_a(x) * N_b'(x) dx over the element
        ce = np.zeros((4, 4))
        for xi, wq in zip(_GAUSS_XI, _GAUSS_W):
            nv, dnv = _hermite(np.array(xi), h)
            ce += wq * h * (x0 + xi * h) * np.outer(nv, dnv)
        dofs = np.arange(2 * e, 2 * e + 4)
        ix = np.ix_(dofs, dofs)
        m_full[ix] += me
        k_full[ix] += ke
        c_full[ix] += ce

    free = np.arange(2, ndof_full)  # clamp removes node 0's pair
    m = m_full[np.ix_(free, free)]
    k = k_full[np.ix_(free, free)]
    c = c_full[np.ix_(free, free)]
    return BeamAssembly(
        n_elements=n,
        h=h,
        m_band=band_from_dense(m, BANDWIDTH),
        k_band=band_from_dense(k, BANDWIDTH),
        cross_mat=c,
        tip_index=2 * n - 2,
    )


def natural_frequencies(assembly: BeamAssembly, count: int) -> np.ndarray:
    """Lowest `count` angular frequencies of the conservative beam, ascending."""
    if count > assembly.n_dof:
        raise InputError("cannot request more frequencies than dofs")
    try:
        vals = scipy.linalg.eigh(
            assembly.stiffness_dense(),
            assembly.mass_dense(),
            eigvals_only=True,
            subset_by_index=[0, count - 1],
        )
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise NumericError(f"generalized eigensolver failed: {exc}") from exc
    return np.sqrt(vals)


def interior_energy(assembly: BeamAssembly, u: np.ndarray, v: np.ndarray) -> float:
    """0.5 * (v' M v + u' K u): kinetic plus bending energy of the beam."""
    if len(u) != assembly.n_dof or len(v) != assembly.n_dof:
        raise InputError("dof vector length does not match the assembly")
    return 0.5 * (band_quadform(assembly.m_band, v) + band_quadform(assembly.k_band, u))


def cross_term(assembly: BeamAssembly, u: np.ndarray, v: np.ndarray) -> float:
    """int x * v(x) * u_x(x) dx on the Hermite interpolants."""
    if len(u) != assembly.n_dof or len(v) != assembly.n_dof:
        raise InputError("dof vector length does not match the assembly")
    return float(v @ assembly.cross_mat @ u)


# ---------------------------------------------------------------------------
# analytic cantilever modes (conservative beam), used as compatible initial data


def _beta_roots(count: int = 5) -> np.ndarray:
    """First roots of cos(b) cosh(b) = -1 by bracketed bisection."""
    from scipy.optimize import brentq

    f = lambda b: np.cos(b) * np.cosh(b) + 1.0
    roots = []
    grid = np.linspace(0.5, 4.0 * np.pi * count, 8000)
    fg = f(grid)
    for i in range(len(grid) - 1):
        if fg[i] * fg[i + 1] < 0:
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15))
            if len(roots) == count:
                break
    return np.array(roots)


BETA = _beta_roots(5)


def mode_shape(k: int, x, deriv: int = 0):
    """Analytic cantilever eigenfunction (or its slope) at x in [0, 1].

    Satisfies the clamp at x=0 and the free-end conditions at x=1; the
    corresponding angular frequency is BETA[k-1]**2.
    """
    if not 1 <= k <= 5:
        raise InputError("mode index k must be in 1..5")
    if deriv not in (0, 1):
        raise InputError("only deriv 0 and 1 are provided")
    b = BETA[k - 1]
    sig = (np.cosh(b) + np.cos(b)) / (np.sinh(b) + np.sin(b))
    bx = b * np.asarray(x, dtype=float)
    if deriv == 0:
        val = np.cosh(bx) - np.cos(bx) - sig * (np.sinh(bx) - np.sin(bx))
    else:
        val = b * (np.sinh(bx) + np.sin(bx) - sig * (np.cosh(bx) - np.cos(bx)))
    return val if isinstance(x, np.ndarray) else float(val)
