"""Panel-based quadrature for integrals over [0, inf) with decaying integrands."""
from __future__ import annotations

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def panel_quad(f, a: float, b: float) -> complex:
    """20-point Gauss-Legendre on [a, b]; f must accept an ndarray."""
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _GL_NODES
    return half * np.sum(f(x) * _GL_WEIGHTS)


def integrate_decaying(
    f,
    tol: float = 1e-12,
    start_width: float = 1.0,
    growth: float = 2.0,
    max_width: float = np.inf,
    max_span: float = 1e8,
    consec: int = 3,
):
    """Integrate f over [0, inf) by geometrically growing panels.

    Stops once `consec` consecutive panel contributions fall below `tol`.
    Panel width is capped at `max_width` so oscillatory integrands stay
    resolved by the fixed 20-point rule.
    """
    total = 0.0 + 0.0j
    a = 0.0
    width = min(start_width, max_width)
    small = 0
    while a < max_span:
        b = a + width
        part = panel_quad(f, a, b)
        total += part
        small = small + 1 if abs(part) < tol else 0
        if small >= consec:
            break
        a = b
        width = min(width * growth, max_width)
    value = complex(total)
    return value if value.imag != 0.0 else value.real
