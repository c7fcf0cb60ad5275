"""Memory kernels for the tip feedback law.

A kernel lam(s) weights past tip velocity in the boundary feedback.  Three
families are supported:

* ``exponential_sum``: lam(s) = sum_j c_j exp(-mu_j s), c_j, mu_j > 0
* ``polynomial``:      lam(s) = c (1 + s)^(-p), c > 0, p > 1
* ``tabulated``:       samples on a uniform s-grid

Every operation here is a pure function of an immutable KernelSpec, so
kernels can be shared freely between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._quadrature import integrate_decaying
from .errors import DomainError, InputError, ResolutionError, SingularityError

EXPONENTIAL_SUM = "exponential_sum"
POLYNOMIAL = "polynomial"
TABULATED = "tabulated"

# Uniform positive lower bound demanded of the curvature/slope ratio before
# a decay rate k0 is reported (the rate must be bounded away from zero).
K0_FLOOR = 1e-6


@dataclass(frozen=True)
class KernelSpec:
    family: str
    modes: tuple[tuple[float, float], ...] = ()  # (amplitude c_j, rate mu_j)
    c: float = 0.0
    p: float = 0.0
    ds: float = 0.0
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family == EXPONENTIAL_SUM:
            if not self.modes:
                raise InputError("exponential_sum kernel needs at least one mode")
            for cj, muj in self.modes:
                if cj <= 0 or muj <= 0:
                    raise InputError("mode amplitudes and rates must be positive")
        elif self.family == POLYNOMIAL:
            if self.c <= 0:
                raise InputError("polynomial kernel amplitude must be positive")
            if self.p <= 1:
                raise InputError("polynomial exponent must exceed 1 (integrability)")
        elif self.family == TABULATED:
            if self.ds <= 0:
                raise InputError("tabulated kernel needs a positive grid step")
            v = np.asarray(self.values, dtype=float)
            if v.size < 3:
                raise InputError("tabulated kernel needs at least 3 samples")
            if np.any(v <= 0):
                raise InputError("tabulated kernel values must be positive")
            if np.any(np.diff(v) >= 0):
                raise InputError("tabulated kernel values must be strictly decreasing")
            second = np.diff(v, 2)
            if np.any(second < -1e-10 * v[0]):
                raise InputError("tabulated kernel values must be convex")
        else:
            raise InputError(f"unknown kernel family {self.family!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def exponential_sum(cls, modes) -> "KernelSpec":
        return cls(family=EXPONENTIAL_SUM, modes=tuple((float(c), float(mu)) for c, mu in modes))

    @classmethod
    def single_exponential(cls, c: float = 1.0, mu: float = 1.0) -> "KernelSpec":
        return cls.exponential_sum([(c, mu)])

    @classmethod
    def polynomial(cls, c: float, p: float) -> "KernelSpec":
        return cls(family=POLYNOMIAL, c=float(c), p=float(p))

    @classmethod
    def tabulated(cls, ds: float, values) -> "KernelSpec":
        return cls(family=TABULATED, ds=float(ds), values=tuple(float(v) for v in values))

    @classmethod
    def from_config(cls, cfg: dict) -> "KernelSpec":
        family = cfg.get("family")
        if family == EXPONENTIAL_SUM:
            return cls.exponential_sum([(m["c"], m["mu"]) for m in cfg["modes"]])
        if family == POLYNOMIAL:
            return cls.polynomial(cfg["c"], cfg["p"])
        if family == TABULATED:
            return cls.tabulated(cfg["ds"], cfg["values"])
        raise InputError(f"unknown kernel family {family!r}")

    def to_config(self) -> dict:
        if self.family == EXPONENTIAL_SUM:
            return {"family": self.family, "modes": [{"c": c, "mu": mu} for c, mu in self.modes]}
        if self.family == POLYNOMIAL:
            return {"family": self.family, "c": self.c, "p": self.p}
        return {"family": self.family, "ds": self.ds, "values": list(self.values)}

    # -- convenience --------------------------------------------------

    @property
    def mu_min(self) -> float:
        if self.family != EXPONENTIAL_SUM:
            raise InputError("mu_min is defined for exponential_sum kernels only")
        return min(mu for _, mu in self.modes)

    def lam0(self) -> float:
        return float(evaluate(self, 0.0))

    def mass(self) -> float:
        """Integral of lam over [0, inf) (table span for tabulated kernels)."""
        if self.family == EXPONENTIAL_SUM:
            return sum(c / mu for c, mu in self.modes)
        if self.family == POLYNOMIAL:
            return self.c / (self.p - 1.0)
        v = np.asarray(self.values)
        return float(np.trapezoid(v, dx=self.ds))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the sign / frequency / decay-rate checks on a kernel."""

    bvk_ok: bool
    fourier_ok: bool
    fourier_worst_omega: float
    fourier_worst_value: float
    k0_max: float | None
    exp_decay: float | None

    def to_dict(self) -> dict:
        return {
            "bvk_ok": self.bvk_ok,
            "fourier_ok": self.fourier_ok,
            "fourier_worst_omega": self.fourier_worst_omega,
            "fourier_worst_value": self.fourier_worst_value,
            "k0_max": self.k0_max,
            "exp_decay": self.exp_decay,
        }


# ---------------------------------------------------------------------------
# evaluation


_TAB_CACHE: dict[KernelSpec, tuple] = {}


def _tab_arrays(kernel: KernelSpec):
    """(s grid, pchip interpolant, first and second difference arrays)."""
    cached = _TAB_CACHE.get(kernel)
    if cached is not None:
        return cached
    from scipy.interpolate import PchipInterpolator

    v = np.asarray(kernel.values, dtype=float)
    s = kernel.ds * np.arange(v.size)
    interp = PchipInterpolator(s, v)
    d1 = np.gradient(v, kernel.ds)
    d2 = np.empty_like(v)
    d2[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / kernel.ds**2
    d2[0] = d2[1]
    d2[-1] = d2[-2]
    cached = (s, interp, d1, d2)
    _TAB_CACHE[kernel] = cached
    return cached


def evaluate(kernel: KernelSpec, s, order: int = 0):
    """lam(s), lam'(s) or lam''(s); scalar in, scalar out (arrays pass through)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("kernel argument s must be nonnegative")
    if order not in (0, 1, 2):
        raise DomainError(f"derivative order {order} unsupported (max 2)")

    if kernel.family == EXPONENTIAL_SUM:
        out = np.zeros_like(s_arr)
        for c, mu in kernel.modes:
            out = out + c * (-mu) ** order * np.exp(-mu * s_arr)
        result = out
    elif kernel.family == POLYNOMIAL:
        c, p = kernel.c, kernel.p
        factor = {0: 1.0, 1: -p, 2: p * (p + 1.0)}[order]
        result = c * factor * (1.0 + s_arr) ** (-(p + order))
    else:
        grid, interp, d1, d2 = _tab_arrays(kernel)
        if np.any(s_arr > grid[-1]):
            raise DomainError("tabulated kernel evaluated beyond its grid")
        if order == 0:
            result = interp(s_arr)
        else:
            result = np.interp(s_arr, grid, d1 if order == 1 else d2)
    return result if isinstance(s, np.ndarray) else float(result)


def truncation_horizon(kernel: KernelSpec, rel: float = 1e-14) -> float:
    """Smallest doubling horizon S with lam(S) < rel * lam(0)."""
    if kernel.family == TABULATED:
        return kernel.ds * (len(kernel.values) - 1)
    target = rel * kernel.lam0()
    s = 1.0
    while evaluate(kernel, s) >= target:
        s *= 2.0
        if s > 1e16:
            raise DomainError("kernel does not decay below the target level")
    return s


# ---------------------------------------------------------------------------
# admissibility


def _default_s_grid(kernel: KernelSpec) -> np.ndarray:
    if kernel.family == EXPONENTIAL_SUM:
        s_max = max(10.0 / kernel.mu_min, 10.0)
        return np.linspace(0.0, s_max, 2001)
    if kernel.family == POLYNOMIAL:
        return np.linspace(0.0, 50.0, 2001)
    return kernel.ds * np.arange(len(kernel.values))


def _default_omega_grid() -> np.ndarray:
    return np.arange(1, 501) * 0.1  # 0.1, 0.2, ..., 50


def _curvature_slope_ratio(kernel: KernelSpec, s: np.ndarray) -> np.ndarray:
    """-lam''/lam' evaluated stably (exp sums are normalized by the slowest mode)."""
    if kernel.family == EXPONENTIAL_SUM:
        mu0 = kernel.mu_min
        num = np.zeros_like(s)
        den = np.zeros_like(s)
        for c, mu in kernel.modes:
            w = c * mu * np.exp(-(mu - mu0) * s)
            num += mu * w
            den += w
        return num / den
    if kernel.family == POLYNOMIAL:
        return (kernel.p + 1.0) / (1.0 + s)
    d1 = evaluate(kernel, s, 1)
    d2 = evaluate(kernel, s, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(d1 < 0, -d2 / d1, np.inf)


def _find_k0(kernel: KernelSpec, s_grid: np.ndarray) -> float | None:
    """Infimum of -lam''/lam' over a horizon grown until the infimum settles.

    Returns None when the infimum drops below K0_FLOOR (no uniform positive
    rate exists on any finite sample we can afford to take).
    """
    ratios = _curvature_slope_ratio(kernel, s_grid)
    if np.any(~np.isfinite(ratios)):
        return None
    inf_val = float(np.min(ratios))
    if kernel.family == TABULATED:
        return inf_val if inf_val >= K0_FLOOR else None
    s_hi = float(s_grid[-1])
    for _ in range(60):
        if inf_val < K0_FLOOR:
            return None
        ext = np.linspace(s_hi, 2.0 * s_hi, 513)
        ext_min = float(np.min(_curvature_slope_ratio(kernel, ext)))
        if ext_min >= inf_val * (1.0 - 1e-3):
            inf_val = min(inf_val, ext_min)
            return inf_val if inf_val >= K0_FLOOR else None
        inf_val = min(inf_val, ext_min)
        s_hi *= 2.0
    return None  # still decreasing after 60 doublings: treat as no uniform rate


def sine_transform_slope(kernel: KernelSpec, omega: float) -> float:
    """omega * integral of lam'(s) sin(omega s) ds over [0, inf).

    The boundary is dissipative for the frequency omega when this is < 0.
    Even in omega by construction.
    """
    if omega == 0.0:
        return 0.0
    w = abs(omega)
    if kernel.family == TABULATED:
        grid, _, d1, _ = _tab_arrays(kernel)
        val = float(np.trapezoid(d1 * np.sin(w * grid), grid))
    else:
        val, _ = integrate.quad(
            lambda s: evaluate(kernel, s, 1),
            0.0,
            np.inf,
            weight="sin",
            wvar=w,
            epsabs=1e-12,
            limlst=200,
            limit=200,
        )
    return w * val


_ADMISS_CACHE: dict[KernelSpec, AdmissibilityReport] = {}


def check_admissibility(
    kernel: KernelSpec,
    s_grid: np.ndarray | None = None,
    omega_grid: np.ndarray | None = None,
) -> AdmissibilityReport:
    """Check the sign hypotheses, the frequency condition and the decay rate.

    bvk_ok: lam > 0, lam' < 0, lam'' >= 0 on every s sample.
    fourier_ok: omega * int lam' sin(omega s) ds < 0 on every omega sample.
    k0_max: largest uniform k0 with lam'' + k0 lam' >= 0 (grid infimum),
            absent when the infimum is not bounded away from zero.
    exp_decay: supremal delta with int exp(delta t) lam(t) dt finite.
    """
    default_grids = s_grid is None and omega_grid is None
    if default_grids and kernel in _ADMISS_CACHE:
        return _ADMISS_CACHE[kernel]

    if s_grid is None:
        s_grid = _default_s_grid(kernel)
    else:
        s_grid = np.asarray(s_grid, dtype=float)
    if omega_grid is None:
        omega_grid = _default_omega_grid()
    else:
        omega_grid = np.asarray(omega_grid, dtype=float)

    for name, grid in (("s_grid", s_grid), ("omega_grid", omega_grid)):
        if grid.size == 0:
            raise InputError(f"{name} must be nonempty")
        if np.any(np.diff(grid) <= 0):
            raise InputError(f"{name} must be strictly increasing")
    if kernel.family == EXPONENTIAL_SUM and s_grid[-1] < 10.0 / kernel.mu_min - 1e-12:
        raise InputError("s_grid must cover [0, 10/mu_min] for exponential kernels")
    if kernel.family == POLYNOMIAL and s_grid[-1] < 50.0 - 1e-12:
        raise InputError("s_grid must cover [0, 50] for polynomial kernels")
    if kernel.family == TABULATED and len(kernel.values) < 5:
        raise ResolutionError("tabulated kernel too coarse for second differences")

    lam = evaluate(kernel, s_grid, 0)
    lam1 = evaluate(kernel, s_grid, 1)
    lam2 = evaluate(kernel, s_grid, 2)
    tol = 1e-12 * kernel.lam0()
    bvk_ok = bool(np.all(lam > 0) and np.all(lam1 < 0) and np.all(lam2 >= -tol))

    worst_val = -np.inf
    worst_omega = float(omega_grid[0])
    for w in omega_grid:
        val = sine_transform_slope(kernel, float(w))
        if val > worst_val:
            worst_val = val
            worst_omega = float(w)
    fourier_ok = bool(worst_val < 0.0)

    k0_max = _find_k0(kernel, s_grid) if bvk_ok else None
    report = AdmissibilityReport(
        bvk_ok=bvk_ok,
        fourier_ok=fourier_ok,
        fourier_worst_omega=worst_omega,
        fourier_worst_value=float(worst_val),
        k0_max=k0_max,
        exp_decay=is_exponentially_decaying(kernel),
    )
    if default_grids:
        _ADMISS_CACHE[kernel] = report
    return report


# ---------------------------------------------------------------------------
# transforms


def laplace(kernel: KernelSpec, z: complex) -> complex:
    """Laplace transform of lam at z.

    Exponential sums use the closed form sum c_j / (z + mu_j) and accept any
    z with Re z > -mu_min; other families integrate numerically and require
    Re z >= 0 (absolute tolerance ~1e-10; tabulated kernels are limited by
    their table resolution and span).
    """
    z = complex(z)
    if kernel.family == EXPONENTIAL_SUM:
        total = 0.0 + 0.0j
        for c, mu in kernel.modes:
            den = z + mu
            if abs(den) < 1e-14 * max(1.0, mu):
                raise SingularityError(f"Laplace transform has a pole at z = {-mu}")
            total += c / den
        if z.real <= -kernel.mu_min:
            raise DomainError("Laplace transform diverges for Re z <= -mu_min")
        return total
    if z.real < 0:
        raise DomainError("Re z >= 0 required for this kernel family")
    return laplace_by_quadrature(kernel, z)


def laplace_by_quadrature(kernel: KernelSpec, z: complex, tol: float = 1e-10) -> complex:
    """Laplace transform by truncated quadrature (any family, Re z >= 0).

    Independent of the closed form used for exponential sums, so the two
    routes can be checked against each other.
    """
    z = complex(z)
    if z.real < 0:
        raise DomainError("Re z >= 0 required for quadrature transform")
    if kernel.family == TABULATED:
        grid, _, _, _ = _tab_arrays(kernel)
        vals = np.asarray(kernel.values) * np.exp(-z * grid)
        return complex(integrate.simpson(vals, x=grid))
    y = z.imag
    if y == 0.0:
        val = integrate_decaying(
            lambda s: evaluate(kernel, s) * np.exp(-z.real * s),
            tol=0.01 * tol,
        )
        return complex(val)
    # oscillatory case: QAWF handles the infinite-range Fourier weights
    x = z.real
    re, _ = integrate.quad(
        lambda s: evaluate(kernel, s) * math.exp(-x * s),
        0.0, np.inf, weight="cos", wvar=abs(y), epsabs=0.01 * tol, limlst=200, limit=200,
    )
    im, _ = integrate.quad(
        lambda s: evaluate(kernel, s) * math.exp(-x * s),
        0.0, np.inf, weight="sin", wvar=abs(y), epsabs=0.01 * tol, limlst=200, limit=200,
    )
    if y < 0:
        im = -im
    return complex(re, -im)


def is_exponentially_decaying(kernel: KernelSpec) -> float | None:
    """Supremal delta with int exp(delta t) lam(t) dt < inf, when decidable.

    Exponential sums: the slowest mode rate.  Polynomial kernels: no positive
    delta works.  Tabulated kernels: classification from finitely many samples
    is ill-posed, so none is reported.
    """
    if kernel.family == EXPONENTIAL_SUM:
        return kernel.mu_min
    return None
