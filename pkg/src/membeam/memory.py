"""Boundary memory at the beam tip.

The feedback traction is gamma0 * u_t(1,t) + I(t) with the convolution
I(t) = int lam(s) u_t(1, t-s) ds.  Two interchangeable representations of
the past are provided:

* ``modal``   - for exponential-sum kernels the convolution collapses to one
                amplitude q_j per mode, q_j(t) = int exp(-mu_j tau) u_t(1, t-tau) dtau,
                advanced exactly by exponential propagation with a trapezoidal
                source.  This is the minimal information determining the feedback.
* ``sampled`` - a ring of tip displacement/velocity samples at step dt over a
                finite horizon s_hist; works for any kernel family.

From either representation we evaluate the age-indexed memory amplitude
a(s) = -int lam'(tau + s) w(1, t-tau) dtau (where w is the relative tip
displacement history), the stored boundary energy psi_b, and the history
norm -(1/2) int lam' |w|^2 ds that dominates psi_b.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._quadrature import integrate_decaying
from .errors import HypothesisError, InputError
from .kernels import EXPONENTIAL_SUM, TABULATED, KernelSpec, evaluate, truncation_horizon

MODAL = "modal"
SAMPLED = "sampled"


# ---------------------------------------------------------------------------
# initial histories


@dataclass(frozen=True)
class HistoryFunction:
    """Relative tip displacement w(tau) = u(1, t-tau) - u(1, t) at the start.

    w(0) = 0 by definition; velocity at age tau is -w'(tau).
    """

    kind: str
    w: callable
    dw: callable
    resolution_hint: float = np.inf  # max quadrature panel width (oscillatory w)

    @classmethod
    def zero(cls) -> "HistoryFunction":
        return cls("zero", lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                   lambda t: np.zeros_like(np.asarray(t, dtype=float)))

    @classmethod
    def exp_approach(cls, amplitude: float, nu: float) -> "HistoryFunction":
        if nu <= 0:
            raise InputError("exp_approach rate nu must be positive")
        a, n = float(amplitude), float(nu)
        return cls("exp_approach",
                   lambda t: a * (1.0 - np.exp(-n * np.asarray(t, dtype=float))),
                   lambda t: a * n * np.exp(-n * np.asarray(t, dtype=float)))

    @classmethod
    def sine(cls, amplitude: float, omega: float) -> "HistoryFunction":
        if omega <= 0:
            raise InputError("sine frequency omega must be positive")
        a, om = float(amplitude), float(omega)
        return cls("sine",
                   lambda t: a * np.sin(om * np.asarray(t, dtype=float)),
                   lambda t: a * om * np.cos(om * np.asarray(t, dtype=float)),
                   resolution_hint=np.pi / om)

    @classmethod
    def from_config(cls, cfg: dict | None) -> "HistoryFunction":
        if cfg is None:
            return cls.zero()
        kind = cfg.get("type")
        if kind == "zero":
            return cls.zero()
        if kind == "exp_approach":
            return cls.exp_approach(cfg["A"], cfg["nu"])
        if kind == "sine":
            return cls.sine(cfg["A"], cfg["omega"])
        raise InputError(f"unknown history type {kind!r}")

    def to_config(self) -> dict:
        return {"type": self.kind}


# ---------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class MemoryState:
    """Boundary memory at time t, in modal or sampled form.

    Sampled arrays are ordered oldest first; the last entry is the current
    tip value, so the sample at index i has age (len - 1 - i) * dt.
    """

    kind: str
    t: float = 0.0
    q: np.ndarray | None = None
    dt: float | None = None
    s_hist: float | None = None
    u_hist: np.ndarray | None = None
    v_hist: np.ndarray | None = None

    @property
    def n_samples(self) -> int:
        return 0 if self.u_hist is None else len(self.u_hist)


def _eval_clamped(kernel: KernelSpec, s, order: int):
    """Kernel evaluation treating tabulated kernels as zero beyond their table."""
    if kernel.family != TABULATED:
        return evaluate(kernel, s, order)
    span = kernel.ds * (len(kernel.values) - 1)
    s_arr = np.asarray(s, dtype=float)
    out = np.zeros_like(s_arr)
    inside = s_arr <= span
    if np.any(inside):
        out[inside] = evaluate(kernel, s_arr[inside], order)
    return out


def _trap_weights(n: int, dt: float) -> np.ndarray:
    w = np.full(n, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def default_horizon(kernel: KernelSpec) -> float:
    """Ring-buffer horizon: where the kernel has decayed to 1e-12 of lam(0)."""
    return truncation_horizon(kernel, rel=1e-12)


def init_from_history(
    kernel: KernelSpec,
    history: HistoryFunction,
    dt: float | None = None,
    s_hist: float | None = None,
    representation: str = "auto",
    u_tip0: float = 0.0,
    v_tip0: float | None = None,
) -> MemoryState:
    """Build the memory state holding the given initial past history.

    Modal states integrate exp(-mu_j tau) against the history velocity
    (through the identity q_j = -mu_j int exp(-mu_j tau) w(tau) dtau);
    sampled states fill the ring from history samples.
    """
    w0 = float(np.asarray(history.w(0.0)))
    if abs(w0) > 1e-12:
        raise InputError(f"history must satisfy w(0) = 0, got {w0}")
    if representation == "auto":
        representation = MODAL if kernel.family == EXPONENTIAL_SUM else SAMPLED

    if representation == MODAL:
        if kernel.family != EXPONENTIAL_SUM:
            raise InputError("modal representation requires an exponential_sum kernel")
        q = np.empty(len(kernel.modes))
        for j, (_, mu) in enumerate(kernel.modes):
            integral = integrate_decaying(
                lambda tau: np.exp(-mu * tau) * history.w(tau),
                tol=1e-14,
                max_width=history.resolution_hint,
            )
            q[j] = -mu * integral
        return MemoryState(kind=MODAL, t=0.0, q=q)

    if representation != SAMPLED:
        raise InputError(f"unknown memory representation {representation!r}")
    if dt is None or dt <= 0:
        raise InputError("sampled representation needs a positive dt")
    if s_hist is None:
        s_hist = default_horizon(kernel)
    m = int(np.ceil(s_hist / dt))
    ages = dt * np.arange(m, -1, -1)  # oldest first, ending at age 0
    u_hist = u_tip0 + history.w(ages)
    v_hist = -history.dw(ages)
    if v_tip0 is not None:
        v_hist[-1] = v_tip0
    return MemoryState(kind=SAMPLED, t=0.0, dt=float(dt), s_hist=float(s_hist),
                       u_hist=u_hist, v_hist=v_hist)


def advance(state: MemoryState, kernel: KernelSpec, v_tip_old: float,
            v_tip_new: float, dt: float) -> MemoryState:
    """One time step of the memory under the tip velocity moving old -> new."""
    if dt <= 0:
        raise InputError("dt must be positive")
    if state.kind == MODAL:
        mus = np.array([mu for _, mu in kernel.modes])
        decay = np.exp(-mus * dt)
        q = decay * state.q + 0.5 * dt * (decay * v_tip_old + v_tip_new)
        return replace(state, t=state.t + dt, q=q)
    if abs(dt - state.dt) > 1e-12 * state.dt:
        raise InputError("sampled memory must advance at its own sampling step")
    u_new = state.u_hist[-1] + 0.5 * dt * (v_tip_old + v_tip_new)
    u_hist = np.append(state.u_hist[1:], u_new)
    v_hist = np.append(state.v_hist[1:], v_tip_new)
    return replace(state, t=state.t + dt, u_hist=u_hist, v_hist=v_hist)


def convolution_value(state: MemoryState, kernel: KernelSpec) -> float:
    """I(t) = int lam(s) u_t(1, t-s) ds from the stored representation."""
    if state.kind == MODAL:
        return float(sum(c * qj for (c, _), qj in zip(kernel.modes, state.q)))
    m = state.n_samples - 1
    ages = state.dt * np.arange(m, -1, -1)
    weights = _trap_weights(m + 1, state.dt) * _eval_clamped(kernel, ages, 0)
    return float(np.dot(weights, state.v_hist))


def feedback(state: MemoryState, kernel: KernelSpec, gamma0: float, v_tip: float) -> float:
    """Tip traction u_xxx(1, t) = gamma0 * v_tip + I(t)."""
    return gamma0 * v_tip + convolution_value(state, kernel)


def minimal_state(state: MemoryState, kernel: KernelSpec, s) -> float | np.ndarray:
    """Age-indexed memory amplitude a(s) = -int lam'(tau + s) w(1, t-tau) dtau."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s_arr < 0):
        raise InputError("age s must be nonnegative")
    if state.kind == MODAL:
        out = np.zeros_like(s_arr)
        for (c, mu), qj in zip(kernel.modes, state.q):
            out -= c * np.exp(-mu * s_arr) * qj
    else:
        m = state.n_samples - 1
        taus = state.dt * np.arange(m, -1, -1)
        w_vals = state.u_hist - state.u_hist[-1]
        trap = _trap_weights(m + 1, state.dt)
        out = np.array([
            -float(np.dot(trap * _eval_clamped(kernel, taus + si, 1), w_vals))
            for si in s_arr
        ])
    return out if isinstance(s, np.ndarray) else float(out[0])


def _memory_slope(state: MemoryState, kernel: KernelSpec, s: np.ndarray) -> np.ndarray:
    """d/ds of the memory amplitude a(s) (vectorized over ages s)."""
    if state.kind == MODAL:
        out = np.zeros_like(s)
        for (c, mu), qj in zip(kernel.modes, state.q):
            out += c * mu * np.exp(-mu * s) * qj
        return out
    m = state.n_samples - 1
    taus = state.dt * np.arange(m, -1, -1)
    w_vals = state.u_hist - state.u_hist[-1]
    trap = _trap_weights(m + 1, state.dt) * w_vals
    # -int lam''(tau + s) w dtau, one inner trapezoid per age
    return np.array([
        -float(np.dot(trap, _eval_clamped(kernel, taus + si, 2))) for si in s
    ])


def boundary_energy(state: MemoryState, kernel: KernelSpec) -> float:
    """Stored memory energy psi_b = -(1/2) int (1/lam') |a'(s)|^2 ds >= 0."""
    lam1_0 = evaluate(kernel, 0.0, 1)
    if lam1_0 >= 0:
        raise HypothesisError("boundary energy needs lam' < 0")
    if state.kind == MODAL and len(kernel.modes) == 1:
        c, _ = kernel.modes[0]
        return 0.5 * c * float(state.q[0]) ** 2
    def integrand(s: np.ndarray) -> np.ndarray:
        slope = _memory_slope(state, kernel, s)
        lam1 = _eval_clamped(kernel, s, 1)
        out = np.zeros_like(s)
        ok = lam1 < 0
        out[ok] = -0.5 * slope[ok] ** 2 / lam1[ok]
        return out
    return float(integrate_decaying(integrand, tol=1e-12))


def graffi_functional(history: HistoryFunction, kernel: KernelSpec) -> float:
    """History norm -(1/2) int lam'(s) |w(s)|^2 ds (majorant of psi_b)."""
    value = integrate_decaying(
        lambda s: -0.5 * _eval_clamped(kernel, s, 1) * history.w(s) ** 2,
        tol=1e-14,
        max_width=history.resolution_hint,
    )
    return float(value)


# ---------------------------------------------------------------------------
# fixed quadrature rules for per-row energy evaluation inside simulations


def _geometric_panels(s_max: float, nodes_per_panel: int = 20):
    """Gauss-Legendre nodes/weights on panels [0,1],[1,2],[2,4],... up to s_max."""
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = [0.0, 1.0]
    while edges[-1] < s_max:
        edges.append(2.0 * edges[-1])
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * gl_x)
        weights.append(half * gl_w)
    return np.concatenate(nodes), np.concatenate(weights)


class ModalEnergyRule:
    """Precomputed quadrature evaluating psi_b(q) for an exponential-sum kernel."""

    def __init__(self, kernel: KernelSpec):
        self.kernel = kernel
        self.single = len(kernel.modes) == 1
        if self.single:
            self.c0 = kernel.modes[0][0]
            return
        s_max = truncation_horizon(kernel, rel=1e-16)
        s, w = _geometric_panels(s_max)
        cs = np.array([c for c, _ in kernel.modes])
        mus = np.array([mu for _, mu in kernel.modes])
        self.amp = (cs * mus)[None, :] * np.exp(-np.outer(s, mus))  # a'(s) columns
        self.denom = self.amp.sum(axis=1)  # -lam'(s)
        self.wq = w

    def psi_b(self, q: np.ndarray) -> float:
        if self.single:
            return 0.5 * self.c0 * float(q[0]) ** 2
        slope = self.amp @ q
        return 0.5 * float(np.dot(self.wq, slope**2 / self.denom))


class SampledEnergyRule:
    """Precomputed quadrature evaluating psi_b from a w-history window.

    The inner convolution against lam'' is subsampled to at most `max_inner`
    points; the outer integral uses geometric Gauss panels out to where the
    kernel slope has decayed away.
    """

    def __init__(self, kernel: KernelSpec, dt: float, n_window: int, max_inner: int = 4096):
        self.kernel = kernel
        m = n_window - 1
        step = max(1, int(np.ceil(m / max_inner)))
        idx = np.arange(0, m + 1, step)
        if idx[-1] != m:
            idx = np.append(idx, m)
        self.idx = idx  # ages dt*idx, ascending
        taus = dt * idx
        # trapezoid weights for the nonuniform subsampled age grid
        trap = np.zeros(len(idx))
        d = np.diff(taus)
        trap[:-1] += 0.5 * d
        trap[1:] += 0.5 * d
        self.trap = trap
        s_max = max(truncation_horizon(kernel, rel=1e-14), 1.0)
        s, w = _geometric_panels(s_max)
        lam1 = np.asarray(_eval_clamped(kernel, s, 1), dtype=float)
        keep = lam1 < 0
        self.s = s[keep]
        self.wq = w[keep]
        self.lam1 = lam1[keep]
        # inner weights: lam''(tau_k + s_i) * trap_k
        self.w_mat = np.asarray(
            _eval_clamped(kernel, self.s[:, None] + taus[None, :], 2), dtype=float
        ) * trap[None, :]

    def psi_b(self, w_window: np.ndarray) -> float:
        """w_window: relative displacement history, oldest first (age descending)."""
        w_sub = w_window[::-1][self.idx]  # reorder to ascending age, subsample
        slope = -(self.w_mat @ w_sub)
        return 0.5 * float(np.dot(self.wq, slope**2 / (-self.lam1)))
