"""Symmetric trigonometric integrators.

One step with step size h maps (q_n, q'_n) to

    q_{n+1}  = cos(hOm) q_n + h sinc(hOm) q'_n + h^2/2 sinc(hOm) Psi1 g(Phi q_n)
    q'_{n+1} = -Om sin(hOm) q_n + cos(hOm) q'_n
               + h/2 (cos(hOm) Psi1 g(Phi q_n) + Psi1 g(Phi q_{n+1}))

which is the same as the Strang splitting kick(h/2) - rotate(h) - kick(h/2)
with filtered kicks. Both formulations are available; splitting is the
default. ``g=None`` means the linear force g(q) = -A q, which runs through
the compiled trajectory kernel.
"""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .filters import FilterPair, sinc
from .series import EnergySeries
from .system import OscillatorSystem, State, energy, linear_nonlinearity, modified_energy_general

__all__ = [
    "IntegrationError",
    "IntegratorConfig",
    "StepWorkspace",
    "make_workspace",
    "step_direct",
    "step_splitting",
    "step",
    "integrate",
    "step_adjoint_roundtrip",
    "stoermer_verlet_discrete_energy",
    "default_stride",
]


class IntegrationError(RuntimeError):
    """Non-finite state encountered; ``step`` is the offending step index."""

    def __init__(self, step, series=None):
        super().__init__(f"non-finite state at step {step}")
        self.step = step
        self.series = series


@dataclass(frozen=True)
class IntegratorConfig:
    h: float
    filters: FilterPair
    formulation: Literal["splitting", "direct"] = "splitting"

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"step size must be positive and finite, got {self.h}")
        if self.formulation not in ("splitting", "direct"):
            raise ValueError(f"unknown formulation {self.formulation!r}")

    @property
    def advisory(self):
        """True when h > 1, outside the range the energy bounds assume."""
        return self.h > 1


@dataclass(frozen=True, eq=False)
class StepWorkspace:
    """Diagonal factors of one step, cached per (h, omegas, filters).

    ``h`` may be negative here (used for the adjoint step).
    """

    h: float
    omegas: np.ndarray
    cos: np.ndarray
    sin: np.ndarray
    sinc: np.ndarray
    hsinc: np.ndarray
    omsin: np.ndarray
    phi: np.ndarray
    psi1: np.ndarray


def make_workspace(sys, h, fp):
    omegas = sys.omegas if isinstance(sys, OscillatorSystem) else np.asarray(sys, float)
    xi = h * omegas
    phi, psi1 = fp.evaluate(xi)
    s = sinc(xi)
    sn = np.sin(xi)
    return StepWorkspace(
        h=h,
        omegas=omegas,
        cos=np.cos(xi),
        sin=sn,
        sinc=np.asarray(s, dtype=np.float64),
        hsinc=h * s,
        # omega_j * sin(h omega_j) is exactly zero for omega_j = 0
        omsin=omegas * sn,
        phi=np.ascontiguousarray(phi, dtype=np.float64),
        psi1=np.ascontiguousarray(psi1, dtype=np.float64),
    )


def _check(sys, cfg, ws, s):
    if s.q.shape != (sys.d,):
        raise ValueError(f"state has dimension {s.q.shape[0]}, system has {sys.d}")
    if abs(ws.h) != cfg.h or not np.array_equal(ws.omegas, sys.omegas):
        raise ValueError("workspace was built for a different step size or system")


def _force(sys, g):
    return linear_nonlinearity(sys) if g is None else g


def _direct(ws, g, q, v, gq):
    h = ws.h
    q1 = ws.cos * q + ws.hsinc * v + 0.5 * h * ws.hsinc * ws.psi1 * gq
    gq1 = np.asarray(g(ws.phi * q1))
    v1 = -ws.omsin * q + ws.cos * v + 0.5 * h * (ws.cos * ws.psi1 * gq + ws.psi1 * gq1)
    return q1, v1, gq1


def _splitting(ws, g, q, v, gq):
    half = 0.5 * ws.h * ws.psi1
    vp = v + half * gq
    q1, vm = rotate(ws, q, vp)
    gq1 = np.asarray(g(ws.phi * q1))
    return q1, vm + half * gq1, gq1


def rotate(ws, q, v):
    """Exact flow of q'' = -Om^2 q over one step (the middle splitting stage)."""
    return ws.cos * q + ws.hsinc * v, -ws.omsin * q + ws.cos * v


def _finite(q, v):
    return np.isfinite(q).all() and np.isfinite(v).all()


def step_direct(sys, g, cfg, ws, s):
    """One step in the two-line (position, velocity) form."""
    _check(sys, cfg, ws, s)
    g = _force(sys, g)
    q1, v1, _ = _direct(ws, g, s.q, s.qdot, np.asarray(g(ws.phi * s.q)))
    if not _finite(q1, v1):
        raise IntegrationError(1)
    return State(q1, v1, s.t + ws.h)


def step_splitting(sys, g, cfg, ws, s):
    """One step as kick - rotate - kick."""
    _check(sys, cfg, ws, s)
    g = _force(sys, g)
    q1, v1, _ = _splitting(ws, g, s.q, s.qdot, np.asarray(g(ws.phi * s.q)))
    if not _finite(q1, v1):
        raise IntegrationError(1)
    return State(q1, v1, s.t + ws.h)


def step(sys, g, cfg, ws, s):
    fn = step_splitting if cfg.formulation == "splitting" else step_direct
    return fn(sys, g, cfg, ws, s)


def default_stride(d):
    return 1 if d <= 16 else 10


def integrate(sys, g, cfg, s0, n_steps, stride=None, keep_states=False):
    """Advance ``s0`` by ``n_steps`` steps and record energies every ``stride``.

    Returns ``(final_state, series)``. Rows are recorded at n = 0, stride,
    2*stride, ...; a zero-step run records nothing. The force evaluation at
    the new position is reused as the next step's old-position force.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    stride = default_stride(sys.d) if stride is None else int(stride)
    if stride < 1:
        raise ValueError("stride must be at least 1")
    if s0.q.shape != (sys.d,):
        raise ValueError(f"state has dimension {s0.q.shape[0]}, system has {sys.d}")
    ws = make_workspace(sys, cfg.h, cfg.filters)
    if n_steps == 0:
        return s0.copy(), EnergySeries.empty(cfg.h)
    # a blowup is reported through IntegrationError, not overflow warnings
    with np.errstate(over="ignore", invalid="ignore"):
        if g is None:
            return _integrate_linear(sys, cfg, ws, s0, n_steps, stride, keep_states)
        return _integrate_general(sys, g, cfg, ws, s0, n_steps, stride, keep_states)


def _integrate_linear(sys, cfg, ws, s0, n_steps, stride, keep_states):
    out = _kernels.linear_trajectory(
        sys.omegas,
        ws.cos,
        ws.hsinc,
        ws.omsin,
        ws.psi1,
        ws.phi,
        sys.coupling,
        np.ascontiguousarray(s0.q),
        np.ascontiguousarray(s0.qdot),
        float(cfg.h),
        int(n_steps),
        int(stride),
        cfg.formulation == "direct",
        bool(keep_states),
    )
    q, v, steps, rec, rq, rv, max_def, max_rel, fail = out
    series = EnergySeries(
        h=cfg.h,
        step=steps,
        H=rec[:, 0].copy(),
        Hmod=rec[:, 1].copy(),
        q_norm=rec[:, 2].copy(),
        omega_q_norm=rec[:, 3].copy(),
        qdot_norm=rec[:, 4].copy(),
        scale=rec[:, 5].copy(),
        max_step_defect=float(max_def),
        max_rel_step_defect=float(max_rel),
        states_q=rq if keep_states else None,
        states_qdot=rv if keep_states else None,
    )
    if fail >= 0:
        raise IntegrationError(int(fail), series)
    return State(q, v, s0.t + n_steps * cfg.h), series


def _integrate_general(sys, g, cfg, ws, s0, n_steps, stride, keep_states):
    advance = _splitting if cfg.formulation == "splitting" else _direct
    fp, h = cfg.filters, cfg.h
    rows, states = [], []

    def record(n, q, v):
        s = State(q, v)
        hm = modified_energy_general(sys, g, fp, h, s)
        cos = ws.cos
        phq = ws.phi * q
        gq = g(phq)
        terms = (
            0.5 * np.sum(np.abs(sys.omegas * q) ** 2),
            0.5 * np.sum(np.abs(v) ** 2),
            0.5 * abs(np.vdot(cos * phq, gq).real),
            0.125 * h * h * np.sum(np.abs(ws.psi1 * gq) ** 2),
        )
        H = energy(sys, s, g) if g.U is not None else np.nan
        rows.append(
            (
                n,
                H,
                hm,
                np.linalg.norm(q),
                np.linalg.norm(sys.omegas * q),
                np.linalg.norm(v),
                sum(terms),
            )
        )
        if keep_states:
            states.append((q.copy(), v.copy()))
        return hm, sum(terms)

    q, v = s0.q.copy(), s0.qdot.copy()
    gq = np.asarray(g(ws.phi * q))
    hm_prev, sc_prev = record(0, q, v)
    max_def = max_rel = 0.0
    fail = -1
    for n in range(1, n_steps + 1):
        q, v, gq = advance(ws, g, q, v, gq)
        if not _finite(q, v):
            fail = n
            break
        if n % stride == 0:
            hm, sc = record(n, q, v)
            if not np.isfinite(sc):
                rows.pop()
                if keep_states:
                    states.pop()
                fail = n
                break
            # defects are only observed at recorded steps on this path
            if stride == 1:
                d = abs(hm - hm_prev)
                max_def = max(max_def, d)
                if max(sc, sc_prev) > 0:
                    max_rel = max(max_rel, d / max(sc, sc_prev))
            hm_prev, sc_prev = hm, sc

    arr = np.array(rows, dtype=np.float64).reshape(-1, 7)
    series = EnergySeries(
        h=h,
        step=arr[:, 0].astype(np.int64),
        H=arr[:, 1],
        Hmod=arr[:, 2],
        q_norm=arr[:, 3],
        omega_q_norm=arr[:, 4],
        qdot_norm=arr[:, 5],
        scale=arr[:, 6],
        max_step_defect=max_def,
        max_rel_step_defect=max_rel,
        states_q=np.array([s[0] for s in states]) if keep_states else None,
        states_qdot=np.array([s[1] for s in states]) if keep_states else None,
    )
    if fail >= 0:
        raise IntegrationError(fail, series)
    return State(q, v, s0.t + n_steps * h), series


def step_adjoint_roundtrip(sys, g, cfg, s):
    """Relative error of step(-h) after step(h); zero for a symmetric method
    up to roundoff.

    The error is measured in the norm sqrt(sum (omega_j^2 + 1)|q_j|^2 + |q'_j|^2),
    in which the free rotation is (nearly) an isometry. Measuring q' on its
    own would amplify roundoff by up to h*omega, since rotating back cancels a
    velocity of size omega*|q|.
    """
    g = _force(sys, g)
    fwd = make_workspace(sys, cfg.h, cfg.filters)
    bwd = make_workspace(sys, -cfg.h, cfg.filters)
    advance = _splitting if cfg.formulation == "splitting" else _direct
    q1, v1, _ = advance(fwd, g, s.q, s.qdot, np.asarray(g(fwd.phi * s.q)))
    q2, v2, _ = advance(bwd, g, q1, v1, np.asarray(g(bwd.phi * q1)))
    w = np.sqrt(sys.omegas**2 + 1.0)

    def norm(q, v):
        return np.sqrt(np.sum(np.abs(w * q) ** 2) + np.sum(np.abs(v) ** 2))

    ref = norm(s.q, s.qdot)
    err = norm(q2 - s.q, v2 - s.qdot)
    return float(err / ref) if ref > 0 else float(err)


def stoermer_verlet_discrete_energy(sys, h, q_n, q_next):
    """1/2 |(q_{n+1} - q_n)/h|^2 + 1/2 Re(q_{n+1}* A q_n) for Omega = 0.

    The trigonometric integrator with phi = 1, psi1 = sinc reduces to
    Stoermer-Verlet when all frequencies vanish, and this quantity is then
    conserved exactly.
    """
    if np.any(sys.omegas != 0):
        raise ValueError("discrete Stoermer-Verlet energy requires all frequencies zero")
    dq = (np.asarray(q_next) - np.asarray(q_n)) / h
    return 0.5 * float(np.vdot(dq, dq).real) + 0.5 * float(
        np.vdot(q_next, sys.coupling @ q_n).real
    )
