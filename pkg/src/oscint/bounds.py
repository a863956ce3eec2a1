"""Explicit energy bounds for compliant trigonometric integrators.

The constants

    c_breve = c0^2 ||A|| / 2
    c_hat   = c0^4 ||A||^2 / 8
    c_tilde = (2 c0^2 + (c0 + 1) max(c0 + 1, c1)) ||A|| / 2

control the distance between the modified energy and the total energy. The
checks below evaluate the resulting inequalities on concrete states and
trajectories and report the slack (right side minus left side). All of them
assume h <= 1; for larger steps the verdict is marked advisory.
"""
from dataclasses import dataclass

import numpy as np

from .system import energy, modified_energy

__all__ = [
    "HypothesisNotMet",
    "BoundConstants",
    "bound_constants",
    "ClosenessReport",
    "closeness_check",
    "regularity_bound",
    "DriftBoundReport",
    "drift_bound_check",
    "UnconditionalReport",
    "unconditional_bound_check",
]

CLOSENESS_RTOL = 1e-12
TRAJECTORY_RTOL = 1e-10


class HypothesisNotMet(ValueError):
    """A theorem's hypotheses do not hold, so its bound cannot be certified."""


@dataclass(frozen=True)
class BoundConstants:
    c_breve: float
    c_hat: float
    c_tilde: float
    omega_min_nonzero: float
    a_norm: float

    def step_factor(self, h):
        """min(h, 1/omega); zero when every frequency vanishes."""
        return min(h, 1.0 / self.omega_min_nonzero)


def bound_constants(sys, fp):
    a = sys.a_norm
    c0, c1 = fp.c0, fp.c1
    return BoundConstants(
        c_breve=0.5 * c0**2 * a,
        c_hat=0.125 * c0**4 * a**2,
        c_tilde=0.5 * (2 * c0**2 + (c0 + 1) * max(c0 + 1, c1)) * a,
        omega_min_nonzero=sys.omega_min_nonzero,
        a_norm=a,
    )


def _require_compliant(fp):
    if not fp.hl_compliant:
        raise HypothesisNotMet(
            f"filter pair {fp.name!r} violates psi1 = sinc*phi; the bound does not apply"
        )


def _norms(sys, s):
    q = float(np.linalg.norm(s.q))
    oq = float(np.linalg.norm(sys.omegas * s.q))
    v = float(np.linalg.norm(s.qdot))
    return q, oq, v


@dataclass(frozen=True)
class ClosenessReport:
    first_ok: bool
    second_ok: bool
    slack_first: float
    slack_second: float
    scale: float
    advisory: bool

    @property
    def ok(self):
        return self.first_ok and self.second_ok


def closeness_check(sys, fp, h, s, bc=None):
    """Check both closeness inequalities between modified and total energy.

    |Hmod - |Om q|^2/2 - |q'|^2/2| <= (c_breve + c_hat h^2) |q|^2
    |Hmod - H| <= c_tilde min(h, 1/omega) |q| |Om q| + c_hat h^2 |q|^2
    """
    bc = bc or bound_constants(sys, fp)
    q, oq, v = _norms(sys, s)
    hm = modified_energy(sys, fp, h, s)
    H = energy(sys, s)
    quad = 0.5 * oq**2 + 0.5 * v**2
    rhs1 = (bc.c_breve + bc.c_hat * h * h) * q**2
    rhs2 = bc.c_tilde * bc.step_factor(h) * q * oq + bc.c_hat * h * h * q**2
    slack1 = rhs1 - abs(hm - quad)
    slack2 = rhs2 - abs(hm - H)
    scale = quad + rhs1 + abs(H)
    tol = CLOSENESS_RTOL * scale
    return ClosenessReport(slack1 >= -tol, slack2 >= -tol, slack1, slack2, scale, h > 1)


def regularity_bound(sys, fp, h, s0, qn_norm, bc=None):
    """Upper bound on sqrt(|Om q_n|^2 + |q'_n|^2) given |q_n| <= qn_norm."""
    _require_compliant(fp)
    bc = bc or bound_constants(sys, fp)
    q0, oq0, v0 = _norms(sys, s0)
    c = bc.c_breve + bc.c_hat * h * h
    return float(np.sqrt(oq0**2 + v0**2 + 2 * c * (q0**2 + qn_norm**2)))


@dataclass(frozen=True)
class DriftBoundReport:
    ok: bool
    worst_slack: float
    worst_step: int
    max_drift: float
    scale: float
    advisory: bool


def drift_bound_check(sys, fp, h, series, bc=None):
    """Check |H_n - H_0| against the explicit two-sided closeness bound at every
    recorded step of ``series``."""
    _require_compliant(fp)
    bc = bc or bound_constants(sys, fp)
    if len(series) == 0:
        return DriftBoundReport(True, np.inf, -1, 0.0, 0.0, h > 1)
    qn, oqn = series.q_norm, series.omega_q_norm
    m = bc.step_factor(h)
    bound = bc.c_tilde * m * (qn * oqn + qn[0] * oqn[0]) + bc.c_hat * h * h * (
        qn**2 + qn[0] ** 2
    )
    drift = np.abs(series.H - series.H[0])
    slack = bound - drift
    i = int(np.argmin(slack))
    scale = float(np.max(series.scale)) if series.scale is not None else 0.0
    scale = max(scale, float(np.max(np.abs(series.H))))
    ok = bool(slack[i] >= -TRAJECTORY_RTOL * scale)
    return DriftBoundReport(
        ok, float(slack[i]), int(series.step[i]), float(drift.max()), scale, h > 1
    )


@dataclass(frozen=True)
class UnconditionalReport:
    certified: bool
    ceiling: float
    q_bound: float
    omega_q_bound: float
    threshold: float
    advisory: bool
    energy_slack: float = np.inf
    drift_slack: float = np.inf
    max_drift: float = 0.0

    @property
    def ok(self):
        return self.certified and np.isfinite(self.ceiling)


def unconditional_bound_check(sys, fp, h, s0, series=None, bc=None):
    """A-priori drift ceiling when every frequency is at least c0^2||A||/2 + 1.

    Raises ``HypothesisNotMet`` naming the failing condition. With ``series``
    the chain is also audited along the trajectory: 1/2|q_n|^2 + 1/2|q'_n|^2
    must stay below |Hmod(q_0, q'_0)| and the drift below the ceiling.
    """
    _require_compliant(fp)
    bc = bc or bound_constants(sys, fp)
    zero = np.flatnonzero(sys.omegas == 0)
    if zero.size:
        raise HypothesisNotMet(
            f"zero frequency at index {int(zero[0])}: every omega_j must be nonzero"
        )
    threshold = 0.5 * fp.c0**2 * bc.a_norm + 1.0
    om = bc.omega_min_nonzero
    if om < threshold:
        j = int(np.argmin(sys.omegas))
        raise HypothesisNotMet(
            f"smallest frequency omega_{j} = {om:.6g} is below the threshold "
            f"c0^2 ||A||/2 + 1 = {threshold:.6g}"
        )
    e0 = abs(modified_energy(sys, fp, h, s0))
    q_bound = float(np.sqrt(2 * e0))
    oq_bound = regularity_bound(sys, fp, h, s0, q_bound, bc)
    q0, oq0, _ = _norms(sys, s0)
    m = bc.step_factor(h)
    ceiling = bc.c_tilde * m * (q_bound * oq_bound + q0 * oq0) + bc.c_hat * h * h * (
        q_bound**2 + q0**2
    )
    report = dict(
        certified=True,
        ceiling=float(ceiling),
        q_bound=q_bound,
        omega_q_bound=oq_bound,
        threshold=threshold,
        advisory=h > 1,
    )
    if series is not None and len(series):
        scale = max(e0, float(np.max(series.scale)) if series.scale is not None else 0.0)
        held = 0.5 * series.q_norm**2 + 0.5 * series.qdot_norm**2
        drift = np.abs(series.H - series.H[0])
        report["energy_slack"] = float(np.min(e0 - held))
        report["drift_slack"] = float(ceiling - drift.max())
        report["max_drift"] = float(drift.max())
        tol = TRAJECTORY_RTOL * scale
        report["certified"] = bool(
            report["energy_slack"] >= -tol and report["drift_slack"] >= -tol
        )
    return UnconditionalReport(**report)
