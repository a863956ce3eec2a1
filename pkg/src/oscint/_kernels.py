"""Hot loops: the linear trajectory propagator and cyclic Jacobi sweeps.

Each kernel is plain numpy code that numba can also compile; see ``_accel``.
The ``*_py`` and ``*_jit`` aliases exist for the benchmark.
"""
import numpy as np

from ._accel import jit_pair


def _linear_trajectory(
    omegas, cosv, hsinc, omsin, psi1, phi, A, q0, v0, h, n_steps, stride, direct, keep
):
    # Splitting form unless `direct`; g(q) = -A q. Rows are recorded at
    # n = 0, stride, 2*stride, ... <= n_steps; nothing is recorded when
    # n_steps == 0. The modified energy is evaluated at every step.
    q = q0.copy()
    v = v0.copy()
    n_rec = n_steps // stride + 1 if n_steps > 0 else 0
    rec_step = np.empty(n_rec, dtype=np.int64)
    rec = np.empty((n_rec, 6), dtype=np.float64)  # H, Hmod, |q|, |Om q|, |v|, scale
    n_keep = n_rec if keep else 0
    rec_q = np.empty((n_keep, q0.shape[0]), dtype=np.complex128)
    rec_v = np.empty((n_keep, q0.shape[0]), dtype=np.complex128)

    om2 = omegas * omegas
    kick = 0.5 * h * psi1
    h2_8 = 0.125 * h * h

    phq = phi * q
    g = -(A @ phq)
    t1 = 0.5 * np.sum(om2 * (q.real**2 + q.imag**2))
    t2 = 0.5 * np.sum(v.real**2 + v.imag**2)
    t3 = -0.5 * np.real(np.sum(np.conj(cosv * phq) * g))
    pg = psi1 * g
    t4 = -h2_8 * np.sum(pg.real**2 + pg.imag**2)
    hm_prev = t1 + t2 + t3 + t4
    sc_prev = abs(t1) + abs(t2) + abs(t3) + abs(t4)

    max_defect = 0.0
    max_rel_defect = 0.0
    fail_step = -1
    k = 0
    if n_rec > 0:
        aq = A @ q
        rec_step[0] = 0
        rec[0, 0] = t1 + t2 + 0.5 * np.real(np.sum(np.conj(q) * aq))
        rec[0, 1] = hm_prev
        rec[0, 2] = np.sqrt(np.sum(q.real**2 + q.imag**2))
        rec[0, 3] = np.sqrt(2.0 * t1)
        rec[0, 4] = np.sqrt(2.0 * t2)
        rec[0, 5] = sc_prev
        if keep:
            rec_q[0] = q
            rec_v[0] = v
        k = 1

    for n in range(1, n_steps + 1):
        if direct:
            q_new = cosv * q + hsinc * v + (0.5 * h) * hsinc * psi1 * g
            g_new = -(A @ (phi * q_new))
            v = -omsin * q + cosv * v + (0.5 * h) * (cosv * psi1 * g + psi1 * g_new)
        else:
            vp = v + kick * g
            q_new = cosv * q + hsinc * vp
            vm = -omsin * q + cosv * vp
            g_new = -(A @ (phi * q_new))
            v = vm + kick * g_new
        q = q_new
        g = g_new
        phq = phi * q

        t1 = 0.5 * np.sum(om2 * (q.real**2 + q.imag**2))
        t2 = 0.5 * np.sum(v.real**2 + v.imag**2)
        t3 = -0.5 * np.real(np.sum(np.conj(cosv * phq) * g))
        pg = psi1 * g
        t4 = -h2_8 * np.sum(pg.real**2 + pg.imag**2)
        hm = t1 + t2 + t3 + t4
        sc = abs(t1) + abs(t2) + abs(t3) + abs(t4)
        if not np.isfinite(sc):
            fail_step = n
            break

        defect = abs(hm - hm_prev)
        if defect > max_defect:
            max_defect = defect
        denom = max(sc, sc_prev)
        if denom > 0.0 and defect / denom > max_rel_defect:
            max_rel_defect = defect / denom
        hm_prev = hm
        sc_prev = sc

        if n % stride == 0:
            aq = A @ q
            rec_step[k] = n
            rec[k, 0] = t1 + t2 + 0.5 * np.real(np.sum(np.conj(q) * aq))
            rec[k, 1] = hm
            rec[k, 2] = np.sqrt(np.sum(q.real**2 + q.imag**2))
            rec[k, 3] = np.sqrt(2.0 * t1)
            rec[k, 4] = np.sqrt(2.0 * t2)
            rec[k, 5] = sc
            if keep:
                rec_q[k] = q
                rec_v[k] = v
            k += 1

    return (
        q, v, rec_step[:k], rec[:k], rec_q[: min(k, n_keep)], rec_v[: min(k, n_keep)],
        max_defect, max_rel_defect, fail_step,
    )


linear_trajectory, linear_trajectory_jit, linear_trajectory_py = jit_pair(
    _linear_trajectory
)


def _jacobi_hermitian(a, tol, max_sweeps):
    # Cyclic complex Jacobi on a copy `a` (overwritten). Returns the rotation
    # accumulator V, sweeps used and final off-diagonal Frobenius norm.
    n = a.shape[0]
    V = np.eye(n, dtype=np.complex128)
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for r in range(p + 1, n):
                off += a[p, r].real ** 2 + a[p, r].imag ** 2
        off = np.sqrt(2.0 * off)
        if off <= tol or sweep == max_sweeps:
            return V, sweep, off
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                mag = abs(apr)
                if mag == 0.0:
                    continue
                e = apr / mag
                theta = (a[r, r].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ec = np.conj(e)
                # J = [[c, s], [-s*conj(e), c*conj(e)]] on (p, r); A <- J* A J
                colp = a[:, p].copy()
                colr = a[:, r].copy()
                a[:, p] = c * colp - s * ec * colr
                a[:, r] = s * colp + c * ec * colr
                rowp = a[p, :].copy()
                rowr = a[r, :].copy()
                a[p, :] = c * rowp - s * e * rowr
                a[r, :] = s * rowp + c * e * rowr
                a[p, r] = 0.0
                a[r, p] = 0.0
                a[p, p] = a[p, p].real
                a[r, r] = a[r, r].real
                vp = V[:, p].copy()
                vr = V[:, r].copy()
                V[:, p] = c * vp - s * ec * vr
                V[:, r] = s * vp + c * ec * vr
    return V, max_sweeps, off


jacobi_hermitian, jacobi_hermitian_jit, jacobi_hermitian_py = jit_pair(_jacobi_hermitian)
