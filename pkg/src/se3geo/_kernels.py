"""Compiled numerical core.

Everything here operates on bare float64 arrays so that the geodesic-flow
integration and the shooting/energy objectives run at native speed.  The
public modules wrap these kernels with typed containers and error handling.

Conventions (shared with :mod:`se3geo.se3`):
  * algebra coordinates c = (c1..c6): translation generators first,
    rotation generators (about ex, ey, ez) last;
  * rotations are 3x3 row-major matrices;
  * ``q`` denotes the rotation angle sqrt(c4^2 + c5^2 + c6^2).

Lie-bracket data is passed in as flat arrays of nonzero structure-constant
triples (k, i, j, value); see ``se3.structure_constant_triples``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# Switch-over thresholds for series branches, chosen so the truncation error
# stays below double-precision rounding.  The f switch also sits high enough
# that the closed form never suffers 1 - cot cancellation.
SMALL_ANGLE = 1e-6
SMALL_F = 1e-2
# |angle - pi| below this margin counts as the rotational cut locus.
CUT_MARGIN = 1e-9
# Objective value returned when a shooting endpoint lands on the cut locus.
CUT_PENALTY = 1e3


@njit(cache=True)
def _skew(w):
    S = np.zeros((3, 3))
    S[0, 1] = -w[2]
    S[0, 2] = w[1]
    S[1, 0] = w[2]
    S[1, 2] = -w[0]
    S[2, 0] = -w[1]
    S[2, 1] = w[0]
    return S


@njit(cache=True)
def so3_exp(w):
    """Rodrigues formula with 4th-order series coefficients for small angles."""
    q2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    q = np.sqrt(q2)
    if q < SMALL_ANGLE:
        a = 1.0 - q2 / 6.0 + q2 * q2 / 120.0
        b = 0.5 - q2 / 24.0 + q2 * q2 / 720.0
    else:
        a = np.sin(q) / q
        b = (1.0 - np.cos(q)) / q2
    W = _skew(w)
    return np.eye(3) + a * W + b * (W @ W)


@njit(cache=True)
def rotation_angle(R):
    """Angle in [0, pi], via atan2 of the skew part against the trace."""
    vx = 0.5 * (R[2, 1] - R[1, 2])
    vy = 0.5 * (R[0, 2] - R[2, 0])
    vz = 0.5 * (R[1, 0] - R[0, 1])
    s = np.sqrt(vx * vx + vy * vy + vz * vz)
    c = 0.5 * (R[0, 0] + R[1, 1] + R[2, 2] - 1.0)
    return np.arctan2(s, c)


@njit(cache=True)
def so3_log(R):
    """Inverse Rodrigues.  Returns (w, ok); ok is False at the cut locus."""
    w = np.zeros(3)
    q = rotation_angle(R)
    if q > np.pi - CUT_MARGIN:
        return w, False
    w[0] = 0.5 * (R[2, 1] - R[1, 2])
    w[1] = 0.5 * (R[0, 2] - R[2, 0])
    w[2] = 0.5 * (R[1, 0] - R[0, 1])
    if q < SMALL_ANGLE:
        s = 1.0 + q * q / 6.0 + 7.0 * q ** 4 / 360.0
    else:
        s = q / np.sin(q)
    return s * w, True


@njit(cache=True)
def f_coefficient(q):
    """f(q) = (1 - (q/2) cot(q/2)) / q^2, with its series near zero."""
    if q < SMALL_F:
        return 1.0 / 12.0 + q * q / 720.0 + q ** 4 / 30240.0
    return (1.0 - 0.5 * q / np.tan(0.5 * q)) / (q * q)


@njit(cache=True)
def se3_exp(c):
    """Group exponential: rotation by Rodrigues, translation by the V-matrix."""
    v = c[:3]
    w = c[3:]
    q2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    q = np.sqrt(q2)
    R = so3_exp(w)
    if q < SMALL_ANGLE:
        b = 0.5 - q2 / 24.0 + q2 * q2 / 720.0
        d = 1.0 / 6.0 - q2 / 120.0 + q2 * q2 / 5040.0
    else:
        b = (1.0 - np.cos(q)) / q2
        d = (q - np.sin(q)) / (q2 * q)
    W = _skew(w)
    V = np.eye(3) + b * W + d * (W @ W)
    return V @ v, R


@njit(cache=True)
def se3_log(x, R):
    """Group logarithm.  Returns (c, ok); ok is False at the cut locus.

    Translation part: c1 = x - (1/2) w x x + f(q) w x (w x x), which is the
    closed-form inverse of the V-matrix used by ``se3_exp``.
    """
    c = np.zeros(6)
    w, ok = so3_log(R)
    if not ok:
        return c, False
    q = np.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    W = _skew(w)
    v = x - 0.5 * (W @ x) + f_coefficient(q) * (W @ (W @ x))
    c[:3] = v
    c[3:] = w
    return c, True


@njit(cache=True)
def ad_apply(ks, is_, js, vals, v, w):
    """ad_v(w) through the nonzero structure-constant triples."""
    out = np.zeros(6)
    for m in range(ks.shape[0]):
        out[ks[m]] += vals[m] * v[is_[m]] * w[js[m]]
    return out


@njit(cache=True)
def coad_apply(ks, is_, js, vals, v, mu):
    """coad_v(mu), the dual of ad: (coad_v mu)_j = sum c^k_{ij} v^i mu_k."""
    out = np.zeros(6)
    for m in range(ks.shape[0]):
        out[js[m]] += vals[m] * v[is_[m]] * mu[ks[m]]
    return out


@njit(cache=True)
def _rk4_sweep(ks, is_, js, vals, ginv, x0, R0, lam0, T, steps, store,
               xs, Rs, lams, us):
    """Fused allocation-free RK4 loop (the hot path of every solver).

    Advances (x, R, lam) over [0, T]; when ``store`` is nonzero the arrays
    xs/Rs/lams/us must have steps+1 rows and receive every grid point.
    Returns the final (x, R, lam).
    """
    nnz = ks.shape[0]
    dt = T / steps
    x = x0.copy()
    R = R0.copy()
    lam = lam0.copy()
    th_s = np.zeros(6)
    lam_s = np.zeros(6)
    u = np.zeros(6)
    a1 = np.zeros(6)
    a2 = np.zeros(6)
    k_t = np.zeros((4, 6))
    k_l = np.zeros((4, 6))
    theta = np.zeros(6)
    W = np.zeros((3, 3))
    dR = np.zeros((3, 3))
    Rn = np.zeros((3, 3))
    if store != 0:
        for d in range(3):
            xs[0, d] = x[d]
            for e in range(3):
                Rs[0, d, e] = R[d, e]
        for d in range(6):
            lams[0, d] = lam[d]
            us[0, d] = ginv[d] * lam[d]
    for n in range(steps):
        for stage in range(4):
            if stage == 0:
                for d in range(6):
                    th_s[d] = 0.0
                    lam_s[d] = lam[d]
            elif stage < 3:
                for d in range(6):
                    th_s[d] = 0.5 * dt * k_t[stage - 1, d]
                    lam_s[d] = lam[d] + 0.5 * dt * k_l[stage - 1, d]
            else:
                for d in range(6):
                    th_s[d] = dt * k_t[2, d]
                    lam_s[d] = lam[d] + dt * k_l[2, d]
            for d in range(6):
                u[d] = ginv[d] * lam_s[d]
                k_l[stage, d] = 0.0
                a1[d] = 0.0
                a2[d] = 0.0
            for p in range(nnz):
                k_l[stage, js[p]] += vals[p] * u[is_[p]] * lam_s[ks[p]]
            for p in range(nnz):
                a1[ks[p]] += vals[p] * th_s[is_[p]] * u[js[p]]
            for p in range(nnz):
                a2[ks[p]] += vals[p] * th_s[is_[p]] * a1[js[p]]
            # theta' = dexpinv_{-theta}(u) = u + (1/2) ad_theta u
            #        + (1/12) ad_theta^2 u + ...; the quadratic truncation
            # preserves the 4th-order accuracy of the step.
            for d in range(6):
                k_t[stage, d] = u[d] + 0.5 * a1[d] + a2[d] / 12.0
        for d in range(6):
            theta[d] = (dt / 6.0) * (k_t[0, d] + 2.0 * k_t[1, d] + 2.0 * k_t[2, d] + k_t[3, d])
            lam[d] = lam[d] + (dt / 6.0) * (k_l[0, d] + 2.0 * k_l[1, d] + 2.0 * k_l[2, d] + k_l[3, d])
        # Group-exponential reconstruction g <- g exp(theta), written out to
        # avoid temporaries.
        q2 = theta[3] ** 2 + theta[4] ** 2 + theta[5] ** 2
        q = np.sqrt(q2)
        if q < SMALL_ANGLE:
            ca = 1.0 - q2 / 6.0 + q2 * q2 / 120.0
            cb = 0.5 - q2 / 24.0 + q2 * q2 / 720.0
            cd = 1.0 / 6.0 - q2 / 120.0 + q2 * q2 / 5040.0
        else:
            ca = np.sin(q) / q
            cb = (1.0 - np.cos(q)) / q2
            cd = (q - np.sin(q)) / (q2 * q)
        W[0, 0] = 0.0
        W[0, 1] = -theta[5]
        W[0, 2] = theta[4]
        W[1, 0] = theta[5]
        W[1, 1] = 0.0
        W[1, 2] = -theta[3]
        W[2, 0] = -theta[4]
        W[2, 1] = theta[3]
        W[2, 2] = 0.0
        for r in range(3):
            for cc in range(3):
                w2 = 0.0
                for t in range(3):
                    w2 += W[r, t] * W[t, cc]
                dR[r, cc] = ca * W[r, cc] + cb * w2
            dR[r, r] += 1.0
        for r in range(3):
            # dx = (I + cb W + cd W^2) v, with v = theta[:3]
            vx = 0.0
            for t in range(3):
                w2 = 0.0
                for s in range(3):
                    w2 += W[r, s] * W[s, t]
                vx += (cb * W[r, t] + cd * w2) * theta[t]
            u[r] = theta[r] + vx  # reuse u as dx scratch
        for r in range(3):
            acc = 0.0
            for t in range(3):
                acc += R[r, t] * u[t]
            lam_s[r] = x[r] + acc  # reuse lam_s as new-x scratch
        for r in range(3):
            for cc in range(3):
                acc = 0.0
                for t in range(3):
                    acc += R[r, t] * dR[t, cc]
                Rn[r, cc] = acc
        for r in range(3):
            x[r] = lam_s[r]
            for cc in range(3):
                R[r, cc] = Rn[r, cc]
        if store != 0:
            for d in range(3):
                xs[n + 1, d] = x[d]
                for e in range(3):
                    Rs[n + 1, d, e] = R[d, e]
            for d in range(6):
                lams[n + 1, d] = lam[d]
                us[n + 1, d] = ginv[d] * lam[d]
    return x, R, lam


@njit(cache=True)
def integrate_full(ks, is_, js, vals, ginv, x0, R0, lam0, T, steps):
    """RK4 trajectory with per-step group-exponential reconstruction.

    Returns (xs, Rs, lams, us) sampled at steps+1 grid points.
    """
    xs = np.empty((steps + 1, 3))
    Rs = np.empty((steps + 1, 3, 3))
    lams = np.empty((steps + 1, 6))
    us = np.empty((steps + 1, 6))
    _rk4_sweep(ks, is_, js, vals, ginv, x0, R0, lam0, T, steps, 1, xs, Rs, lams, us)
    return xs, Rs, lams, us


@njit(cache=True)
def integrate_endpoint(ks, is_, js, vals, ginv, x0, R0, lam0, T, steps):
    """Endpoint-only RK4 (no trajectory storage); returns (x, R, lam)."""
    dummy3 = np.empty((1, 3))
    dummy33 = np.empty((1, 3, 3))
    dummy6 = np.empty((1, 6))
    return _rk4_sweep(ks, is_, js, vals, ginv, x0, R0, lam0, T, steps, 0,
                      dummy3, dummy33, dummy6, dummy6)


@njit(cache=True)
def shoot_residual(ks, is_, js, vals, ginv, lam0, T, steps, xt, Rt):
    """Euclidean norm of log(gamma(T)^{-1} target) for the shooting objective."""
    x1, R1, _ = integrate_endpoint(ks, is_, js, vals, ginv, np.zeros(3), np.eye(3), lam0, T, steps)
    xd = R1.T @ (xt - x1)
    Rd = R1.T @ Rt
    c, ok = se3_log(xd, Rd)
    if not ok:
        # Plateau penalty: endpoint mismatch sits at the rotational cut locus.
        return CUT_PENALTY + np.sqrt(xd[0] ** 2 + xd[1] ** 2 + xd[2] ** 2)
    return np.sqrt(np.sum(c * c))


@njit(cache=True)
def _segment_energy(gw, ax, aR, bx, bR):
    dx = aR.T @ (bx - ax)
    dR = aR.T @ bR
    c, ok = se3_log(dx, dR)
    if not ok:
        return 1e6
    return np.sum(gw * c * c)


@njit(cache=True)
def path_energy(gw, xi, xt, Rt, nseg):
    """Discrete energy sum_i ||c_i||_G^2 of a piecewise-exponential path.

    The path runs from the identity to (xt, Rt) through nseg-1 interior
    points given as stacked log coordinates in ``xi``; c_i are the increment
    logs.  Returns a large penalty if any increment hits the cut locus.
    """
    px = np.zeros(3)
    pR = np.eye(3)
    total = 0.0
    for seg in range(nseg):
        if seg < nseg - 1:
            gx, gR = se3_exp(xi[6 * seg:6 * seg + 6])
        else:
            gx, gR = xt, Rt
        dx = pR.T @ (gx - px)
        dR = pR.T @ gR
        c, ok = se3_log(dx, dR)
        if not ok:
            return 1e6
        total += np.sum(gw * c * c)
        px = gx
        pR = gR
    return total


@njit(cache=True)
def path_energy_grad(gw, xi, xt, Rt, nseg, h):
    """Central-difference gradient of path_energy.

    Each interior point touches only its two adjacent segments, so a
    perturbation re-evaluates those two alone.
    """
    npts = nseg - 1
    xs = np.empty((nseg + 1, 3))
    Rs = np.empty((nseg + 1, 3, 3))
    xs[0] = np.zeros(3)
    Rs[0] = np.eye(3)
    for i in range(npts):
        xs[i + 1], Rs[i + 1] = se3_exp(xi[6 * i:6 * i + 6])
    xs[nseg] = xt
    Rs[nseg] = Rt
    grad = np.zeros(6 * npts)
    work = xi.copy()
    for i in range(npts):
        for d in range(6):
            col = 6 * i + d
            old = work[col]
            work[col] = old + h
            px, pR = se3_exp(work[6 * i:6 * i + 6])
            ep = _segment_energy(gw, xs[i], Rs[i], px, pR) \
                + _segment_energy(gw, px, pR, xs[i + 2], Rs[i + 2])
            work[col] = old - h
            px, pR = se3_exp(work[6 * i:6 * i + 6])
            em = _segment_energy(gw, xs[i], Rs[i], px, pR) \
                + _segment_energy(gw, px, pR, xs[i + 2], Rs[i + 2])
            work[col] = old
            grad[col] = (ep - em) / (2.0 * h)
    return grad


@njit(cache=True)
def path_length(gw, xi, xt, Rt, nseg):
    """Sum of increment norms ||c_i||_G of the same discrete path."""
    px = np.zeros(3)
    pR = np.eye(3)
    total = 0.0
    for seg in range(nseg):
        if seg < nseg - 1:
            gx, gR = se3_exp(xi[6 * seg:6 * seg + 6])
        else:
            gx, gR = xt, Rt
        dx = pR.T @ (gx - px)
        dR = pR.T @ gR
        c, ok = se3_log(dx, dR)
        if not ok:
            return 1e6
        total += np.sqrt(np.sum(gw * c * c))
        px = gx
        pR = gR
    return total


def warmup(ks, is_, js, vals):
    """Force compilation of every kernel once (cached across processes)."""
    c = np.full(6, 0.01)
    x, R = se3_exp(c)
    se3_log(x, R)
    so3_log(so3_exp(c[3:]))
    rotation_angle(R)
    f_coefficient(0.3)
    ad_apply(ks, is_, js, vals, c, c)
    coad_apply(ks, is_, js, vals, c, c)
    ginv = np.ones(6)
    integrate_full(ks, is_, js, vals, ginv, np.zeros(3), np.eye(3), c, 1.0, 2)
    integrate_endpoint(ks, is_, js, vals, ginv, np.zeros(3), np.eye(3), c, 1.0, 2)
    shoot_residual(ks, is_, js, vals, ginv, c, 1.0, 2, x, R)
    xi = np.tile(c, 3)
    path_energy(np.ones(6), xi, x, R, 4)
    path_energy_grad(np.ones(6), xi, x, R, 4, 1e-6)
    path_length(np.ones(6), xi, x, R, 4)
