"""Explicit finite-difference sweeps, jitted.

Arrays are (nx, ny) with y = 0 at column index 0. Boundaries: mirror ghosts
at x = +-lx and y = ly; at y = 0 either a mirror (no road) or the exchange
ghost ``v[i,-1] = v[i,1] + (2h/d)(mu u_i - nu v[i,0])``. Loop order is fixed so
results are bit-reproducible.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _neg_expm1(z):
    """1 - e^{-z} for z >= 0; Taylor form below 1/8 keeps full relative precision."""
    if z < 0.125:
        w = -z
        return -w * (1.0 + w * (0.5 + w * (1.0 / 6 + w * (1.0 / 24 + w * (1.0 / 120 + w * (
            1.0 / 720 + w * (1.0 / 5040 + w * (1.0 / 40320 + w * (1.0 / 362880 + w * (
                1.0 / 3628800 + w / 39916800))))))))))
    return 1.0 - math.exp(-z)


@njit(cache=True)
def _bulk_sweep_transformed(v, vn, u, i0, road, cx, dt, ghost_k, mu, nu, s0, beta, alpha):
    nx, ny = v.shape
    for i in range(nx):
        im = i - 1 if i > 0 else 1
        ip = i + 1 if i < nx - 1 else nx - 2
        # y = 0 row
        c = v[i, 0]
        if road:
            ghost = v[i, 1] + ghost_k * (mu * u[i] - nu * c)
        else:
            ghost = v[i, 1]
        lap = v[im, 0] + v[ip, 0] + v[i, 1] + ghost - 4.0 * c
        vn[i, 0] = c + cx * lap + dt * (s0 * _neg_expm1(beta * c) - alpha * c + i0[i, 0])
        for j in range(1, ny - 1):
            c = v[i, j]
            lap = v[im, j] + v[ip, j] + v[i, j - 1] + v[i, j + 1] - 4.0 * c
            vn[i, j] = c + cx * lap + dt * (s0 * _neg_expm1(beta * c) - alpha * c + i0[i, j])
        j = ny - 1
        c = v[i, j]
        lap = v[im, j] + v[ip, j] + 2.0 * v[i, j - 1] - 4.0 * c
        vn[i, j] = c + cx * lap + dt * (s0 * _neg_expm1(beta * c) - alpha * c + i0[i, j])


@njit(cache=True)
def _bulk_sweep_direct(S, I, Sn, In, T, road, cx, dt, ghost_k, mu, nu, beta, alpha):
    nx, ny = I.shape
    for i in range(nx):
        im = i - 1 if i > 0 else 1
        ip = i + 1 if i < nx - 1 else nx - 2
        for j in range(ny):
            c = I[i, j]
            if j == 0:
                if road:
                    ghost = I[i, 1] + ghost_k * (mu * T[i] - nu * c)
                else:
                    ghost = I[i, 1]
                lap_y = I[i, 1] + ghost - 2.0 * c
            elif j == ny - 1:
                lap_y = 2.0 * (I[i, j - 1] - c)
            else:
                lap_y = I[i, j - 1] + I[i, j + 1] - 2.0 * c
            lap = I[im, j] + I[ip, j] - 2.0 * c + lap_y
            infection = beta * S[i, j] * c
            In[i, j] = c + cx * lap + dt * (infection - alpha * c)
            Sn[i, j] = S[i, j] - dt * infection


@njit(cache=True)
def _road_sweep(u, un, wall, t0, cr, dt, mu, nu):
    nx = u.shape[0]
    for i in range(nx):
        im = i - 1 if i > 0 else 1
        ip = i + 1 if i < nx - 1 else nx - 2
        un[i] = u[i] + cr * (u[im] + u[ip] - 2.0 * u[i]) + dt * (nu * wall[i] - mu * u[i] + t0[i])


@njit(cache=True)
def _max_rate(a, b, dt):
    m = 0.0
    flat_a = a.ravel()
    flat_b = b.ravel()
    for k in range(flat_a.size):
        r = abs(flat_b[k] - flat_a[k])
        if r > m:
            m = r
    return m / dt


@njit(cache=True, nogil=True)
def advance_transformed(v, u, i0, t0, road, d, D, alpha, beta, mu, nu, s0, h, dt,
                        nsteps, trace_every, trace_offset, trace_road, trace_wall,
                        acc_road, acc_wall, trace_acc_road, trace_acc_wall):
    """Advance (v, u) in place by nsteps. Returns (max rate of last step, traces written).

    Trapezoid time integrals of u and v(., 0) accumulate into acc_road/acc_wall.
    A trace row is written after every step whose global index is a multiple
    of trace_every (trace_offset = steps already taken before this call).
    """
    nx = v.shape[0]
    vn = np.empty_like(v)
    un = np.empty_like(u)
    cx = d * dt / (h * h)
    cr = D * dt / (h * h)
    ghost_k = 2.0 * h / d
    rate = 0.0
    written = 0
    for n in range(nsteps):
        _bulk_sweep_transformed(v, vn, u, i0, road, cx, dt, ghost_k, mu, nu, s0, beta, alpha)
        if road:
            _road_sweep(u, un, v[:, 0], t0, cr, dt, mu, nu)
        if n == nsteps - 1:
            rate = _max_rate(v, vn, dt)
            if road:
                r2 = _max_rate(u, un, dt)
                if r2 > rate:
                    rate = r2
        for i in range(nx):
            acc_wall[i] += 0.5 * dt * (v[i, 0] + vn[i, 0])
            acc_road[i] += 0.5 * dt * (u[i] + un[i]) if road else 0.0
        v, vn = vn, v
        if road:
            u, un = un, u
        if trace_every > 0 and (trace_offset + n + 1) % trace_every == 0:
            for i in range(nx):
                trace_wall[written, i] = v[i, 0]
                trace_road[written, i] = u[i]
                trace_acc_wall[written, i] = acc_wall[i]
                trace_acc_road[written, i] = acc_road[i]
            written += 1
    if nsteps % 2 == 1:
        vn[:, :] = v
        if road:
            un[:] = u
    return rate, written


@njit(cache=True, nogil=True)
def advance_direct(S, I, T, road, d, D, alpha, beta, mu, nu, h, dt,
                   nsteps, trace_every, trace_offset, trace_road, trace_wall,
                   acc_road, acc_wall, trace_acc_road, trace_acc_wall):
    """Direct (S, I, T) counterpart of advance_transformed."""
    nx = I.shape[0]
    Sn = np.empty_like(S)
    In = np.empty_like(I)
    Tn = np.empty_like(T)
    cx = d * dt / (h * h)
    cr = D * dt / (h * h)
    ghost_k = 2.0 * h / d
    zero = np.zeros(nx)
    rate = 0.0
    written = 0
    for n in range(nsteps):
        _bulk_sweep_direct(S, I, Sn, In, T, road, cx, dt, ghost_k, mu, nu, beta, alpha)
        if road:
            _road_sweep(T, Tn, I[:, 0], zero, cr, dt, mu, nu)
        if n == nsteps - 1:
            rate = max(_max_rate(I, In, dt), _max_rate(S, Sn, dt))
            if road:
                rate = max(rate, _max_rate(T, Tn, dt))
        for i in range(nx):
            acc_wall[i] += 0.5 * dt * (I[i, 0] + In[i, 0])
            acc_road[i] += 0.5 * dt * (T[i] + Tn[i]) if road else 0.0
        S, Sn = Sn, S
        I, In = In, I
        if road:
            T, Tn = Tn, T
        if trace_every > 0 and (trace_offset + n + 1) % trace_every == 0:
            for i in range(nx):
                trace_wall[written, i] = I[i, 0]
                trace_road[written, i] = T[i]
                trace_acc_wall[written, i] = acc_wall[i]
                trace_acc_road[written, i] = acc_road[i]
            written += 1
    if nsteps % 2 == 1:
        Sn[:, :] = S
        In[:, :] = I
        if road:
            Tn[:] = T
    return rate, written
