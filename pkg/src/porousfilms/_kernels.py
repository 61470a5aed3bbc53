"""Compiled inner loops.

Everything that runs once per time step lives here so a whole sampling
interval can be advanced without returning to the interpreter.  The public
modules wrap these functions with validation and numpy-friendly signatures.
"""

import numpy as np
from numba import njit

MODE_DEGENERATE = 0
MODE_REGULARIZED = 1
MODE_PME_G = 2

STATUS_OK = 0
STATUS_NEGATIVE = 1
STATUS_CLAMP_BUDGET = 2


@njit(cache=True)
def helmholtz_factor(a, n):
    """Elimination coefficients of the Neumann matrix ``I + a*T`` (``T`` the
    graph Laplacian of a path), in the form :func:`thomas_solve` expects.

    The pivots ``p_i = 1 + 2a - a^2/p_{i-1}`` cancel badly for ``a >> 1``.
    Their excess ``s_i = p_i - a`` obeys ``s_i = 1 + a s_{i-1}/p_{i-1}``, a sum
    of positive terms, so every pivot keeps full relative accuracy and the
    whole solve adds only positive quantities for nonnegative data.
    """
    cp = np.empty(n)
    inv = np.empty(n)
    s = 1.0
    for i in range(n):
        if i > 0:
            s = 1.0 + a * s * inv[i - 1]
        p = s if i == n - 1 else s + a
        inv[i] = 1.0 / p
        cp[i] = -a * inv[i] if i < n - 1 else 0.0
    return cp, inv


@njit(cache=True)
def thomas_solve(lower, cp, inv, rhs, out):
    n = rhs.shape[0]
    out[0] = rhs[0] * inv[0]
    for i in range(1, n):
        out[i] = (rhs[i] - lower[i] * out[i - 1]) * inv[i]
    for i in range(n - 2, -1, -1):
        out[i] -= cp[i] * out[i + 1]


@njit(cache=True)
def flux_divergence(u, v, shift, c_self, c_cross, dx, out):
    """Conservative divergence of ``c_self*u*u_x + c_cross*(u-shift)*v_x``.

    Face mobilities are clipped arithmetic means; the two end faces carry no
    flux.  ``out[i] = (flux[i+1/2] - flux[i-1/2]) / dx``.
    """
    n = u.shape[0]
    inv_dx = 1.0 / dx
    left = 0.0
    for i in range(n - 1):
        m_self = 0.5 * (u[i] + u[i + 1])
        if m_self < 0.0:
            m_self = 0.0
        m_cross = 0.5 * ((u[i] - shift) + (u[i + 1] - shift))
        if m_cross < 0.0:
            m_cross = 0.0
        right = (c_self * m_self * (u[i + 1] - u[i]) + c_cross * m_cross * (v[i + 1] - v[i])) * inv_dx
        out[i] = (right - left) * inv_dx
        left = right
    out[n - 1] = (0.0 - left) * inv_dx


@njit(cache=True)
def max_face_mobility(u):
    m = 0.0
    for i in range(u.shape[0] - 1):
        m = max(m, u[i] + u[i + 1])
    return 0.5 * m


@njit(cache=True)
def stable_dt(f, g, R, R_mu, dx, cfl, dt_max):
    return dt_from_mobility(max_face_mobility(f), max_face_mobility(g), R, R_mu, dx, cfl, dt_max)


@njit(cache=True)
def dt_from_mobility(m_f, m_g, R, R_mu, dx, cfl, dt_max):
    """``cfl * dx^2 / (2 mu_max)`` capped at ``dt_max``."""
    mu = (1.0 + R) * m_f + R * m_f
    mu_g = R_mu * (m_g + m_g)
    if mu_g > mu:
        mu = mu_g
    if mu <= 0.0:
        return dt_max
    dt = cfl * dx * dx / (2.0 * mu)
    return dt if dt < dt_max else dt_max


@njit(cache=True)
def rhs(f, g, R, R_mu, eps, dx, mode, lower, cp, inv, F, G, df, dg):
    """Right-hand side for all three modes.

    Degenerate and pme_g modes share one path; the regularised mode smooths
    the cross-diffusion driver with the Helmholtz factorisation first.
    """
    if mode == MODE_REGULARIZED:
        thomas_solve(lower, cp, inv, f, F)
        thomas_solve(lower, cp, inv, g, G)
        flux_divergence(f, G, eps, 1.0 + R, R, dx, df)
        flux_divergence(g, F, eps, R_mu, R_mu, dx, dg)
    else:
        flux_divergence(f, g, 0.0, 1.0 + R, R, dx, df)
        flux_divergence(g, f, 0.0, R_mu, R_mu, dx, dg)


@njit(cache=True)
def face_dissipation(f, g, R, R_mu, dx):
    """Return ``(d1, d2, |f_x|^2 + |g_x|^2)`` by face quadrature."""
    d1 = 0.0
    d2 = 0.0
    rho = 0.0
    w = R / (1.0 + 2.0 * R)
    inv_dx = 1.0 / dx
    for i in range(f.shape[0] - 1):
        fx = (f[i + 1] - f[i]) * inv_dx
        gx = (g[i + 1] - g[i]) * inv_dx
        mf = 0.5 * (f[i] + f[i + 1])
        if mf < 0.0:
            mf = 0.0
        mg = 0.5 * (g[i] + g[i + 1])
        if mg < 0.0:
            mg = 0.0
        d1 += 0.5 * fx * fx + w * gx * gx
        a = (1.0 + R) * fx + R * gx
        b = fx + gx
        d2 += mf * a * a + R * R_mu * mg * b * b
        rho += fx * fx + gx * gx
    return d1 * dx, d2 * dx, rho * dx


@njit(cache=True)
def clamp_negative(u, clamp_tol, dx):
    """Zero tiny negative undershoots in place.

    Returns ``(added_mass, worst)``; ``worst < 0`` flags an entry below the
    clamp window, in which case ``u`` is left untouched.
    """
    scale = 1.0
    for i in range(u.shape[0]):
        if u[i] > scale:
            scale = u[i]
    thresh = -clamp_tol * scale
    worst = 0.0
    for i in range(u.shape[0]):
        if u[i] < thresh and u[i] < worst:
            worst = u[i]
    if worst < 0.0:
        return 0.0, worst
    added = 0.0
    for i in range(u.shape[0]):
        if u[i] < 0.0:
            added -= u[i]
            u[i] = 0.0
    return added * dx, 0.0


@njit(cache=True)
def fused_step(f, g, vf, vg, shift, c_ff, c_fx, c_gg, c_gx, R, R_mu, dt, dx, freeze_f, f_new, g_new):
    """Forward-Euler update ``(f, g) -> (f_new, g_new)`` in a single face sweep.

    The flux of ``f`` is ``c_ff*m(f)*f_x + c_fx*m(f-shift)*vf_x`` and likewise
    for ``g`` with ``vg``.  Along the way it accumulates the dissipation
    integrands of the old state and the max face mobilities of the new one.
    Returns ``(d1, d2, rho, min_f, min_g, mob_f, mob_g)``.
    """
    n = f.shape[0]
    inv_dx = 1.0 / dx
    w = R / (1.0 + 2.0 * R)
    d1 = 0.0
    d2 = 0.0
    rho = 0.0
    left_f = 0.0
    left_g = 0.0
    min_f = 0.0
    min_g = 0.0
    mob_f = 0.0
    mob_g = 0.0
    for i in range(n):
        if i < n - 1:
            df_ = f[i + 1] - f[i]
            dg_ = g[i + 1] - g[i]
            mf = max(0.0, 0.5 * (f[i] + f[i + 1]))
            mg = max(0.0, 0.5 * (g[i] + g[i + 1]))
            mfc = max(0.0, 0.5 * ((f[i] - shift) + (f[i + 1] - shift)))
            mgc = max(0.0, 0.5 * ((g[i] - shift) + (g[i + 1] - shift)))
            right_f = (c_ff * mf * df_ + c_fx * mfc * (vf[i + 1] - vf[i])) * inv_dx
            right_g = (c_gg * mg * dg_ + c_gx * mgc * (vg[i + 1] - vg[i])) * inv_dx
            fx = df_ * inv_dx
            gx = dg_ * inv_dx
            d1 += 0.5 * fx * fx + w * gx * gx
            rho += fx * fx + gx * gx
            a = (1.0 + R) * fx + R * gx
            b = fx + gx
            d2 += mf * a * a + R * R_mu * mg * b * b
        else:
            right_f = 0.0
            right_g = 0.0
        if freeze_f:
            f_new[i] = f[i]
        else:
            f_new[i] = f[i] + dt * ((right_f - left_f) * inv_dx)
        g_new[i] = g[i] + dt * ((right_g - left_g) * inv_dx)
        min_f = min(min_f, f_new[i])
        min_g = min(min_g, g_new[i])
        if i > 0:
            mob_f = max(mob_f, f_new[i - 1] + f_new[i])
            mob_g = max(mob_g, g_new[i - 1] + g_new[i])
        left_f = right_f
        left_g = right_g
    return d1 * dx, d2 * dx, rho * dx, min_f, min_g, 0.5 * mob_f, 0.5 * mob_g


@njit(cache=True)
def _clamp_both(f, g, min_f, min_g, clamp_tol, clamp_abort_fraction, dx):
    clamp = 0.0
    for k in range(2):
        if (min_f if k == 0 else min_g) >= 0.0:
            continue
        u = f if k == 0 else g
        mass = 0.0
        for i in range(u.shape[0]):
            mass += u[i]
        mass *= dx
        added, worst = clamp_negative(u, clamp_tol, dx)
        if worst < 0.0:
            return STATUS_NEGATIVE, clamp, worst
        if added > clamp_abort_fraction * mass:
            return STATUS_CLAMP_BUDGET, clamp + added, 0.0
        clamp += added
    return STATUS_OK, clamp, 0.0


@njit(cache=True)
def explicit_step(f, g, dt, R, R_mu, eps, dx, mode, lower, cp, inv,
                  clamp_tol, clamp_abort_fraction, F, G, f_new, g_new):
    """One forward-Euler step from ``(f, g)`` into ``(f_new, g_new)``.

    Degenerate and pme_g modes take the identical path (pme_g only freezes
    ``f``); the regularised mode drives the cross terms with the smoothed
    fields and shifts the cross mobilities by ``eps``.  Returns ``(status,
    clamp_mass, worst, d1, d2, rho, mob_f, mob_g)`` where the dissipation
    terms belong to the old state and the mobilities to the new one.
    """
    if mode == MODE_REGULARIZED:
        thomas_solve(lower, cp, inv, f, F)
        thomas_solve(lower, cp, inv, g, G)
        d1, d2, rho, min_f, min_g, mob_f, mob_g = fused_step(
            f, g, G, F, eps, 1.0 + R, R, R_mu, R_mu, R, R_mu, dt, dx, False, f_new, g_new)
    else:
        d1, d2, rho, min_f, min_g, mob_f, mob_g = fused_step(
            f, g, g, f, 0.0, 1.0 + R, R, R_mu, R_mu, R, R_mu, dt, dx, mode == MODE_PME_G, f_new, g_new)
    status, clamp, worst = _clamp_both(f_new, g_new, min_f, min_g, clamp_tol, clamp_abort_fraction, dx)
    if status == STATUS_OK and clamp > 0.0:
        mob_f = max_face_mobility(f_new)
        mob_g = max_face_mobility(g_new)
    return status, clamp, worst, d1, d2, rho, mob_f, mob_g


@njit(cache=True)
def advance(f, g, t, t_target, R, R_mu, eps, dx, mode, lower, cp, inv,
            cfl, dt_max, clamp_tol, clamp_abort_fraction, acc):
    """Step ``(f, g)`` in place from ``t`` to exactly ``t_target``.

    ``acc`` holds running totals ``[clamp_mass, d1_int, d2_int, rho_int,
    steps]`` and is updated in place; the integrals use the left-endpoint
    rule on every step.  Returns ``(status, t, worst)``; on failure ``t`` is
    the time at which the failing step started and ``(f, g)`` is the last
    accepted state.
    """
    n = f.shape[0]
    F = np.empty(n)
    G = np.empty(n)
    cur_f = f.copy()
    cur_g = g.copy()
    nxt_f = np.empty(n)
    nxt_g = np.empty(n)
    mob_f = max_face_mobility(f)
    mob_g = max_face_mobility(g)
    status = STATUS_OK
    worst = 0.0
    while t < t_target:
        dt = dt_from_mobility(mob_f, mob_g, R, R_mu, dx, cfl, dt_max)
        last = False
        if t + dt >= t_target:
            dt = t_target - t
            last = True
        status, clamp, worst, d1, d2, rho, mob_f, mob_g = explicit_step(
            cur_f, cur_g, dt, R, R_mu, eps, dx, mode, lower, cp, inv,
            clamp_tol, clamp_abort_fraction, F, G, nxt_f, nxt_g)
        if status != STATUS_OK:
            break
        cur_f, nxt_f = nxt_f, cur_f
        cur_g, nxt_g = nxt_g, cur_g
        acc[0] += clamp
        acc[1] += dt * d1
        acc[2] += dt * d2
        acc[3] += dt * rho
        acc[4] += 1.0
        t = t_target if last else t + dt
    f[:] = cur_f
    g[:] = cur_g
    return status, t, worst
