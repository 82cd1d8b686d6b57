"""Scalar functionals tracked along runs: entropies, Fisher informations,
alignment norms, conservation checks, and exponential-decay fits.

Conventions.  The reference Maxwellian is discretely normalized to unit mass,
so relative entropies of normalized states are exactly >= 0 and vanish only
at the Maxwellian itself.  Every log/division integrand is summed only where
f > F_FLOOR (the 0 log 0 = 0 limit); mass excluded by that mask is reported
by fisher_full through a warning when it exceeds MASK_WARN.  Velocity
derivatives use fourth-order centered differences with zero extension
outside the box (f decays like a Gaussian there); x-derivatives are the
periodic fourth-order stencil.  fisher_full shifts f by the mean particle
velocity with linear interpolation along each v-axis before differencing,
so the three informations refer to h = f_shifted / mu in a common frame and
the discrete Cauchy-Schwarz bound I_xv^2 <= I_vv I_xx holds exactly.

The centered entropy is
    Ebar = sigma * int f log(f/mu_vbar) + (beta/2gamma) ||u - ubar||^2
         + (beta|O|/(2(gamma+beta|O|))) |ubar - vbar|^2
and E_total = H + (beta/2gamma) ||u||^2 satisfies E_total = Ebar + X2 with
X2 assembled from the same means, an exact discrete identity.  Fields that
carry a 1/gamma are NaN when gamma = 0.
"""

import warnings

import numpy as np

from .fields import (
    enstrophy,
    fluid_energy,
    l1_distance,
    maxwellian,
    mean_field,
    mollify,
    moments,
    weighted_norm_l2,
)

F_FLOOR = 1e-30
MASK_WARN = 1e-6
C_HYPO_DEFAULT = 100.0

# ---- finite-difference stencils --------------------------------------------


def _dv4(F, axis, h):
    """Fourth-order centered d/dv with zero extension beyond the box."""
    pad = [(0, 0)] * F.ndim
    pad[axis] = (2, 2)
    P = np.pad(F, pad)
    n = F.shape[axis]

    def seg(lo):
        sl = [slice(None)] * F.ndim
        sl[axis] = slice(lo, lo + n)
        return P[tuple(sl)]

    return (-seg(4) + 8.0 * seg(3) - 8.0 * seg(1) + seg(0)) / (12.0 * h)


def _dx4(F, axis, h):
    """Fourth-order centered d/dx on the periodic torus."""
    r = lambda k: np.roll(F, -k, axis=axis)
    return (-r(2) + 8.0 * r(1) - 8.0 * r(-1) + r(-2)) / (12.0 * h)


def _masked_ratio(num, f):
    keep = f > F_FLOOR
    return np.where(keep, num / np.where(keep, f, 1.0), 0.0)


# ---- entropies --------------------------------------------------------------


def relative_entropy(f, grids, sigma, center=(0.0, 0.0)):
    """sigma * int f log(f/mu_center), summed where f > F_FLOOR."""
    mu = maxwellian(grids, sigma, center)
    keep = f > F_FLOOR
    t = np.zeros_like(f)
    t[keep] = f[keep] * np.log(f[keep] / mu[keep])
    return float(sigma * t.sum() * grids.w)


def mean_velocities(f, u, grids):
    """(vbar, ubar): mass-weighted particle mean and fluid spatial mean."""
    mac = moments(f, grids)
    total = mac.rho.sum() * grids.x.cell_area
    vbar = mac.m.sum(axis=(-2, -1)) * grids.x.cell_area / total
    return vbar, mean_field(u, grids.x)


def centered_entropy(f, u, params, grids):
    """Entropy-energy centered on the instantaneous mean velocities."""
    if params.gamma == 0.0:
        return float("nan")
    vbar, ubar = mean_velocities(f, u, grids)
    area = grids.x.area
    t1 = relative_entropy(f, grids, params.sigma, center=tuple(vbar))
    t2 = (params.beta / (2.0 * params.gamma)) * weighted_norm_l2(
        u - ubar[:, None, None], grids.x
    ) ** 2
    coef = params.beta * area / (2.0 * (params.gamma + params.beta * area))
    t3 = coef * float(((ubar - vbar) ** 2).sum())
    return float(t1 + t2 + t3)


def total_entropy(f, u, params, grids):
    """E = H + (beta/2gamma) ||u||^2; NaN when gamma = 0."""
    if params.gamma == 0.0:
        return float("nan")
    H = relative_entropy(f, grids, params.sigma)
    return float(H + (params.beta / params.gamma) * fluid_energy(u, grids.x))


def conserved_momenta(f, u, params, grids):
    """(X1, X2): the two conserved combinations of the phase momenta."""
    mac = moments(f, grids)
    total = mac.rho.sum() * grids.x.cell_area
    P = mac.m.sum(axis=(-2, -1)) * grids.x.cell_area
    vbar = P / total
    ubar = mean_field(u, grids.x)
    area = grids.x.area
    X1 = params.gamma * P + params.beta * area * ubar
    if params.gamma == 0.0:
        X2 = float("nan")
    else:
        coef = params.beta * area / (2.0 * (params.gamma + params.beta * area))
        X2 = (
            0.5 * float((vbar**2).sum()) * total
            + (params.beta * area / (2.0 * params.gamma)) * float((ubar**2).sum())
            - coef * float(((ubar - vbar) ** 2).sum())
        )
    return X1, X2


def limit_velocity(f, u, params, grids):
    """wbar = (gamma P0 + beta |O| ubar0)/(gamma mass + beta |O|)."""
    mac = moments(f, grids)
    total = mac.rho.sum() * grids.x.cell_area
    P = mac.m.sum(axis=(-2, -1)) * grids.x.cell_area
    ubar = mean_field(u, grids.x)
    area = grids.x.area
    return (params.gamma * P + params.beta * area * ubar) / (
        params.gamma * total + params.beta * area
    )


# ---- Fisher informations -----------------------------------------------------


def _center_fields(center, xgrid):
    c = np.asarray(center, dtype=float)
    if c.ndim == 1:
        c = np.broadcast_to(c[:, None, None], (2, xgrid.Nx, xgrid.Nx))
    return c


def fisher_partial(f, grids, sigma, center=(0.0, 0.0), weight=None):
    """int weight(x) |sigma grad_v f + (v-center) f|^2 / f over f > F_FLOOR.

    center is a constant pair or a velocity field of shape (2, Nx, Nx);
    weight is a scalar field on x or None.
    """
    c = _center_fields(center, grids.x)
    v = grids.v.v
    hv = grids.v.hv
    g1 = sigma * _dv4(f, 2, hv) + (v[None, None, :, None] - c[0][:, :, None, None]) * f
    g2 = sigma * _dv4(f, 3, hv) + (v[None, None, None, :] - c[1][:, :, None, None]) * f
    out = _masked_ratio(g1 * g1 + g2 * g2, f)
    if weight is not None:
        out *= np.asarray(weight)[:, :, None, None]
    return float(out.sum() * grids.w)


def _shift_v(f, shift, axis, hv):
    """Linear interpolation of f at v + shift along one v-axis, zero outside."""
    s = shift / hv
    i0 = int(np.floor(s))
    frac = s - i0
    n = f.shape[axis]

    def take(off):
        idx = np.arange(n) + off
        g = np.zeros_like(f)
        ok = (idx >= 0) & (idx < n)
        if not ok.any():
            return g
        src = [slice(None)] * f.ndim
        dst = [slice(None)] * f.ndim
        src[axis] = idx[ok]
        dst[axis] = np.arange(n)[ok]
        g[tuple(dst)] = f[tuple(src)]
        return g

    return (1.0 - frac) * take(i0) + frac * take(i0 + 1)


def fisher_full(f, grids, sigma, vbar=None):
    """(I_vv, I_xv, I_xx) of h = f_shifted/mu in the vbar-shifted frame."""
    if vbar is None:
        mac = moments(f, grids)
        total = mac.rho.sum() * grids.x.cell_area
        vbar = mac.m.sum(axis=(-2, -1)) * grids.x.cell_area / total
    ft = _shift_v(f, float(vbar[0]), 2, grids.v.hv)
    ft = _shift_v(ft, float(vbar[1]), 3, grids.v.hv)

    lost = abs(float((f - ft).sum()) * grids.w)
    keep = ft > F_FLOOR
    masked = float(ft[~keep].sum() * grids.w)
    if lost + abs(masked) > MASK_WARN:
        warnings.warn(
            f"fisher_full: shift/floor mask excludes {lost + abs(masked):.3e} of mass",
            RuntimeWarning,
            stacklevel=2,
        )

    v = grids.v.v
    hv = grids.v.hv
    hx = grids.x.hx
    a1 = sigma * _dv4(ft, 2, hv) + v[None, None, :, None] * ft
    a2 = sigma * _dv4(ft, 3, hv) + v[None, None, None, :] * ft
    b1 = _dx4(ft, 0, hx)
    b2 = _dx4(ft, 1, hx)
    w = grids.w
    I_vv = float(_masked_ratio(a1 * a1 + a2 * a2, ft).sum() * w) / sigma**2
    I_xx = float(_masked_ratio(b1 * b1 + b2 * b2, ft).sum() * w)
    I_xv = float(_masked_ratio(b1 * a1 + b2 * a2, ft).sum() * w) / sigma
    return I_vv, I_xv, I_xx


def hypo_functional(f, u, params, grids, C_hypo=C_HYPO_DEFAULT):
    """Y = I_vv + I_xv + I_xx + C_hypo * Ebar."""
    I_vv, I_xv, I_xx = fisher_full(f, grids, params.sigma)
    return float(I_vv + I_xv + I_xx + C_hypo * centered_entropy(f, u, params, grids))


# ---- entropy law -------------------------------------------------------------


def entropy_rhs(f, u, model, params, grids, macro=None, I_macro=None, I_ueps=None):
    """Right side of the centered entropy law at one state.

    -alpha I_vv^{v_macro, s_rho} - beta I_vv^{u_eps}
    -alpha (||v_macro - vbar||_kappa^2 - (v_macro - vbar, [v_macro - vbar])_kappa)
    -(beta nu / gamma) ||grad u||^2,   kappa = rho s_rho dx.

    The two partial Fisher terms can be passed in when already computed.
    """
    if macro is None:
        macro = moments(f, grids)
    vbar, _ = mean_velocities(f, u, grids)
    s = model.strength(macro.rho)
    kappa = macro.rho * s * grids.x.cell_area

    if I_macro is None:
        I_macro = fisher_partial(f, grids, params.sigma, center=macro.v_macro, weight=s)
    if I_ueps is None:
        u_eps = mollify(u, grids.x, params.eps)
        I_ueps = fisher_partial(f, grids, params.sigma, center=u_eps)

    diff = macro.v_macro - vbar[:, None, None]
    avg = model.average_flux(macro.m - vbar[:, None, None] * macro.rho, macro.rho)
    norm_sq = float((kappa * (diff**2).sum(axis=0)).sum())
    # average_flux returns the product s_rho [.]_rho, so the kappa pairing
    # (diff, [.])_kappa carries weight rho dx only; the s_rho is already inside.
    w_rho = macro.rho * grids.x.cell_area
    inner = float((w_rho * (diff * avg).sum(axis=0)).sum())

    visc = (
        (params.beta * params.nu / params.gamma) * enstrophy(u, grids.x)
        if params.gamma > 0.0
        else float("nan")
    )
    return float(
        -params.alpha * I_macro - params.beta * I_ueps - params.alpha * (norm_sq - inner) - visc
    )


def entropy_law_residual(t, ebar, rhs):
    """max over interior records of d(Ebar)/dt - rhs, central differences."""
    t = np.asarray(t, dtype=float)
    ebar = np.asarray(ebar, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if len(t) < 3:
        raise ValueError("entropy_law_residual needs at least 3 records")
    dEdt = (ebar[2:] - ebar[:-2]) / (t[2:] - t[:-2])
    return float(np.max(dEdt - rhs[1:-1]))


# ---- fits and measures -------------------------------------------------------


def decay_fit(t, y, window=None):
    """Least-squares exponential rate on log y; returns (rate, r_squared)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, y = t[keep], y[keep]
    if len(t) < 2:
        raise ValueError("decay_fit needs at least 2 samples in the window")
    if np.any(y <= 0.0):
        raise ValueError("decay_fit: nonpositive samples in the window")
    ly = np.log(y)
    slope, intercept = np.polyfit(t, ly, 1)
    resid = ly - (slope * t + intercept)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid**2).sum()) / ss_tot
    return float(-slope), float(r2)


def concentration_measure(rho, xgrid, c1):
    """Area of the super-level set {rho >= c1}."""
    return float((rho >= c1).sum() * xgrid.cell_area)


# ---- per-record bundle -------------------------------------------------------

RECORD_COLUMNS = (
    "t",
    "mass",
    "vbar_1",
    "vbar_2",
    "ubar_1",
    "ubar_2",
    "X1_1",
    "X1_2",
    "X2",
    "H",
    "Ebar",
    "E_total",
    "enstrophy",
    "I_vv_macro",
    "I_vv_ueps",
    "I_vv",
    "I_xv",
    "I_xx",
    "Y",
    "l1_f_mu",
    "l2rho_v_wbar",
    "l2_u_wbar",
    "thickness",
    "conc_area",
    "entropy_rhs",
    "entropy_residual",
    "min_f",
)


def compute_record(f, u, model, params, grids, t, wbar, conc_c1=0.1, C_hypo=C_HYPO_DEFAULT):
    """All tracked functionals at one state, keyed by RECORD_COLUMNS.

    entropy_residual needs neighbouring records and is filled in afterwards
    (NaN here).  wbar is the predicted common limit velocity of the run.
    """
    mac = moments(f, grids)
    total = float(mac.rho.sum() * grids.x.cell_area)
    vbar, ubar = mean_velocities(f, u, grids)
    X1, X2 = conserved_momenta(f, u, params, grids)
    sigma = params.sigma

    H = relative_entropy(f, grids, sigma)
    Ebar = centered_entropy(f, u, params, grids)
    if params.gamma > 0.0:
        E_total = H + (params.beta / params.gamma) * fluid_energy(u, grids.x)
    else:
        E_total = float("nan")

    s = model.strength(mac.rho)
    I_macro = fisher_partial(f, grids, sigma, center=mac.v_macro, weight=s)
    u_eps = mollify(u, grids.x, params.eps)
    I_ueps = fisher_partial(f, grids, sigma, center=u_eps)
    I_vv, I_xv, I_xx = fisher_full(f, grids, sigma, vbar=vbar)
    Y = I_vv + I_xv + I_xx + (C_hypo * Ebar if np.isfinite(Ebar) else float("nan"))

    mu_w = maxwellian(grids, sigma, center=tuple(wbar))
    wfield = np.broadcast_to(np.asarray(wbar)[:, None, None], u.shape)
    rhs = entropy_rhs(f, u, model, params, grids, macro=mac, I_macro=I_macro, I_ueps=I_ueps)

    return {
        "t": float(t),
        "mass": total,
        "vbar_1": float(vbar[0]),
        "vbar_2": float(vbar[1]),
        "ubar_1": float(ubar[0]),
        "ubar_2": float(ubar[1]),
        "X1_1": float(X1[0]),
        "X1_2": float(X1[1]),
        "X2": float(X2),
        "H": H,
        "Ebar": Ebar,
        "E_total": float(E_total),
        "enstrophy": enstrophy(u, grids.x),
        "I_vv_macro": I_macro,
        "I_vv_ueps": I_ueps,
        "I_vv": I_vv,
        "I_xv": I_xv,
        "I_xx": I_xx,
        "Y": float(Y),
        "l1_f_mu": l1_distance(f, mu_w, grids),
        "l2rho_v_wbar": weighted_norm_l2(
            mac.v_macro - np.asarray(wbar)[:, None, None], grids.x, weight=mac.rho
        ),
        "l2_u_wbar": weighted_norm_l2(u - wfield, grids.x),
        "thickness": model.global_thickness(mac.rho),
        "conc_area": concentration_measure(mac.rho, grids.x, conc_c1),
        "entropy_rhs": rhs,
        "entropy_residual": float("nan"),
        "min_f": float(f.min()),
    }
