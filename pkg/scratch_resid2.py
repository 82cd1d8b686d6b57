"""Probe 2: late-time residual asymptote and the kinetic fixed point.

(A) Run two-bump 32^2 to T=1.0, per-step Ebar, RHS components every 5 steps;
    print the residual profile and component decomposition at the hump.
(B) Pure kinetic semigroup with frozen c, s on a uniform-rho slice: iterate to
    the fixed point; report I_stencil(f_inf) and ||f_inf - mu_c||_1.
"""
import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, make_state, initial_data, fpns_step
from fpns.fields import moments, mollify, maxwellian, enstrophy
from fpns.grids import make_grids
from fpns.diagnostics import centered_entropy, mean_velocities, fisher_partial
from fpns import kinetic


def part_a():
    cfg = SimConfig(preset="two-bump", Nx=32, Nv=32, T_final=1.0, dt=1e-3)
    grids = make_grids(cfg.Nx, cfg.Nv, cfg.L, cfg.V)
    model = make_model(cfg.model, grids.x)
    f0, u0 = initial_data(cfg.preset, cfg.seed, grids, cfg)
    from fpns.fluid import leray_project, spectral_velocity
    uh0 = leray_project(spectral_velocity(u0, grids.x), grids.x)
    state = make_state(0.0, f0, uh0, cfg, grids, model)

    def rhs_now(st):
        mac = moments(st.f, grids)
        vbar, _ = mean_velocities(st.f, st.u, grids)
        s = model.strength(mac.rho)
        kappa = mac.rho * s * grids.x.cell_area
        I_mac = fisher_partial(st.f, grids, cfg.sigma, center=mac.v_macro, weight=s)
        u_eps = mollify(st.u, grids.x, cfg.eps)
        I_ue = fisher_partial(st.f, grids, cfg.sigma, center=u_eps)
        diff = mac.v_macro - vbar[:, None, None]
        avg = model.average_flux(mac.m - vbar[:, None, None] * mac.rho, mac.rho)
        norm_sq = float((kappa * (diff ** 2).sum(axis=0)).sum())
        w_rho = mac.rho * grids.x.cell_area
        inner = float((w_rho * (diff * avg).sum(axis=0)).sum())
        visc = (cfg.beta * cfg.nu / cfg.gamma) * enstrophy(st.u, grids.x)
        return (-cfg.alpha * I_mac - cfg.beta * I_ue
                - cfg.alpha * (norm_sq - inner) - visc,
                I_mac, I_ue, norm_sq - inner, visc)

    nsteps = 1000
    ts = [0.0]
    ebars = [centered_entropy(state.f, state.u, cfg, grids)]
    rhs = {0: rhs_now(state)}
    for n in range(nsteps):
        state = fpns_step(state, cfg, grids, model)
        ts.append(state.t)
        ebars.append(centered_entropy(state.f, state.u, cfg, grids))
        if (n + 1) % 5 == 0:
            rhs[n + 1] = rhs_now(state)

    ts = np.array(ts)
    eb = np.array(ebars)
    dE = (eb[2:] - eb[:-2]) / (ts[2:] - ts[:-2])
    print("t      Ebar        dE/dt       RHS         resid      I_mac      I_ue      kappa     visc")
    worst = (-1e9, None)
    for k in sorted(rhs):
        if k == 0 or k >= nsteps:
            continue
        r, I_mac, I_ue, kap, visc = rhs[k]
        resid = dE[k - 1] - r
        if resid > worst[0]:
            worst = (resid, k)
        if k % 50 == 0 or 300 <= k <= 400 and k % 10 == 0:
            print(f"{ts[k]:.3f} {eb[k]:.6e} {dE[k-1]:+.4e} {r:+.4e} {resid:+.4e} "
                  f"{I_mac:.4e} {I_ue:.4e} {kap:.4e} {visc:.4e}")
    print("worst resid:", worst[0], "at t=", ts[worst[1]])
    return state


def part_b():
    # pure kinetic fixed point on one x-cell: c fixed, s fixed
    grids = make_grids(8, 32, 1.0, 6.0)
    vg = grids.v
    c = np.array([0.117, -0.045])
    s = 1.15
    dv2 = grids.v.hv ** 2
    mu = maxwellian(grids, 1.0, center=c)
    f = np.broadcast_to(mu, (8, 8, 32, 32)).copy()
    # normalize per-cell mass 1
    f /= f.sum(axis=(2, 3), keepdims=True) * dv2

    svals = np.full((8, 8), s)
    b = -s * np.broadcast_to(c[:, None, None], (2, 8, 8)).copy()
    drift = kinetic.DriftField(b, svals)
    dt = 1e-3
    for it in range(4000):
        f = kinetic.velocity_step(f, drift, grids, 1.0, dt)
    rho = f.sum(axis=(2, 3)) * dv2
    print("part B: rho after", rho[0, 0])
    I = fisher_partial(f, grids, 1.0, center=c)
    mu_d = mu / (mu.sum() * dv2)
    l1 = np.abs(f[0, 0] - mu_d).sum() * dv2
    print(f"I_stencil(f_inf) = {I:.6e}   (per unit mass, weight 1, whole domain)")
    print(f"||f_inf - mu||_1 per cell = {l1:.6e}")
    # also stencil-Fisher of exact Gaussian samples
    fg = np.broadcast_to(mu_d, f.shape).copy()
    Ig = fisher_partial(fg, grids, 1.0, center=c)
    print(f"I_stencil(exact Gaussian samples) = {Ig:.6e}")


if __name__ == "__main__":
    part_b()
    part_a()
