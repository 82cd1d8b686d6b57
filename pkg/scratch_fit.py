"""Item-4 style probe: slow-coupling two-bump, T=6, fit window [2,6]."""
import sys
import time

import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, initial_data, make_state, fpns_step
from fpns.fluid import leray_project, spectral_velocity
from fpns.fields import maxwellian, mean_field, l1_distance, weighted_norm_l2
from fpns.diagnostics import decay_fit, limit_velocity


def run(N=32, dt=2.5e-3, T=6.0, cad=0.05, alpha=0.4, beta=0.4, gamma=0.4, nu=0.05):
    cfg = SimConfig(
        Nx=N, Nv=N, V=6.0, dt=dt, T_final=T, record_every=cad,
        alpha=alpha, beta=beta, gamma=gamma, nu=nu,
    )
    grids = build_grids(cfg)
    model = make_model(cfg.model, grids.x)
    f0, u0 = initial_data(cfg.preset, cfg.seed, grids, cfg)
    uh0 = leray_project(spectral_velocity(u0, grids.x), grids.x)
    state = make_state(0.0, f0, uh0, cfg, grids, model)
    wbar = limit_velocity(f0, u0, cfg, grids)
    mu_w = maxwellian(grids, cfg.sigma, center=tuple(wbar))

    every = max(1, int(round(cad / dt)))
    nsteps = int(round(T / dt))
    ts, n1, n2, n3 = [], [], [], []

    def sample(st):
        mac = st.macro
        ts.append(st.t)
        n1.append(l1_distance(st.f, mu_w, grids))
        n2.append(weighted_norm_l2(
            mac.v_macro - wbar[:, None, None], grids.x, weight=mac.rho))
        n3.append(weighted_norm_l2(st.u - wbar[:, None, None], grids.x))

    t0 = time.time()
    sample(state)
    for k in range(1, nsteps + 1):
        state = fpns_step(state, cfg, grids, model)
        if k % every == 0:
            sample(state)
    wall = time.time() - t0

    ts = np.array(ts)
    print(f"== fit probe N={N} dt={dt} a=b=g={alpha} nu={nu} wall={wall:.0f}s")
    print(f"   wbar={wbar}")
    names = ("l1_f_mu", "l2rho_v", "l2_u")
    for name, series in zip(names, (n1, n2, n3)):
        series = np.array(series)
        rate, r2 = decay_fit(ts, series, window=(2.0, 6.0))
        print(f"   {name}: rate={rate:.4f} R2={r2:.5f} "
              f"y(0)={series[0]:.3e} y(2)={series[ts.searchsorted(2.0)]:.3e} "
              f"y(6)={series[-1]:.3e}")
    mac = state.macro
    total = mac.rho.sum() * grids.x.cell_area
    vbar_end = mac.m.sum(axis=(-2, -1)) * grids.x.cell_area / total
    ubar_end = mean_field(state.u, grids.x)
    print(f"   vbar(T)-wbar={vbar_end - wbar}  ubar(T)-wbar={ubar_end - wbar}")


if __name__ == "__main__":
    N = int(sys.argv[1]) if len(sys.argv) > 1 else 32
    dt = float(sys.argv[2]) if len(sys.argv) > 2 else 2.5e-3
    run(N=N, dt=dt)
