"""Tuning probe: gentle two-bump at Nx=32, Nv=48, T=1, dt=1e-3.

Measures the entropy-law residual profile (central differences over a fixed
cadence), conserved-quantity drifts, Ebar monotonicity, and min f.
"""
import json
import time

import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, initial_data, make_state, fpns_step
from fpns.fluid import leray_project, real_velocity, spectral_velocity
from fpns.diagnostics import (
    centered_entropy,
    conserved_momenta,
    entropy_rhs,
    entropy_law_residual,
    fisher_partial,
    limit_velocity,
)


def run_probe(dt, T=1.0, Nv=48, cad=0.005, tag=""):
    cfg = SimConfig(Nx=32, Nv=Nv, V=6.0, dt=dt, T_final=T, record_every=cad)
    grids = build_grids(cfg)
    model = make_model(cfg.model, grids.x)
    f0, u0 = initial_data(cfg.preset, cfg.seed, grids, cfg)
    uh0 = leray_project(spectral_velocity(u0, grids.x), grids.x)
    state = make_state(0.0, f0, uh0, cfg, grids, model)

    wbar = limit_velocity(f0, u0, cfg, grids)
    every = max(1, int(round(cad / dt)))
    nsteps = int(round(T / dt))

    ts, ebars, rhss, comps, x1s, x2s, minfs = [], [], [], [], [], [], []

    def sample(st):
        eb = centered_entropy(st.f, st.u, cfg, grids)
        rhs = entropy_rhs(st.f, st.u, model, cfg, grids, macro=st.macro)
        I_mac = fisher_partial(
            st.f, grids, cfg.sigma, center=st.macro.v_macro,
            weight=model.strength(st.macro.rho),
        )
        from fpns.fields import mollify
        ue = mollify(st.u, grids.x, cfg.eps)
        I_ue = fisher_partial(st.f, grids, cfg.sigma, center=ue)
        x1, x2 = conserved_momenta(st.f, st.u, cfg, grids)
        ts.append(st.t)
        ebars.append(eb)
        rhss.append(rhs)
        comps.append((I_mac, I_ue))
        x1s.append(x1)
        x2s.append(x2)
        minfs.append(float(st.f.min()))

    t0 = time.time()
    sample(state)
    for k in range(1, nsteps + 1):
        state = fpns_step(state, cfg, grids, model)
        if k % every == 0:
            sample(state)
    wall = time.time() - t0

    ts = np.array(ts)
    ebars = np.array(ebars)
    rhss = np.array(rhss)
    resid = entropy_law_residual(ts, ebars, rhss)
    # full interior profile
    dE = (ebars[2:] - ebars[:-2]) / (ts[2:] - ts[:-2])
    prof = dE - rhss[1:-1]

    x1s = np.array(x1s)
    x2s = np.array(x2s)
    dx1 = np.linalg.norm(x1s[-1] - x1s[0]) / np.linalg.norm(x1s[0])
    dx2 = abs(x2s[-1] - x2s[0]) / abs(x2s[0])
    incr = float(np.max(np.diff(ebars)))

    print(f"== probe{tag}: dt={dt} Nv={Nv} wall={wall:.0f}s wbar={wbar}")
    print(f"   Ebar0={ebars[0]:.6e}  X1_0={x1s[0]}  X2_0={x2s[0]:.6e}")
    print(f"   max_resid={resid:.3e}  X1_rel={dx1:.3e}  X2_rel={dx2:.3e}")
    print(f"   Ebar_incr_max={incr:.3e}  minf_overall={min(minfs):.3e}")
    late = [m for t, m in zip(ts, minfs) if t >= 0.5]
    if late:
        print(f"   minf_late={min(late):.3e}")
    imax = max(a + b for a, b in comps)
    print(f"   I_total_max={imax:.4e}")
    for i in range(1, len(ts) - 1, max(1, (len(ts) - 2) // 24)):
        im, iu = comps[i]
        print(
            f"   t={ts[i]:.3f} resid={prof[i-1]:+.3e} I={im + iu:.3e} "
            f"Ebar={ebars[i]:.6e}"
        )
    return dict(resid=float(resid), dx1=float(dx1), dx2=float(dx2),
                incr=float(incr), wall=wall)


if __name__ == "__main__":
    import sys
    dt = float(sys.argv[1]) if len(sys.argv) > 1 else 1e-3
    Nv = int(sys.argv[2]) if len(sys.argv) > 2 else 48
    out = run_probe(dt, Nv=Nv, tag="")
    print(json.dumps(out))
