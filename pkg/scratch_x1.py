"""Endpoint X1/X2 drift vs dt on the two-bump run (no record overhead)."""
import sys
import time

import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, fpns_step, initial_data, make_state
from fpns.diagnostics import conserved_momenta
from fpns.fluid import leray_project, spectral_velocity


def run_drift(dt, Nv=48, V=6.0, T=1.0):
    cfg = SimConfig(Nx=32, Nv=Nv, V=V, dt=dt, T_final=T, record_every=T)
    grids = build_grids(cfg)
    model = make_model(cfg.model, grids.x)
    f, u = initial_data(cfg.preset, cfg.seed, grids, cfg)
    uh = leray_project(spectral_velocity(u, grids.x), grids.x)
    st = make_state(0.0, f, uh, cfg, grids, model)
    x1_0, x2_0 = conserved_momenta(st.f, st.u, cfg, grids)
    n = int(round(T / dt))
    t0 = time.time()
    for _ in range(n):
        st = fpns_step(st, cfg, grids, model, dt)
    x1, x2 = conserved_momenta(st.f, st.u, cfg, grids)
    d1 = np.linalg.norm(x1 - x1_0) / np.linalg.norm(x1_0)
    d2 = abs(x2 - x2_0) / abs(x2_0)
    print(
        f"dt={dt:8.1e} Nv={Nv} V={V}  dX1={d1:.4e}  dX2={d2:.4e}"
        f"  wall={time.time() - t0:.0f}s",
        flush=True,
    )
    return d1, d2


if __name__ == "__main__":
    if len(sys.argv) > 1:
        V = float(sys.argv[1])
        Nv = int(sys.argv[2])
        dts = [float(a) for a in sys.argv[3:]]
    else:
        V, Nv = 6.0, 48
        dts = [4e-3, 2e-3]
    for dt in dts:
        run_drift(dt, Nv=Nv, V=V)
