"""Decompose the entropy-law residual on the two-bump 32^2 run.

Questions:
  1. Where in time is the +0.063 max residual attained (record cadence 0.01)?
  2. How much is differentiation error (cadence) vs functional mismatch?
     -> compare residual with dE/dt from per-step central differences.
  3. Does k_picard=2 shrink it (Picard-lag O(dt) component)?
  4. Does a 2nd-order centered stencil in fisher_partial beat the 4th-order one?
"""
import json
import numpy as np

import fpns.diagnostics as dg
from fpns.averaging import make_model
from fpns.coupling import SimConfig, make_state, initial_data, fpns_step
from fpns.fields import moments, mollify
from fpns.grids import make_grids
from fpns.diagnostics import (
    centered_entropy, entropy_rhs, mean_velocities, fisher_partial,
)


def _dv2(arr, axis, hv):
    out = np.zeros_like(arr)
    sl = [slice(None)] * arr.ndim
    up = [slice(None)] * arr.ndim
    dn = [slice(None)] * arr.ndim
    sl[axis] = slice(1, -1)
    up[axis] = slice(2, None)
    dn[axis] = slice(None, -2)
    out[tuple(sl)] = (arr[tuple(up)] - arr[tuple(dn)]) / (2.0 * hv)
    # one-sided 2nd order at the ends, zero-extension flavor like _dv4
    sl[axis] = 0
    up[axis] = 1
    out[tuple(sl)] = arr[tuple(up)] / (2.0 * hv)
    sl[axis] = -1
    dn[axis] = -2
    out[tuple(sl)] = -arr[tuple(dn)] / (2.0 * hv)
    return out


def run_probe(k_picard, T, dt, tag):
    cfg = SimConfig(preset="two-bump", Nx=32, Nv=32, T_final=T, dt=dt,
                    k_picard=k_picard)
    grids = make_grids(cfg.Nx, cfg.Nv, cfg.L, cfg.V)
    model = make_model(cfg.model, grids.x)
    params = cfg
    f0, u0 = initial_data(cfg.preset, cfg.seed, grids, cfg)
    from fpns.fluid import leray_project, spectral_velocity
    uh0 = leray_project(spectral_velocity(u0, grids.x), grids.x)
    state = make_state(0.0, f0, uh0, cfg, grids, model)

    nsteps = int(round(T / dt))
    ts = [0.0]
    ebars = [centered_entropy(state.f, state.u, params, grids)]
    rhs_t = []
    rhs_vals = []
    comps = []

    def rhs_now(st):
        mac = moments(st.f, grids)
        vbar, _ = mean_velocities(st.f, st.u, grids)
        s = model.strength(mac.rho)
        kappa = mac.rho * s * grids.x.cell_area
        I_mac = fisher_partial(st.f, grids, params.sigma, center=mac.v_macro, weight=s)
        u_eps = mollify(st.u, grids.x, params.eps)
        I_ue = fisher_partial(st.f, grids, params.sigma, center=u_eps)
        diff = mac.v_macro - vbar[:, None, None]
        avg = model.average_flux(mac.m - vbar[:, None, None] * mac.rho, mac.rho)
        norm_sq = float((kappa * (diff ** 2).sum(axis=0)).sum())
        inner = float((kappa * (diff * avg).sum(axis=0)).sum())
        from fpns.fields import enstrophy
        visc = (params.beta * params.nu / params.gamma) * enstrophy(st.u, grids.x)
        total = -params.alpha * I_mac - params.beta * I_ue \
            - params.alpha * (norm_sq - inner) - visc
        return total, (I_mac, I_ue, norm_sq - inner, visc)

    r0, c0 = rhs_now(state)
    rhs_t.append(0.0)
    rhs_vals.append(r0)
    comps.append(c0)

    for n in range(nsteps):
        state = fpns_step(state, cfg, grids, model)
        ts.append(state.t)
        ebars.append(centered_entropy(state.f, state.u, params, grids))
        k = n + 1
        if k <= 60 or k % 5 == 0:
            r, c = rhs_now(state)
            rhs_t.append(state.t)
            rhs_vals.append(r)
            comps.append(c)

    ts = np.array(ts)
    ebars = np.array(ebars)
    rhs_t = np.array(rhs_t)
    rhs_vals = np.array(rhs_vals)

    # per-step central-difference dE/dt at every interior step
    dE_step = (ebars[2:] - ebars[:-2]) / (ts[2:] - ts[:-2])
    t_mid = ts[1:-1]

    # residual at per-step cadence wherever RHS known
    lut = {round(t / dt): i for i, t in enumerate(rhs_t)}
    resid_step = []
    for i, t in enumerate(t_mid):
        key = round(t / dt)
        if key in lut:
            resid_step.append((t, dE_step[i] - rhs_vals[lut[key]]))

    # record-cadence residual (cadence 0.01 = every 10 steps)
    stride = max(1, round(0.01 / dt))
    idx = np.arange(0, len(ts), stride)
    tr = ts[idx]
    er = ebars[idx]
    dE_rec = (er[2:] - er[:-2]) / (tr[2:] - tr[:-2])
    resid_rec = []
    for i, t in enumerate(tr[1:-1]):
        key = round(t / dt)
        if key in lut:
            resid_rec.append((float(t), float(dE_rec[i] - rhs_vals[lut[key]])))

    out = {
        "tag": tag,
        "Ebar0": float(ebars[0]),
        "resid_step_max": max(r for _, r in resid_step),
        "resid_rec_max": max(r for _, r in resid_rec),
        "resid_step": [(float(a), float(b)) for a, b in resid_step[:40]],
        "resid_step_late": [(float(a), float(b)) for a, b in resid_step[-10:]],
        "resid_rec": resid_rec,
        "rhs_head": [(float(a), float(b)) for a, b in zip(rhs_t[:15], rhs_vals[:15])],
        "comps_head": [
            (float(t), [float(x) for x in c]) for t, c in zip(rhs_t[:15], comps[:15])
        ],
    }
    return out, (ts, ebars, rhs_t, rhs_vals, state)


def main():
    res1, aux1 = run_probe(k_picard=1, T=0.35, dt=1e-3, tag="kp1")
    res2, _ = run_probe(k_picard=2, T=0.12, dt=1e-3, tag="kp2")

    # stencil comparison: recompute RHS at a few saved states with 2nd-order stencil
    # (recompute by re-running a short trajectory and monkeypatching _dv4)
    orig = dg._dv4
    dg._dv4 = _dv2
    try:
        res3, _ = run_probe(k_picard=1, T=0.12, dt=1e-3, tag="kp1_dv2")
    finally:
        dg._dv4 = orig

    report = {"kp1": res1, "kp2": res2, "kp1_dv2": res3}
    with open("/tmp/resid_probe.json", "w") as fh:
        json.dump(report, fh, indent=1)
    for k, v in report.items():
        print(k, "resid_step_max", v["resid_step_max"], "resid_rec_max", v["resid_rec_max"])
    print("head of per-step residual (kp1):")
    for t, r in res1["resid_step"][:25]:
        print(f"  t={t:.3f} resid={r:+.3e}")
    print("late per-step residual (kp1):")
    for t, r in res1["resid_step_late"]:
        print(f"  t={t:.3f} resid={r:+.3e}")
    print("record-cadence residual (kp1):")
    for t, r in res1["resid_rec"][:12]:
        print(f"  t={t:.3f} resid={r:+.3e}")


if __name__ == "__main__":
    main()
