import json
import time

import numpy as np

from fpns.coupling import SimConfig, run
from fpns.diagnostics import decay_fit, entropy_law_residual

out = {}

def two_bump(dt, T, Nx, rec):
    return SimConfig(Nx=Nx, Nv=Nx, V=6.0, T_final=T, dt=dt, record_every=rec)

t0 = time.perf_counter()
resA = run(two_bump(1e-3, 1.0, 32, 0.01))
tA = time.perf_counter() - t0
t0 = time.perf_counter()
resB = run(two_bump(5e-4, 1.0, 32, 0.01))
tB = time.perf_counter() - t0

def drift(res, key):
    r0, rN = res.records[0], res.records[-1]
    if isinstance(key, tuple):
        a0 = np.hypot(*(r0[k] for k in key))
        aN = np.hypot(*(rN[k] - r0[k] for k in key))
        return aN / a0
    return abs(rN[key] - r0[key]) / abs(r0[key])

for name, res, wall in (("A_dt1e-3", resA, tA), ("B_dt5e-4", resB, tB)):
    recs = res.records
    t = [r["t"] for r in recs]
    eb = [r["Ebar"] for r in recs]
    rhs = [r["entropy_rhs"] for r in recs]
    out[name] = {
        "wall_s": wall,
        "X1_rel_drift": drift(res, ("X1_1", "X1_2")),
        "X2_rel_drift": drift(res, "X2"),
        "Ebar0": eb[0],
        "Ebar_increase_max": max(
            eb[i + 1] - eb[i] for i in range(len(eb) - 1)
        ),
        "residual_max": entropy_law_residual(t, eb, rhs),
        "min_f_overall": min(r["min_f"] for r in recs),
        "conc_area_min": min(r["conc_area"] for r in recs),
        "thickness_min": min(r["thickness"] for r in recs),
        "l1_f_mu": (recs[0]["l1_f_mu"], recs[-1]["l1_f_mu"]),
        "l2rho": (recs[0]["l2rho_v_wbar"], recs[-1]["l2rho_v_wbar"]),
        "l2u": (recs[0]["l2_u_wbar"], recs[-1]["l2_u_wbar"]),
        "wbar": list(res.wbar),
        "vbar_end": (recs[-1]["vbar_1"], recs[-1]["vbar_2"]),
        "ubar_end": (recs[-1]["ubar_1"], recs[-1]["ubar_2"]),
    }

out["X1_ratio"] = out["A_dt1e-3"]["X1_rel_drift"] / out["B_dt5e-4"]["X1_rel_drift"]
out["X2_ratio"] = out["A_dt1e-3"]["X2_rel_drift"] / out["B_dt5e-4"]["X2_rel_drift"]

with open("/tmp/accept_T1.json", "w") as h:
    json.dump(out, h, indent=1)
print(json.dumps(out, indent=1))
