"""Probe round 2: equilibrium at V=8, momentum bookkeeping, transport COM."""
import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, fpns_step, initial_data, make_state
from fpns.fields import MacroFields, maxwellian, moments, mollify, normalize
from fpns.fluid import leray_project, real_velocity, spectral_velocity
from fpns.grids import make_grids
from fpns.kinetic import assemble_drift, fp_step, transport_step

import sys
sys.path.insert(0, "tests")
import oracles

# ---- 1. fp_step equilibrium at V=8 vs V=6 ----
for V in (6.0, 8.0):
    cfg = SimConfig(Nx=16, Nv=24, V=V)
    gr = build_grids(cfg)
    model = make_model(cfg.model, gr.x)
    wbar = np.array([0.3, -0.2])
    feq = maxwellian(gr, cfg.sigma, center=wbar)
    ueq = np.tile(wbar[:, None, None], (1, 16, 16))
    f1 = fp_step(feq, ueq, model, cfg, gr, 2e-3)
    print(f"V={V}: fp_step eq rel dev {np.abs(f1 - feq).max() / feq.max():.3e}")

# ---- 2. fpns_step equilibrium at V=8 ----
for V in (6.0, 8.0):
    cfg = SimConfig(Nx=16, Nv=24, V=V, dt=2e-3, preset="equilibrium")
    gr = build_grids(cfg)
    model = make_model(cfg.model, gr.x)
    f0, u0 = initial_data("equilibrium", 0, gr, cfg)
    uh0 = leray_project(spectral_velocity(u0, gr.x), gr.x)
    st = make_state(0.0, f0, uh0, cfg, gr, model)
    st1 = fpns_step(st, cfg, gr, model, 2e-3)
    devf = np.abs(st1.f - f0).max() / f0.max()
    devu = np.abs(real_velocity(st1.uh, gr.x) - u0).max()
    print(f"V={V}: fpns_step eq rel devf {devf:.3e} devu {devu:.3e}")

# ---- 3. momentum bookkeeping: dP = -beta int rho (v - u_eps) dt + O(dt^2) ----
cfg = SimConfig(Nx=16, Nv=24, V=6.0, alpha=1.0, beta=1.0, eps=0.1)
gr = build_grids(cfg)
model = make_model(cfg.model, gr.x)
f0, u0 = initial_data("two-bump", 0, gr, cfg)
mac0 = moments(f0, gr)
u_eps = mollify(u0, gr.x, cfg.eps)
D = -cfg.beta * ((mac0.m - mac0.rho[None] * u_eps).sum(axis=(-2, -1)) * gr.x.cell_area)
P0 = mac0.m.sum(axis=(-2, -1)) * gr.x.cell_area


def dP(dt):
    f1 = fp_step(f0, u0, model, cfg, gr, dt)
    m1 = moments(f1, gr)
    return m1.m.sum(axis=(-2, -1)) * gr.x.cell_area - P0


for a_label, a in (("alpha=1", 1.0), ("alpha=0", 0.0)):
    cfg = SimConfig(Nx=16, Nv=24, V=6.0, alpha=a, beta=1.0, eps=0.1)
    res = []
    for dt in (4e-3, 2e-3, 1e-3):
        f1 = fp_step(f0, u0, model, cfg, gr, dt)
        m1 = moments(f1, gr)
        P1 = m1.m.sum(axis=(-2, -1)) * gr.x.cell_area
        r = np.abs(P1 - P0 - D * dt).max()
        res.append(r)
    print(f"{a_label}: residuals {['%.3e' % r for r in res]} orders {oracles.observed_orders(res)}")

# ---- 4. transport crossing-time center of mass ----
g16 = make_grids(16, 24, V=6.0, sigma=1.0)
kv = 19  # v node 19: v = -6 + 19.5*0.5 = 3.75? recompute below
vstar = g16.v.v[kv]
print("vstar:", vstar)
f = np.zeros(g16.shape)
prof = np.exp(-0.5 * ((np.cos(2 * np.pi * g16.x.X1) - 1) ** 2 + (np.cos(2 * np.pi * g16.x.X2) - 1) ** 2) / 0.02)
f[:, :, kv, 12] = prof  # v2 node 12 -> v2 = 0.25 (near zero)
T = g16.x.L / vstar
n = 200
dt = T / n
print("CFL:", (g16.v.V - 0.5 * g16.v.hv) * dt / g16.x.hx)
fT = f.copy()
for _ in range(n):
    fT = transport_step(fT, g16, dt)
# circular center of mass in x1 of the slice
z0 = (f[:, :, kv, 12].sum(axis=1) * np.exp(2j * np.pi * g16.x.x / g16.x.L)).sum()
zT = (fT[:, :, kv, 12].sum(axis=1) * np.exp(2j * np.pi * g16.x.x / g16.x.L)).sum()
shift = (np.angle(zT / z0) / (2 * np.pi)) * g16.x.L
v2 = g16.v.v[12]
expect2 = (v2 * T) % g16.x.L
print("x1 COM shift after crossing:", shift, " (one full crossing: expect 0)  hx:", g16.x.hx)
print("slice mass rel change:", abs(fT[:, :, kv, 12].sum() - f[:, :, kv, 12].sum()) / f[:, :, kv, 12].sum())

# per-slice mass over random state
rng = np.random.default_rng(3)
fr = np.abs(rng.standard_normal(g16.shape)) + 0.05
sm0 = fr.sum(axis=(0, 1))
fr1 = transport_step(fr, g16, 0.008)
sm1 = fr1.sum(axis=(0, 1))
print("per-slice mass dev:", np.abs(sm1 - sm0).max() / sm0.max())

# ---- 5. assemble_drift dense oracle + v_macro==c example ----
cfg = SimConfig(Nx=16, Nv=24, V=6.0, alpha=0.7, beta=1.3, eps=0.1)
gr = build_grids(cfg)
model = make_model(cfg.model, gr.x)
f0, u0 = initial_data("random-smooth", 1, gr, cfg)
mac = moments(f0, gr)
dr = assemble_drift(f0, u0, model, cfg, gr)
ue = oracles.dense_mollify(u0, gr.x, cfg.eps)
Phi = model.kernel_matrix(mac.rho)
flux = (Phi @ (mac.m.reshape(2, -1) * mac.rho.reshape(-1)[None, :] / mac.rho.reshape(-1)[None, :]).T
        ).T.reshape(2, 16, 16) * gr.x.cell_area  # Phi @ m * hx^2
b_want = -(cfg.beta * ue + cfg.alpha * flux)
print("drift dense dev:", np.abs(dr.b - b_want).max())
print("strength dev:", np.abs(dr.s - (cfg.beta + cfg.alpha * model.strength(mac.rho))).max())

# v_macro == c via macro override
c = np.array([0.4, -0.1])
mac_c = MacroFields(mac.rho, mac.rho[None] * c[:, None, None], np.broadcast_to(c[:, None, None], (2, 16, 16)).copy(), mac.rho_floor)
dr_c = assemble_drift(f0, np.zeros_like(u0), model, cfg, gr, macro=mac_c)
want = -cfg.alpha * model.strength(mac.rho) * c[:, None, None]
print("v_macro=c dev:", np.abs(dr_c.b - want).max())

# ---- 6. OU moment at dt and dt/2 ----
g = make_grids(8, 32, V=6.0, sigma=1.0)
from fpns.kinetic import DriftField, velocity_step
f0 = maxwellian(g, 1.0, center=(1.0, 0.5))
d_ou = DriftField(np.zeros((2, 8, 8)), np.full((8, 8), 1.0))
M0 = float((f0 * g.v.speed_sq).sum() * g.w)
for dt, n in ((0.1, 3), (0.05, 6)):
    fT = f0.copy()
    for _ in range(n):
        fT = velocity_step(fT, d_ou, g, 1.0, dt)
    MT = float((fT * g.v.speed_sq).sum() * g.w)
    want = oracles.ou_second_moment(0.3, M0, 1.0, 1.0)
    print(f"OU dt={dt}: rel err {(MT - want) / want:.3e}")
