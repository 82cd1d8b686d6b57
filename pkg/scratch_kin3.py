"""Probe round 3: transport on band-limited states, const-drift center, wbar-pinned coupled equilibrium."""
import numpy as np

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, fpns_step, initial_data, make_state
from fpns.fields import maxwellian, moments
from fpns.fluid import leray_project, real_velocity, spectral_velocity
from fpns.kinetic import DriftField, transport_step, velocity_step

# ---- 1. crossing time with band-limited bump, both schemes ----
cfg = SimConfig(Nx=16, Nv=24, V=6.0)
gr = build_grids(cfg)
xg, vg = gr.x, gr.v
kv, lv = 19, 12
vstar = vg.v[kv]
print(f"vstar={vstar}, v2={vg.v[lv]}, hx={xg.hx}")
X1, X2 = xg.X1, xg.X2
prof = (1.0 + np.cos(2 * np.pi * X1 / xg.L)) * (1.0 + np.cos(2 * np.pi * X2 / xg.L))
T = xg.L / vstar
nst = 200
dt = T / nst

for scheme in ("spectral", "linear"):
    f = np.zeros((xg.Nx, xg.Nx, vg.Nv, vg.Nv))
    f[:, :, kv, lv] = prof
    fT = f
    for _ in range(nst):
        fT = transport_step(fT, gr, dt, scheme=scheme)
    sl0 = f[:, :, kv, lv]
    slT = fT[:, :, kv, lv]
    # circular COM along x1
    ang0 = np.angle(np.sum(sl0 * np.exp(2j * np.pi * X1 / xg.L)))
    angT = np.angle(np.sum(slT * np.exp(2j * np.pi * X1 / xg.L)))
    com_shift = (angT - ang0) * xg.L / (2 * np.pi)
    com_shift = (com_shift + 0.5 * xg.L) % xg.L - 0.5 * xg.L
    print(f"[{scheme}] full-loop COM shift {com_shift:+.3e} (hx={xg.hx})")
    print(f"[{scheme}] slice mass rel change {abs(slT.sum() - sl0.sum()) / sl0.sum():.3e}")
    print(f"[{scheme}] total mass rel change {abs(fT.sum() - f.sum()) / f.sum():.3e}")
    print(f"[{scheme}] min value {fT.min():.3e}")

# half-crossing: genuine off-grid displacement
nh = 101  # odd step count, shift = vstar*T*101/200 = 0.505 L (off-grid)
for scheme in ("spectral", "linear"):
    f = np.zeros((xg.Nx, xg.Nx, vg.Nv, vg.Nv))
    f[:, :, kv, lv] = prof
    fT = f
    for _ in range(nh):
        fT = transport_step(fT, gr, dt, scheme=scheme)
    slT = fT[:, :, kv, lv]
    ang0 = np.angle(np.sum(prof * np.exp(2j * np.pi * X1 / xg.L)))
    angT = np.angle(np.sum(slT * np.exp(2j * np.pi * X1 / xg.L)))
    expected = vstar * nh * dt
    com_shift = (angT - ang0) * xg.L / (2 * np.pi)
    err = (com_shift - expected + 0.5 * xg.L) % xg.L - 0.5 * xg.L
    print(f"[{scheme}] off-grid COM error {err:+.3e}, slice mass rel "
          f"{abs(slT.sum() - prof.sum()) / prof.sum():.3e}, min {fT.min():.3e}")

# ---- 2. per-slice mass: spectral on smooth strictly positive state ----
rng = np.random.default_rng(3)
wv = np.abs(rng.standard_normal((vg.Nv, vg.Nv))) + 0.1
mod = (1.0 + 0.3 * np.cos(2 * np.pi * X1) + 0.2 * np.sin(2 * np.pi * X2)
       + 0.15 * np.cos(2 * np.pi * (X1 + X2)))
fs = wv[None, None] * mod[:, :, None, None]
print(f"smooth state min {fs.min():.3e}")
ft = transport_step(fs, gr, 5e-3, scheme="spectral")
sm0 = fs.sum(axis=(0, 1))
smT = ft.sum(axis=(0, 1))
print(f"[spectral smooth] per-slice mass dev {np.abs(smT - sm0).max() / sm0.max():.3e}, min {ft.min():.3e}")

# ---- 3. rough state: linear ok, spectral injection recorded ----
fr = np.abs(rng.standard_normal((xg.Nx, xg.Nx, vg.Nv, vg.Nv))) + 0.05
for scheme in ("linear", "spectral"):
    ft = transport_step(fr, gr, 5e-3, scheme=scheme)
    sm0 = fr.sum(axis=(0, 1))
    smT = ft.sum(axis=(0, 1))
    print(f"[{scheme} rough] per-slice dev {np.abs(smT - sm0).max() / sm0.max():.3e}, min {ft.min():.3e}")

# ---- 4. const-drift long-run center ----
cfg4 = SimConfig(Nx=8, Nv=24, V=6.0)
gr4 = build_grids(cfg4)
b0 = np.array([-0.8, 0.3])
b = np.tile(b0[:, None, None], (1, 8, 8))
drift = DriftField(b=b, s=np.ones((8, 8)))
f = maxwellian(gr4, 1.0)
for _ in range(60):
    f = velocity_step(f, drift, gr4, 1.0, 0.1)
mac = moments(f, gr4)
vbar = (mac.m.sum(axis=(1, 2)) / mac.rho.sum())
print(f"const-drift mean {vbar} vs -b0 {-b0}, err {np.abs(vbar + b0).max():.3e} (hv={gr4.v.hv})")

# ---- 5. coupled equilibrium with wbar=(0.3,-0.2) pinned ----
for V in (6.0, 8.0):
    cfgE = SimConfig(Nx=16, Nv=24, V=V, dt=2e-3, preset="equilibrium", wbar=(0.3, -0.2))
    grE = build_grids(cfgE)
    modelE = make_model(cfgE.model, grE.x)
    f0, u0 = initial_data("equilibrium", 0, grE, cfgE)
    uh0 = leray_project(spectral_velocity(u0, grE.x), grE.x)
    st = make_state(0.0, f0, uh0, cfgE, grE, modelE)
    st1 = fpns_step(st, cfgE, grE, modelE, 2e-3)
    devf = np.abs(st1.f - f0).max() / f0.max()
    devu = np.abs(real_velocity(st1.uh, grE.x) - u0).max()
    print(f"V={V} wbar=(0.3,-0.2): fpns_step devf {devf:.3e} devu {devu:.3e}")
