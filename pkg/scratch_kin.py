"""Probe kinetic-solver quantities before freezing test expectations."""
import numpy as np

from fpns.coupling import SimConfig, build_grids
from fpns.fields import l1_distance, maxwellian, moments, normalize
from fpns.grids import make_grids
from fpns.kinetic import (
    DriftField,
    StepSizeError,
    assemble_drift,
    fp_step,
    stiffness,
    transport_step,
    velocity_step,
)

import sys
sys.path.insert(0, "tests")
import oracles

# ---- 1. expm oracle comparison ----
grids = make_grids(8, 24, V=6.0, sigma=1.0)
rng = np.random.default_rng(0)
f = np.abs(rng.standard_normal((8, 8, 24, 24))) + 0.1
b = 0.6 * rng.standard_normal((2, 8, 8))
s = 1.0 + 0.5 * np.abs(rng.standard_normal((8, 8)))
drift = DriftField(-b * s, s)  # centers = b
out = velocity_step(f, drift, grids, 1.0, 0.07, backend="numpy")
for (i, j) in [(0, 0), (3, 4)]:
    want = oracles.expm_velocity_slice(f[i, j], b[0, i, j], b[1, i, j], s[i, j], grids.v, 1.0, 0.07)
    print(f"expm cell ({i},{j}) dev: {np.abs(out[i, j] - want).max():.3e}")

# backend agreement
out_nb = velocity_step(f, drift, grids, 1.0, 0.07, backend="numba")
print("backend numba-numpy dev:", np.abs(out_nb - out).max(), " scale:", out.max())

# mass + positivity
print("mass change:", abs(out.sum() - f.sum()) / f.sum(), " min:", out.min())

# ---- 2. fixed points ----
mu = maxwellian(grids, 1.0)
d0 = DriftField(np.zeros((2, 8, 8)), np.full((8, 8), 1.3))
dev = np.abs(velocity_step(mu, d0, grids, 1.0, 0.5) - mu).max() / mu.max()
print("centered fixed point rel dev:", dev)
c = np.array([1.0, -0.5])
mus = maxwellian(grids, 1.0, center=c)
ds = DriftField(np.tile((-1.3 * c)[:, None, None], (1, 8, 8)), np.full((8, 8), 1.3))
dev = np.abs(velocity_step(mus, ds, grids, 1.0, 0.5) - mus).max() / mus.max()
print("shifted fixed point rel dev:", dev)

# ---- 3. relaxed momentum per cell ----
for V, Nv, cc in [(6.0, 32, (0.8, -0.3)), (8.0, 32, (0.8, -0.3)), (6.0, 48, (0.8, -0.3))]:
    g = make_grids(8, Nv, V=V, sigma=1.0)
    f0 = maxwellian(g, 1.0, center=(0.2, 0.1))
    cvec = np.tile(np.array(cc)[:, None, None], (1, 8, 8))
    dd = DriftField(-1.2 * cvec, np.full((8, 8), 1.2))
    t = 0.4
    f1 = velocity_step(f0, dd, g, 1.0, t)
    m0 = moments(f0, g)
    m1 = moments(f1, g)
    want = oracles.relaxed_momentum(t, m0.m, m0.rho, cvec, 1.2)
    print(f"V={V} Nv={Nv}: momentum dev {np.abs(m1.m - want).max():.3e}  mass dev {np.abs(m1.rho - m0.rho).max():.3e}")

# ---- 4. OU second moment ----
g = make_grids(8, 32, V=6.0, sigma=1.0)
f0 = maxwellian(g, 1.0, center=(1.0, 0.5))
d_ou = DriftField(np.zeros((2, 8, 8)), np.full((8, 8), 1.0))
T = 0.3
f1 = velocity_step(velocity_step(velocity_step(f0, d_ou, g, 1.0, 0.1), d_ou, g, 1.0, 0.1), d_ou, g, 1.0, 0.1)
M0 = float((f0 * g.v.speed_sq).sum() * g.w)
M1 = float((f1 * g.v.speed_sq).sum() * g.w)
want = oracles.ou_second_moment(T, M0, 1.0, 1.0)
print(f"OU M(0.3): got {M1:.8f} want {want:.8f} rel {(M1 - want) / want:.3e}")

# ---- 5. transport analytic translate ----
g16 = make_grids(16, 24, V=6.0, sigma=1.0)
X1 = g16.x.X1[:, :, None, None]
X2 = g16.x.X2[:, :, None, None]
Vk = g16.v.v[None, None, :, None]
Vl = g16.v.v[None, None, None, :]
muv = np.exp(-0.5 * (Vk ** 2 + Vl ** 2))


def analytic(t):
    return (1.5 + np.cos(2 * np.pi * (X1 - Vk * t)) * np.cos(2 * np.pi * (X2 - Vl * t))) * muv


f0 = analytic(0.0)
dt = 0.008  # CFL: 5.875 * 0.008 / 0.0625 = 0.752
fs = f0.copy()
fl = f0.copy()
for _ in range(5):
    fs = transport_step(fs, g16, dt)
    fl = transport_step(fl, g16, dt, scheme="linear")
want = analytic(5 * dt)
print("spectral translate dev:", np.abs(fs - want).max(), " mass:", abs(fs.sum() - f0.sum()) / f0.sum())
print("linear   translate dev:", np.abs(fl - want).max(), " mass:", abs(fl.sum() - f0.sum()) / f0.sum(), " min:", fl.min())
print("uniform-x invariance:", np.abs(transport_step(np.broadcast_to(muv, f0.shape).copy(), g16, dt) - muv).max())

# ---- 6. fp_step equilibrium invariance ----
cfg = SimConfig(Nx=16, Nv=24, V=6.0)
gr = build_grids(cfg)
from fpns.averaging import make_model
model = make_model(cfg.model, gr.x)
wbar = np.array([0.3, -0.2])
feq = maxwellian(gr, cfg.sigma, center=wbar)
ueq = np.tile(wbar[:, None, None], (1, 16, 16))
f1 = fp_step(feq, ueq, model, cfg, gr, 2e-3)
print("fp equilibrium dev/step:", np.abs(f1 - feq).max() / feq.max())

# ---- 7. Strang self-convergence, alpha=0 frozen field ----
cfg0 = SimConfig(Nx=8, Nv=24, V=6.0, alpha=0.0, beta=2.0, sigma=1.0, eps=0.1)
g8 = build_grids(cfg0)
u = np.stack([
    0.5 * np.cos(2 * np.pi * g8.x.X1) + 0.2 * np.sin(2 * np.pi * g8.x.X2),
    -0.3 * np.sin(2 * np.pi * g8.x.X1) + 0.4 * np.cos(2 * np.pi * g8.x.X2),
])
base = (1.0 + 0.3 * np.cos(2 * np.pi * g8.x.X1) + 0.2 * np.sin(2 * np.pi * g8.x.X2))[:, :, None, None]
f0 = normalize(base * maxwellian(g8, 1.0, center=(0.5, -0.3), normalized=False), g8)
T = 0.08


def evolve(n):
    dt = T / n
    f = f0.copy()
    for _ in range(n):
        f = fp_step(f, u, None, cfg0, g8, dt)
    return f


ref = evolve(256)
errs = [l1_distance(evolve(n), ref, g8) for n in (8, 16, 32)]
print("strang errors:", errs)
print("ratios:", errs[0] / errs[1], errs[1] / errs[2], " orders:", oracles.observed_orders(errs))

# ---- 8. H monotone pure OU fp ----
from fpns.diagnostics import relative_entropy
cfg_ou = SimConfig(Nx=8, Nv=24, V=6.0, alpha=0.0, beta=1.0, sigma=1.0)
gou = build_grids(cfg_ou)
fou = maxwellian(gou, 1.0, center=(0.9, 0.4))
u0 = np.zeros((2, 8, 8))
Hs = [relative_entropy(fou, gou, 1.0)]
for _ in range(20):
    fou = fp_step(fou, u0, None, cfg_ou, gou, 0.01)
    Hs.append(relative_entropy(fou, gou, 1.0))
dH = np.diff(Hs)
print("H increments max:", dH.max(), " H0:", Hs[0], " H20:", Hs[-1])

# ---- 9. guards ----
try:
    velocity_step(f, DriftField(np.zeros((2, 8, 8)), np.full((8, 8), 4000.0)), grids, 1.0, 0.1)
    print("stiff: NO ERROR")
except StepSizeError as e:
    print("stiff: StepSizeError")
try:
    big_c = np.tile(np.array([5.9, 0.0])[:, None, None], (1, 8, 8))
    velocity_step(f, DriftField(-big_c, np.ones((8, 8))), grids, 1.0, 0.1)
    print("edge center: NO ERROR")
except ValueError:
    print("edge center: ValueError")
dr = assemble_drift(f, np.zeros((2, 8, 8)), None, SimConfig(Nx=8, Nv=24, alpha=0.0, beta=1.0), grids)
print("stiffness0:", stiffness(dr, grids, 1.0), " A_MAX/l:", 300.0 / stiffness(dr, grids, 1.0))
