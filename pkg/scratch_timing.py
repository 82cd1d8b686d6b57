import numpy as np
import time
from types import SimpleNamespace

from fpns.grids import make_grids
from fpns.kinetic import fp_step, transport_step, velocity_step, DriftField, assemble_drift
from fpns.fields import maxwellian, mass, l1_distance
from fpns.averaging import ModelSpec, make_model

grids = make_grids(32, 32, L=1.0, V=6.0, sigma=1.0)
f = maxwellian(grids, 1.0)
params = SimpleNamespace(alpha=1.0, beta=1.0, eps=0.1, sigma=1.0)
model = make_model(ModelSpec(variant="CS", r0=0.25), grids.x)
u = np.zeros((2, 32, 32))

t0 = time.time(); ft = transport_step(f, grids, 5e-4); t1 = time.time()
print(f"transport half-step {1000*(t1-t0):.0f} ms")

f1 = fp_step(f, u, model, params, grids, 1e-3)  # warm up jit
t0 = time.time()
for _ in range(20):
    f1 = fp_step(f1, u, model, params, grids, 1e-3)
t1 = time.time()
print(f"fp_step warm {1000*(t1-t0)/20:.1f} ms/step -> {(t1-t0)/20*1000:.0f} s/1000 steps")

# equilibrium fixed point with w=0: stays put
d = l1_distance(f1, f, grids)
print(f"equilibrium drift after 21 steps L1 {d:.3e}")

# shifted equilibrium (w != 0): u = w const, f = mu_w
w = (0.118, -0.0455)
fw = maxwellian(grids, 1.0, center=w)
uw = np.zeros((2, 32, 32)); uw[0] += w[0]; uw[1] += w[1]
fw1 = fp_step(fw, uw, model, params, grids, 1e-3)
print(f"shifted equilibrium per-step L1 {l1_distance(fw1, fw, grids):.3e}")

# 48 grid timing
g48 = make_grids(48, 48, L=1.0, V=6.0, sigma=1.0)
f48 = maxwellian(g48, 1.0)
m48 = make_model(ModelSpec(variant="CS", r0=0.25), g48.x)
u48 = np.zeros((2, 48, 48))
f48b = fp_step(f48, u48, m48, params, g48, 2e-3)
t0 = time.time()
for _ in range(5):
    f48b = fp_step(f48b, u48, m48, params, g48, 2e-3)
t1 = time.time()
print(f"fp_step 48 warm {1000*(t1-t0)/5:.1f} ms/step")
