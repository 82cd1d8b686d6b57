import time
import types
import warnings

import numpy as np

from fpns.grids import make_grids
from fpns.fields import maxwellian, moments, normalize, l1_distance
from fpns.averaging import ModelSpec, make_model
from fpns import diagnostics as dg

P = types.SimpleNamespace(alpha=1.0, beta=1.0, gamma=1.0, nu=1.0, sigma=1.0, eps=0.1)

g = make_grids(32, 32, V=6.0)
mu = maxwellian(g, 1.0)

# ---- relative entropy ----
print("H(mu)        ", dg.relative_entropy(mu, g, 1.0))
gshift = (0.8, -0.3)
mug = maxwellian(g, 1.0, center=gshift)
H = dg.relative_entropy(mug, g, 1.0)
print("H(mu_g)      ", abs(H - 0.5 * (0.8**2 + 0.3**2)))
print("H(mu_g; g)   ", dg.relative_entropy(mug, g, 1.0, center=gshift))

# ---- smooth test state: two-bump-ish f + velocity tilt, random smooth u ----
rng = np.random.default_rng(3)
X1, X2 = g.x.X1, g.x.X2
rho = 0.2 + 0.8 * np.exp(np.cos(2 * np.pi * X1) + np.sin(2 * np.pi * X2) - 2.0)
c1 = 0.3 * np.sin(2 * np.pi * X1) * np.cos(2 * np.pi * X2)
c2 = -0.2 * np.cos(2 * np.pi * X2)
V1 = g.v.v[None, None, :, None]
V2 = g.v.v[None, None, None, :]
f = rho[:, :, None, None] * np.exp(
    -((V1 - c1[:, :, None, None]) ** 2 + (V2 - c2[:, :, None, None]) ** 2) / 2.0
) / (2 * np.pi)
f = normalize(f, g)
u = np.stack([0.1 + 0.3 * np.sin(2 * np.pi * X2), -0.05 + 0.2 * np.cos(2 * np.pi * X1)])

# ---- E = Ebar + X2 ----
E = dg.total_entropy(f, u, P, g)
Eb = dg.centered_entropy(f, u, P, g)
_, X2c = dg.conserved_momenta(f, u, P, g)
print("E=Ebar+X2    ", abs(E - (Eb + X2c)))
print("Ebar>=0      ", Eb)

# ---- Csiszar-Kullback ----
print("CK slack     ", E is not None and dg.relative_entropy(f, g, 1.0) - 0.5 * l1_distance(f, mu, g) ** 2)

# ---- fisher_partial ----
print("I(mu_g; g)   ", dg.fisher_partial(mug, g, 1.0, center=gshift))
I0 = dg.fisher_partial(mu, g, 1.0)
Ic = dg.fisher_partial(mu, g, 1.0, center=(0.6, 0.1))
print("shift ident  ", abs(Ic - I0 - (0.6**2 + 0.1**2)))
mac = moments(f, g)
Ig = dg.fisher_partial(f, g, 1.0, center=(0.2, -0.4))
Iv = dg.fisher_partial(f, g, 1.0, center=mac.v_macro)
gap = ((mac.v_macro - np.array([0.2, -0.4])[:, None, None]) ** 2).sum(axis=0)
expect = float((gap * mac.rho).sum() * g.x.cell_area)
print("field ident  ", abs(Ig - Iv - expect) / expect)

# ---- fisher_full ----
with warnings.catch_warnings():
    warnings.simplefilter("error")
    Ivv, Ixv, Ixx = dg.fisher_full(mu, g, 1.0, vbar=np.zeros(2))
print("full at mu   ", Ivv, Ixv, Ixx)
a = 0.05
fp = normalize(mu * (1.0 + a * np.cos(2 * np.pi * X1 / g.x.L))[:, :, None, None], g)
_, _, Ixx_p = dg.fisher_full(fp, g, 1.0, vbar=np.zeros(2))
pred = a**2 * (2 * np.pi / g.x.L) ** 2 / 2.0
print("Ixx pert     ", abs(Ixx_p - pred) / pred)
Ivv, Ixv, Ixx = dg.fisher_full(f, g, 1.0)
print("CS           ", Ixv**2 - Ivv * Ixx, "(<=0)", Ivv >= 0, Ixx >= 0)

# ---- decay_fit ----
t = np.linspace(0, 5, 40)
r, R2 = dg.decay_fit(t, 3.0 * np.exp(-2.0 * t))
print("fit exact    ", abs(r - 2.0), abs(R2 - 1.0))
r, R2 = dg.decay_fit(t, np.full_like(t, 2.5))
print("fit const    ", r, R2)
try:
    dg.decay_fit(t, np.linspace(1, -1, 40))
    print("fit nonpos: NOT RAISED")
except ValueError:
    print("fit nonpos    raises")

# ---- record bundle + timing ----
model = make_model(ModelSpec(variant="CS", r0=0.25), g.x)
wbar = dg.limit_velocity(f, u, P, g)
t0 = time.perf_counter()
rec = dg.compute_record(f, u, model, P, g, 0.0, wbar)
t1 = time.perf_counter()
print("record 32    ", f"{t1 - t0:.3f}s", "cols", len(rec), len(dg.RECORD_COLUMNS))
assert tuple(rec.keys()) == dg.RECORD_COLUMNS
print("rhs sign     ", rec["entropy_rhs"], "(expect < 0)")
print("mass/minf    ", rec["mass"], rec["min_f"])

g48 = make_grids(48, 48, V=6.0)
f48 = normalize(
    np.exp(-((g48.v.V1[None, None] - 0.1) ** 2 + g48.v.V2[None, None] ** 2) / 2).repeat(48, 0).repeat(1, 1)
    * np.ones((48, 48, 1, 1)),
    g48,
)
u48 = np.zeros((2, 48, 48))
m48 = make_model(ModelSpec(variant="CS", r0=0.25), g48.x)
w48 = dg.limit_velocity(f48, u48, P, g48)
t0 = time.perf_counter()
dg.compute_record(f48, u48, m48, P, g48, 0.0, w48)
t1 = time.perf_counter()
print("record 48    ", f"{t1 - t0:.3f}s")
