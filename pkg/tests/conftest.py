"""Shared fixtures: the scenario trajectories the acceptance tests consume.

Heavy runs are session-scoped and lazy, so unit-test invocations stay fast
and a full `pytest` integrates each trajectory exactly once.
"""
import time

import numpy as np
import pytest

from fpns.averaging import make_model
from fpns.coupling import SimConfig, build_grids, run
from fpns.diagnostics import relative_entropy
from fpns.fields import kinetic_energy, maxwellian
from fpns.kinetic import fp_step

# ---- conserved-quantity / entropy-law / concentration scenario ---------------

# Two separated density bumps with opposite macroscopic velocities, default
# physical parameters (alpha=beta=gamma=nu=sigma=1, eps=0.1, L=1).  The
# velocity grid is Nv=48 so the Fisher-stencil floor sits far below the
# entropy-law residual budget.
ACCEPT_KW = dict(Nx=32, Nv=48, V=6.0, T_final=1.0, record_every=0.01, preset="two-bump")


@pytest.fixture(scope="session")
def accept_run():
    """dt=1e-3 acceptance trajectory with full records."""
    return run(SimConfig(dt=1e-3, **ACCEPT_KW))


@pytest.fixture(scope="session")
def accept_run_half():
    """Same trajectory at dt=5e-4 (refinement member for the residual check)."""
    return run(SimConfig(dt=5e-4, **ACCEPT_KW))


@pytest.fixture(scope="session")
def accept_run_coarse():
    """Same trajectory at dt=2e-3; records only at t=0 and t=T."""
    kw = dict(ACCEPT_KW, record_every=1.0)
    return run(SimConfig(dt=2e-3, **kw))


# ---- synchronization-rate scenario --------------------------------------------

# Slower drag/alignment (rate ~ beta+gamma = 0.8) keeps all three alignment
# norms well above discretization floors across the whole [2, 6] fit window.
FIT_KW = dict(
    alpha=0.4,
    beta=0.4,
    gamma=0.4,
    nu=0.05,
    V=6.0,
    dt=2.5e-3,
    T_final=6.0,
    preset="two-bump",
    fit_window=(2.0, 6.0),
)


@pytest.fixture(scope="session")
def fit_run_32():
    return run(SimConfig(Nx=32, Nv=32, record_every=0.05, **FIT_KW))


@pytest.fixture(scope="session")
def fit_run_48():
    return run(SimConfig(Nx=48, Nv=48, record_every=0.1, **FIT_KW))


# ---- equilibrium fixed-point scenario ------------------------------------------


@pytest.fixture(scope="session")
def equilibrium_run():
    """(RunResult, stepping wall-clock seconds) for the equilibrium preset."""
    cfg = SimConfig(
        Nx=32, Nv=32, V=6.0, dt=1e-3, T_final=1.0, record_every=0.25, preset="equilibrium"
    )
    t0 = time.perf_counter()
    res = run(cfg)
    wall = time.perf_counter() - t0
    return res, wall


# ---- homogeneous relaxation scenario (alignment and coupling switched off) -----


@pytest.fixture(scope="session")
def ou_run():
    """Spatially homogeneous relaxation toward the resting Maxwellian.

    alpha = gamma = 0 and u = 0 frozen: the kinetic equation reduces to the
    velocity Ornstein-Uhlenbeck process with rate beta.  Returns sampled
    times, relative entropy, and second moments for two step sizes.
    """
    cfg = SimConfig(Nx=8, Nv=64, V=6.0, alpha=0.0, gamma=0.0, beta=1.0, sigma=1.0)
    grids = build_grids(cfg)
    model = make_model(cfg.model, grids.x)
    u0 = np.zeros((2, grids.x.Nx, grids.x.Nx))
    g0 = (1.0, 0.5)

    def integrate(dt, T=1.5, cadence=0.05):
        f = maxwellian(grids, cfg.sigma, center=g0)
        every = int(round(cadence / dt))
        ts, H, M = [0.0], [relative_entropy(f, grids, cfg.sigma)], [2.0 * kinetic_energy(f, grids)]
        n = int(round(T / dt))
        for k in range(1, n + 1):
            f = fp_step(f, u0, model, cfg, grids, dt)
            if k % every == 0:
                ts.append(k * dt)
                H.append(relative_entropy(f, grids, cfg.sigma))
                M.append(2.0 * kinetic_energy(f, grids))
        return np.array(ts), np.array(H), np.array(M)

    coarse = integrate(2e-3)
    fine = integrate(1e-3)
    return {"g0": g0, "beta": cfg.beta, "sigma": cfg.sigma, "coarse": coarse, "fine": fine}
