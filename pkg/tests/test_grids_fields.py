"""Grids, distribution/fluid fields, moments, mollifier, energies."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fpns.fields import (
    RHO_FLOOR_REL,
    enstrophy,
    fft2_coeff,
    fluid_energy,
    kinetic_energy,
    l1_distance,
    mass,
    maxwellian,
    mean_field,
    mollify,
    moments,
    normalize,
    spectral_divergence,
    weighted_norm_l2,
)
from fpns.fluid import leray_project, real_velocity, spectral_velocity, taylor_green
from fpns.grids import Grids, TorusGrid, VelocityGrid, default_vmax, make_grids


def small_grids(Nx=8, Nv=16, V=6.0, L=1.0):
    return make_grids(Nx, Nv, L=L, V=V)


def random_f(grids, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.random(grids.shape)
    return normalize(f, grids)


def smooth_field(xgrid, seed=0, ncomp=1):
    """Low-pass random field built from a handful of Fourier modes."""
    rng = np.random.default_rng(seed)
    shape = (ncomp, xgrid.Nx, xgrid.Nx) if ncomp > 1 else (xgrid.Nx, xgrid.Nx)
    g = np.zeros(shape)
    two_pi = 2.0 * np.pi / xgrid.L
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            amp = rng.normal(size=(ncomp, 1, 1)) if ncomp > 1 else rng.normal()
            ph = rng.uniform(0, 2 * np.pi)
            g = g + amp * np.cos(two_pi * (k1 * xgrid.X1 + k2 * xgrid.X2) + ph)
    return g


# ---- grids -------------------------------------------------------------------


def test_torus_grid_basic():
    xg = TorusGrid(32, L=1.0)
    assert xg.hx * xg.Nx == xg.L  # exact in binary floating point for Nx=32
    assert xg.area == 1.0
    assert xg.cell_area == xg.hx ** 2
    assert xg.x[0] == 0.0 and xg.x[-1] == pytest.approx(xg.L - xg.hx)


@pytest.mark.parametrize("bad", [7, 6, 0, -8, 9])
def test_torus_grid_rejects_bad_nx(bad):
    with pytest.raises(ValueError):
        TorusGrid(bad)


def test_torus_grid_rejects_bad_length():
    with pytest.raises(ValueError):
        TorusGrid(16, L=0.0)


def test_velocity_grid_basic():
    vg = VelocityGrid(32, 6.0)
    assert vg.hv == pytest.approx(12.0 / 32)
    # cell centers are symmetric about 0 and faces hit the box ends exactly
    assert np.allclose(vg.v + vg.v[::-1], 0.0, atol=0.0)
    assert vg.faces[0] == -6.0 and vg.faces[-1] == 6.0
    assert vg.v[0] == pytest.approx(-6.0 + vg.hv / 2)


@pytest.mark.parametrize("bad", [12, 15, 17, 0])
def test_velocity_grid_rejects_bad_nv(bad):
    with pytest.raises(ValueError):
        VelocityGrid(bad, 6.0)


def test_default_vmax_six_sigma():
    assert default_vmax(1.0) == 6.0
    assert default_vmax(0.25) == 3.0
    g = make_grids(8, 16, sigma=0.25)
    assert g.v.V == 3.0


def test_grids_bundle():
    g = make_grids(8, 16, V=6.0)
    assert isinstance(g, Grids)
    assert g.shape == (8, 8, 16, 16)
    assert g.w == pytest.approx(g.x.cell_area * g.v.hv ** 2)
    assert g == make_grids(8, 16, V=6.0)


# ---- mass and normalization -----------------------------------------------------


def test_normalize_unit_mass():
    grids = small_grids()
    rng = np.random.default_rng(3)
    f = normalize(rng.random(grids.shape) + 0.1, grids)
    assert abs(mass(f, grids) - 1.0) <= 1e-13


def test_normalize_rejects_zero_field():
    grids = small_grids()
    with pytest.raises(ValueError):
        normalize(np.zeros(grids.shape), grids)


def test_maxwellian_mass():
    grids = make_grids(8, 32, V=6.0)
    f = maxwellian(grids, 1.0)
    assert abs(mass(f, grids) - 1.0) <= 1e-14
    # analytic normalization already collects all but the truncated tail
    raw = maxwellian(grids, 1.0, normalized=False)
    assert abs(mass(raw, grids) - 1.0) <= 1e-8


# ---- moments ----------------------------------------------------------------


def test_moments_of_maxwellian():
    grids = make_grids(8, 32, V=6.0)
    mac = moments(maxwellian(grids, 1.0), grids)
    assert np.max(np.abs(mac.rho - 1.0)) <= 1e-12
    assert np.max(np.abs(mac.m)) <= 1e-15  # odd moment of an even sample grid


def test_moments_of_shifted_maxwellian_match_gaussian_oracle():
    grids = make_grids(8, 32, V=6.0)
    f = maxwellian(grids, 1.0, center=(1.0, 0.0))
    mac = moments(f, grids)
    _, mean1, _ = oracles.truncated_gaussian_moments(32, 6.0, 1.0, center=1.0)
    assert np.max(np.abs(mac.rho - 1.0)) <= 1e-12
    assert np.max(np.abs(mac.m[0] - mean1)) <= 1e-12
    assert np.max(np.abs(mac.m[1])) <= 1e-15
    # the truncation bias of the boundary moment at this center is ~1e-6
    assert abs(mean1 - 1.0) <= 5e-6


def test_moments_two_bump_cancellation():
    grids = make_grids(8, 32, V=6.0)
    b1 = np.exp(-((grids.v.V1 - 2.0) ** 2 + grids.v.V2 ** 2) / 0.5)
    b2 = np.exp(-((grids.v.V1 + 2.0) ** 2 + grids.v.V2 ** 2) / 0.5)
    f = normalize(np.broadcast_to(0.5 * (b1 + b2), grids.shape).copy(), grids)
    mac = moments(f, grids)
    assert np.max(np.abs(mac.rho - 1.0)) <= 1e-12
    assert np.max(np.abs(mac.m)) <= 1e-14


def test_moments_bounds_and_floor():
    grids = small_grids()
    f = random_f(grids, seed=1)
    mac = moments(f, grids)
    total = mass(f, grids)
    assert abs(mac.rho.sum() * grids.x.cell_area - total) <= 1e-12
    assert np.all(np.abs(mac.m) <= mac.rho * grids.v.V + 1e-15)
    assert mac.rho_floor == pytest.approx(RHO_FLOOR_REL * total / grids.x.area)


def test_moments_vacuum_cells_stay_finite():
    grids = small_grids()
    f = random_f(grids, seed=2).copy()
    f[:4] = 0.0  # vacuum half-plane
    mac = moments(f, grids)
    assert np.all(np.isfinite(mac.v_macro))
    assert np.max(np.abs(mac.v_macro[:, :4])) == 0.0


@settings(deadline=None, max_examples=20)
@given(st.integers(0, 10_000))
def test_moments_positive_density(seed):
    grids = small_grids()
    rng = np.random.default_rng(seed)
    f = rng.random(grids.shape) * rng.integers(0, 2, size=grids.shape)
    mac = moments(f, grids)
    assert np.all(mac.rho >= 0.0)


# ---- mollifier ----------------------------------------------------------------


def test_mollify_constant():
    xg = TorusGrid(16)
    g = np.full((16, 16), 3.7)
    assert np.max(np.abs(mollify(g, xg, 0.1) - 3.7)) <= 1e-14


@pytest.mark.parametrize("kvec", [(1, 0), (0, 2), (2, 3)])
def test_mollify_single_mode_multiplier(kvec):
    xg = TorusGrid(16)
    k1, k2 = kvec
    two_pi = 2.0 * np.pi / xg.L
    g = np.cos(two_pi * (k1 * xg.X1 + k2 * xg.X2))
    factor = np.exp(-0.5 * 0.1 ** 2 * two_pi ** 2 * (k1 ** 2 + k2 ** 2))
    assert 0.0 < factor <= 1.0
    assert np.max(np.abs(mollify(g, xg, 0.1) - factor * g)) <= 1e-14


def test_mollify_matches_dense_oracle_and_preserves_mean():
    xg = TorusGrid(16)
    g = smooth_field(xg, seed=5)
    out = mollify(g, xg, 0.12)
    ref = oracles.dense_mollify(g, xg, 0.12)
    assert np.max(np.abs(out - ref)) <= 1e-12
    assert abs(mean_field(out, xg) - mean_field(g, xg)) <= 1e-14


@pytest.mark.parametrize("eps", [0.0, -0.1, 0.26])
def test_mollify_rejects_out_of_range_eps(eps):
    xg = TorusGrid(16)
    with pytest.raises(ValueError):
        mollify(np.zeros((16, 16)), xg, eps)


def test_mollify_preserves_divergence_free():
    xg = TorusGrid(16)
    u = smooth_field(xg, seed=7, ncomp=2)
    uh = leray_project(spectral_velocity(u, xg), xg)
    u = real_velocity(uh, xg)
    ue = mollify(u, xg, 0.1)
    assert spectral_divergence(fft2_coeff(ue, xg), xg) <= 1e-12


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from([0.05, 0.1, 0.25]))
def test_mollify_lp_contraction(seed, eps):
    xg = TorusGrid(16)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(16, 16))
    out = mollify(g, xg, eps)
    for p in (1, 2, np.inf):
        before = np.linalg.norm(g.ravel(), p)
        after = np.linalg.norm(out.ravel(), p)
        assert after <= before * (1.0 + 1e-12)


@settings(deadline=None, max_examples=15)
@given(st.integers(0, 10_000), st.integers(0, 15), st.integers(0, 15))
def test_mollify_commutes_with_grid_shifts(seed, di, dj):
    xg = TorusGrid(16)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(16, 16))
    a = mollify(np.roll(g, (di, dj), axis=(0, 1)), xg, 0.1)
    b = np.roll(mollify(g, xg, 0.1), (di, dj), axis=(0, 1))
    assert np.max(np.abs(a - b)) <= 1e-13


# ---- norms and energies ----------------------------------------------------------


def test_weighted_norm_constant_field():
    xg = TorusGrid(16)
    g = np.stack([np.ones((16, 16)), np.zeros((16, 16))])
    assert weighted_norm_l2(g, xg, weight=np.ones((16, 16))) == pytest.approx(1.0)
    assert weighted_norm_l2(g, xg) == pytest.approx(1.0)
    assert weighted_norm_l2(g, xg, weight=np.zeros((16, 16))) == 0.0


def test_weighted_norm_of_macro_velocity():
    grids = make_grids(8, 32, V=6.0)
    f = maxwellian(grids, 1.0, center=(1.0, 0.0))
    mac = moments(f, grids)
    _, mean1, _ = oracles.truncated_gaussian_moments(32, 6.0, 1.0, center=1.0)
    norm = weighted_norm_l2(mac.v_macro, grids.x, weight=mac.rho)
    assert abs(norm - abs(mean1)) <= 1e-9


def test_kinetic_energy_of_maxwellians():
    grids = make_grids(8, 32, V=6.0)
    _, _, m2c = oracles.truncated_gaussian_moments(32, 6.0, 1.0, center=0.0)
    _, _, m2s = oracles.truncated_gaussian_moments(32, 6.0, 1.0, center=1.0)
    ke0 = kinetic_energy(maxwellian(grids, 1.0), grids)
    ke1 = kinetic_energy(maxwellian(grids, 1.0, center=(1.0, 0.0)), grids)
    assert abs(ke0 - 1.0) <= 1e-6  # n sigma / 2 with n=2, sigma=1
    assert abs(ke0 - m2c) <= 1e-10
    assert abs(ke1 - 1.5) <= 1e-6  # adds |g|^2/2 = 1/2
    assert abs(ke1 - 0.5 * (m2s + m2c)) <= 1e-10


def test_fluid_energy_constant_field():
    xg = TorusGrid(16)
    u = np.stack([np.full((16, 16), 0.3), np.full((16, 16), -0.4)])
    assert fluid_energy(u, xg) == pytest.approx(0.5 * (0.3 ** 2 + 0.4 ** 2), abs=1e-14)


def test_fluid_energy_parseval():
    xg = TorusGrid(32)
    u = smooth_field(xg, seed=9, ncomp=2)
    uh = fft2_coeff(u, xg)
    spectral = 0.5 * xg.area * float((np.abs(uh) ** 2).sum())
    phys = fluid_energy(u, xg)
    assert abs(phys - spectral) <= 1e-12 * max(phys, 1.0)


def test_enstrophy_taylor_green():
    xg = TorusGrid(32)
    u = taylor_green(xg, amplitude=1.0, mode=1)
    # |grad u|^2 of the cellular vortex: a^2 A^2 L^2 with a = 2 pi / L
    assert enstrophy(u, xg) == pytest.approx(4.0 * np.pi ** 2, rel=1e-12)


def test_l1_distance_basic():
    grids = small_grids()
    f = random_f(grids, seed=11)
    g = random_f(grids, seed=12)
    assert l1_distance(f, f, grids) == 0.0
    assert l1_distance(f, g, grids) == pytest.approx(
        float(np.abs(f - g).sum()) * grids.w
    )
