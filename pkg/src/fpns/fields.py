"""Phase-space and fluid field primitives: moments, mollifier, norms, energies.

The kinetic density f lives on (x1, x2, v1, v2) arrays of shape
(Nx, Nx, Nv, Nv).  Macroscopic moments are velocity-box sums,

    rho(x) = sum_v f hv^2,   m(x) = sum_v v f hv^2,   v_macro = m / rho,

with rho floored at 1e-14 * (mass / L^2) before the division.  The spatial
mollifier is a Fourier multiplier exp(-(eps*|k|)^2 / 2), a periodized heat
kernel: it preserves means and divergence-free structure exactly and commutes
with grid translations.
"""

import numpy as np

RHO_FLOOR_REL = 1e-14


# ---- kinetic density -------------------------------------------------------


def mass(f, grids):
    """Total phase-space mass sum(f) * hx^2 * hv^2."""
    return float(f.sum() * grids.w)


def normalize(f, grids):
    """Rescale f to unit mass."""
    m = mass(f, grids)
    if not m > 0:
        raise ValueError("cannot normalize a field with nonpositive mass")
    return f / m


class MacroFields:
    """Density rho, momentum m, and macroscopic velocity v_macro = m / rho."""

    __slots__ = ("rho", "m", "v_macro", "rho_floor")

    def __init__(self, rho, m, v_macro, rho_floor):
        self.rho = rho
        self.m = m
        self.v_macro = v_macro
        self.rho_floor = rho_floor


def moments(f, grids):
    """Velocity moments of f: returns MacroFields.

    rho >= 0 and |m| <= rho * V hold exactly because every v node satisfies
    |v_i| <= V.
    """
    wv = grids.v.hv ** 2
    rho = f.sum(axis=(2, 3)) * wv
    m1 = np.einsum("ijkl,k->ij", f, grids.v.v) * wv
    m2 = np.einsum("ijkl,l->ij", f, grids.v.v) * wv
    m = np.stack([m1, m2])
    total = float(rho.sum() * grids.x.cell_area)
    rho_floor = RHO_FLOOR_REL * total / grids.x.area
    v_macro = m / np.maximum(rho, rho_floor)
    return MacroFields(rho, m, v_macro, rho_floor)


def maxwellian(grids, sigma, center=(0.0, 0.0), normalized=True):
    """Grid Maxwellian centered at `center` with temperature sigma.

    The analytic normalization is 1 / (|Omega| * 2*pi*sigma); with
    `normalized=True` the discrete mass is rescaled to exactly 1, which is
    what the solver's equilibrium arguments use.
    """
    c1, c2 = center
    q = ((grids.v.V1 - c1) ** 2 + (grids.v.V2 - c2) ** 2) / (2.0 * sigma)
    g = np.exp(-q) / (grids.x.area * 2.0 * np.pi * sigma)
    f = np.broadcast_to(g, grids.shape).copy()
    if normalized:
        f = normalize(f, grids)
    return f


def kinetic_energy(f, grids):
    """(1/2) * integral |v|^2 f dx dv."""
    return float(0.5 * np.einsum("ijkl,kl->", f, grids.v.speed_sq) * grids.w)


# ---- spatial fields --------------------------------------------------------


def mollify(g, xgrid, eps):
    """Apply the Gaussian spectral mollifier along the last two axes.

    Multiplier exp(-(eps|k|)^2/2).  eps must lie in (0, L/4].
    """
    if not 0.0 < eps <= xgrid.L / 4.0:
        raise ValueError(f"eps must lie in (0, L/4], got {eps}")
    mult = np.exp(-0.5 * (eps ** 2) * xgrid.k_sq)
    gh = np.fft.fft2(g, axes=(-2, -1))
    return np.fft.ifft2(gh * mult, axes=(-2, -1)).real


def mean_field(g, xgrid):
    """Spatial mean over the torus; vector fields average componentwise."""
    return g.mean(axis=(-2, -1))


def weighted_norm_l2(g, xgrid, weight=None):
    """sqrt( sum |g|^2 * weight * hx^2 ), components of g square-summed."""
    q = np.asarray(g) ** 2
    while q.ndim > 2:
        q = q.sum(axis=0)
    if weight is not None:
        q = q * weight
    return float(np.sqrt(q.sum() * xgrid.cell_area))


def fluid_energy(u, xgrid):
    """(1/2) * integral |u|^2 dx."""
    return float(0.5 * (u ** 2).sum() * xgrid.cell_area)


def l1_distance(f, g, grids):
    """L1 phase-space distance sum |f - g| hx^2 hv^2."""
    return float(np.abs(f - g).sum() * grids.w)


# ---- spectral helpers ------------------------------------------------------


def fft2_coeff(u, xgrid):
    """Normalized Fourier coefficients: u(x) = sum_k uh_k exp(i k.x)."""
    return np.fft.fft2(u, axes=(-2, -1)) / (xgrid.Nx ** 2)


def ifft2_coeff(uh, xgrid):
    """Inverse of fft2_coeff, returning the real field."""
    return np.fft.ifft2(uh * (xgrid.Nx ** 2), axes=(-2, -1)).real


def spectral_divergence(uh, xgrid):
    """Relative spectral divergence of normalized coefficients uh (2,Nx,Nx)."""
    div = xgrid.K1 * uh[0] + xgrid.K2 * uh[1]
    num = np.sqrt((np.abs(div) ** 2).sum())
    den = np.sqrt((xgrid.k_sq * (np.abs(uh) ** 2).sum(axis=0)).sum())
    return float(num / (den + 1e-300))


def enstrophy(u, xgrid):
    """|grad u|_2^2 by Parseval (exact for trigonometric interpolants)."""
    uh = fft2_coeff(u, xgrid)
    return float(xgrid.area * (xgrid.k_sq * (np.abs(uh) ** 2).sum(axis=0)).sum())
