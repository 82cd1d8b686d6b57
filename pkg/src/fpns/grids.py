"""Uniform grids for the periodic spatial torus and the truncated velocity box.

Space is the flat torus [0, L)^2 sampled at nodes x_i = i*hx.  On a periodic
domain the left-endpoint rule coincides with the trapezoid/midpoint rule, so
plain sums times hx^2 integrate resolved trigonometric polynomials exactly.

Velocity space is the square box [-V, V]^2 with cell-centered nodes
v_k = -V + (k + 1/2)*hv and reflecting (no-flux) walls at |v_i| = V.  The box
is symmetric about the origin so first moments of even densities vanish
exactly at the quadrature level.
"""

import numpy as np


class TorusGrid:
    """Nx x Nx periodic grid on [0, L)^2."""

    def __init__(self, Nx, L=1.0):
        Nx = int(Nx)
        if Nx < 8 or Nx % 2 != 0:
            raise ValueError(f"Nx must be even and >= 8, got {Nx}")
        if not L > 0:
            raise ValueError(f"L must be positive, got {L}")
        self.Nx = Nx
        self.L = float(L)
        self.hx = self.L / Nx
        self.x = np.arange(Nx) * self.hx
        # wavenumbers in physical units (radians per length)
        self.k = 2.0 * np.pi * np.fft.fftfreq(Nx, d=self.hx)
        self.X1, self.X2 = np.meshgrid(self.x, self.x, indexing="ij")
        self.K1, self.K2 = np.meshgrid(self.k, self.k, indexing="ij")
        self.k_sq = self.K1 ** 2 + self.K2 ** 2

    @property
    def area(self):
        return self.L * self.L

    @property
    def cell_area(self):
        return self.hx * self.hx

    def min_image(self):
        """Signed coordinate differences to the origin, minimal-image convention.

        Returns (D1, D2) with entries in [-L/2, L/2); used to sample radial
        kernels on the torus.
        """
        d = np.where(self.x >= self.L / 2, self.x - self.L, self.x)
        return np.meshgrid(d, d, indexing="ij")

    def __eq__(self, other):
        return (
            isinstance(other, TorusGrid)
            and self.Nx == other.Nx
            and self.L == other.L
        )

    def __repr__(self):
        return f"TorusGrid(Nx={self.Nx}, L={self.L})"


class VelocityGrid:
    """Nv x Nv cell-centered grid on the box [-V, V]^2."""

    def __init__(self, Nv, V):
        Nv = int(Nv)
        if Nv < 16 or Nv % 2 != 0:
            raise ValueError(f"Nv must be even and >= 16, got {Nv}")
        if not V > 0:
            raise ValueError(f"V must be positive, got {V}")
        self.Nv = Nv
        self.V = float(V)
        self.hv = 2.0 * self.V / Nv
        self.v = -self.V + (np.arange(Nv) + 0.5) * self.hv
        self.faces = -self.V + np.arange(Nv + 1) * self.hv
        self.V1, self.V2 = np.meshgrid(self.v, self.v, indexing="ij")
        self.speed_sq = self.V1 ** 2 + self.V2 ** 2

    def __eq__(self, other):
        return (
            isinstance(other, VelocityGrid)
            and self.Nv == other.Nv
            and self.V == other.V
        )

    def __repr__(self):
        return f"VelocityGrid(Nv={self.Nv}, V={self.V})"


def default_vmax(sigma):
    """Default velocity-box half width: six thermal standard deviations."""
    return 6.0 * np.sqrt(sigma)


class Grids:
    """Bundle of one spatial and one velocity grid."""

    def __init__(self, xgrid, vgrid):
        self.x = xgrid
        self.v = vgrid
        # combined phase-space quadrature weight
        self.w = xgrid.cell_area * vgrid.hv ** 2

    @property
    def shape(self):
        return (self.x.Nx, self.x.Nx, self.v.Nv, self.v.Nv)

    def __eq__(self, other):
        return isinstance(other, Grids) and self.x == other.x and self.v == other.v

    def __repr__(self):
        return f"Grids({self.x!r}, {self.v!r})"


def make_grids(Nx, Nv, L=1.0, V=None, sigma=1.0):
    """Convenience constructor; V defaults to 6*sqrt(sigma)."""
    if V is None:
        V = default_vmax(sigma)
    return Grids(TorusGrid(Nx, L), VelocityGrid(Nv, V))
