"""Pseudo-spectral incompressible Navier-Stokes on the torus with drag forcing.

State convention: a spectral velocity is the complex array uh of shape
(2, Nx, Nx) holding normalized Fourier coefficients, u(x) = sum_k uh_k e^{ikx}
(see fields.fft2_coeff).  All retained modes live on the square 2/3-rule band
|m1|, |m2| <= Nx//3; leray_project applies the band mask and the mode-wise
projection I - k k^T/|k|^2 (k = 0 untouched), so its output is divergence
free and alias-safe.

Time stepping is an integrating-factor Heun step: the viscous factor
E = exp(-nu |k|^2 dt) is exact, the dealiased advection and the (frozen)
forcing are second order.  Quadratic products are formed in physical space
from band-limited fields, so their retained modes are alias-free and the
spatial mean of (u.grad)u vanishes identically for divergence-free input;
the mean fluid momentum therefore moves only by the mean of the forcing.

The Brinkman drag F = gamma * mollify(m - rho u_eps, eps) uses the same
spectral mollifier multiplier as u_eps itself, which makes the discrete drag
pairing exactly symmetric in the energy budget.
"""

import numpy as np

from .fields import fft2_coeff, ifft2_coeff, moments, mollify
from .kinetic import StepSizeError


def dealias_mask(xgrid):
    """Square 2/3-rule mask on integer modes, |m| <= Nx//3 per axis."""
    m = np.rint(xgrid.k * xgrid.L / (2.0 * np.pi)).astype(int)
    keep = np.abs(m) <= xgrid.Nx // 3
    return keep[:, None] & keep[None, :]


def leray_project(uh, xgrid):
    """Band mask plus mode-wise divergence removal; k = 0 left untouched."""
    out = uh * dealias_mask(xgrid)
    ksq = xgrid.k_sq.copy()
    ksq[0, 0] = 1.0
    dot = (xgrid.K1 * out[0] + xgrid.K2 * out[1]) / ksq
    out[0] -= xgrid.K1 * dot
    out[1] -= xgrid.K2 * dot
    return out


def spectral_velocity(u, xgrid):
    """Normalized coefficients of a real velocity field."""
    return fft2_coeff(np.asarray(u, dtype=float), xgrid)


def real_velocity(uh, xgrid):
    return ifft2_coeff(uh, xgrid)


def brinkman_force(f, u, eps, gamma, grids, macro=None):
    """Locally averaged drag density gamma * ((v - u_eps) f)_eps integrated in v."""
    if macro is None:
        macro = moments(f, grids)
    u_eps = mollify(u, grids.x, eps)
    return gamma * mollify(macro.m - macro.rho * u_eps, grids.x, eps)


def _nonlinear(uh, xgrid):
    """Dealiased -(u.grad)u of a banded spectral velocity, as coefficients."""
    u = ifft2_coeff(uh, xgrid)
    d1 = ifft2_coeff(1j * xgrid.K1 * uh, xgrid)
    d2 = ifft2_coeff(1j * xgrid.K2 * uh, xgrid)
    return fft2_coeff(-(u[0] * d1 + u[1] * d2), xgrid)


def ns_step(uh, F, nu, dt, xgrid):
    """Integrating-factor Heun step; F is a real forcing field frozen over dt."""
    u = ifft2_coeff(uh, xgrid)
    umax = np.abs(u).max()
    if umax * dt / xgrid.hx > 1.0 + 1e-12:
        raise StepSizeError(
            f"advective CFL violated: max|u| dt/hx = {umax * dt / xgrid.hx:.3f} > 1"
        )
    Fh = 0.0 if F is None else fft2_coeff(np.asarray(F, dtype=float), xgrid)
    E = np.exp(-nu * xgrid.k_sq * dt)
    g0 = leray_project(_nonlinear(uh, xgrid) + Fh, xgrid)
    pred = E * (uh + dt * g0)
    out = E * uh + 0.5 * dt * (E * g0 + leray_project(_nonlinear(pred, xgrid) + Fh, xgrid))
    return leray_project(out, xgrid)


def taylor_green(xgrid, amplitude=1.0, mode=1):
    """Divergence-free cellular vortex; decays by exp(-2 nu (2 pi m/L)^2 t)."""
    a = 2.0 * np.pi * mode / xgrid.L
    u1 = amplitude * np.sin(a * xgrid.X1) * np.cos(a * xgrid.X2)
    u2 = -amplitude * np.cos(a * xgrid.X1) * np.sin(a * xgrid.X2)
    return np.stack([u1, u2])
