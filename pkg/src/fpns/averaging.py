"""Environmental averaging models: strengths, local means, kernels, gap checks.

A model is the pair (s_rho, [.]_rho) of a communication strength and a
density-weighted averaging operator.  Both are driven by the product form
P[g] = s_rho * [g]_rho, which is linear in the momentum w = g*rho:

    CS    s_rho = rho*phi           P[g] = w*phi
    MT    s_rho = 1                 P[g] = (w*phi) / (rho*phi)
    Beta  s_rho = (rho*phi)^b       P[g] = (w*phi) * (rho*phi)^(b-1)
    Phi   s_rho = 1                 P[g] = ((w*phi)/(rho*phi)) * phi
    Seg   s_rho = 1                 P[g] = sum_l g_l int(g_l w) / int(g_l rho)

`*` is periodic convolution.  The default kernel is the Bochner square
phi = psi (*) psi of a smooth radial bump psi of radius r0/2, so phi >= 0,
supp phi = B(0, r0), int phi = 1, and the Fourier symbol of phi is a
nonnegative square; the latter makes the CS quadratic form positive
semidefinite, which the ball-positivity and spectral-gap checks rely on.
The Seg partition is a smooth positive von-Mises product partition of unity
on an L_part x L_part lattice of torus cells.
"""

import numpy as np
from dataclasses import dataclass

VARIANTS = ("CS", "MT", "Beta", "Phi", "Seg")
CONSERVATIVE_VARIANTS = ("CS", "Phi", "Seg")
KERNEL_PROFILES = ("bump", "indicator", "global")

CONV_FLOOR = 1e-12        # floor on rho*phi before division
SUPPORT_CUTOFF = 1e-14    # relative cutoff defining the support of kappa
THIN_FLOCK_CUTOFF = 1e-6  # minimal global thickness admissible for gap work
KAPPA_PARTITION = 2.0     # concentration of the Seg partition weights
DENSE_NX_MAX = 48         # dense kernel matrices only below this resolution
EIG_SHIFT = 10.0          # moves the constrained direction out of the way


class ThinFlockError(RuntimeError):
    """Density too thin (vacuous regions) for the requested computation."""


class DegenerateModelError(RuntimeError):
    """Model weights degenerate: empty support or a dead partition cell."""


@dataclass(frozen=True)
class ModelSpec:
    """Averaging-model configuration.

    variant        one of CS, MT, Beta, Phi, Seg
    r0             kernel support radius (length units)
    beta_exp       exponent b >= 0 of the Beta model
    L_part         Seg partition is L_part x L_part cells
    kernel_profile bump (Bochner square), indicator (autocorrelation), global
    """

    variant: str = "CS"
    r0: float = 0.25
    beta_exp: float = 1.0
    L_part: int = 4
    kernel_profile: str = "bump"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick from {VARIANTS}")
        if self.kernel_profile not in KERNEL_PROFILES:
            raise ValueError(
                f"unknown kernel_profile {self.kernel_profile!r}; pick from {KERNEL_PROFILES}"
            )
        if not self.beta_exp >= 0:
            raise ValueError(f"beta_exp must be >= 0, got {self.beta_exp}")
        if int(self.L_part) < 1:
            raise ValueError(f"L_part must be >= 1, got {self.L_part}")


# ---- kernels ----------------------------------------------------------------


def _radial_bump(d_sq, radius):
    """exp(-1/(1-(d/r)^2)) inside d < r, zero outside."""
    q = d_sq / radius ** 2
    out = np.zeros_like(q)
    inside = q < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - q[inside]))
    return out


def _normalized_sample(values, xgrid, what):
    total = values.sum() * xgrid.cell_area
    if not total > 0:
        raise ValueError(f"{what} radius is below the grid resolution")
    return values / total


def build_kernel(xgrid, r0, profile):
    """Return (phi, mult): kernel values and its convolution multiplier.

    mult is defined so that g*phi = ifft2(fft2(g) * mult).real.  The bump
    profile is the Bochner square psi (*) psi of a normalized radial bump of
    radius r0/2, so mult = (fft2(psi).real * hx^2)^2 >= 0 exactly.  The
    indicator profile is the normalized raw indicator of radius r0 (not a
    Bochner square; its symbol has negative lobes, on purpose).
    """
    if profile == "global":
        phi = np.full((xgrid.Nx, xgrid.Nx), 1.0 / xgrid.area)
        mult = np.fft.fft2(phi).real * xgrid.cell_area
        return phi, mult
    if not 0.0 < r0 < xgrid.L / 2.0:
        raise ValueError(f"r0 must lie in (0, L/2), got {r0}")
    d1, d2 = xgrid.min_image()
    d_sq = d1 ** 2 + d2 ** 2
    if profile == "indicator":
        phi = _normalized_sample((d_sq <= r0 ** 2) * 1.0, xgrid, "kernel")
        mult = np.fft.fft2(phi).real * xgrid.cell_area
        return phi, mult
    psi = _normalized_sample(_radial_bump(d_sq, r0 / 2.0), xgrid, "kernel")
    mult = (np.fft.fft2(psi).real * xgrid.cell_area) ** 2
    phi = np.fft.ifft2(mult).real / xgrid.cell_area
    return phi, mult


def make_partition(xgrid, L_part):
    """Smooth positive partition of unity on an L_part x L_part torus lattice."""
    q = int(L_part)
    centers = xgrid.L * np.arange(q) / q
    two_pi = 2.0 * np.pi / xgrid.L
    w = np.empty((q * q, xgrid.Nx, xgrid.Nx))
    for i, a in enumerate(centers):
        for j, b in enumerate(centers):
            w[i * q + j] = np.exp(
                KAPPA_PARTITION
                * (np.cos(two_pi * (xgrid.X1 - a)) + np.cos(two_pi * (xgrid.X2 - b)))
            )
    return w / w.sum(axis=0)


def thickness(rho, xgrid, r0):
    """Local thickness: rho convolved with a mass-1 radial bump of radius r0."""
    if not 0.0 < r0 < xgrid.L / 2.0:
        raise ValueError(f"r0 must lie in (0, L/2), got {r0}")
    d1, d2 = xgrid.min_image()
    chi = _normalized_sample(_radial_bump(d1 ** 2 + d2 ** 2, r0), xgrid, "thickness")
    mult = np.fft.fft2(chi) * xgrid.cell_area
    return np.fft.ifft2(np.fft.fft2(rho) * mult).real


def global_thickness(rho, xgrid, r0):
    """min over the grid of the local thickness."""
    return float(thickness(rho, xgrid, r0).min())


def thickness_family(xgrid, levels=(1.0, 0.5, 0.25, 0.1, 0.05)):
    """Unit-mass densities of decreasing global thickness.

    Two clusters at antipodal centers over a uniform background whose level
    is lowered along the family.  Thinning the bridge between the clusters
    lowers the thickness and slows the exchange of momentum between them,
    so the spectral gap shrinks along the family.
    """

    def cluster(cx, cy):
        w = np.exp(
            4.0
            * (
                np.cos(2.0 * np.pi * (xgrid.X1 - cx) / xgrid.L)
                + np.cos(2.0 * np.pi * (xgrid.X2 - cy) / xgrid.L)
                - 2.0
            )
        )
        return w / (w.sum() * xgrid.cell_area)

    pair = 0.5 * (cluster(0.25 * xgrid.L, 0.25 * xgrid.L) + cluster(0.75 * xgrid.L, 0.75 * xgrid.L))
    uniform = 1.0 / xgrid.area
    out = []
    for s in levels:
        rho = s * uniform + (1.0 - s) * pair
        out.append(rho / (rho.sum() * xgrid.cell_area))
    return out


# ---- model ------------------------------------------------------------------


class Model:
    """An averaging model bound to a spatial grid, kernels precomputed."""

    def __init__(self, spec, xgrid):
        if not isinstance(spec, ModelSpec):
            spec = ModelSpec(**spec)
        self.spec = spec
        self.xgrid = xgrid
        self.phi, self._mult = build_kernel(xgrid, spec.r0, spec.kernel_profile)
        self.partition = (
            make_partition(xgrid, spec.L_part) if spec.variant == "Seg" else None
        )

    # ---- building blocks ----

    def conv(self, g):
        """Periodic convolution with phi along the last two axes."""
        gh = np.fft.fft2(g, axes=(-2, -1))
        return np.fft.ifft2(gh * self._mult, axes=(-2, -1)).real

    def _conv_rho_floored(self, rho):
        return np.maximum(self.conv(rho), CONV_FLOOR)

    def _seg_masses(self, rho):
        ml = (self.partition * rho).sum(axis=(-2, -1)) * self.xgrid.cell_area
        if np.any(ml <= 0.0):
            raise DegenerateModelError(
                "a partition cell carries no mass; Seg average undefined"
            )
        return ml

    def _seg_project(self, w, rho):
        ml = self._seg_masses(rho)
        wl = (self.partition * w[..., None, :, :]).sum(axis=(-2, -1)) * self.xgrid.cell_area
        return np.einsum("...l,lab->...ab", wl / ml, self.partition)

    # ---- primary operations ----

    def strength(self, rho):
        """Communication strength s_rho as a field on the torus."""
        v = self.spec.variant
        if v == "CS":
            return self.conv(rho)
        if v == "Beta":
            return self.conv(rho) ** self.spec.beta_exp
        return np.ones_like(rho)

    def average(self, rho, g):
        """Environmental average [g]_rho; g may carry leading component axes."""
        g = np.asarray(g, dtype=float)
        v = self.spec.variant
        if v == "Seg":
            return self._seg_project(g * rho, rho)
        local = self.conv(g * rho) / self._conv_rho_floored(rho)
        if v == "Phi":
            return self.conv(local)
        return local

    def average_flux(self, w, rho):
        """Product form s_rho * [g]_rho evaluated from the momentum w = g*rho."""
        w = np.asarray(w, dtype=float)
        v = self.spec.variant
        if v == "CS":
            return self.conv(w)
        if v == "MT":
            return self.conv(w) / self._conv_rho_floored(rho)
        if v == "Beta":
            return self.conv(w) * self._conv_rho_floored(rho) ** (self.spec.beta_exp - 1.0)
        if v == "Phi":
            return self.conv(self.conv(w) / self._conv_rho_floored(rho))
        return self._seg_project(w, rho)

    def _adjoint_density(self, rho):
        """Column action sum_i rho_i Phi[i,j] hx^2, computed spectrally."""
        v = self.spec.variant
        if v == "CS":
            return self.conv(rho)
        if v == "MT":
            return self.conv(rho / self._conv_rho_floored(rho))
        if v == "Beta":
            return self.conv(rho * self._conv_rho_floored(rho) ** (self.spec.beta_exp - 1.0))
        if v == "Phi":
            return self.conv(self.conv(rho) / self._conv_rho_floored(rho))
        ml = self._seg_masses(rho)
        return np.einsum("l,lab->ab", ml / ml, self.partition)

    # ---- dense kernel matrix ----

    def kernel_matrix(self, rho):
        """Dense reproducing-kernel matrix Phi[i,j] on the flattened grid.

        Convention: (s_rho [g]_rho)(x_i) = sum_j Phi[i,j] g_j rho_j hx^2.
        """
        N = self.xgrid.Nx
        if N > DENSE_NX_MAX:
            raise ValueError(f"dense kernel matrix limited to Nx <= {DENSE_NX_MAX}")
        v = self.spec.variant
        if v == "Seg":
            ml = self._seg_masses(rho)
            G = self.partition.reshape(len(ml), N * N)
            return (G.T / ml) @ G
        ii = np.arange(N)
        D = (ii[:, None] - ii[None, :]) % N
        C = self.phi[D[:, None, :, None], D[None, :, None, :]].reshape(N * N, N * N)
        if v == "CS":
            return C
        conv_rho = self.conv(rho)
        if conv_rho.min() < CONV_FLOOR:
            raise ThinFlockError(
                "rho*phi falls below the division floor; flock too thin"
            )
        c = conv_rho.reshape(-1)
        if v == "MT":
            return C / c[:, None]
        if v == "Beta":
            return C * (c ** (self.spec.beta_exp - 1.0))[:, None]
        return (C * (self.xgrid.cell_area / c)[None, :]) @ C

    # ---- thickness ----

    def thickness(self, rho):
        return thickness(rho, self.xgrid, self.spec.r0)

    def global_thickness(self, rho):
        return global_thickness(rho, self.xgrid, self.spec.r0)

    # ---- property checks ----

    def check_stochasticity(self, rho):
        """sup |[1]_rho - 1| in strength units: max |P[1] - s_rho|."""
        return float(np.abs(self.average_flux(rho, rho) - self.strength(rho)).max())

    def check_conservative(self, rho):
        """sup_j |sum_i rho_i Phi[i,j] hx^2 - s_rho(x_j)|."""
        return float(np.abs(self._adjoint_density(rho) - self.strength(rho)).max())

    def _kappa(self, rho):
        return (rho * self.strength(rho)).reshape(-1) * self.xgrid.cell_area

    def check_contractive(self, rho, p, n_samples=32, seed=0):
        """Worst ratio of |[v]_rho| over |v| in L^p(kappa) on random fields.

        Returns (ok, worst_ratio) with ok meaning worst_ratio <= 1 + 1e-10.
        """
        if p not in (1, 2, np.inf, "inf"):
            raise ValueError(f"p must be 1, 2, or inf, got {p}")
        kappa = self._kappa(rho).reshape(rho.shape)
        support = kappa > SUPPORT_CUTOFF * kappa.max()
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n_samples):
            g = rng.standard_normal(rho.shape)
            ag = self.average(rho, g)
            if p == 1:
                num = (np.abs(ag) * kappa).sum()
                den = (np.abs(g) * kappa).sum()
            elif p == 2:
                num = np.sqrt((ag ** 2 * kappa).sum())
                den = np.sqrt((g ** 2 * kappa).sum())
            else:
                num = np.abs(ag[support]).max()
                den = np.abs(g[support]).max()
            worst = max(worst, float(num / den))
        return worst <= 1.0 + 1e-10, worst

    def _tilde_operator(self, rho):
        """Similarity transform sqrt(K) M 1/sqrt(K) of the averaging operator.

        M[i,j] = Phi[i,j] rho_j hx^2 / s_i is the matrix of [.]_rho and
        K = diag(kappa); rows and columns are restricted to the support of
        kappa.  Returns (A_tilde, kappa_s, rho_s * hx^2 restricted).
        """
        kappa = self._kappa(rho)
        if not kappa.max() > 0:
            raise DegenerateModelError("kappa vanishes identically")
        support = kappa > SUPPORT_CUTOFF * kappa.max()
        Phi = self.kernel_matrix(rho)[np.ix_(support, support)]
        s = self.strength(rho).reshape(-1)[support]
        rw = rho.reshape(-1)[support] * self.xgrid.cell_area
        ks = kappa[support]
        root = np.sqrt(ks)
        A = (root / s)[:, None] * Phi * (rw / root)[None, :]
        return A, ks, rw

    def check_ball_positive(self, rho):
        """min eigenvalue of sym(A - A*A) on L^2(kappa) is >= -1e-10."""
        return self.ball_positivity_margin(rho) >= -1e-10

    def ball_positivity_margin(self, rho):
        A, _, _ = self._tilde_operator(rho)
        S = 0.5 * (A + A.T) - A.T @ A
        return float(np.linalg.eigvalsh(S).min())

    def spectral_gap(self, rho):
        """Smallest Rayleigh quotient of I - sym(A) over rho-mean-zero fields.

        The rho-orthogonality constraint (fields v with int(v rho) = 0) is
        imposed by shifting the constrained direction up by EIG_SHIFT, then
        taking the smallest eigenvalue of the symmetric pencil.
        """
        if self.global_thickness(rho) < THIN_FLOCK_CUTOFF:
            raise ThinFlockError(
                "global thickness below cutoff; gap constants degenerate"
            )
        A, ks, rw = self._tilde_operator(rho)
        H = np.eye(len(ks)) - 0.5 * (A + A.T)
        z = rw / np.sqrt(ks)
        z = z / np.linalg.norm(z)
        P = np.eye(len(ks)) - np.outer(z, z)
        B = P @ H @ P + EIG_SHIFT * np.outer(z, z)
        return float(max(np.linalg.eigvalsh(B).min(), 0.0))


def make_model(spec, xgrid):
    """Build a Model from a ModelSpec (or a mapping of its fields)."""
    return Model(spec, xgrid)


# ---- convenience wrappers (functional API) ----------------------------------


def strength(model, rho):
    return model.strength(rho)


def average(model, rho, g):
    return model.average(rho, g)


def average_flux(model, w, rho):
    return model.average_flux(w, rho)


def kernel_matrix(model, rho):
    return model.kernel_matrix(rho)


def check_stochasticity(model, rho):
    return model.check_stochasticity(rho)


def check_conservative(model, rho):
    return model.check_conservative(rho)


def check_contractive(model, rho, p, n_samples=32, seed=0):
    return model.check_contractive(rho, p, n_samples=n_samples, seed=seed)


def check_ball_positive(model, rho):
    return model.check_ball_positive(rho)


def spectral_gap(model, rho):
    return model.spectral_gap(rho)
