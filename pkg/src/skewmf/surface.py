"""Spectral discretization of compact surfaces of unit volume.

Two surfaces are supported:

* the flat unit torus [0,1)^2 with a uniform periodic grid and an
  FFT-diagonalized Laplacian,
* the round sphere rescaled to radius 1/sqrt(4*pi) (so the total area
  is 1), on a Gauss-Legendre latitude x uniform longitude grid with a
  spherical-harmonic Laplacian.

All quadrature weights sum to 1, the Laplacian annihilates constants,
and operations that promise mean-zero output re-project to mean zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ContractViolation

SPHERE_RADIUS = 1.0 / np.sqrt(4.0 * np.pi)

# absolute tolerance on the mean of an input that must be mean-zero
MEAN_ZERO_TOL = 1e-8


class SurfaceKind(enum.Enum):
    TORUS = "torus"
    SPHERE = "sphere"


def _normalized_assoc_legendre(lmax, x):
    """Associated Legendre functions, orthonormal on [-1,1].

    Returns a list indexed by order m; entry m is an array of shape
    (lmax - m + 1, len(x)) holding P̄_l^m(x) for l = m..lmax, with
    normalization  ∫_{-1}^{1} P̄_l^m P̄_l'^m dx = δ_{ll'}.
    """
    x = np.asarray(x, dtype=float)
    sx = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    out = []
    pmm = np.full_like(x, np.sqrt(0.5))
    for m in range(lmax + 1):
        rows = [pmm]
        if m + 1 <= lmax:
            p_prev = pmm
            p_cur = x * np.sqrt(2.0 * m + 3.0) * pmm
            rows.append(p_cur)
            for l in range(m + 2, lmax + 1):
                a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1) ** 2 - 1.0))
                p_next = a * (x * p_cur - b * p_prev)
                p_prev, p_cur = p_cur, p_next
                rows.append(p_cur)
        out.append(np.vstack(rows))
        pmm = -np.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * sx * pmm
    return out


class SurfaceGrid:
    """Common interface of the discrete surfaces.

    Immutable after construction; all methods are pure functions of
    their arguments and safe to call from multiple threads.
    """

    kind: SurfaceKind
    shape: tuple
    weights: np.ndarray  # per-node quadrature weights, summing to 1
    spacing: float       # representative geodesic node spacing

    # -- quadrature -------------------------------------------------

    def integrate(self, f):
        """Quadrature of pointwise values; integrate(1) == 1."""
        v = values_of(f, self)
        return float(np.sum(self.weights * v))

    def project_mean_zero(self, v):
        v = np.asarray(v, dtype=float)
        return v - np.sum(self.weights * v)

    def check_mean_zero(self, v, what="field"):
        v = np.asarray(v, dtype=float)
        m = abs(float(np.sum(self.weights * v)))
        scale = 1.0 + float(np.max(np.abs(v), initial=0.0))
        if m > MEAN_ZERO_TOL * scale:
            raise ContractViolation(f"{what} is not mean-zero (mean={m:.3e})")
        return v

    # -- differential operators ------------------------------------

    def neg_laplacian(self, v):
        raise NotImplementedError

    def inv_neg_laplacian(self, v):
        raise NotImplementedError

    def bandlimit(self, v):
        """Projection onto the resolved spectral basis (identity on the torus)."""
        return np.asarray(v, dtype=float)

    def dirichlet(self, u):
        """∫ |∇u|², evaluated spectrally.  u must be mean-zero."""
        v = self.check_mean_zero(values_of(u, self), "dirichlet input")
        return float(np.sum(self.weights * v * self.neg_laplacian(v)))

    def gradient_pairing(self, u, v):
        """∫ ∇u · ∇v for mean-zero u, v."""
        a = self.check_mean_zero(values_of(u, self), "pairing input")
        b = self.check_mean_zero(values_of(v, self), "pairing input")
        return float(np.sum(self.weights * a * self.neg_laplacian(b)))

    def dual_norm(self, g):
        """H^{-1}-type norm sqrt(∫ g (−Δ)^{-1} g) of a mean-zero residual g."""
        v = self.project_mean_zero(np.asarray(g, dtype=float))
        return float(np.sqrt(max(0.0, np.sum(self.weights * v * self.inv_neg_laplacian(v)))))

    # -- geometry ---------------------------------------------------

    def distance(self, p, q):
        raise NotImplementedError

    def distance_field(self, p):
        """Geodesic distance from point p to every node."""
        raise NotImplementedError

    def node_points(self):
        """Array of node coordinates, shape self.shape + (2,)."""
        raise NotImplementedError

    def nearest_node(self, p):
        """Index (i, j) of the grid node closest to surface point p."""
        d = self.distance_field(p)
        return np.unravel_index(int(np.argmin(d)), self.shape)

    def node_point(self, idx):
        return tuple(self.node_points()[idx])

    @property
    def n_nodes(self):
        return int(np.prod(self.shape))


def _check_resolution(n, name):
    if n < 8 or n % 2 != 0:
        raise ConfigurationError(f"{name} resolution must be even and >= 8, got {n}")


class TorusGrid(SurfaceGrid):
    """Uniform periodic grid on the flat unit torus [0,1)^2."""

    def __init__(self, nx, ny):
        _check_resolution(nx, "torus x")
        _check_resolution(ny, "torus y")
        self.kind = SurfaceKind.TORUS
        self.shape = (nx, ny)
        self.nx, self.ny = nx, ny
        self.weights = np.full((nx, ny), 1.0 / (nx * ny))
        self.spacing = 1.0 / max(nx, ny)
        kx = 2.0 * np.pi * np.fft.fftfreq(nx, d=1.0 / nx)
        ky = 2.0 * np.pi * np.fft.rfftfreq(ny, d=1.0 / ny)
        self._eig = kx[:, None] ** 2 + ky[None, :] ** 2  # of −Δ
        inv = np.zeros_like(self._eig)
        nz = self._eig > 0
        inv[nz] = 1.0 / self._eig[nz]
        self._inv_eig = inv
        ev = np.sort(np.unique(self._eig.ravel()))
        self.lambda1 = float(ev[1])
        self.xs = np.arange(nx) / nx
        self.ys = np.arange(ny) / ny

    def neg_laplacian(self, v):
        v = np.asarray(v, dtype=float)
        return np.fft.irfft2(np.fft.rfft2(v) * self._eig, s=self.shape)

    def inv_neg_laplacian(self, v):
        v = self.check_mean_zero(np.asarray(v, dtype=float), "inverse Laplacian input")
        out = np.fft.irfft2(np.fft.rfft2(v) * self._inv_eig, s=self.shape)
        return self.project_mean_zero(out)

    def spectral_solve(self, v, eig_func):
        """Apply the spectral multiplier eig_func(λ) of −Δ (λ=0 mode passes through)."""
        v = np.asarray(v, dtype=float)
        return np.fft.irfft2(np.fft.rfft2(v) * eig_func(self._eig), s=self.shape)

    def distance(self, p, q):
        dx = abs(p[0] - q[0]) % 1.0
        dy = abs(p[1] - q[1]) % 1.0
        dx = min(dx, 1.0 - dx)
        dy = min(dy, 1.0 - dy)
        return float(np.hypot(dx, dy))

    def distance_field(self, p):
        dx = np.abs(self.xs - p[0]) % 1.0
        dy = np.abs(self.ys - p[1]) % 1.0
        dx = np.minimum(dx, 1.0 - dx)
        dy = np.minimum(dy, 1.0 - dy)
        return np.hypot(dx[:, None], dy[None, :])

    def node_points(self):
        pts = np.empty(self.shape + (2,))
        pts[..., 0] = self.xs[:, None]
        pts[..., 1] = self.ys[None, :]
        return pts


class SphereGrid(SurfaceGrid):
    """Gauss-Legendre x uniform-longitude grid on the sphere of area 1.

    Points are (theta, phi) colatitude/longitude pairs; the metric is
    the round metric of radius 1/sqrt(4*pi).  The Laplacian acts by
    spherical-harmonic analysis/synthesis truncated at degree nlat-1.
    """

    def __init__(self, nlat, nlon):
        _check_resolution(nlat, "sphere latitude")
        _check_resolution(nlon, "sphere longitude")
        self.kind = SurfaceKind.SPHERE
        self.shape = (nlat, nlon)
        self.nlat, self.nlon = nlat, nlon
        self.radius = SPHERE_RADIUS
        xg, wg = np.polynomial.legendre.leggauss(nlat)
        self.cos_theta = xg
        self.theta = np.arccos(xg)
        self.sin_theta = np.sqrt(np.clip(1.0 - xg * xg, 0.0, None))
        self.wlat = wg
        self.phi = 2.0 * np.pi * np.arange(nlon) / nlon
        self.weights = np.outer(wg, np.full(nlon, 2.0 * np.pi / nlon)) * self.radius**2
        self.spacing = np.pi * self.radius / nlat
        self.lmax = nlat - 1
        self.mmax = min(self.lmax, nlon // 2)
        self._plm = _normalized_assoc_legendre(self.lmax, xg)
        l = np.arange(self.lmax + 1)
        self._deg_eig = l * (l + 1) / self.radius**2  # of −Δ per degree
        self.lambda1 = float(self._deg_eig[1])

    # -- transforms -------------------------------------------------

    def analysis(self, v):
        fm = np.fft.rfft(np.asarray(v, dtype=float), axis=1) / self.nlon
        coeffs = []
        for m in range(self.mmax + 1):
            g = self.wlat * fm[:, m]
            coeffs.append(np.sqrt(2.0 * np.pi) * (self._plm[m] @ g))
        return coeffs

    def synthesis(self, coeffs):
        fm = np.zeros((self.nlat, self.nlon // 2 + 1), dtype=complex)
        for m in range(self.mmax + 1):
            fm[:, m] = (coeffs[m] @ self._plm[m]) / np.sqrt(2.0 * np.pi)
        return np.fft.irfft(fm * self.nlon, n=self.nlon, axis=1)

    def _apply_multiplier(self, v, func):
        coeffs = self.analysis(v)
        out = []
        for m in range(self.mmax + 1):
            l = np.arange(m, self.lmax + 1)
            out.append(coeffs[m] * func(self._deg_eig[l]))
        return self.synthesis(out)

    def bandlimit(self, v):
        return self.synthesis(self.analysis(v))

    def neg_laplacian(self, v):
        return self._apply_multiplier(v, lambda e: e)

    def inv_neg_laplacian(self, v):
        v = self.check_mean_zero(np.asarray(v, dtype=float), "inverse Laplacian input")
        with np.errstate(divide="ignore"):
            out = self._apply_multiplier(v, lambda e: np.where(e > 0, 1.0 / np.maximum(e, 1e-300), 0.0))
        return self.project_mean_zero(out)

    def spectral_solve(self, v, eig_func):
        return self._apply_multiplier(v, eig_func)

    # -- geometry ---------------------------------------------------

    def _cos_gamma(self, p, q):
        t1, f1 = p
        t2, f2 = q
        return np.cos(t1) * np.cos(t2) + np.sin(t1) * np.sin(t2) * np.cos(f1 - f2)

    def distance(self, p, q):
        c = np.clip(self._cos_gamma(p, q), -1.0, 1.0)
        return float(self.radius * np.arccos(c))

    def distance_field(self, p):
        t0, f0 = p
        c = (self.cos_theta[:, None] * np.cos(t0)
             + self.sin_theta[:, None] * np.sin(t0) * np.cos(self.phi[None, :] - f0))
        return self.radius * np.arccos(np.clip(c, -1.0, 1.0))

    def node_points(self):
        pts = np.empty(self.shape + (2,))
        pts[..., 0] = self.theta[:, None]
        pts[..., 1] = self.phi[None, :]
        return pts


@dataclass
class Field:
    """Real scalar samples on a SurfaceGrid."""

    grid: SurfaceGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def mean_zero(cls, grid, values):
        return cls(grid, grid.project_mean_zero(values))

    def mean(self):
        return self.grid.integrate(self.values)


def values_of(f, grid=None):
    """Accept a Field or raw values and return the value array."""
    if isinstance(f, Field):
        if grid is not None and f.grid is not grid and f.grid.shape != grid.shape:
            raise ContractViolation("field lives on a different grid")
        return f.values
    v = np.asarray(f, dtype=float)
    if grid is not None and v.shape != grid.shape:
        if v.ndim == 0:  # allow scalars
            return np.full(grid.shape, float(v))
        raise ContractViolation(f"value shape {v.shape} does not match grid {grid.shape}")
    return v


def build_grid(kind, resolution):
    """Construct a SurfaceGrid.

    Parameters
    ----------
    kind : SurfaceKind or str
    resolution : int or (int, int)
        A single n gives n x n on the torus and n latitudes x 2n
        longitudes on the sphere.  Each direction must be even, >= 8.
    """
    if isinstance(kind, str):
        kind = SurfaceKind(kind.lower())
    if isinstance(resolution, (int, np.integer)):
        res = (int(resolution), int(resolution)) if kind is SurfaceKind.TORUS \
            else (int(resolution), 2 * int(resolution))
    else:
        res = (int(resolution[0]), int(resolution[1]))
    if kind is SurfaceKind.TORUS:
        return TorusGrid(*res)
    return SphereGrid(*res)


# module-level operation aliases matching the public surface API

def integrate(grid, f):
    return grid.integrate(f)


def dirichlet(grid, u):
    return grid.dirichlet(u)


def gradient_pairing(grid, u, v):
    return grid.gradient_pairing(u, v)


def laplacian(grid, u):
    return Field(grid, -grid.neg_laplacian(values_of(u, grid)))


def inverse_laplacian(grid, f):
    """Mean-zero u with Δu = f (f must be mean-zero)."""
    return Field(grid, grid.inv_neg_laplacian(-values_of(f, grid)))


def distance(grid, x, y):
    return grid.distance(x, y)
