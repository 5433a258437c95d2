"""Problem data: parameters, weights, vortices and the critical set.

The singular sources 4*pi*alpha_j*(delta_{p_j} - 1) are removed by the
Green-function substitution: the smooth weights h_i are multiplied by
hat_h = exp(-4*pi * sum_j alpha_j * G_{p_j}), which vanishes like
d(x, p_j)^{2 alpha_j} near each vortex.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .surface import Field, SurfaceGrid, values_of

EIGHT_PI = 8.0 * np.pi

# default tolerance for membership in the critical parameter set
LAMBDA_TOL = 1e-6 * EIGHT_PI
# continuation paths must keep this margin from the critical set
LAMBDA_MARGIN = 0.05 * EIGHT_PI


@dataclass(frozen=True)
class Vortex:
    p: tuple
    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ConfigurationError(f"vortex multiplicity must be >= 0, got {self.alpha}")


def green_function(grid: SurfaceGrid, p) -> Field:
    """Mean-zero Green function of −Δ with pole at p.

    Satisfies −ΔG = δ_p − 1 exactly in the spectral discretization,
    where δ_p is the band-limited delta at the nearest grid node.
    The pole is snapped to a node (with a warning if it moves).
    """
    idx = grid.nearest_node(p)
    node = grid.node_point(idx)
    if grid.distance(p, node) > 1e-12:
        warnings.warn(f"green_function: pole snapped to nearest node "
                      f"(moved {grid.distance(p, node):.2e})", stacklevel=2)
    delta = np.zeros(grid.shape)
    delta[idx] = 1.0 / grid.weights[idx]
    g = grid.inv_neg_laplacian(grid.project_mean_zero(delta))
    return Field(grid, g)


@dataclass
class ProblemData:
    """Immutable bundle of everything defining one mean-field problem."""

    grid: SurfaceGrid
    rho: tuple
    h1: np.ndarray = field(repr=False)
    h2: np.ndarray = field(repr=False)
    vortices: tuple = ()
    log_hat_h: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        r1, r2 = self.rho
        if r1 <= 0 or r2 <= 0:
            raise ConfigurationError(f"rho must be positive, got {self.rho}")
        self.h1 = values_of(self.h1, self.grid)
        self.h2 = values_of(self.h2, self.grid)
        if np.min(self.h1) <= 0 or np.min(self.h2) <= 0:
            raise ConfigurationError("weights h1, h2 must be strictly positive")
        if self.log_hat_h is None:
            s = np.zeros(self.grid.shape)
            for v in self.vortices:
                if v.alpha != 0.0:
                    s += v.alpha * green_function(self.grid, v.p).values
            self.log_hat_h = -4.0 * np.pi * s
        self.log_tilde_h1 = np.log(self.h1) + self.log_hat_h
        self.log_tilde_h2 = np.log(self.h2) + self.log_hat_h

    @property
    def hat_h(self):
        return np.exp(self.log_hat_h)

    @property
    def tilde_h1(self):
        return np.exp(self.log_tilde_h1)

    @property
    def tilde_h2(self):
        return np.exp(self.log_tilde_h2)

    @property
    def alphas(self):
        return tuple(v.alpha for v in self.vortices)

    def with_rho(self, rho):
        return replace(self, rho=tuple(rho), log_hat_h=self.log_hat_h)

    def swapped(self):
        """(rho1,h1) <-> (rho2,h2); the problem is skew-symmetric under this."""
        return ProblemData(self.grid, (self.rho[1], self.rho[0]),
                           self.h2, self.h1, self.vortices, self.log_hat_h)


def desingularize(grid, rho, h1, h2, vortices=()) -> ProblemData:
    """Build ProblemData with the vortex weight hat_h folded into h_i."""
    vortices = tuple(v if isinstance(v, Vortex) else Vortex(tuple(v[0]), float(v[1]))
                     for v in vortices)
    return ProblemData(grid, tuple(float(r) for r in rho), h1, h2, vortices)


def enumerate_sigma(alphas, bound):
    """Blow-up mass values 8*pi*n <= bound, returned as sorted n's.

    Enumerates 8*pi*m + sum_{j in J} 8*pi*(1 + alpha_j) over m >= 0 and
    subsets J of the vortex index set, excluding 0, deduplicated.
    """
    if bound <= 0:
        raise ConfigurationError("bound must be positive")
    alphas = [float(a) for a in alphas]
    nmax = bound / EIGHT_PI
    subset_sums = {0.0}
    for a in alphas:
        subset_sums |= {s + 1.0 + a for s in subset_sums if s + 1.0 + a <= nmax + 1e-12}
    ns = set()
    for s in subset_sums:
        m = 0
        while s + m <= nmax + 1e-12:
            if s + m > 1e-12:
                ns.add(round(s + m, 12))
            m += 1
    return sorted(ns)


@dataclass(frozen=True)
class LambdaMembership:
    status: str          # "in_lambda" | "region" | "unknown"
    k: int | None        # region index when status == "region"
    q: float             # rho1*rho2/(rho1+rho2)
    nearest_n: float     # closest n_k to q/(4*pi)

    @property
    def in_lambda(self):
        return self.status == "in_lambda"


def lambda_membership(rho, alphas=(), tol=LAMBDA_TOL) -> LambdaMembership:
    """Locate (rho1, rho2) relative to the critical set.

    Returns in_lambda when rho1*rho2/(rho1+rho2) hits 4*pi*n_k within
    tol; otherwise the largest k with rho_i > 8*k*pi and mean rho
    below 8*(k+1)*pi, or unknown when no such k exists.  Boundary
    cases of the open inequalities are reported as unknown.
    """
    r1, r2 = rho
    if r1 <= 0 or r2 <= 0:
        raise ConfigurationError(f"rho must be positive, got {rho}")
    q = r1 * r2 / (r1 + r2)
    ns = enumerate_sigma(alphas, 2.0 * q + EIGHT_PI)
    nearest = min(ns, key=lambda n: abs(q - 4.0 * np.pi * n)) if ns else 1.0
    if abs(q - 4.0 * np.pi * nearest) <= tol:
        return LambdaMembership("in_lambda", None, q, nearest)
    mean = 0.5 * (r1 + r2)
    best = None
    k = 0
    while True:
        if min(r1, r2) > EIGHT_PI * k and mean < EIGHT_PI * (k + 1):
            best = k
        if EIGHT_PI * k >= min(r1, r2):
            break
        k += 1
    if best is None:
        return LambdaMembership("unknown", None, q, nearest)
    return LambdaMembership("region", best, q, nearest)


def lambda_distance(rho, alphas=()):
    """Distance of q(rho) = rho1*rho2/(rho1+rho2) to the nearest 4*pi*n_k."""
    r1, r2 = rho
    q = r1 * r2 / (r1 + r2)
    ns = enumerate_sigma(alphas, 2.0 * q + EIGHT_PI)
    return min(abs(q - 4.0 * np.pi * n) for n in ns)
