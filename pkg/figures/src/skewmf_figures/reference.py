"""Reference constants recomputed from the model, not read from data.

The critical parameter set is the hyperbola family
rho1*rho2/(rho1+rho2) = 4*pi*n where 4*pi*n ranges over finite sums
8*pi*m + sum_{j in J} 8*pi*(1+alpha_j); bubble energies grow like
16*k*pi*log(lambda) (half Dirichlet) and 2*log(lambda) (log conformal
mass); an l-bubble family saturates the exponential-integral inequality
at 1/(8*l*pi).  Everything here is derived again from those formulas so
a transcription bug in the solver's tables cannot silently propagate
into the figures.
"""

from __future__ import annotations

import itertools

import numpy as np


def critical_n_values(alphas=(), bound_over_4pi=40):
    """Admissible n with rho1*rho2/(rho1+rho2) = 4*pi*n critical:
    n = m + sum_{j in J} (1 + alpha_j) > 0 over m >= 0 and vortex
    subsets J, with n <= bound_over_4pi.  Without vortices these are
    the positive integers, so the first curve runs through (8pi, 8pi)."""
    ns = set()
    for subset_size in range(len(alphas) + 1):
        for J in itertools.combinations(range(len(alphas)), subset_size):
            base = sum(1.0 + alphas[j] for j in J)
            m = 0
            while base + m <= bound_over_4pi + 1e-12:
                n = base + m
                if n > 0:
                    ns.add(round(n, 12))
                m += 1
    return sorted(ns)


def hyperbola(n, rho1):
    """rho2 on the curve rho1*rho2/(rho1+rho2) = 4*pi*n, valid for
    rho1 > 4*pi*n (vertical asymptote at rho1 = 4*pi*n)."""
    c = 4.0 * np.pi * n
    rho1 = np.asarray(rho1, dtype=float)
    out = np.full_like(rho1, np.nan)
    ok = rho1 > c
    out[ok] = c * rho1[ok] / (rho1[ok] - c)
    return out


def slope_references(k):
    """(half-Dirichlet slope, full Dirichlet slope, log-mass slope) of a
    k-bubble family in log(lambda)."""
    return 16.0 * k * np.pi, 32.0 * k * np.pi, 2.0


def mt_reference(l):
    """Saturated ratio 2*log-mass / Dirichlet for an l-bubble family."""
    return 1.0 / (8.0 * l * np.pi)


def fit_slope(x_log, y):
    """Least-squares slope of y against log-scale abscissa (the same
    plain polyfit the producer uses, so annotated numbers agree exactly)."""
    return float(np.polyfit(np.log(np.asarray(x_log, dtype=float)),
                            np.asarray(y, dtype=float), 1)[0])
