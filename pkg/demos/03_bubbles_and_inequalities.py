"""Bubble test fields and the inequalities they saturate.

Bubbles concentrate the conformal mass at barycenter atoms as the
scale grows.  Their Dirichlet energy grows like 16*k*pi*log(lambda)
(half of it shown below), the log conformal mass like 2*log(lambda),
and an l-bubble family saturates the exponential-integral inequality
at the improved constant 1/(8*l*pi).
"""

import numpy as np

import skewmf as s

grid = s.build_grid("sphere", 48)
lambdas = [10.0, 14.0, 20.0, 28.0, 40.0]

# --- energy growth fits ----------------------------------------------

for k, atoms in ((1, [(1.0, (np.pi / 2, 0.0))]),
                 (2, [(0.5, (np.pi / 2, 0.0)), (0.5, (np.pi / 2, np.pi))])):
    sigma = s.Barycenter(atoms)
    rep = s.energy_asymptotics(grid, sigma, lambdas, None, ())
    print(f"k = {k}: half-Dirichlet slope {rep.s_dirichlet:8.3f} "
          f"(reference {16 * k * np.pi:8.3f}), "
          f"log-mass slope {rep.s_logint:.3f} (reference 2)")

# --- inequality saturation -------------------------------------------

for l, atoms in ((1, [(1.0, (np.pi / 2, 0.0))]),
                 (2, [(0.5, (np.pi / 2, 0.0)), (0.5, (np.pi / 2, np.pi))])):
    sigma = s.Barycenter(atoms)
    family = [s.bubble_field(grid, s.BubbleParams(lam, sigma)) for lam in lambdas]
    rep = s.mt_check(grid, None, family)
    print(f"l = {l}: ratio at largest scale {rep.ratios[-1]:.5f} "
          f"-> reference 1/(8*{l}*pi) = {1 / (8 * l * np.pi):.5f}")

# --- concentration detection -----------------------------------------

tg = s.build_grid("torus", 64)
pd = s.desingularize(tg, (9 * np.pi, 9 * np.pi),
                     np.ones(tg.shape), np.ones(tg.shape))
atom = (0.5, 0.5)
phi = s.bubble_field(tg, s.BubbleParams(100.0, s.Barycenter([(1.0, atom)])))
res = s.concentration_profile(pd, phi, k=1, r=0.1, eps=0.2)
print(f"\nconcentration of a lambda=100 bubble: found={res.found}, "
      f"center {res.centers[0]}, captured mass {res.captured_mass:.3f}")
