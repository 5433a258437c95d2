"""The critical parameter set and continuation around it.

Solutions are compact exactly away from the hyperbola family
rho1*rho2/(rho1+rho2) = 4*pi*n; this script locates a few parameter
pairs relative to those curves, shows how vortex multiplicities add
curves, and tracks a solution branch along an admissible rho-path.
"""

import numpy as np

import skewmf as s

# --- membership queries ----------------------------------------------

for rho in ((4 * np.pi, 4 * np.pi), (8 * np.pi, 8 * np.pi),
            (9 * np.pi, 9 * np.pi)):
    m = s.lambda_membership(rho)
    print(f"rho = ({rho[0] / np.pi:.0f}pi, {rho[1] / np.pi:.0f}pi): "
          f"{m.status}" + (f", region k = {m.k}" if m.k is not None else ""))

# a fractional vortex multiplicity inserts curves between the integer ones
print("n-values, no vortices:   ", s.enumerate_sigma([], 40 * np.pi))
print("n-values, one alpha=0.5: ", s.enumerate_sigma([0.5], 40 * np.pi))

# --- continuation along a branch -------------------------------------

grid = s.build_grid("torus", 16)
h = 1.0 + 0.5 * np.cos(2 * np.pi * grid.node_points()[..., 0])
pd = s.desingularize(grid, (5 * np.pi, 5 * np.pi), h, h)

path = [(5 * np.pi + 0.3 * np.pi * i, 5 * np.pi) for i in range(5)]
reports = s.continuation(pd, path)
print("\nbranch from (5pi,5pi) to (6.2pi,5pi):")
for rep in reports:
    print(f"  rho1 = {rep.rho[0] / np.pi:.2f}pi  residual {rep.max_residual:.2e}"
          f"  J~ = {rep.j_tilde_value:.6f}")

# a path touching the curve is rejected up front
try:
    s.continuation(pd, [(7.8 * np.pi, 7.8 * np.pi), (8 * np.pi, 8 * np.pi)])
except s.errors.PathError as exc:
    print(f"\npath into the critical set rejected: {exc}")
