"""Critical-point search for the constrained energy and the full system.

Two independent routes are provided and cross-validate each other:
constrained descent on the reduced energy (mirroring the variational
structure) and damped Newton on the discretized Euler-Lagrange system
(certifying roots).  Continuation tracks a branch over a parameter
path kept away from the critical set.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConvergenceError, PathError, UnboundedDescentError)
from .functionals import (INNER_TOL, constrained_state, inner_densities,
                          inner_minimize)
from .problem import (EIGHT_PI, LAMBDA_MARGIN, ProblemData, lambda_distance,
                      lambda_membership)
from .surface import Field, values_of

OUTER_GTOL = 1e-8
OUTER_MAX_ITER = 5000
NEWTON_TOL = 1e-10
DIVERGENCE_LEVEL = -1e6


@dataclass
class SolveReport:
    F: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    u1: np.ndarray = field(repr=False)
    u2: np.ndarray = field(repr=False)
    residual_1: float = np.inf
    residual_2: float = np.inf
    j_tilde_value: float = np.nan
    method: str = ""
    success: bool = False
    message: str = ""
    rho: tuple = ()
    trace: list = field(default_factory=list)

    @classmethod
    def from_fg(cls, pd, F, G, method, **kw):
        u1, u2 = F - G, F + G
        r1, r2 = residual(pd, u1, u2)
        return cls(F=F, G=G, u1=u1, u2=u2, residual_1=r1, residual_2=r2,
                   method=method, rho=tuple(pd.rho), **kw)

    @classmethod
    def from_pair(cls, pd, u1, u2, method, **kw):
        F, G = 0.5 * (u1 + u2), 0.5 * (u2 - u1)
        r1, r2 = residual(pd, u1, u2)
        return cls(F=F, G=G, u1=u1, u2=u2, residual_1=r1, residual_2=r2,
                   method=method, rho=tuple(pd.rho), **kw)

    @property
    def max_residual(self):
        return max(self.residual_1, self.residual_2)


def residual(pd: ProblemData, u1, u2):
    """Sup-norms of the two Euler-Lagrange equations of the system."""
    g = pd.grid
    v1 = g.project_mean_zero(values_of(u1, g))
    v2 = g.project_mean_zero(values_of(u2, g))
    nu1, nu2, _, _ = inner_densities(pd, 0.5 * (v1 + v2), 0.5 * (v2 - v1))
    r1, r2 = pd.rho
    res1 = g.neg_laplacian(v1) - g.project_mean_zero(r2 * (nu2 - 1.0))
    res2 = g.neg_laplacian(v2) - g.project_mean_zero(r1 * (nu1 - 1.0))
    return float(np.max(np.abs(res1))), float(np.max(np.abs(res2)))


def minimize_outer(pd: ProblemData, F0, gtol=OUTER_GTOL, max_iter=OUTER_MAX_ITER,
                   inner_tol=INNER_TOL, divergence_level=DIVERGENCE_LEVEL) -> SolveReport:
    """Descend the constrained energy to a critical point.

    Barzilai-Borwein step lengths on the H^1 (preconditioned) gradient
    with Armijo backtracking; the accepted energy sequence is strictly
    decreasing.  Valid as a solver in the coercive regime (region
    index 0); outside it the descent is unbounded and is flagged.
    """
    g = pd.grid
    member = lambda_membership(pd.rho, pd.alphas)
    if not (member.status == "region" and member.k == 0):
        warnings.warn(f"minimize_outer outside region 0 ({member.status}, k={member.k}); "
                      "descent may be unbounded", stacklevel=2)
    F = g.project_mean_zero(values_of(F0, g))
    val, grad, inner = constrained_state(pd, F, inner_tol=inner_tol)
    d_prev = None
    step = 1.0
    tighten = 0
    trace = []
    for it in range(1, max_iter + 1):
        gn = g.dual_norm(grad)
        trace.append({"iter": it, "J_tilde": val, "grad_norm": gn})
        if gn < gtol:
            rep = SolveReport.from_fg(pd, F, inner.G_tilde, "minimize",
                                      j_tilde_value=val, trace=trace)
            if rep.max_residual < 1e-7 or tighten >= 3:
                rep.success = rep.max_residual < 1e-7
                rep.message = ("converged" if rep.success
                               else "gradient converged, residual high")
                return rep
            # dual-norm stopping can leave sup-norm residual slightly high
            gtol /= 10.0
            tighten += 1
        if val < divergence_level:
            raise UnboundedDescentError(
                f"constrained energy fell below {divergence_level:.3g} "
                f"(J~={val:.3g}); parameters are outside the coercive regime")
        d = -g.spectral_solve(grad, lambda e: np.where(e > 0, 1.0 / np.maximum(e, 1e-300), 0.0))
        d = g.project_mean_zero(d)
        if d_prev is not None:
            s = F - F_prev
            y = d_prev - d  # difference of preconditioned gradients (negated)
            sy = float(np.sum(g.weights * s * y))
            ss = float(np.sum(g.weights * s * s))
            step = ss / sy if sy > 1e-300 else 1.0
            step = min(max(step, 1e-6), 1e3)
        slope = float(np.sum(g.weights * grad * d))
        rounding = 1e-13 * (1.0 + abs(val))
        t = step
        accepted = False
        for _ in range(50):
            F_new = g.project_mean_zero(F + t * d)
            try:
                val_new, grad_new, inner_new = constrained_state(
                    pd, F_new, inner_tol=inner_tol, warm=inner.G_tilde)
            except (ConvergenceError, OverflowError, FloatingPointError):
                t *= 0.5
                continue
            # the slack keeps the test meaningful at the energy's rounding floor
            if val_new <= val + 1e-4 * t * slope + rounding:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise ConvergenceError("outer line search failed",
                                   {"iteration": it, "J_tilde": val, "grad_norm": gn})
        F_prev, d_prev = F, d
        F, val, grad, inner = F_new, val_new, grad_new, inner_new
    raise ConvergenceError("outer iteration cap exceeded",
                           {"iterations": max_iter, "grad_norm": gn, "J_tilde": val})


def _el_system(pd, u1, u2):
    g = pd.grid
    nu1, nu2, _, _ = inner_densities(pd, 0.5 * (u1 + u2), 0.5 * (u2 - u1))
    r1, r2 = pd.rho
    res1 = g.neg_laplacian(u1) - g.project_mean_zero(r2 * (nu2 - 1.0))
    res2 = g.neg_laplacian(u2) - g.project_mean_zero(r1 * (nu1 - 1.0))
    return res1, res2, nu1, nu2


def newton_el(pd: ProblemData, u1_init=None, u2_init=None, tol=NEWTON_TOL,
              max_iter=60) -> SolveReport:
    """Damped Newton on the coupled Euler-Lagrange system.

    The linearized system is solved matrix-free with GMRES,
    preconditioned by spectral (−Δ + I)^{-1} blocks.  Locally
    quadratically convergent near nondegenerate solutions.
    """
    from scipy.sparse.linalg import LinearOperator, gmres

    g = pd.grid
    n = g.n_nodes
    u1 = np.zeros(g.shape) if u1_init is None else g.project_mean_zero(values_of(u1_init, g))
    u2 = np.zeros(g.shape) if u2_init is None else g.project_mean_zero(values_of(u2_init, g))
    r1, r2 = pd.rho
    w = g.weights
    trace = []

    def res_norm(a, b):
        return max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))

    res1, res2, nu1, nu2 = _el_system(pd, u1, u2)
    rn = res_norm(res1, res2)
    for it in range(1, max_iter + 1):
        trace.append({"iter": it, "residual": rn})
        if rn < tol:
            rep = SolveReport.from_pair(pd, u1, u2, "newton_el", trace=trace)
            rep.success = True
            rep.message = "converged"
            try:
                rep.j_tilde_value = (g.dirichlet(0.5 * (u1 + u2))
                                     - inner_minimize(pd, 0.5 * (u1 + u2)).inner_value)
            except ConvergenceError:
                pass
            return rep

        def jvp(x):
            x1 = x[:n].reshape(g.shape)
            x2 = x[n:].reshape(g.shape)
            m1 = float(np.sum(w * x1))
            m2 = float(np.sum(w * x2))
            p1, p2 = x1 - m1, x2 - m2
            d2 = nu2 * p2 - nu2 * float(np.sum(w * nu2 * p2))
            d1 = nu1 * p1 - nu1 * float(np.sum(w * nu1 * p1))
            # identity on the constant modes keeps the operator nonsingular
            o1 = g.neg_laplacian(p1) - g.project_mean_zero(r2 * d2) + m1
            o2 = g.neg_laplacian(p2) - g.project_mean_zero(r1 * d1) + m2
            return np.concatenate([o1.ravel(), o2.ravel()])

        def prec(x):
            p1 = x[:n].reshape(g.shape)
            p2 = x[n:].reshape(g.shape)
            o1 = g.spectral_solve(p1, lambda e: 1.0 / (e + 1.0))
            o2 = g.spectral_solve(p2, lambda e: 1.0 / (e + 1.0))
            return np.concatenate([o1.ravel(), o2.ravel()])

        A = LinearOperator((2 * n, 2 * n), matvec=jvp)
        M = LinearOperator((2 * n, 2 * n), matvec=prec)
        rhs = -np.concatenate([res1.ravel(), res2.ravel()])
        sol, info = gmres(A, rhs, M=M, rtol=1e-10, atol=0.0, maxiter=400, restart=80)
        if info != 0:
            raise ConvergenceError(
                "Newton linear solve failed (near-singular Jacobian, "
                "possibly near the critical set or a degenerate solution)",
                {"gmres_info": info, "iteration": it, "residual": rn})
        d1 = g.project_mean_zero(sol[:n].reshape(g.shape))
        d2 = g.project_mean_zero(sol[n:].reshape(g.shape))
        t = 1.0
        for _ in range(40):
            n1, n2v = g.project_mean_zero(u1 + t * d1), g.project_mean_zero(u2 + t * d2)
            try:
                nres1, nres2, nnu1, nnu2 = _el_system(pd, n1, n2v)
            except (OverflowError, FloatingPointError):
                t *= 0.5
                continue
            if res_norm(nres1, nres2) < (1.0 - 0.25 * t) * rn:
                break
            t *= 0.5
        else:
            raise ConvergenceError("Newton damping failed to reduce the residual",
                                   {"iteration": it, "residual": rn})
        u1, u2 = n1, n2v
        res1, res2, nu1, nu2 = nres1, nres2, nnu1, nnu2
        rn = res_norm(res1, res2)
    raise ConvergenceError("Newton iteration cap exceeded",
                           {"iterations": max_iter, "residual": rn})


def continuation(pd_start: ProblemData, rho_path, margin=LAMBDA_MARGIN,
                 max_step=0.5 * np.pi, newton_tol=NEWTON_TOL, init=None):
    """Track a solution branch along a path in (rho1, rho2).

    Every path point must keep `margin` distance from the critical
    set, and consecutive steps must not exceed `max_step`.  Each point
    is solved by Newton seeded with the previous solution.
    """
    rho_path = [tuple(float(r) for r in p) for p in rho_path]
    alphas = pd_start.alphas
    for p in rho_path:
        if lambda_distance(p, alphas) < margin:
            raise PathError(f"path point {p} is within {margin:.3g} of the critical set")
    for a, b in zip(rho_path, rho_path[1:]):
        step = float(np.hypot(b[0] - a[0], b[1] - a[1]))
        if step > max_step + 1e-12:
            raise PathError(f"path step {a} -> {b} exceeds max step {max_step:.3g}")
    reports = []
    u1 = None if init is None else init[0]
    u2 = None if init is None else init[1]
    for p in rho_path:
        pd = pd_start.with_rho(p)
        try:
            rep = newton_el(pd, u1, u2, tol=newton_tol)
        except ConvergenceError as exc:
            last = reports[-1].rho if reports else None
            raise ConvergenceError(
                f"continuation branch lost at rho={p} (last good rho={last})",
                getattr(exc, "diagnostics", {})) from exc
        reports.append(rep)
        u1, u2 = rep.u1, rep.u2
    return reports


def _homotopy_weights(pd, t):
    """Deform (h1, h2, hat_h) from the flat problem (t=0) to pd (t=1)."""
    h1 = np.exp(t * np.log(pd.h1))
    h2 = np.exp(t * np.log(pd.h2))
    out = ProblemData(pd.grid, pd.rho, h1, h2, pd.vortices,
                      log_hat_h=t * pd.log_hat_h)
    return out


def find_k1_solution(pd: ProblemData, residual_tol=1e-7, seed=0) -> SolveReport:
    """Locate one verified solution in the region-1 regime.

    The branch from k=0 cannot be continued in rho without touching
    the critical set (rho1*rho2/(rho1+rho2) varies continuously), so
    the branch is instead continued in the weights: at fixed rho the
    flat problem h = 1 has the exact solution (0, 0), and the weights
    are deformed to the target with Newton re-solves.  If the homotopy
    stalls, bubble-shaped seeds are tried directly.
    """
    member = lambda_membership(pd.rho, pd.alphas)
    if not (member.status == "region" and member.k == 1):
        warnings.warn(f"find_k1_solution called with {member.status}, k={member.k}",
                      stacklevel=2)
    trace = []

    # weight homotopy from the flat problem
    u1 = u2 = np.zeros(pd.grid.shape)
    t, dt = 0.0, 0.25
    failures = 0
    while t < 1.0 and failures < 12:
        t_next = min(1.0, t + dt)
        try:
            rep = newton_el(_homotopy_weights(pd, t_next), u1, u2)
        except ConvergenceError as exc:
            trace.append({"homotopy_t": t_next, "status": "failed", "error": str(exc)})
            dt *= 0.5
            failures += 1
            continue
        trace.append({"homotopy_t": t_next, "status": "ok", "residual": rep.max_residual})
        u1, u2, t = rep.u1, rep.u2, t_next
        dt = min(2.0 * dt, 0.25)
    if t >= 1.0:
        rep = newton_el(pd, u1, u2)
        if rep.max_residual < residual_tol:
            rep.method = "find_k1(homotopy)"
            rep.trace = trace + rep.trace
            return rep

    # bubble-shaped seeds
    from .bubbles import Barycenter, BubbleParams, bubble_field

    g = pd.grid
    rng = np.random.default_rng(seed)
    pts = g.node_points().reshape(-1, 2)
    for lam in (3.0, 6.0, 12.0):
        for _ in range(4):
            center = tuple(pts[rng.integers(len(pts))])
            try:
                phi = bubble_field(g, BubbleParams(lam, Barycenter([(1.0, center)])))
                rep = newton_el(pd, phi.values, phi.values)
            except (ConvergenceError, Exception) as exc:  # noqa: BLE001 - log and move on
                trace.append({"seed": ("bubble", lam, center), "status": "failed",
                              "error": str(exc)})
                continue
            if rep.max_residual < residual_tol:
                rep.method = "find_k1(bubble-seed)"
                rep.trace = trace + rep.trace
                return rep

    rep = SolveReport(F=np.zeros(g.shape), G=np.zeros(g.shape),
                      u1=np.zeros(g.shape), u2=np.zeros(g.shape),
                      method="find_k1", success=False, rho=tuple(pd.rho),
                      message=("no solution found; this is a numerical failure of the "
                               "search strategy, not evidence against existence"),
                      trace=trace)
    return rep
