"""Run configuration: JSON schema, weight expressions, round-tripping.

Weight expressions are strings over a small fixed vocabulary
(constants, cos, sin, exp, bump, pi) in the surface coordinates
(x, y on the torus; theta, phi on the sphere).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigurationError
from .surface import SurfaceGrid, SurfaceKind, build_grid
from .problem import ProblemData, Vortex, desingularize

_SAFE_FUNCS = {
    "cos": np.cos,
    "sin": np.sin,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "pi": np.pi,
}


def _bump(d2, width):
    return np.exp(-d2 / (2.0 * width**2))


def evaluate_weight(expr, grid: SurfaceGrid) -> np.ndarray:
    """Evaluate a weight expression on the grid nodes; must be positive."""
    pts = grid.node_points()
    names = dict(_SAFE_FUNCS)
    if grid.kind is SurfaceKind.TORUS:
        names["x"], names["y"] = pts[..., 0], pts[..., 1]
    else:
        names["theta"], names["phi"] = pts[..., 0], pts[..., 1]

    def gaussian_bump(c0, c1, width):
        d = grid.distance_field((c0, c1))
        return _bump(d * d, width)

    names["bump"] = gaussian_bump
    try:
        vals = eval(expr, {"__builtins__": {}}, names)  # noqa: S307 - fixed vocabulary
    except Exception as exc:
        raise ConfigurationError(f"bad weight expression {expr!r}: {exc}") from exc
    vals = np.broadcast_to(np.asarray(vals, dtype=float), grid.shape).copy()
    if np.min(vals) <= 0:
        raise ConfigurationError(f"weight expression {expr!r} is not strictly positive")
    return vals


@dataclass
class RunConfig:
    surface_kind: str = "torus"
    resolution: tuple = (32, 32)
    rho: tuple = (4.0 * np.pi, 4.0 * np.pi)
    h1: str = "1"
    h2: str = "1"
    vortices: list = field(default_factory=list)  # [{"p": [..], "alpha": ..}]
    method: str = "minimize"   # minimize | newton | continuation | find_k1
    rho_path: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    rng_seed: int = 0
    out: str = "out"

    def to_json(self) -> str:
        d = asdict(self)
        d["resolution"] = (self.resolution if isinstance(self.resolution, int)
                           else list(self.resolution))
        d["rho"] = list(self.rho)
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad config JSON: {exc}") from exc
        known = cls().__dict__.keys()
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        if isinstance(cfg.resolution, (int, float)):
            cfg.resolution = int(cfg.resolution)
        else:
            cfg.resolution = tuple(int(n) for n in cfg.resolution)
        cfg.rho = tuple(float(r) for r in cfg.rho)
        for name, tol in cfg.tolerances.items():
            if not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigurationError(f"tolerance {name!r} must be positive")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def build_grid(self) -> SurfaceGrid:
        return build_grid(self.surface_kind, self.resolution)

    def build_problem(self, grid=None) -> ProblemData:
        grid = grid or self.build_grid()
        h1 = evaluate_weight(self.h1, grid)
        h2 = evaluate_weight(self.h2, grid)
        vortices = [Vortex(tuple(v["p"]), float(v["alpha"])) for v in self.vortices]
        return desingularize(grid, self.rho, h1, h2, vortices)
