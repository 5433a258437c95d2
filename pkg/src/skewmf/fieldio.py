"""Field dump formats.

Binary format: little-endian, magic "LCSF", one kind byte (0 = torus,
1 = sphere), two uint32 per-direction resolutions, then the samples as
float64 row-major.  CSV export carries (x, y, value) on the torus and
(theta, phi, value) on the sphere.
"""

from __future__ import annotations

import csv
import struct

import numpy as np

from .errors import ConfigurationError
from .surface import Field, SurfaceKind, build_grid, values_of

MAGIC = b"LCSF"
_KIND_BYTE = {SurfaceKind.TORUS: 0, SurfaceKind.SPHERE: 1}
_BYTE_KIND = {v: k for k, v in _KIND_BYTE.items()}


def dump_field(f: Field, path):
    grid = f.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<B", _KIND_BYTE[grid.kind]))
        fh.write(struct.pack("<II", *grid.shape))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_field(path, grid=None) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ConfigurationError(f"{path}: bad magic {magic!r}")
        (kind_byte,) = struct.unpack("<B", fh.read(1))
        n1, n2 = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(8 * n1 * n2), dtype="<f8").reshape(n1, n2)
    kind = _BYTE_KIND.get(kind_byte)
    if kind is None:
        raise ConfigurationError(f"{path}: unknown surface kind byte {kind_byte}")
    if grid is None:
        grid = build_grid(kind, (n1, n2))
    elif grid.kind is not kind or grid.shape != (n1, n2):
        raise ConfigurationError(f"{path}: stored grid {kind.value} {n1}x{n2} "
                                 f"does not match supplied grid")
    return Field(grid, data.copy())


def export_csv(f: Field, path):
    grid = f.grid
    pts = grid.node_points()
    header = ("x", "y", "value") if grid.kind is SurfaceKind.TORUS \
        else ("theta", "phi", "value")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        v = values_of(f, grid)
        for idx in np.ndindex(grid.shape):
            w.writerow([repr(float(pts[idx][0])), repr(float(pts[idx][1])),
                        repr(float(v[idx]))])
