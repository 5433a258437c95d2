"""Readers for the skewmf interchange formats.

These are written against the documented formats only -- the binary
field layout (magic "LCSF", kind byte, two little-endian uint32
resolutions, row-major float64 samples) and the CSV headers -- not
against the producing code, so the two ends of the pipe are independent.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_MAGIC = b"LCSF"
_KINDS = {0: "torus", 1: "sphere"}


class FigureInputError(Exception):
    """A required input is missing, truncated, or off-schema."""


@dataclass
class FieldDump:
    kind: str            # "torus" or "sphere"
    values: np.ndarray   # shape (n1, n2)
    coords: tuple[np.ndarray, np.ndarray]  # per-axis node coordinates


def _node_coords(kind, n1, n2):
    # Torus nodes are uniform on [0,1)^2; sphere nodes are Gauss-Legendre
    # colatitudes times uniform longitudes.  Only used for plot axes.
    if kind == "torus":
        return np.arange(n1) / n1, np.arange(n2) / n2
    theta = np.arccos(np.polynomial.legendre.leggauss(n1)[0])[::-1]
    return theta, 2.0 * np.pi * np.arange(n2) / n2


def read_field(path) -> FieldDump:
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"{path}: no such file")
    raw = path.read_bytes()
    if len(raw) < 13 or raw[:4] != _MAGIC:
        raise FigureInputError(f"{path}: not an LCSF field dump")
    kind = _KINDS.get(raw[4])
    if kind is None:
        raise FigureInputError(f"{path}: unknown surface kind byte {raw[4]}")
    n1, n2 = struct.unpack_from("<II", raw, 5)
    body = raw[13:]
    if len(body) != 8 * n1 * n2:
        raise FigureInputError(f"{path}: expected {8 * n1 * n2} payload bytes, "
                               f"got {len(body)}")
    values = np.frombuffer(body, dtype="<f8").reshape(n1, n2)
    return FieldDump(kind, values, _node_coords(kind, n1, n2))


def _read_csv(path, expected_header):
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureInputError(f"{path}: empty CSV")
    if rows[0] != list(expected_header):
        raise FigureInputError(f"{path}: header {rows[0]} does not match "
                               f"expected {list(expected_header)}")
    if len(rows) == 1:
        raise FigureInputError(f"{path}: no data rows")
    return rows[1:]


def read_lambda_map_csv(path):
    """Columns rho1, rho2 (float), status (str), k (int or None),
    q_over_4pi (float), nearest_n (float: fractional with fractional
    vortex multiplicities)."""
    rows = _read_csv(path, ("rho1", "rho2", "status", "k", "q_over_4pi",
                            "nearest_n"))
    try:
        return {
            "rho1": np.array([float(r[0]) for r in rows]),
            "rho2": np.array([float(r[1]) for r in rows]),
            "status": np.array([r[2] for r in rows]),
            "k": np.array([int(r[3]) if r[3] else -1 for r in rows]),
            "q_over_4pi": np.array([float(r[4]) for r in rows]),
            "nearest_n": np.array([float(r[5]) for r in rows]),
        }
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed row ({exc})") from exc


def read_asymptotics_csv(path):
    rows = _read_csv(path, ("lambda", "half_dirichlet", "log_mass", "j_tilde"))
    try:
        out = {
            "lambda": np.array([float(r[0]) for r in rows]),
            "half_dirichlet": np.array([float(r[1]) for r in rows]),
            "log_mass": np.array([float(r[2]) for r in rows]),
            "j_tilde": np.array([float(r[3]) if r[3] else np.nan for r in rows]),
        }
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed row ({exc})") from exc
    if len(out["lambda"]) < 2:
        raise FigureInputError(f"{path}: need at least 2 scales to fit a slope")
    return out


def read_mtcheck_csv(path):
    rows = _read_csv(path, ("l", "lambda", "ratio", "reference", "deficit"))
    try:
        return {
            "l": np.array([int(r[0]) for r in rows]),
            "lambda": np.array([float(r[1]) for r in rows]),
            "ratio": np.array([float(r[2]) for r in rows]),
            "reference": np.array([float(r[3]) for r in rows]),
            "deficit": np.array([float(r[4]) for r in rows]),
        }
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed row ({exc})") from exc


def read_field_csv(path) -> FieldDump:
    """Field CSV export: (x, y, value) on the torus, (theta, phi, value)
    on the sphere, one node per row in row-major order."""
    path = Path(path)
    if not path.exists():
        raise FigureInputError(f"{path}: no such file")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FigureInputError(f"{path}: empty CSV")
    if rows[0] == ["x", "y", "value"]:
        kind = "torus"
    elif rows[0] == ["theta", "phi", "value"]:
        kind = "sphere"
    else:
        raise FigureInputError(f"{path}: unrecognized field CSV header {rows[0]}")
    try:
        a = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise FigureInputError(f"{path}: malformed row ({exc})") from exc
    if a.size == 0:
        raise FigureInputError(f"{path}: no data rows")
    c1, c2 = np.unique(a[:, 0]), np.unique(a[:, 1])
    n1, n2 = len(c1), len(c2)
    if n1 * n2 != len(a):
        raise FigureInputError(f"{path}: rows do not form a {n1}x{n2} grid")
    values = a[:, 2].reshape(n1, n2)
    return FieldDump(kind, values, (np.sort(c1), np.sort(c2)))
