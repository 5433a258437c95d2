import csv
import struct

import numpy as np
import pytest


@pytest.fixture
def write_lambda_map(tmp_path):
    """Synthetic lambda-map CSV on a square rho-grid with the documented
    schema; membership decided against the even-n hyperbola family."""
    def _write(n_side=24, lo=np.pi, hi=20 * np.pi, tol=0.3, name="lambda_map.csv"):
        rs = np.linspace(lo, hi, n_side)
        path = tmp_path / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho1", "rho2", "status", "k", "q_over_4pi", "nearest_n"])
            for r1 in rs:
                for r2 in rs:
                    q = r1 * r2 / (r1 + r2)
                    n = max(1, round(q / (4 * np.pi)))
                    if abs(q - 4 * np.pi * n) < tol:
                        w.writerow([r1, r2, "in_lambda", "", q / (4 * np.pi), n])
                    else:
                        k = int(min(r1, r2) // (8 * np.pi))
                        w.writerow([r1, r2, "region", k, q / (4 * np.pi), n])
        return path
    return _write


@pytest.fixture
def write_asymptotics(tmp_path):
    def _write(k=1, lambdas=(20, 40, 80, 160), noise=0.0, name=None):
        rng = np.random.default_rng(3)
        path = tmp_path / (name or f"asymptotics_k{k}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "half_dirichlet", "log_mass", "j_tilde"])
            for lam in lambdas:
                x = np.log(lam)
                w.writerow([lam, 16 * k * np.pi * x + noise * rng.standard_normal(),
                            2.0 * x + noise * rng.standard_normal(), ""])
        return path
    return _write


@pytest.fixture
def write_mtcheck(tmp_path):
    def _write(ls=(1, 2), lambdas=(20, 40, 80), name="mtcheck.csv"):
        path = tmp_path / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["l", "lambda", "ratio", "reference", "deficit"])
            for l in ls:
                ref = 1.0 / (8.0 * l * np.pi)
                for i, lam in enumerate(lambdas):
                    w.writerow([l, lam, ref * (1 - 0.1 / (i + 1)), ref, 0.1 / (i + 1)])
        return path
    return _write


@pytest.fixture
def write_lcsf(tmp_path):
    def _write(values, kind="torus", name="field.lcsf"):
        values = np.asarray(values, dtype="<f8")
        path = tmp_path / name
        with open(path, "wb") as fh:
            fh.write(b"LCSF")
            fh.write(struct.pack("<B", {"torus": 0, "sphere": 1}[kind]))
            fh.write(struct.pack("<II", *values.shape))
            fh.write(values.tobytes())
        return path
    return _write
