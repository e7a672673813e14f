"""Readers for the documented CSV schemas, with named-column failures.

Three file kinds are understood:

* sweep.csv        - header row `delta,eta,...,truncation_flag,error`
* wigner_<tag>.csv - '#' comment lines (convention tag), then an `x/y` matrix
* klyshko_<tag>.csv - header row `n,P_n,K_n`; empty K_n cells mean undefined
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SWEEP_COLUMNS = (
    "delta", "eta", "nbar_2q", "nbar_1q_1", "nbar_1q_2", "R",
    "s_min", "theta_s", "residual", "tail_population", "truncation_flag", "error",
)


class FigureSchemaError(ValueError):
    """Input file does not match the documented schema."""


def _float_or_nan(cell: str) -> float:
    return float(cell) if cell else np.nan


@dataclass
class SweepTable:
    path: Path
    columns: dict[str, np.ndarray]
    deltas: np.ndarray
    etas: np.ndarray

    def grid(self, column: str) -> np.ndarray:
        """Pivot a column into an (n_delta, n_eta) row-major grid."""
        if column not in self.columns:
            raise FigureSchemaError(f"{self.path}: no column {column!r} in sweep schema")
        return self.columns[column].reshape(len(self.deltas), len(self.etas))


def read_sweep(path: str | Path) -> SweepTable:
    path = Path(path)
    if not path.exists():
        raise FigureSchemaError(f"sweep CSV not found: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    for col in SWEEP_COLUMNS:
        if col not in header:
            raise FigureSchemaError(f"{path}: sweep CSV is missing column {col!r}")
    rows = [ln.split(",") for ln in lines[1:]]
    if not rows:
        raise FigureSchemaError(f"{path}: sweep CSV has no data rows")
    idx = {col: header.index(col) for col in header}
    columns = {
        col: np.array([_float_or_nan(r[idx[col]]) for r in rows])
        for col in SWEEP_COLUMNS
        if col != "error"
    }
    deltas = np.unique(columns["delta"])
    etas = np.unique(columns["eta"])
    if len(deltas) * len(etas) != len(rows):
        raise FigureSchemaError(
            f"{path}: rows do not form a full delta x eta grid "
            f"({len(deltas)} x {len(etas)} != {len(rows)})"
        )
    return SweepTable(path=path, columns=columns, deltas=deltas, etas=etas)


@dataclass
class WignerTable:
    path: Path
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    convention: str
    boundary_warning: bool
    comments: list[str] = field(default_factory=list)


def read_wigner(path: str | Path) -> WignerTable:
    path = Path(path)
    if not path.exists():
        raise FigureSchemaError(f"wigner CSV not found: {path}")
    comments: list[str] = []
    data_lines: list[str] = []
    for ln in path.read_text().splitlines():
        if ln.startswith("#"):
            comments.append(ln)
        elif ln:
            data_lines.append(ln)
    convention = ""
    boundary_warning = False
    for c in comments:
        if "convention:" in c:
            convention = c.split("convention:", 1)[1].strip()
        if "boundary_warning:" in c:
            boundary_warning = c.split("boundary_warning:", 1)[1].strip() == "1"
    if not convention:
        raise FigureSchemaError(f"{path}: wigner CSV lacks the convention comment line")
    header = data_lines[0].split(",")
    if header[0] != "x/y":
        raise FigureSchemaError(f"{path}: wigner CSV header must start with column 'x/y'")
    y = np.array([float(v) for v in header[1:]])
    rows = [ln.split(",") for ln in data_lines[1:]]
    x = np.array([float(r[0]) for r in rows])
    w = np.array([[float(v) for v in r[1:]] for r in rows])
    if w.shape != (len(x), len(y)):
        raise FigureSchemaError(f"{path}: wigner matrix shape {w.shape} mismatches axes")
    return WignerTable(path=path, x=x, y=y, w=w, convention=convention,
                       boundary_warning=boundary_warning, comments=comments)


@dataclass
class KlyshkoTable:
    path: Path
    n: np.ndarray
    p: np.ndarray
    k: np.ndarray  # NaN where undefined


def read_klyshko(path: str | Path) -> KlyshkoTable:
    path = Path(path)
    if not path.exists():
        raise FigureSchemaError(f"klyshko CSV not found: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    for col in ("n", "P_n", "K_n"):
        if col not in header:
            raise FigureSchemaError(f"{path}: klyshko CSV is missing column {col!r}")
    rows = [ln.split(",") for ln in lines[1:]]
    n = np.array([int(r[header.index("n")]) for r in rows])
    p = np.array([_float_or_nan(r[header.index("P_n")]) for r in rows])
    k = np.array([_float_or_nan(r[header.index("K_n")]) for r in rows])
    return KlyshkoTable(path=path, n=n, p=p, k=k)


def digest_arrays(*arrays: np.ndarray) -> str:
    """SHA-256 over the exact float bytes of the given arrays."""
    h = hashlib.sha256()
    for arr in arrays:
        a = np.ascontiguousarray(arr)
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()
