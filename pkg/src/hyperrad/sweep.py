"""Parameter sweeps over (detuning, drive) with deterministic file output.

Grid points are independent work items; rows are emitted in row-major order
over (delta, eta) regardless of how many workers computed them, and floats
are written with 17 significant digits so sweep CSVs are byte-identical
across runs and worker counts.
"""

from __future__ import annotations

import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .models import (
    DISSIPATOR_CONVENTION,
    ModelParams,
    build_two_qubit_model,
)
from .observables import (
    KlyshkoResult,
    PhotonDistribution,
    RadianceResult,
    SqueezingResult,
    WignerGrid,
    klyshko,
    min_squeezing,
    photon_distribution,
    radiance_components,
    wigner,
)
from .operators import partial_trace
from .steady import SteadyStateReport, solve_model

VALID_OBSERVABLES = frozenset({"R", "Smin", "thetaS", "nbar", "Kn"})

SWEEP_COLUMNS = (
    "delta", "eta", "nbar_2q", "nbar_1q_1", "nbar_1q_2", "R",
    "s_min", "theta_s", "residual", "tail_population", "truncation_flag", "error",
)

WORKERS_ENV_VAR = "HYPERRAD_WORKERS"


class SweepConfigError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    """Rectangular sweep over delta x eta at fixed coupling and decay."""

    delta_range: tuple[float, float, int]
    eta_range: tuple[float, float, int]
    g: float
    kappa: float
    n_max: int = 20
    phase: str = "out"
    gamma: float = 1.0
    observables: frozenset[str] = frozenset({"nbar", "Smin", "thetaS", "R"})
    output_dir: str = "."
    workers: int = 1

    def __post_init__(self) -> None:
        for name, rng in (("delta_range", self.delta_range), ("eta_range", self.eta_range)):
            lo, hi, count = rng
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise SweepConfigError(f"{name} bounds must be finite, got {rng}")
            if int(count) != count or count < 1:
                raise SweepConfigError(f"{name} count must be an integer >= 1, got {count}")
        if self.phase not in ("out", "in"):
            raise SweepConfigError(f"phase must be 'out' or 'in', got {self.phase!r}")
        obs = frozenset(self.observables)
        if not obs:
            raise SweepConfigError("observables set must be non-empty")
        unknown = obs - VALID_OBSERVABLES
        if unknown:
            raise SweepConfigError(f"unknown observables {sorted(unknown)}; valid: {sorted(VALID_OBSERVABLES)}")
        object.__setattr__(self, "observables", obs)
        if self.workers < 1:
            raise SweepConfigError(f"workers must be >= 1, got {self.workers}")

    def delta_values(self) -> np.ndarray:
        lo, hi, count = self.delta_range
        return np.linspace(lo, hi, int(count))

    def eta_values(self) -> np.ndarray:
        lo, hi, count = self.eta_range
        return np.linspace(lo, hi, int(count))

    def params_at(self, delta: float, eta: float) -> ModelParams:
        maker = ModelParams.out_phase if self.phase == "out" else ModelParams.in_phase
        return maker(delta=delta, g=self.g, eta=eta, kappa=self.kappa,
                     n_max=self.n_max, gamma=self.gamma)

    @staticmethod
    def from_dict(raw: dict) -> "SweepConfig":
        try:
            return SweepConfig(
                delta_range=tuple(raw["delta_range"]),
                eta_range=tuple(raw["eta_range"]),
                g=float(raw["g"]),
                kappa=float(raw["kappa"]),
                n_max=int(raw.get("n_max", 20)),
                phase=raw.get("phase", "out"),
                gamma=float(raw.get("gamma", 1.0)),
                observables=frozenset(raw.get("observables", ["nbar", "Smin", "thetaS", "R"])),
                output_dir=raw.get("output", raw.get("output_dir", ".")),
                workers=int(raw.get("workers", 1)),
            )
        except KeyError as exc:
            raise SweepConfigError(f"missing required config key: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "delta_range": list(self.delta_range),
            "eta_range": list(self.eta_range),
            "g": self.g,
            "kappa": self.kappa,
            "n_max": self.n_max,
            "phase": self.phase,
            "gamma": self.gamma,
            "observables": sorted(self.observables),
            "output": self.output_dir,
            "workers": self.workers,
        }


@dataclass
class ObservablesRecord:
    """Everything computed for one parameter point."""

    params: ModelParams
    nbar: float
    residual: float
    tail_population: float
    truncation_suspect: bool
    distribution: PhotonDistribution
    squeezing: SqueezingResult | None = None
    radiance: RadianceResult | None = None
    klyshko_result: KlyshkoResult | None = None
    wigner_grid: WignerGrid | None = None
    steady_report: SteadyStateReport | None = None


def run_point(
    p: ModelParams,
    observables: frozenset[str] | set[str] = frozenset({"nbar", "Smin", "thetaS", "R", "Kn"}),
    wigner_axes: tuple[np.ndarray, np.ndarray] | None = None,
) -> ObservablesRecord:
    """Full pipeline for one parameter point: solve, then requested observables."""
    obs = frozenset(observables)
    unknown = obs - VALID_OBSERVABLES
    if unknown:
        raise SweepConfigError(f"unknown observables {sorted(unknown)}")

    report = solve_model(build_two_qubit_model(p))
    dist = photon_distribution(report.rho)
    record = ObservablesRecord(
        params=p,
        nbar=dist.mean(),
        residual=report.residual,
        tail_population=report.tail_population,
        truncation_suspect=report.truncation_suspect,
        distribution=dist,
        steady_report=report,
    )

    if "Smin" in obs or "thetaS" in obs:
        record.squeezing = min_squeezing(report.rho)
    if "Kn" in obs:
        record.klyshko_result = klyshko(dist)
    if "R" in obs:
        result, rep2, rep1, rep1b = radiance_components(p, two_qubit_report=report)
        record.radiance = result
        record.residual = max(record.residual, rep1.residual, rep1b.residual)
        record.truncation_suspect = (
            record.truncation_suspect or rep1.truncation_suspect or rep1b.truncation_suspect
        )
    if wigner_axes is not None:
        space = report.rho.space
        cavity = partial_trace(report.rho, {space.n_slots - 1})
        record.wigner_grid = wigner(cavity, wigner_axes[0], wigner_axes[1])
    return record


def _fmt(value: float | None) -> str:
    return "" if value is None else format(float(value), ".17g")


def _point_task(args: tuple) -> dict:
    """Worker entry point; must stay module-level so it pickles."""
    cfg_dict, delta, eta = args
    cfg = SweepConfig.from_dict(cfg_dict)
    row: dict = {"delta": delta, "eta": eta, "error": ""}
    try:
        p = cfg.params_at(delta, eta)
        want = (cfg.observables - {"Kn"}) | {"nbar"}
        record = run_point(p, want)
        row["nbar_2q"] = record.nbar
        row["residual"] = record.residual
        row["tail_population"] = record.tail_population
        row["truncation_flag"] = int(record.truncation_suspect)
        if record.squeezing is not None:
            row["s_min"] = record.squeezing.s_min
            row["theta_s"] = record.squeezing.theta_s
        if record.radiance is not None:
            row["nbar_1q_1"] = record.radiance.nbar_single[0]
            row["nbar_1q_2"] = record.radiance.nbar_single[1]
            row["R"] = record.radiance.witness
        if "Kn" in cfg.observables:
            row["_klyshko"] = [(n, v) for n, v in klyshko(record.distribution).entries]
    except Exception as exc:  # per-point failures become row markers
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


@dataclass
class SweepOutputs:
    csv_path: Path
    meta_path: Path
    rows: list[dict] = field(default_factory=list)
    klyshko_path: Path | None = None
    warnings: list[str] = field(default_factory=list)


def _format_row(row: dict) -> str:
    fields = [
        _fmt(row.get("delta")),
        _fmt(row.get("eta")),
        _fmt(row.get("nbar_2q")),
        _fmt(row.get("nbar_1q_1")),
        _fmt(row.get("nbar_1q_2")),
        _fmt(row.get("R")),
        _fmt(row.get("s_min")),
        _fmt(row.get("theta_s")),
        _fmt(row.get("residual")),
        _fmt(row.get("tail_population")),
        "" if "truncation_flag" not in row else str(row["truncation_flag"]),
        row.get("error", ""),
    ]
    return ",".join(fields)


def _mirror_check(rows: list[dict], deltas: np.ndarray, etas: np.ndarray) -> list[str]:
    """Detuning sign flip should leave s_min and R unchanged; warn if not."""
    notes: list[str] = []
    index = {i: d for i, d in enumerate(deltas)}
    mirror: dict[int, int] = {}
    for i, d in index.items():
        matches = [j for j, dj in index.items() if abs(dj + d) <= 1e-12 * max(1.0, abs(d))]
        if matches:
            mirror[i] = matches[0]
    n_eta = len(etas)
    for i, j in mirror.items():
        if j < i:
            continue
        for k in range(n_eta):
            a, b = rows[i * n_eta + k], rows[j * n_eta + k]
            for key in ("s_min", "R"):
                va, vb = a.get(key), b.get(key)
                if va is None or vb is None:
                    continue
                if abs(va - vb) > 1e-8 * max(1.0, abs(va), abs(vb)):
                    notes.append(
                        f"mirror symmetry violated for {key} at |delta|={abs(index[i]):g}, "
                        f"eta={etas[k]:g}: {va!r} vs {vb!r}"
                    )
    return notes


def run_sweep(cfg: SweepConfig) -> SweepOutputs:
    """Execute the sweep and write sweep.csv plus meta.json.

    The output directory is validated before any solve; per-point failures
    are recorded in-row and do not abort the sweep.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write_probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc

    deltas = cfg.delta_values()
    etas = cfg.eta_values()
    cfg_dict = cfg.to_dict()
    tasks = [(cfg_dict, float(d), float(e)) for d in deltas for e in etas]

    t_start = time.perf_counter()
    if cfg.workers == 1:
        rows = [_point_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_point_task, tasks, chunksize=1))

    notes = _mirror_check(rows, deltas, etas)
    for note in notes:
        warnings.warn(note, stacklevel=2)

    csv_path = out_dir / "sweep.csv"
    lines = [",".join(SWEEP_COLUMNS)]
    lines.extend(_format_row(r) for r in rows)
    csv_path.write_text("\n".join(lines) + "\n")

    klyshko_path: Path | None = None
    if "Kn" in cfg.observables:
        klyshko_path = out_dir / "klyshko_sweep.csv"
        klines = ["delta,eta,n,K_n"]
        for r in rows:
            for n, v in r.get("_klyshko", []):
                klines.append(f"{_fmt(r['delta'])},{_fmt(r['eta'])},{n},{_fmt(v)}")
        klyshko_path.write_text("\n".join(klines) + "\n")

    meta = {
        "config": cfg_dict,
        "version": __version__,
        "columns": list(SWEEP_COLUMNS),
        "units": "frequencies and rates in units of gamma; theta_s in radians",
        "dissipator_convention": DISSIPATOR_CONVENTION,
        "vectorization": "column-stacking",
        "row_order": "row-major over (delta, eta)",
        "n_rows": len(rows),
        "n_errors": sum(1 for r in rows if r.get("error")),
        "duration_s": time.perf_counter() - t_start,
        "warnings": notes,
    }
    meta_path = out_dir / "meta.json"
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")

    return SweepOutputs(csv_path=csv_path, meta_path=meta_path, rows=rows,
                        klyshko_path=klyshko_path, warnings=notes)


def resolve_workers(cli_value: int | None, config_value: int | None = None) -> int:
    """Worker-count precedence: explicit CLI flag > environment > config > 1."""
    if cli_value is not None:
        return cli_value
    env = os.environ.get(WORKERS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise SweepConfigError(f"{WORKERS_ENV_VAR}={env!r} is not an integer") from exc
    if config_value is not None:
        return config_value
    return 1


def export_wigner(
    p: ModelParams,
    x: np.ndarray,
    y: np.ndarray,
    path: str | Path,
) -> Path:
    """Solve at p and write the cavity Wigner grid as CSV.

    Layout: '#' comment lines carry the phase-space convention and any
    grid warning; the header row is 'x/y,<y values>' and each data row is
    '<x value>,<W(x, y0)>,...'.
    """
    record = run_point(p, {"nbar"}, wigner_axes=(np.asarray(x, float), np.asarray(y, float)))
    grid = record.wigner_grid
    assert grid is not None
    lines = [f"# convention: {grid.convention}"]
    lines.append(f"# boundary_warning: {int(grid.boundary_warning)}")
    if grid.boundary_warning:
        lines.append("# warning: grid may be too small for this state")
    lines.append("x/y," + ",".join(_fmt(v) for v in grid.y))
    for i, xv in enumerate(grid.x):
        lines.append(_fmt(xv) + "," + ",".join(_fmt(w) for w in grid.w[i, :]))
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    return out


def export_klyshko(p: ModelParams, path: str | Path, floor: float = 1e-12) -> Path:
    """Solve at p and write n, P_n, K_n as CSV (K_n empty where undefined)."""
    record = run_point(p, {"nbar", "Kn"})
    dist = record.distribution
    result = record.klyshko_result
    assert result is not None
    lines = ["n,P_n,K_n"]
    kmap = dict(result.entries)
    for n in range(len(dist.p)):
        kval = kmap.get(n)
        lines.append(f"{n},{_fmt(float(dist.p[n]))},{_fmt(kval)}")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    return out
