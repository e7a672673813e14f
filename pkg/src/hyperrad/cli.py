"""Command-line front end.

Subcommands: point (single-parameter analysis), sweep (2-D parameter maps),
wigner and klyshko (per-point exports), dressed (manifold and ladder tables).
Flags mirror the model parameter names; a JSON config file can seed the
sweep and is overridden by explicit flags. Exit code 0 on success, 1 on
runtime/I-O failures, 2 on bad arguments or config.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .models import ModelParams, default_n_max
from .dressed import manifold_table, pathway_table
from .sweep import (
    SweepConfig,
    SweepConfigError,
    export_klyshko,
    export_wigner,
    resolve_workers,
    run_point,
    run_sweep,
)


def _add_model_flags(parser: argparse.ArgumentParser, *, need_point: bool) -> None:
    parser.add_argument("--delta", type=float, required=need_point,
                        help="detuning Delta/gamma (both qubit and cavity)")
    parser.add_argument("--eta", type=float, required=need_point,
                        help="pump strength eta/gamma")
    parser.add_argument("--g", type=float, default=10.0, help="coupling g/gamma")
    parser.add_argument("--kappa", type=float, default=0.5, help="cavity decay kappa/gamma")
    parser.add_argument("--nmax", type=int, default=None,
                        help="Fock truncation (default: 20, or 30 for eta > 1.5)")
    parser.add_argument("--phase", choices=("out", "in"), default="out",
                        help="coupling preset: out (g1=-g2) or in (g1=g2)")
    parser.add_argument("--gamma", type=float, default=1.0, help="qubit decay (the rate unit)")


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    n_max = args.nmax if args.nmax is not None else default_n_max(args.eta)
    maker = ModelParams.out_phase if args.phase == "out" else ModelParams.in_phase
    return maker(delta=args.delta, g=args.g, eta=args.eta, kappa=args.kappa,
                 n_max=n_max, gamma=args.gamma)


def _cmd_point(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    observables = frozenset(args.observables.split(","))
    record = run_point(p, observables)
    lines = [
        f"point delta={p.delta_a:g} eta={p.eta:g} g={p.g1:g} kappa={p.kappa:g} "
        f"nmax={p.n_max} phase={args.phase}",
        f"  <n>            = {record.nbar:.12g}",
        f"  residual       = {record.residual:.3e}",
        f"  tail           = {record.tail_population:.3e}"
        + ("  [truncation suspect]" if record.truncation_suspect else ""),
    ]
    payload: dict = {
        "params": {"delta": p.delta_a, "eta": p.eta, "g": p.g1, "kappa": p.kappa,
                   "n_max": p.n_max, "gamma": p.gamma, "phase": args.phase},
        "nbar": record.nbar,
        "residual": record.residual,
        "tail_population": record.tail_population,
        "truncation_flag": int(record.truncation_suspect),
    }
    if record.squeezing is not None:
        lines.append(f"  min S_theta    = {record.squeezing.s_min:.12g}")
        lines.append(f"  theta_S        = {record.squeezing.theta_s:.12g} rad")
        payload["s_min"] = record.squeezing.s_min
        payload["theta_s"] = record.squeezing.theta_s
    if record.radiance is not None:
        r = record.radiance
        lines.append(f"  <n> single     = {r.nbar_single[0]:.12g}, {r.nbar_single[1]:.12g}")
        lines.append(f"  R              = {r.witness:.12g}")
        payload["R"] = r.witness
        payload["nbar_single"] = list(r.nbar_single)
    if record.klyshko_result is not None:
        defined = record.klyshko_result.defined()
        shown = {n: defined[n] for n in sorted(defined)[:8]}
        lines.append("  K_n            = " + ", ".join(f"K{n}={v:.4g}" for n, v in shown.items()))
        payload["klyshko"] = [[n, v] for n, v in record.klyshko_result.entries]
    print("\n".join(lines))
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {args.json}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    raw: dict = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
    if args.delta_range is not None:
        raw["delta_range"] = [args.delta_range[0], args.delta_range[1], int(args.delta_range[2])]
    if args.eta_range is not None:
        raw["eta_range"] = [args.eta_range[0], args.eta_range[1], int(args.eta_range[2])]
    for key, val in (("g", args.g), ("kappa", args.kappa), ("gamma", args.gamma)):
        raw.setdefault(key, val)
    if args.nmax is not None:
        raw["n_max"] = args.nmax
    raw.setdefault("n_max", 20)
    if args.phase is not None:
        raw["phase"] = args.phase
    if args.observables is not None:
        raw["observables"] = args.observables.split(",")
    if args.out is not None:
        raw["output"] = args.out
    raw["workers"] = resolve_workers(args.workers, raw.get("workers"))

    cfg = SweepConfig.from_dict(raw)
    outputs = run_sweep(cfg)
    n_err = sum(1 for r in outputs.rows if r.get("error"))
    print(f"wrote {outputs.csv_path} ({len(outputs.rows)} rows, {n_err} errors) and {outputs.meta_path}")
    for note in outputs.warnings:
        print(f"warning: {note}", file=sys.stderr)
    return 0


def _cmd_wigner(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    axis = np.linspace(-args.xmax, args.xmax, args.points)
    out = Path(args.out or f"wigner_{args.tag}.csv")
    path = export_wigner(p, axis, axis, out)
    print(f"wrote {path}")
    return 0


def _cmd_klyshko(args: argparse.Namespace) -> int:
    p = _params_from_args(args)
    out = Path(args.out or f"klyshko_{args.tag}.csv")
    path = export_klyshko(p, out, floor=args.floor)
    print(f"wrote {path}")
    return 0


def _cmd_dressed(args: argparse.Namespace) -> int:
    n_values = list(range(1, args.manifolds + 1))
    print(manifold_table(n_values, args.g))
    if args.pathways > 0:
        p = ModelParams.out_phase(delta=0.0, g=args.g, eta=args.eta, kappa=0.5,
                                  n_max=args.pathways + 2)
        print()
        print(pathway_table(list(range(args.pathways)), p))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperrad",
        description="Steady states, squeezing and radiance of two driven qubits in a cavity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="solve one parameter point and print observables")
    _add_model_flags(p_point, need_point=True)
    p_point.add_argument("--observables", default="nbar,Smin,thetaS,R,Kn",
                         help="comma list from nbar,Smin,thetaS,R,Kn")
    p_point.add_argument("--json", default=None, help="also write the record as JSON")
    p_point.set_defaults(func=_cmd_point)

    p_sweep = sub.add_parser("sweep", help="2-D sweep over (delta, eta), CSV output")
    p_sweep.add_argument("--config", default=None, help="JSON config file (flags override)")
    p_sweep.add_argument("--delta-range", type=float, nargs=3, default=None,
                         metavar=("MIN", "MAX", "COUNT"))
    p_sweep.add_argument("--eta-range", type=float, nargs=3, default=None,
                         metavar=("MIN", "MAX", "COUNT"))
    p_sweep.add_argument("--g", type=float, default=10.0)
    p_sweep.add_argument("--kappa", type=float, default=0.5)
    p_sweep.add_argument("--gamma", type=float, default=1.0)
    p_sweep.add_argument("--nmax", type=int, default=None)
    p_sweep.add_argument("--phase", choices=("out", "in"), default=None)
    p_sweep.add_argument("--observables", default=None,
                         help="comma list from nbar,Smin,thetaS,R,Kn")
    p_sweep.add_argument("--out", default=None, help="output directory")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="parallel workers (or set HYPERRAD_WORKERS)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_wig = sub.add_parser("wigner", help="export the cavity Wigner grid at one point")
    _add_model_flags(p_wig, need_point=True)
    p_wig.add_argument("--xmax", type=float, default=4.0, help="grid half-width in x and y")
    p_wig.add_argument("--points", type=int, default=81, help="points per axis")
    p_wig.add_argument("--tag", default="point", help="file name tag")
    p_wig.add_argument("--out", default=None, help="explicit output path")
    p_wig.set_defaults(func=_cmd_wigner)

    p_kly = sub.add_parser("klyshko", help="export P_n and K_n at one point")
    _add_model_flags(p_kly, need_point=True)
    p_kly.add_argument("--floor", type=float, default=1e-12,
                       help="P_n below this leaves K_n undefined")
    p_kly.add_argument("--tag", default="point", help="file name tag")
    p_kly.add_argument("--out", default=None, help="explicit output path")
    p_kly.set_defaults(func=_cmd_klyshko)

    p_dr = sub.add_parser("dressed", help="print dressed manifolds and ladder elements")
    p_dr.add_argument("--manifolds", type=int, default=5, help="print manifolds 1..N")
    p_dr.add_argument("--g", type=float, default=10.0)
    p_dr.add_argument("--eta", type=float, default=0.5,
                      help="drive used in the ladder table")
    p_dr.add_argument("--pathways", type=int, default=3,
                      help="ladder starting photon numbers 0..N-1 (0 disables)")
    p_dr.set_defaults(func=_cmd_dressed)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SweepConfigError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
