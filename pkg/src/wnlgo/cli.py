"""Command-line entry point.

Subcommands
-----------
resonance             closure / resonant-tuple queries, JSON output
profiles              evolve the profile system, write WGLF snapshots + index
simulate              one split-step run, time-series CSV of errors
converge, zero-mode, more-weakly, inflate, sobolev-asymptotics
                      config-driven sweeps (see experiments module)

Exit codes: 0 all assertions pass, 1 an assertion failed, 2 config error,
3 inadmissible eps, 4 under-resolved grid.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import AdmissibilityError, ConfigError, ResolutionError
from .experiments import emit_results, load_config, run_experiment, _atomic_write, \
    _csv_text
from .grid import SpectralGrid, write_snapshot
from .resonance import Signature, close_phase_set, resonant_tuples
from .solver import assemble_approximation, approximation_error, \
    evolve_semiclassical, oscillatory_initial_data
from .transport import ProfileSet, evolve_profiles

_EXPERIMENT_COMMANDS = ("converge", "zero-mode", "more-weakly", "inflate",
                        "sobolev-asymptotics")


def _parse_vector(text: str) -> tuple:
    return tuple(int(p) for p in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wnlgo",
        description="spectral laboratory for multiphase weakly nonlinear "
                    "geometric optics")
    parser.add_argument("--config", help="path to a JSON experiment config")
    parser.add_argument("--out", help="output directory (or file for "
                                      "'resonance')")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for sweep entries")
    sub = parser.add_subparsers(dest="command", required=True)

    res = sub.add_parser("resonance", help="close a phase set, list tuples")
    res.add_argument("--phi0", required=True,
                     help="semicolon-separated wave vectors, e.g. '1,0;1,1;0,1'")
    res.add_argument("--signature", default=None,
                     help="one +/- per axis, e.g. '++' (default: elliptic)")
    res.add_argument("--nu", type=int, default=1)
    res.add_argument("--box-radius", type=int, default=0)
    res.add_argument("--max-generations", type=int, default=8)
    res.add_argument("--target", default=None,
                     help="wave vector whose resonant tuples to list")

    for name in ("profiles", "simulate") + _EXPERIMENT_COMMANDS:
        sub.add_parser(name)
    return parser


def _cmd_resonance(args) -> int:
    phi0 = tuple(_parse_vector(part) for part in args.phi0.split(";"))
    if args.signature is None:
        signature = Signature.elliptic(len(phi0[0]))
    else:
        signature = Signature.from_string(args.signature)
    ps = close_phase_set(phi0, signature, args.nu,
                         max_generations=args.max_generations,
                         box_radius=args.box_radius)
    payload = {
        "phi": [list(v) for v in ps.vectors],
        "generations": ps.generations,
        "truncated": ps.truncated,
        "count": len(ps),
    }
    if args.target is not None:
        target = _parse_vector(args.target)
        idx = ps.index(target)
        payload["target"] = list(target)
        payload["tuples"] = [
            [list(ps.vectors[i]) for i in t.indices]
            for t in resonant_tuples(ps, idx)]
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _require_field_config(args, command: str):
    if not args.config:
        raise ConfigError(f"'{command}' needs --config")
    cfg = load_config(args.config)
    if cfg.experiment == "sobolev-asymptotics":
        raise ConfigError(f"'{command}' needs a field experiment config")
    return cfg


def _out_dir(args, cfg) -> str:
    out = args.out or cfg.output_dir
    if not out:
        raise ConfigError("no output directory: pass --out or set output_dir")
    return out


def _cmd_profiles(args) -> int:
    cfg = _require_field_config(args, "profiles")
    out = _out_dir(args, cfg)
    os.makedirs(out, exist_ok=True)
    ps = cfg.phase_set()
    grid = SpectralGrid(cfg.dim, cfg.half_box, cfg.profile_points)
    weight = cfg.eps_list[0] ** (cfg.j_exponent - 1.0)
    state = ProfileSet.from_seed(ps, grid, cfg.seed_amplitudes(grid),
                                 cfg.transport_params(weight))
    times = [cfg.t_final * k / cfg.snapshots for k in range(cfg.snapshots + 1)]
    index = {"modes": [list(v) for v in ps.vectors], "times": times,
             "files": []}
    for k, t in enumerate(times):
        state = evolve_profiles(state, t, cfg.profile_dt)
        for j, amp in enumerate(state.amplitudes):
            fname = f"profile_j{j}_t{k}.wglf"
            write_snapshot(amp, os.path.join(out, fname))
            index["files"].append({"file": fname, "mode": j, "t": t})
    _atomic_write(os.path.join(out, "index.json"),
                  json.dumps(index, sort_keys=True, indent=2) + "\n")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _require_field_config(args, "simulate")
    out = _out_dir(args, cfg)
    os.makedirs(out, exist_ok=True)
    eps = cfg.eps_list[0]
    ps = cfg.phase_set()
    pgrid = SpectralGrid(cfg.dim, cfg.half_box, cfg.profile_points)
    state = ProfileSet.from_seed(ps, pgrid, cfg.seed_amplitudes(pgrid),
                                 cfg.transport_params(eps ** (cfg.j_exponent - 1.0)))
    grid = cfg.grid_for(eps)
    params = cfg.model_for(eps)
    u = oscillatory_initial_data(grid, ps, cfg.seed_amplitudes(grid), params)
    rows = []
    for k in range(cfg.snapshots + 1):
        t = cfg.t_final * k / cfg.snapshots
        u = evolve_semiclassical(u, t, cfg.dt)
        state = evolve_profiles(state, t, cfg.profile_dt)
        u_app = assemble_approximation(state, params, grid)
        l2, sup, wiener = approximation_error(u, u_app)
        rows.append({"t": t, "mass": u.mass(), "l2_err": l2,
                     "sup_err": sup, "wiener_err": wiener})
    _atomic_write(os.path.join(out, "timeseries.csv"),
                  _csv_text(["t", "mass", "l2_err", "sup_err", "wiener_err"],
                            rows))
    return 0


def _cmd_experiment(args) -> int:
    if not args.config:
        raise ConfigError(f"'{args.command}' needs --config")
    cfg = load_config(args.config)
    if cfg.experiment != args.command:
        raise ConfigError(
            f"config is for {cfg.experiment!r}, not {args.command!r}")
    result = run_experiment(cfg, threads=max(1, args.threads))
    out = _out_dir(args, cfg)
    emit_results(result, out)
    for name, ok, detail in result.assertions:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})\n")
    for key, slope in sorted(result.fitted_slopes.items()):
        sys.stdout.write(f"slope  {key} = {slope:.4f}\n")
    return 0 if result.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "resonance":
            return _cmd_resonance(args)
        if args.command == "profiles":
            return _cmd_profiles(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_experiment(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except AdmissibilityError as exc:
        sys.stderr.write(f"admissibility error: {exc}\n")
        return 3
    except ResolutionError as exc:
        sys.stderr.write(f"resolution error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
