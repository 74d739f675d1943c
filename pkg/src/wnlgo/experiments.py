"""Reproducible experiment harness: config ingestion, sweeps, CSV/JSON output.

Five experiment kinds, all driven by a JSON config and an eps sweep:

* converge          — geometric-optics approximation error vs the split-step
                      reference solution, sup over snapshot times, slope fit.
* zero-mode         — creation rate of the kappa = 0 amplitude from three
                      seed modes, finite-difference vs the closed-form rate,
                      plus the flat (cancelling-coupling) regime.
* more-weakly       — H^s norms of u(t*) and u(0) across eps for weight
                      exponent J > 1: the created zero mode dominates the
                      final norm (slope J-1) while the initial norm scales
                      as eps^{|s|}.
* inflate           — norm-inflation surrogate: the rescaled family
                      phi_n = eps^{-(beta+1-J)/(2 nu)} u^eps(0) shrinks in
                      H^s while psi_n(t_n) grows in H^sigma.
* sobolev-asymptotics — quadrature slopes of the closed-form Gaussian H^s
                      norms (wkb / coherent profiles) or grid slopes of the
                      scaled-profile family.

Determinism: fixed iteration orders everywhere, float repr round-trip
formatting in CSV, no timestamps in data rows; the git hash goes into the
JSON metadata only.  Sweep entries may run on a thread pool (they share no
mutable state); results are merged in config order.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import kernels as _kernels
from .errors import ConfigError
from .grid import GridFunction, SpectralGrid
from .norms import ScaledProfileSpec, gaussian_sobolev_norm, scaled_profile_norm, \
    sobolev_norm
from .resonance import PhaseSet, Signature, close_phase_set
from .solver import ModelParams, assemble_approximation, approximation_error, \
    evolve_semiclassical, oscillatory_initial_data, require_admissible, \
    require_resolved
from .transport import ProfileSet, TransportParams, evolve_profiles, zero_mode_rate


# -- configuration -------------------------------------------------------------

_EXPERIMENTS = ("converge", "zero-mode", "more-weakly", "inflate",
                "sobolev-asymptotics")

_MODEL_KEYS = {"lam": True, "mu": True, "nu": True, "signature": True,
               "kernel": True, "j_exponent": False}
_GRID_KEYS = {"dim": True, "box_pi_multiple": True, "points_scale": False,
              "points_per_axis": False}
_PHASES_KEYS = {"phi0": True, "box_radius": True, "max_generations": False}
_DATA_KEYS = {"profile": True, "amplitudes": True, "width": False}

_FIELD_TOP_KEYS = {"experiment": True, "model": True, "grid": True,
                   "phases": True, "data": True, "eps_list": True, "T": True,
                   "dt": True, "snapshots": False, "profile_points": False,
                   "profile_dt": False, "output_dir": False, "s": False,
                   "sigma": False, "beta": False, "ratio_min": False,
                   "expect_inflation": False, "rate_dt": False}
_SOBOLEV_TOP_KEYS = {"experiment": True, "eps_list": True, "profile_kind": True,
                     "s": False, "sigma": False, "dim": False, "beta": False,
                     "kappa": False, "width": False, "half_length": False,
                     "scaled_points": False, "output_dir": False}


def _check_keys(section: dict, allowed: dict, name: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {name}")
    for key, required in allowed.items():
        if required and key not in section:
            raise ConfigError(f"missing required key {key!r} in {name}")


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex amplitude must be [re, im], got {value}")
        return complex(value[0], value[1])
    return complex(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed and validated experiment description."""

    experiment: str
    raw: dict
    # model (None for sobolev-asymptotics)
    lam: float = 0.0
    mu: float = 0.0
    nu: int = 1
    j_exponent: float = 1.0
    signature: Signature | None = None
    kernel: _kernels.KernelSpec | None = None
    # grid
    dim: int = 0
    box_pi_multiple: float = 1.0
    points_scale: float | None = None
    points_per_axis: int | None = None
    # phases / data
    phi0: tuple = ()
    box_radius: int = 0
    max_generations: int = 8
    profile: str = ""
    amplitudes: tuple = ()
    width: float = 0.0
    # sweep
    eps_list: tuple = ()
    t_final: float = 0.0
    dt: float = 0.0
    rate_dt: float = 1e-3
    snapshots: int = 8
    profile_points: int = 64
    profile_dt: float = 0.0
    s: float | None = None
    sigma: float | None = None
    beta: float = 1.0
    ratio_min: float = 10.0
    expect_inflation: bool = True
    output_dir: str | None = None
    # sobolev-asymptotics
    profile_kind: str = ""
    kappa: tuple = ()
    half_length: float = 0.0
    scaled_points: int = 0

    @property
    def half_box(self) -> float:
        return self.box_pi_multiple * math.pi

    def grid_for(self, eps: float) -> SpectralGrid:
        if self.points_per_axis:
            n = self.points_per_axis
        else:
            n = _pow2_at_least(self.points_scale / eps)
        return SpectralGrid(self.dim, self.half_box, n)

    def phase_set(self) -> PhaseSet:
        return close_phase_set(self.phi0, self.signature, self.nu,
                               max_generations=self.max_generations,
                               box_radius=self.box_radius)

    def model_for(self, eps: float) -> ModelParams:
        return ModelParams(eps, self.j_exponent, self.lam, self.mu, self.nu,
                           self.signature, self.kernel)

    def transport_params(self, weight: float = 1.0) -> TransportParams:
        return TransportParams(self.lam, self.mu, self.nu, self.kernel, weight)

    def seed_amplitudes(self, grid: SpectralGrid) -> list:
        """Seed profiles sampled directly on the given grid."""
        out = []
        for amp in self.amplitudes:
            if self.profile == "uniform":
                out.append(GridFunction.constant(grid, amp))
            else:
                w = self.width

                def envelope(*coords, a=amp, w=w):
                    r2 = sum(c ** 2 for c in coords)
                    return a * np.exp(-r2 / (2.0 * w * w))

                out.append(GridFunction.from_callable(grid, envelope))
        return out


def _pow2_at_least(x: float) -> int:
    n = 4
    while n < x - 1e-9:
        n *= 2
    return n


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    kind = raw["experiment"]
    if kind not in _EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment {kind!r}; expected one of {_EXPERIMENTS}")
    if kind == "sobolev-asymptotics":
        return _parse_sobolev(raw)
    return _parse_field(raw, kind)


def _parse_eps_list(raw) -> tuple:
    eps_list = tuple(float(e) for e in raw)
    if not eps_list:
        raise ConfigError("eps_list must be nonempty")
    if any(e <= 0 for e in eps_list):
        raise ConfigError("eps_list entries must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps_list must be strictly decreasing")
    return eps_list


def _parse_field(raw: dict, kind: str) -> ExperimentConfig:
    _check_keys(raw, _FIELD_TOP_KEYS, "config")
    model = raw["model"]
    _check_keys(model, _MODEL_KEYS, "model")
    grid = raw["grid"]
    _check_keys(grid, _GRID_KEYS, "grid")
    phases = raw["phases"]
    _check_keys(phases, _PHASES_KEYS, "phases")
    data = raw["data"]
    _check_keys(data, _DATA_KEYS, "data")

    if ("points_scale" in grid) == ("points_per_axis" in grid):
        raise ConfigError(
            "grid needs exactly one of 'points_scale' / 'points_per_axis'")
    dim = int(grid["dim"])
    signature = Signature.from_string(model["signature"])
    if signature.dim != dim:
        raise ConfigError("signature length must equal grid dim")
    kernel = _kernels.parse_kernel(model["kernel"], dim)
    profile = data["profile"]
    if profile not in ("gaussian", "uniform"):
        raise ConfigError(f"unknown data profile {profile!r}")
    if profile == "gaussian" and "width" not in data:
        raise ConfigError("missing required key 'width' in data (gaussian profile)")

    cfg = ExperimentConfig(
        experiment=kind,
        raw=raw,
        lam=float(model["lam"]),
        mu=float(model["mu"]),
        nu=int(model["nu"]),
        j_exponent=float(model.get("j_exponent", 1.0)),
        signature=signature,
        kernel=kernel,
        dim=dim,
        box_pi_multiple=float(grid["box_pi_multiple"]),
        points_scale=float(grid["points_scale"]) if "points_scale" in grid else None,
        points_per_axis=int(grid["points_per_axis"]) if "points_per_axis" in grid else None,
        phi0=tuple(tuple(int(c) for c in v) for v in phases["phi0"]),
        box_radius=int(phases["box_radius"]),
        max_generations=int(phases.get("max_generations", 8)),
        profile=profile,
        amplitudes=tuple(_as_complex(a) for a in data["amplitudes"]),
        width=float(data.get("width", 0.0)),
        eps_list=_parse_eps_list(raw["eps_list"]),
        t_final=float(raw["T"]),
        dt=float(raw["dt"]),
        rate_dt=float(raw.get("rate_dt", 1e-3)),
        snapshots=int(raw.get("snapshots", 8)),
        profile_points=int(raw.get("profile_points", 64)),
        profile_dt=float(raw.get("profile_dt", raw["dt"])),
        s=float(raw["s"]) if "s" in raw else None,
        sigma=float(raw["sigma"]) if "sigma" in raw else None,
        beta=float(raw.get("beta", 1.0)),
        ratio_min=float(raw.get("ratio_min", 10.0)),
        expect_inflation=bool(raw.get("expect_inflation", True)),
        output_dir=raw.get("output_dir"),
    )
    _validate_field(cfg)
    return cfg


def _validate_field(cfg: ExperimentConfig) -> None:
    if cfg.t_final < 0 or cfg.dt <= 0:
        raise ConfigError("need T >= 0 and dt > 0")
    phase_set = cfg.phase_set()
    if len(cfg.amplitudes) != phase_set.origin_count:
        raise ConfigError(
            f"{phase_set.origin_count} seed modes need as many amplitudes, "
            f"got {len(cfg.amplitudes)}")
    probe = SpectralGrid(cfg.dim, cfg.half_box, 4)
    for eps in cfg.eps_list:
        require_admissible(probe, phase_set.vectors, eps)
        require_resolved(cfg.grid_for(eps), phase_set.vectors, eps)

    if cfg.experiment == "more-weakly":
        if cfg.s is None:
            raise ConfigError("more-weakly needs 's'")
        if not (cfg.s < 1.0 - cfg.j_exponent < 0.0):
            raise ConfigError(
                f"need s < 1 - J < 0, got s={cfg.s}, J={cfg.j_exponent}")
        if not cfg.j_exponent < 2.0:
            raise ConfigError(f"need J < 2, got J={cfg.j_exponent}")
    if cfg.experiment == "inflate":
        if cfg.s is None or cfg.sigma is None:
            raise ConfigError("inflate needs 's' and 'sigma'")
        _validate_inflation_exponents(cfg)
    if cfg.experiment == "zero-mode":
        k1, k2, k3 = cfg.phi0 if len(cfg.phi0) == 3 else (None, None, None)
        if k1 is None or tuple(a + b for a, b in zip(k1, k3)) != k2 \
                or sum(a * b for a, b in zip(k1, k3)) != 0:
            raise ConfigError(
                "zero-mode needs the rectangle layout kappa_2 = kappa_1 + "
                "kappa_3 with orthogonal kappa_1, kappa_3")


def _validate_inflation_exponents(cfg: ExperimentConfig) -> None:
    s_abs = abs(cfg.s)
    nu, beta, j = cfg.nu, cfg.beta, cfg.j_exponent
    d = cfg.dim
    s_crit = d / 2.0 - 1.0 / nu
    if not 0.0 < beta <= 1.0:
        raise ConfigError(f"need beta in (0, 1], got {beta}")
    if not 1.0 <= j < 2.0:
        raise ConfigError(f"need J in [1, 2), got {j}")
    if j == 1.0:
        if cfg.s >= -1.0 / (2 * nu):
            raise ConfigError(
                f"inflation with J=1 needs s < -1/(2 nu) = {-1.0 / (2 * nu)}, "
                f"got s={cfg.s}")
        if beta <= (d / 2.0 - s_abs) / (s_crit + s_abs):
            raise ConfigError(
                f"need beta > (d/2-|s|)/(s_c+|s|) = "
                f"{(d / 2.0 - s_abs) / (s_crit + s_abs):.6g}, got {beta}")
    else:
        if cfg.s >= -1.0 / (1 + 2 * nu):
            raise ConfigError(
                f"inflation with J>1 needs s < -1/(1+2 nu) = "
                f"{-1.0 / (1 + 2 * nu)}, got s={cfg.s}")
        if beta <= (d / 2.0 - s_abs - (j - 1.0) / nu) / (s_crit + s_abs):
            raise ConfigError("beta too small for the J>1 inflation path")
        if beta * s_crit >= d / 2.0 - (j - 1.0) * (2.0 + 1.0 / nu):
            raise ConfigError("beta s_c must stay below d/2 - (J-1)(2+1/nu)")


def _parse_sobolev(raw: dict) -> ExperimentConfig:
    _check_keys(raw, _SOBOLEV_TOP_KEYS, "config")
    kind = raw["profile_kind"]
    if kind not in ("wkb", "coherent", "scaled"):
        raise ConfigError(f"unknown profile_kind {kind!r}")
    cfg = ExperimentConfig(
        experiment="sobolev-asymptotics",
        raw=raw,
        eps_list=_parse_eps_list(raw["eps_list"]),
        profile_kind=kind,
        s=float(raw["s"]) if "s" in raw else None,
        sigma=float(raw["sigma"]) if "sigma" in raw else None,
        dim=int(raw.get("dim", 1)),
        beta=float(raw.get("beta", 1.0)),
        kappa=tuple(float(c) for c in raw.get("kappa", ())),
        width=float(raw.get("width", 1.0)),
        half_length=float(raw.get("half_length", 32.0)),
        scaled_points=int(raw.get("scaled_points", 0)),
        output_dir=raw.get("output_dir"),
    )
    if kind in ("wkb", "coherent"):
        if cfg.s is None:
            raise ConfigError(f"{kind} profile needs 's'")
        if cfg.s == -cfg.dim / 2.0 or cfg.s >= 0:
            raise ConfigError(
                "s must be negative and away from the -d/2 boundary")
    else:
        if cfg.sigma is None:
            raise ConfigError("scaled profile needs 'sigma'")
        if not cfg.kappa:
            raise ConfigError("scaled profile needs 'kappa'")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)


# -- results -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    """Rows (one per eps, descending), fitted slopes, assertion outcomes."""

    experiment: str
    rows: tuple
    fitted_slopes: dict
    assertions: tuple
    metadata: dict
    series: dict

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.assertions)


def fit_power_law(eps_values, values) -> float:
    """Least-squares slope of log(value) against log(eps)."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.asarray(values, dtype=float)
    if np.any(y <= 0):
        raise ValueError("power-law fit needs positive values")
    y = np.log(y)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def _git_hash() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"],
            cwd=os.path.dirname(os.path.abspath(__file__)),
            capture_output=True, text=True, timeout=10, check=False)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _package_version() -> str:
    try:
        from importlib.metadata import version
        return version("wnlgo")
    except Exception:
        return "unknown"


def _base_metadata(cfg: ExperimentConfig) -> dict:
    return {"config": cfg.raw, "git_hash": _git_hash(),
            "package_version": _package_version()}


def _sweep(cfg: ExperimentConfig, worker, threads: int = 1) -> list:
    """Run worker(eps) for each eps, preserving config order."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, cfg.eps_list))
    return [worker(eps) for eps in cfg.eps_list]


# -- shared profile-evolution helpers -------------------------------------------


def _profile_snapshots(state: ProfileSet, times, dt: float) -> list:
    """Profile states at the given times (must be nondecreasing)."""
    out = []
    for t in times:
        state = evolve_profiles(state, t, dt)
        out.append(state)
    return out


def _zero_mode_history(state: ProfileSet, t_final: float, dt: float,
                       samples: int):
    """(times, ||a_0(t)||_L2, total mass) sampled uniformly on [0, t_final]."""
    ps = state.phase_set
    j0 = ps.index((0,) * ps.dim)
    times = [t_final * k / samples for k in range(samples + 1)]
    norms, masses = [], []
    for snap in _profile_snapshots(state, times, dt):
        norms.append(snap.amplitudes[j0].l2_norm())
        masses.append(snap.total_mass())
    return times, norms, masses


def _first_local_max(times, values) -> float:
    for k in range(1, len(values) - 1):
        if values[k] >= values[k - 1] and values[k] > values[k + 1]:
            return times[k]
    return times[int(np.argmax(values))]


# -- experiment runners ----------------------------------------------------------


def run_convergence(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    if cfg.experiment != "converge":
        raise ConfigError(f"config is for {cfg.experiment!r}, not 'converge'")
    phase_set = cfg.phase_set()
    times = [cfg.t_final * k / cfg.snapshots for k in range(cfg.snapshots + 1)]

    pgrid = SpectralGrid(cfg.dim, cfg.half_box, cfg.profile_points)
    shared_snaps = None
    if cfg.j_exponent == 1.0:
        state0 = ProfileSet.from_seed(phase_set, pgrid,
                                      cfg.seed_amplitudes(pgrid),
                                      cfg.transport_params(1.0))
        shared_snaps = _profile_snapshots(state0, times, cfg.profile_dt)

    def one(eps: float):
        snaps = shared_snaps
        if snaps is None:
            weight = eps ** (cfg.j_exponent - 1.0)
            st = ProfileSet.from_seed(phase_set, pgrid,
                                      cfg.seed_amplitudes(pgrid),
                                      cfg.transport_params(weight))
            snaps = _profile_snapshots(st, times, cfg.profile_dt)
        grid = cfg.grid_for(eps)
        params = cfg.model_for(eps)
        u = oscillatory_initial_data(grid, phase_set,
                                     cfg.seed_amplitudes(grid), params)
        mass0 = u.mass()
        series_rows = []
        worst = {"l2_err": 0.0, "sup_err": 0.0, "wiener_err": 0.0}
        for t, snap in zip(times, snaps):
            u = evolve_semiclassical(u, t, cfg.dt)
            u_app = assemble_approximation(snap, params, grid)
            l2, sup, wiener = approximation_error(u, u_app)
            worst["l2_err"] = max(worst["l2_err"], l2)
            worst["sup_err"] = max(worst["sup_err"], sup)
            worst["wiener_err"] = max(worst["wiener_err"], wiener)
            series_rows.append({"eps": eps, "t": t, "mass": u.mass(),
                                "l2_err": l2, "sup_err": sup,
                                "wiener_err": wiener})
        metrics = dict(worst)
        metrics["mass_drift"] = abs(u.mass() - mass0) / mass0
        return metrics, series_rows

    outcomes = _sweep(cfg, one, threads)
    rows = tuple((eps, m) for eps, (m, _) in zip(cfg.eps_list, outcomes))
    series = {"timeseries": [r for _, (_, s) in zip(cfg.eps_list, outcomes)
                             for r in s]}
    slopes = {}
    if len(cfg.eps_list) >= 2:
        for key in ("l2_err", "sup_err", "wiener_err"):
            vals = [m[key] for _, m in rows]
            if all(v > 0 for v in vals):
                slopes[key] = fit_power_law(cfg.eps_list, vals)

    assertions = []
    if cfg.t_final == 0:
        flat = max(m["l2_err"] for _, m in rows)
        assertions.append(("zero-time errors vanish", flat == 0.0,
                           f"max l2 error {flat}"))
    elif cfg.lam == 0.0:
        sl = slopes.get("l2_err", float("nan"))
        assertions.append(("l2 error slope >= 0.9", sl >= 0.9,
                           f"fitted slope {sl:.4f}"))
    else:
        l2s = [m["l2_err"] for _, m in rows]
        mono = all(b < a for a, b in zip(l2s, l2s[1:]))
        assertions.append(("errors strictly decreasing in eps", mono,
                           f"l2 errors {['%.6g' % v for v in l2s]}"))

    meta = _base_metadata(cfg)
    meta["snapshot_times"] = times
    return SweepResult("converge", rows, slopes, tuple(assertions), meta, series)


def run_zero_mode(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    if cfg.experiment != "zero-mode":
        raise ConfigError(f"config is for {cfg.experiment!r}, not 'zero-mode'")
    phase_set = cfg.phase_set()
    pgrid = SpectralGrid(cfg.dim, cfg.half_box, cfg.profile_points)
    alphas = cfg.seed_amplitudes(pgrid)
    scale = (max(a.sup_norm() for a in alphas) ** 2
             * max(a.l2_norm() for a in alphas))
    flat_case = abs(cfg.lam + 2.0 * cfg.mu) < 1e-14

    def one(eps: float):
        weight = eps ** (cfg.j_exponent - 1.0)
        tparams = cfg.transport_params(weight)
        state0 = ProfileSet.from_seed(phase_set, pgrid, alphas, tparams)
        j0 = phase_set.index((0,) * cfg.dim)

        # finite-difference rate at t = 0, refined once to kill the O(h) term
        h = cfg.rate_dt
        a_h = evolve_profiles(state0, h, h / 8.0).amplitudes[j0].values
        a_h2 = evolve_profiles(state0, h / 2.0, h / 8.0).amplitudes[j0].values
        fd_rate = (4.0 * a_h2 - a_h) / h
        predicted = zero_mode_rate(cfg.phi0, alphas, tparams, cfg.signature)
        pred_sup = float(np.max(np.abs(predicted.values)))
        diff_sup = float(np.max(np.abs(fd_rate - predicted.values)))
        rate_err = diff_sup / pred_sup if pred_sup > 0 else diff_sup

        times, norms, masses = _zero_mode_history(
            state0, cfg.t_final, cfg.profile_dt, cfg.snapshots)
        rows = [{"eps": eps, "t": t, "a0_l2": a, "mass": m}
                for t, a, m in zip(times, norms, masses)]
        metrics = {"rate_rel_err": rate_err, "rate_pred_sup": pred_sup,
                   "a0_max": max(norms), "a0_final": norms[-1]}
        return metrics, rows

    outcomes = _sweep(cfg, one, threads)
    rows = tuple((eps, m) for eps, (m, _) in zip(cfg.eps_list, outcomes))
    series = {"zero_mode": [r for _, (_, s) in zip(cfg.eps_list, outcomes)
                            for r in s]}

    assertions = []
    if flat_case:
        worst = max(m["a0_max"] for _, m in rows)
        assertions.append((
            "zero mode stays flat (cancelling couplings)",
            worst <= 1e-6 * scale,
            f"max ||a0|| {worst:.3e} vs 1e-6 * scale {1e-6 * scale:.3e}"))
    else:
        worst = max(m["rate_rel_err"] for _, m in rows)
        assertions.append((
            "finite-difference rate matches closed form (sup, relative)",
            worst <= 1e-4, f"worst relative error {worst:.3e}"))

    meta = _base_metadata(cfg)
    return SweepResult("zero-mode", rows, {}, tuple(assertions), meta, series)


def run_more_weakly(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    if cfg.experiment != "more-weakly":
        raise ConfigError(f"config is for {cfg.experiment!r}, not 'more-weakly'")
    phase_set = cfg.phase_set()

    def one(eps: float):
        grid = cfg.grid_for(eps)
        params = cfg.model_for(eps)
        u0 = oscillatory_initial_data(grid, phase_set,
                                      cfg.seed_amplitudes(grid), params)
        initial = sobolev_norm(u0.values, cfg.s)
        u = evolve_semiclassical(u0, cfg.t_final, cfg.dt)
        final = sobolev_norm(u.values, cfg.s)
        return {"initial_norm": initial, "final_norm": final,
                "ratio": final / initial}

    outcomes = _sweep(cfg, one, threads)
    rows = tuple(zip(cfg.eps_list, outcomes))
    slopes = {
        "initial_norm": fit_power_law(cfg.eps_list,
                                      [m["initial_norm"] for m in outcomes]),
        "final_norm": fit_power_law(cfg.eps_list,
                                    [m["final_norm"] for m in outcomes]),
    }
    expected_final = cfg.j_exponent - 1.0
    expected_initial = abs(cfg.s)
    last_ratio = outcomes[-1]["ratio"]
    assertions = (
        (f"final-norm slope within 0.15 of {expected_final}",
         abs(slopes["final_norm"] - expected_final) <= 0.15,
         f"fitted {slopes['final_norm']:.4f}"),
        (f"initial-norm slope within 0.15 of {expected_initial}",
         abs(slopes["initial_norm"] - expected_initial) <= 0.15,
         f"fitted {slopes['initial_norm']:.4f}"),
        (f"final/initial ratio at smallest eps exceeds {cfg.ratio_min}",
         last_ratio > cfg.ratio_min, f"ratio {last_ratio:.3f}"),
    )
    meta = _base_metadata(cfg)
    return SweepResult("more-weakly", rows, slopes, assertions, meta, {})


def run_inflation(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    if cfg.experiment != "inflate":
        raise ConfigError(f"config is for {cfg.experiment!r}, not 'inflate'")
    phase_set = cfg.phase_set()

    # tau: first local max of ||a_0(t)|| in the weight-1 profile system.
    # For uniform seed data the profiles are spatially constant, so a tiny
    # grid resolves them exactly.
    scan_points = 4 if cfg.profile == "uniform" else cfg.profile_points
    pgrid = SpectralGrid(cfg.dim, cfg.half_box, scan_points)
    state0 = ProfileSet.from_seed(phase_set, pgrid, cfg.seed_amplitudes(pgrid),
                                  cfg.transport_params(1.0))
    scan_n = max(cfg.snapshots, 200)
    times, norms, _ = _zero_mode_history(state0, cfg.t_final, cfg.profile_dt,
                                         scan_n)
    tau = _first_local_max(times, norms)
    tau_series = [{"t": t, "a0_l2": a} for t, a in zip(times, norms)]

    exponent = (cfg.beta + 1.0 - cfg.j_exponent) / (2.0 * cfg.nu)
    dilate = cfg.beta != 1.0

    def one(eps: float):
        grid = cfg.grid_for(eps)
        params = cfg.model_for(eps)
        u0 = oscillatory_initial_data(grid, phase_set,
                                      cfg.seed_amplitudes(grid), params)
        u_tau = evolve_semiclassical(u0, tau, cfg.dt)
        pref = eps ** (-exponent)
        if dilate:
            ygrid = SpectralGrid(cfg.dim,
                                 grid.half_length * eps ** ((cfg.beta - 1.0) / 2.0),
                                 grid.points_per_axis)
            phi = pref * sobolev_norm(GridFunction(ygrid, u0.values.values), cfg.s)
            psi = pref * sobolev_norm(GridFunction(ygrid, u_tau.values.values),
                                      cfg.sigma)
        else:
            phi = pref * sobolev_norm(u0.values, cfg.s)
            psi = pref * sobolev_norm(u_tau.values, cfg.sigma)
        raw = scipy.fft.fftn(u_tau.values.values, workers=1)
        zero_amp = float(abs(raw[(0,) * cfg.dim])) / grid.size
        return {"phi_norm": phi, "psi_norm": psi, "zero_amp": zero_amp}

    outcomes = _sweep(cfg, one, threads)
    rows = tuple(zip(cfg.eps_list, outcomes))
    phis = [m["phi_norm"] for m in outcomes]
    psis = [m["psi_norm"] for m in outcomes]
    slopes = {"phi_norm": fit_power_law(cfg.eps_list, phis),
              "psi_norm": fit_power_law(cfg.eps_list, psis)}

    assertions = []
    if cfg.expect_inflation:
        mono = all(b < a for a, b in zip(phis, phis[1:]))
        assertions.append(("phi norms strictly decreasing", mono,
                           f"{['%.6g' % v for v in phis]}"))
        # squared-norm bookkeeping: psi^2 must grow >= 1.5x per eps halving
        sq_ratios = [(b / a) ** 2 for a, b in zip(psis, psis[1:])]
        assertions.append(("psi squared norms grow >= 1.5x per halving",
                           all(r >= 1.5 for r in sq_ratios),
                           f"squared ratios {['%.3f' % r for r in sq_ratios]}"))
        predicted = ((cfg.j_exponent - 1.0)
                     - (cfg.beta + 1.0 - cfg.j_exponent) / (2.0 * cfg.nu)
                     - cfg.dim * (1.0 - cfg.beta) / 4.0)
        assertions.append((
            f"psi growth exponent within 0.15 of {predicted}",
            abs(slopes["psi_norm"] - predicted) <= 0.15,
            f"fitted {slopes['psi_norm']:.4f}"))
    else:
        ratios = [b / a for a, b in zip(psis, psis[1:])]
        assertions.append(("no inflation signal (psi norms not growing)",
                           all(r <= 1.1 for r in ratios),
                           f"ratios {['%.3f' % r for r in ratios]}"))

    meta = _base_metadata(cfg)
    meta["tau"] = tau
    return SweepResult("inflate", rows, slopes, tuple(assertions), meta,
                       {"tau_scan": tau_series})


def run_sobolev_asymptotics(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    if cfg.experiment != "sobolev-asymptotics":
        raise ConfigError(
            f"config is for {cfg.experiment!r}, not 'sobolev-asymptotics'")
    d = cfg.dim

    if cfg.profile_kind == "wkb":
        def one(eps):
            return {"norm": math.sqrt(gaussian_sobolev_norm(1 + 1j / eps, cfg.s, d))}
        predicted = abs(cfg.s) if cfg.s > -d / 2.0 else d / 2.0
    elif cfg.profile_kind == "coherent":
        def one(eps):
            sq = eps ** (-d / 2.0) * gaussian_sobolev_norm(1.0 / eps, cfg.s, d)
            return {"norm": math.sqrt(sq)}
        predicted = abs(cfg.s) / 2.0 if cfg.s > -d / 2.0 else d / 4.0
    else:
        w = cfg.width

        def profile(points, w=w):
            r2 = np.sum(points ** 2, axis=-1)
            return np.exp(-r2 / (2.0 * w * w))

        def one(eps):
            spec = ScaledProfileSpec(profile, cfg.kappa, cfg.beta, eps,
                                     half_length=cfg.half_length,
                                     points_per_axis=cfg.scaled_points)
            return {"norm": scaled_profile_norm(spec, cfg.sigma)}
        predicted = None

    outcomes = _sweep(cfg, one, threads)
    rows = tuple(zip(cfg.eps_list, outcomes))
    slope = fit_power_law(cfg.eps_list, [m["norm"] for m in outcomes])
    slopes = {"norm": slope}
    assertions = ()
    if predicted is not None:
        assertions = ((f"fitted slope within 0.05 of {predicted}",
                       abs(slope - predicted) <= 0.05, f"fitted {slope:.5f}"),)
    meta = _base_metadata(cfg)
    return SweepResult("sobolev-asymptotics", rows, slopes, assertions, meta, {})


_RUNNERS = {
    "converge": run_convergence,
    "zero-mode": run_zero_mode,
    "more-weakly": run_more_weakly,
    "inflate": run_inflation,
    "sobolev-asymptotics": run_sobolev_asymptotics,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> SweepResult:
    return _RUNNERS[cfg.experiment](cfg, threads)


# -- output --------------------------------------------------------------------


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(row[h]) for h in header))
    return "\n".join(lines) + "\n"


def emit_results(result: SweepResult, out_dir) -> dict:
    """Write sweep.csv, per-series CSVs, and metadata.json; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    metric_keys = sorted({k for _, m in result.rows for k in m})
    header = ["eps"] + metric_keys
    rows = [dict(m, eps=eps) for eps, m in result.rows]
    sweep_path = os.path.join(out_dir, "sweep.csv")
    _atomic_write(sweep_path, _csv_text(header, rows))
    paths["sweep"] = sweep_path

    for name in sorted(result.series):
        series_rows = result.series[name]
        if not series_rows:
            continue
        keys = list(series_rows[0].keys())
        path = os.path.join(out_dir, f"{name}.csv")
        _atomic_write(path, _csv_text(keys, series_rows))
        paths[name] = path

    meta = dict(result.metadata)
    meta["experiment"] = result.experiment
    meta["fitted_slopes"] = result.fitted_slopes
    meta["assertions"] = [
        {"name": n, "passed": ok, "detail": detail}
        for n, ok, detail in result.assertions]
    meta_path = os.path.join(out_dir, "metadata.json")
    _atomic_write(meta_path, json.dumps(meta, sort_keys=True, indent=2) + "\n")
    paths["metadata"] = meta_path
    return paths
