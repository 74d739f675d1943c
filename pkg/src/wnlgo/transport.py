"""Coupled transport of slowly modulated mode amplitudes.

One complex amplitude a_j rides each wave vector kappa_j of a resonance-closed
phase set.  Between interactions each a_j is advected at the constant group
velocity v_j = (eta_1 kappa_{j,1}, ..., eta_d kappa_{j,d}); the interactions
couple the amplitudes through every resonant (2 nu + 1)-tuple, with a
non-local coefficient Khat(kappa_j - kappa_last) on the oscillatory products
and the multiplier E acting on the non-oscillatory ones.  Evolution uses
Strang splitting: exact spectral advection half-steps around an RK4 step of
the pointwise coupling, so the only time-discretization error is the
second-order splitting of smooth non-stiff terms.

The ``weight`` parameter scales the whole coupling (the regime where the
nonlinearity enters at a positive power of the small parameter); weight = 1
is the critical case.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np
import scipy.fft

from . import kernels as _kernels
from .grid import GridFunction, SpectralGrid
from .resonance import (PhaseSet, Signature, as_wave_vector, close_phase_set,
                        is_resonant, resonant_tuples)


@dataclass(frozen=True)
class TransportParams:
    """Coupling constants for the amplitude system."""

    lam: float
    mu: float
    nu: int
    kernel: _kernels.KernelSpec
    weight: float = 1.0

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be a positive integer")


@dataclass(frozen=True)
class XNorms:
    """Summed Fourier l1+l2 amplitude norms, plain and weighted."""

    x_norm: float
    xs_norms: dict


@dataclass(frozen=True)
class ProfileSet:
    """Amplitudes a_j(t, x) for every mode of a phase set, at one time."""

    phase_set: PhaseSet
    grid: SpectralGrid
    amplitudes: tuple
    time: float
    params: TransportParams

    def __post_init__(self):
        if len(self.amplitudes) != len(self.phase_set):
            raise ValueError(
                f"{len(self.amplitudes)} amplitudes for "
                f"{len(self.phase_set)} phase-set modes")
        for a in self.amplitudes:
            if a.grid != self.grid:
                raise ValueError("amplitude grids must all match")
        if self.phase_set.dim != self.grid.dim:
            raise ValueError("phase set / grid dimension mismatch")

    @classmethod
    def from_seed(cls, phase_set: PhaseSet, grid: SpectralGrid, seed_amplitudes,
                  params: TransportParams, time: float = 0.0) -> "ProfileSet":
        """Start from data on the seed modes; generated modes start at zero."""
        seed_amplitudes = list(seed_amplitudes)
        if len(seed_amplitudes) != phase_set.origin_count:
            raise ValueError(
                f"need {phase_set.origin_count} seed amplitudes, "
                f"got {len(seed_amplitudes)}")
        amps = list(seed_amplitudes)
        amps += [GridFunction.zeros(grid)
                 for _ in range(len(phase_set) - phase_set.origin_count)]
        return cls(phase_set, grid, tuple(amps), time, params)

    def stack(self) -> np.ndarray:
        return np.stack([a.values for a in self.amplitudes])

    def total_mass(self) -> float:
        """sum_j ||a_j||_{L2}^2 — conserved by the evolution."""
        return float(sum(a.l2_norm() ** 2 for a in self.amplitudes))


# -- coupling structure -------------------------------------------------------


@dataclass(frozen=True)
class _Coupling:
    """Index bookkeeping shared by every rhs evaluation on one phase set.

    prefixes are the 2nu-index tuples whose alternating sums vanish; their
    summed product multiplies a_j under the multiplier E and the local mu
    term.  per_target[j] lists the index tuples of every resonant tuple onto
    j whose last index is not j.  For nu = 1 the tuples onto j with last
    index l3 share the pair sum over one difference class, so pair_classes /
    per_target_pairs give the grouped O(count^2) evaluation path.
    """

    prefixes: tuple
    per_target: tuple
    pair_classes: tuple | None
    per_target_pairs: tuple | None


@lru_cache(maxsize=32)
def _coupling_structure(phase_set: PhaseSet) -> _Coupling:
    count = len(phase_set)
    nu = phase_set.nu
    per_target = []
    for j in range(count):
        entries = []
        for rt in resonant_tuples(phase_set, j):
            if rt.indices[-1] != j:
                entries.append(rt.indices)
        per_target.append(tuple(entries))

    sig = phase_set.signature
    vectors = phase_set.vectors
    quads = [sig.quad(v) for v in vectors]
    d = phase_set.dim
    prefixes = []
    for combo in _iproduct(range(count), repeat=2 * nu):
        lin = [0] * d
        quad = 0
        for pos, idx in enumerate(combo):
            s = 1 if pos % 2 == 0 else -1
            quad += s * quads[idx]
            for c in range(d):
                lin[c] += s * vectors[idx][c]
        if quad == 0 and not any(lin):
            prefixes.append(combo)

    pair_classes = per_target_pairs = None
    if nu == 1:
        by_key = {}
        for l1 in range(count):
            for l2 in range(count):
                key = (tuple(a - b for a, b in zip(vectors[l1], vectors[l2])),
                       quads[l1] - quads[l2])
                by_key.setdefault(key, []).append((l1, l2))
        class_ids = {}
        classes = []
        grouped = []
        for j in range(count):
            plan = []
            for l3 in sorted({t[-1] for t in per_target[j]}):
                key = (tuple(a - b for a, b in zip(vectors[j], vectors[l3])),
                       quads[j] - quads[l3])
                if key not in class_ids:
                    class_ids[key] = len(classes)
                    classes.append(tuple(by_key[key]))
                plan.append((l3, class_ids[key]))
            grouped.append(tuple(plan))
        pair_classes = tuple(classes)
        per_target_pairs = tuple(grouped)

    return _Coupling(tuple(prefixes), tuple(per_target), pair_classes,
                     per_target_pairs)


def _mode_pair_coefficient(phase_set: PhaseSet, params: TransportParams,
                           j: int, last: int) -> float:
    c = params.mu
    if params.lam != 0.0:
        delta = np.array([a - b for a, b in
                          zip(phase_set.vectors[j], phase_set.vectors[last])],
                         dtype=float)
        c = c + params.lam * _kernels.evaluate(params.kernel, delta)
    return c


def _tuple_coefficients(phase_set: PhaseSet, params: TransportParams,
                        grouped: bool = True):
    """mu + lam*Khat(kappa_j - kappa_last), aligned with the coupling plan.

    Aligned with per_target_pairs (one coefficient per (j, l3) mode pair)
    when grouped and the nu = 1 pair plan is available, otherwise one
    coefficient per tuple of per_target.
    """
    plan = _coupling_structure(phase_set)
    coeffs = []
    if grouped and plan.per_target_pairs is not None:
        for j, entries in enumerate(plan.per_target_pairs):
            coeffs.append(tuple(
                _mode_pair_coefficient(phase_set, params, j, l3)
                for l3, _ in entries))
    else:
        for j, entries in enumerate(plan.per_target):
            coeffs.append(tuple(
                _mode_pair_coefficient(phase_set, params, j, indices[-1])
                for indices in entries))
    return tuple(coeffs)


def _product(stack: np.ndarray, indices) -> np.ndarray:
    """a_{l1} conj(a_{l2}) a_{l3} ... with odd positions conjugated."""
    out = stack[indices[0]].copy()
    for pos, idx in enumerate(indices[1:], start=1):
        out *= np.conj(stack[idx]) if pos % 2 else stack[idx]
    return out


def _rhs_stack(stack: np.ndarray, phase_set: PhaseSet, grid: SpectralGrid,
               params: TransportParams, coeffs, grouped: bool = True) -> np.ndarray:
    plan = _coupling_structure(phase_set)
    shape = stack.shape[1:]
    s_field = np.zeros(shape, dtype=np.complex128)
    for combo in plan.prefixes:
        s_field += _product(stack, combo)
    if params.lam != 0.0:
        es = _kernels.apply_raw(params.kernel, grid, s_field)
        common = params.lam * es + params.mu * s_field
    else:
        common = params.mu * s_field
    out = np.empty_like(stack)
    if grouped and plan.per_target_pairs is not None:
        sums = [None] * len(plan.pair_classes)
        for cid, pairs in enumerate(plan.pair_classes):
            acc = stack[pairs[0][0]] * np.conj(stack[pairs[0][1]])
            for l1, l2 in pairs[1:]:
                acc += stack[l1] * np.conj(stack[l2])
            sums[cid] = acc
        for j in range(stack.shape[0]):
            acc = common * stack[j]
            for (l3, cid), c in zip(plan.per_target_pairs[j], coeffs[j]):
                acc += c * (sums[cid] * stack[l3])
            out[j] = acc
    else:
        for j in range(stack.shape[0]):
            acc = common * stack[j]
            for indices, c in zip(plan.per_target[j], coeffs[j]):
                acc += c * _product(stack, indices)
            out[j] = acc
    return (-1j * params.weight) * out


def transport_rhs(state: ProfileSet) -> list:
    """Interaction part of d a_j / dt (advection excluded; handled by splitting)."""
    coeffs = _tuple_coefficients(state.phase_set, state.params)
    rhs = _rhs_stack(state.stack(), state.phase_set, state.grid, state.params, coeffs)
    return [GridFunction(state.grid, r) for r in rhs]


# -- evolution ----------------------------------------------------------------


def _advection_phases(state: ProfileSet, dt: float) -> np.ndarray:
    """exp(-i dt v_j . xi) for each mode, stacked; advection by dt in Fourier."""
    grid = state.grid
    etas = state.phase_set.signature.etas
    xi = grid.frequency_axis()
    out = np.empty((len(state.phase_set),) + grid.shape, dtype=np.complex128)
    for j, kappa in enumerate(state.phase_set.vectors):
        dot = np.zeros(grid.shape)
        for axis in range(grid.dim):
            v = etas[axis] * kappa[axis]
            if v:
                sh = [1] * grid.dim
                sh[axis] = grid.points_per_axis
                dot = dot + v * xi.reshape(sh)
        out[j] = np.exp(-1j * dt * dot)
    return out


def _advect(stack: np.ndarray, phases: np.ndarray, axes) -> np.ndarray:
    return scipy.fft.ifftn(
        phases * scipy.fft.fftn(stack, axes=axes, workers=1), axes=axes, workers=1)


def evolve_profiles(state: ProfileSet, t_end: float, dt: float) -> ProfileSet:
    """Advance the amplitude system to t_end with Strang splitting.

    Half-step exact advection / RK4 on the interaction terms / half-step
    advection, with interior half-steps fused.  Second order in dt.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    span = t_end - state.time
    if span < 0:
        raise ValueError("t_end must not precede the current state time")
    if span == 0:
        return state
    n_steps = max(1, round(span / dt))
    dt = span / n_steps

    phase_set, grid, params = state.phase_set, state.grid, state.params
    coeffs = _tuple_coefficients(phase_set, params)
    axes = tuple(range(1, grid.dim + 1))
    half = _advection_phases(state, 0.5 * dt)
    full = half * half

    def rhs(a):
        return _rhs_stack(a, phase_set, grid, params, coeffs)

    stack = state.stack()
    stack = _advect(stack, half, axes)
    for step in range(n_steps):
        k1 = rhs(stack)
        k2 = rhs(stack + (0.5 * dt) * k1)
        k3 = rhs(stack + (0.5 * dt) * k2)
        k4 = rhs(stack + dt * k3)
        stack += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        stack = _advect(stack, full if step < n_steps - 1 else half, axes)

    amps = tuple(GridFunction(grid, a) for a in stack)
    return replace(state, amplitudes=amps, time=state.time + span)


# -- derived quantities ---------------------------------------------------------


def zero_mode_rate(kappas, alphas, params: TransportParams,
                   signature: Signature | None = None) -> GridFunction:
    """Instantaneous creation rate of the zero mode from three seed modes.

    For seed vectors forming the rectangle 0, kappa_1, kappa_2 = kappa_1 +
    kappa_3, kappa_3 (with orthogonal nonzero kappa_1, kappa_3), the rate at
    t=0 is assembled directly from the resonant tuples whose entries all
    carry seed data — for nu = 1 this reduces to the closed form
    -i * weight * (2 mu + lam (Khat(kappa_1) + Khat(kappa_3))) a_1 conj(a_2) a_3.
    Computed without any grid transform, so it can cross-check the evolved
    dynamics.
    """
    kappas = [as_wave_vector(k) for k in kappas]
    alphas = list(alphas)
    if len(kappas) != 3 or len(alphas) != 3:
        raise ValueError("expected exactly three seed modes")
    d = len(kappas[0])
    if signature is None:
        signature = Signature.elliptic(d)
    k1, k2, k3 = kappas
    origin = (0,) * d
    if origin in kappas or len(set(kappas)) != 3:
        raise ValueError("seed modes must be distinct and nonzero")
    if not is_resonant(signature, 1, (k1, k2, k3), origin):
        raise ValueError("seed modes do not interact onto the zero mode")

    radius = max(abs(c) for k in kappas for c in k)
    ps = close_phase_set(kappas, signature, params.nu, box_radius=radius)
    j0 = ps.index(origin)
    grid = alphas[0].grid
    acc = np.zeros(grid.shape, dtype=np.complex128)
    stack = np.stack([a.values for a in alphas])
    for rt in resonant_tuples(ps, j0):
        if any(idx >= 3 for idx in rt.indices):
            continue
        last = rt.indices[-1]
        c = params.mu
        if params.lam != 0.0:
            delta = np.array(kappas[last], dtype=float)
            c = c + params.lam * _kernels.evaluate(params.kernel, delta)
        acc += c * _product(stack, rt.indices)
    return GridFunction(grid, (-1j * params.weight) * acc)


def _l1_l2(fhat: np.ndarray, measure: float):
    l1 = measure * float(np.sum(np.abs(fhat)))
    l2 = float(np.sqrt(measure * np.sum(np.abs(fhat) ** 2)))
    return l1, l2


def profile_norms(state: ProfileSet, s_list=()) -> XNorms:
    """Summed Fourier l1+l2 norms of the amplitudes, with s-weighted variants.

    The s-weighted norm adds <kappa_j>^s mode weights and all derivative
    weights |xi^beta| for multi-indices |beta| <= s.
    """
    grid = state.grid
    measure = grid.spectral_cell_volume
    hats = [grid.forward(a.values) for a in state.amplitudes]
    base = [_l1_l2(h, measure) for h in hats]
    x_norm = float(sum(l1 + l2 for l1, l2 in base))

    xs = {}
    for s in s_list:
        if s != int(s) or s < 0:
            raise ValueError("s-weighted norms are defined for integer s >= 0")
        s = int(s)
        mode_part = 0.0
        for (l1, l2), kappa in zip(base, state.phase_set.vectors):
            bracket = (1.0 + sum(c * c for c in kappa)) ** (s / 2.0)
            mode_part += bracket * (l1 + l2)
        deriv_part = 0.0
        xi_axes = [np.abs(grid.frequency_axis())] * grid.dim
        for beta in _iproduct(range(s + 1), repeat=grid.dim):
            if sum(beta) > s:
                continue
            weight = np.ones(grid.shape)
            for axis, power in enumerate(beta):
                if power:
                    sh = [1] * grid.dim
                    sh[axis] = grid.points_per_axis
                    weight = weight * (xi_axes[axis] ** power).reshape(sh)
            for h in hats:
                l1, l2 = _l1_l2(weight * h, measure)
                deriv_part += l1 + l2
        xs[s] = mode_part + deriv_part
    return XNorms(x_norm, xs)
