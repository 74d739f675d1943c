"""Split-step Fourier solver for the semiclassically scaled model

    i eps u_t + (eps^2/2) (eta-signed Laplacian) u
        = eps^J (lam E(|u|^{2 nu}) + mu |u|^{2 nu}) u

and assembly of its multiphase geometric-optics approximation.

Strang splitting with an exactly solvable nonlinear substep: the potential
lam E(|u|^{2nu}) + mu |u|^{2nu} is real (E has a real even symbol), so |u| is
pointwise conserved by the nonlinear flow and the substep is a pure phase
rotation.  The free flow is diagonal in Fourier.  Both substeps preserve the
discrete L2 norm to rounding, making the scheme unconditionally stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import kernels as _kernels
from .errors import AdmissibilityError, ResolutionError
from .grid import GridFunction, SpectralGrid, resample
from .norms import wiener_norm
from .resonance import PhaseSet, Signature, as_wave_vector
from .transport import ProfileSet


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters: eps, nonlinearity weight exponent, couplings."""

    eps: float
    j_exponent: float
    lam: float
    mu: float
    nu: int
    signature: Signature
    kernel: _kernels.KernelSpec

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.j_exponent < 1:
            raise ValueError("j_exponent must be >= 1")
        if self.nu < 1 or self.nu != int(self.nu):
            raise ValueError("nu must be a positive integer")


@dataclass(frozen=True)
class SemiclassicalField:
    """A field value on a grid at one time, tagged with its model."""

    values: GridFunction
    time: float
    params: ModelParams

    @property
    def grid(self) -> SpectralGrid:
        return self.values.grid

    def mass(self) -> float:
        return self.values.l2_norm() ** 2


def _seed_modes(modes):
    """Accept a PhaseSet (its seed modes carry data) or a list of vectors."""
    if isinstance(modes, PhaseSet):
        return [modes.vectors[j] for j in range(modes.origin_count)]
    return [as_wave_vector(k) for k in modes]


def require_admissible(grid: SpectralGrid, kappas, eps: float) -> None:
    """Each kappa/eps must sit on the frequency lattice xi = (pi/L) Z.

    On failure the error lists nearby admissible eps values: with g the gcd
    of all integer kappa components, eps = L g / (pi k) for positive integers k.
    """
    dxi = grid.spectral_spacing
    for kappa in kappas:
        for comp in kappa:
            r = comp / (eps * dxi)
            if abs(r - round(r)) > 1e-9 * max(1.0, abs(r)):
                g = 0
                for kv in kappas:
                    for c in kv:
                        g = math.gcd(g, abs(int(c)))
                suggestions = []
                if g:
                    base = grid.half_length * g / math.pi
                    k0 = max(1, math.floor(base / eps))
                    suggestions = sorted({base / k for k in
                                          range(k0, k0 + 6)}, reverse=True)
                raise AdmissibilityError(
                    f"kappa component {comp}/eps is off the frequency lattice "
                    f"(eps={eps}, lattice spacing {dxi:.6g}); nearby "
                    f"admissible eps: {suggestions}")


def require_resolved(grid: SpectralGrid, kappas, eps: float) -> None:
    """n per axis >= 8 (max |kappa|_1 / eps) L / pi, so carriers and their
    first harmonics stay well inside the lattice."""
    if not kappas:
        return
    max_l1 = max(sum(abs(c) for c in kappa) for kappa in kappas)
    need = 8.0 * (max_l1 / eps) * grid.half_length / math.pi
    if grid.points_per_axis < need - 1e-9:
        raise ResolutionError(
            f"{grid.points_per_axis} points per axis resolve carriers only up "
            f"to |kappa|_1/eps = {grid.points_per_axis * math.pi / (8 * grid.half_length):.6g}; "
            f"need n >= {math.ceil(need)}")


def _carrier_phase(grid: SpectralGrid, kappa, eps: float) -> np.ndarray:
    """exp(i kappa . x / eps) on the grid."""
    axis = grid.axis()
    phase = np.zeros(grid.shape)
    for ax, comp in enumerate(kappa):
        if comp:
            sh = [1] * grid.dim
            sh[ax] = grid.points_per_axis
            phase = phase + (comp / eps) * axis.reshape(sh)
    return np.exp(1j * phase)


def oscillatory_initial_data(grid: SpectralGrid, modes, alphas,
                             params: ModelParams) -> SemiclassicalField:
    """u0 = sum_j alpha_j(x) exp(i kappa_j . x / eps) on the seed modes."""
    kappas = _seed_modes(modes)
    alphas = list(alphas)
    if len(alphas) != len(kappas):
        raise ValueError(f"{len(kappas)} seed modes but {len(alphas)} amplitudes")
    require_admissible(grid, kappas, params.eps)
    require_resolved(grid, kappas, params.eps)
    total = np.zeros(grid.shape, dtype=np.complex128)
    for kappa, alpha in zip(kappas, alphas):
        envelope = alpha.values if isinstance(alpha, GridFunction) else \
            np.full(grid.shape, complex(alpha))
        total += envelope * _carrier_phase(grid, kappa, params.eps)
    return SemiclassicalField(GridFunction(grid, total), 0.0, params)


def _free_symbol(grid: SpectralGrid, signature: Signature) -> np.ndarray:
    """Q(xi) = sum_m eta_m xi_m^2 on the frequency mesh."""
    out = np.zeros(grid.shape)
    xi2 = grid.frequency_axis() ** 2
    for axis in range(grid.dim):
        sh = [1] * grid.dim
        sh[axis] = grid.points_per_axis
        out = out + signature.etas[axis] * xi2.reshape(sh)
    return out


def evolve_semiclassical(field: SemiclassicalField, t_end: float,
                         dt: float) -> SemiclassicalField:
    """Advance to t_end by Strang splitting (free half / exact nonlinear / free half).

    The nonlinear substep multiplies by exp(-i dt eps^{J-1} V) with the real
    potential V = lam Re E(|u|^{2nu}) + mu |u|^{2nu}; no time-stepping error
    enters there, only the order-2 splitting commutator.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    span = t_end - field.time
    if abs(span) == 0:
        return field
    n_steps = max(1, round(abs(span) / dt))
    dt = span / n_steps  # signed; backward evolution reverses the flow

    p = field.params
    grid = field.grid
    q = _free_symbol(grid, p.signature)
    half = np.exp(-0.5j * p.eps * (0.5 * dt) * q)
    full = half * half
    scale = p.eps ** (p.j_exponent - 1.0)
    two_nu = 2 * p.nu
    kernel = p.kernel if p.lam != 0.0 else None

    u = field.values.values.copy()
    u = scipy.fft.ifftn(half * scipy.fft.fftn(u, workers=1), workers=1)
    for step in range(n_steps):
        density = np.abs(u) ** two_nu
        potential = p.mu * density
        if kernel is not None:
            potential = potential + p.lam * _kernels.apply_raw(
                kernel, grid, density).real
        u *= np.exp((-1j * dt * scale) * potential)
        factor = full if step < n_steps - 1 else half
        u = scipy.fft.ifftn(factor * scipy.fft.fftn(u, workers=1), workers=1)
    return SemiclassicalField(GridFunction(grid, u), field.time + span, field.params)


def assemble_approximation(profiles: ProfileSet, params: ModelParams,
                           grid: SpectralGrid | None = None) -> SemiclassicalField:
    """u_app = sum_j a_j(t, x) exp(i (kappa_j . x - (t/2) Q(kappa_j)) / eps).

    Profiles may live on a coarser grid than the target; they are resampled
    spectrally (exact for band-limited amplitudes).
    """
    ps = profiles.phase_set
    if grid is None:
        grid = profiles.grid
    elif grid.dim != profiles.grid.dim or grid.half_length != profiles.grid.half_length:
        raise ValueError("target grid must share the box of the profile grid")
    require_admissible(grid, ps.vectors, params.eps)
    require_resolved(grid, ps.vectors, params.eps)
    t = profiles.time
    sig = ps.signature
    total = np.zeros(grid.shape, dtype=np.complex128)
    for j, kappa in enumerate(ps.vectors):
        amp = profiles.amplitudes[j]
        if amp.grid.points_per_axis != grid.points_per_axis:
            amp = resample(amp, grid.points_per_axis)
        carrier = _carrier_phase(grid, kappa, params.eps)
        rotation = np.exp(-0.5j * t * sig.quad(kappa) / params.eps)
        total += amp.values * carrier * rotation
    return SemiclassicalField(GridFunction(grid, total), t, params)


def approximation_error(u: SemiclassicalField,
                        u_app: SemiclassicalField) -> tuple:
    """(L2, sup, Wiener) norms of u - u_app; grids and times must match."""
    if u.grid != u_app.grid:
        raise ValueError("fields live on different grids")
    if abs(u.time - u_app.time) > 1e-12 * max(1.0, abs(u.time)):
        raise ValueError(f"fields at different times {u.time} vs {u_app.time}")
    diff = GridFunction(u.grid, u.values.values - u_app.values.values)
    return diff.l2_norm(), diff.sup_norm(), wiener_norm(diff)
