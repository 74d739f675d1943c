"""Homogeneous degree-zero Fourier multipliers and their grid action.

A kernel here is a real, even symbol ``Khat`` on R^d \\ {0} that is invariant
under positive rescaling of its argument.  Applied to a grid function it acts
as ``E(f) = F^{-1}(Khat . F f)``.  The symbol has no canonical value at the
origin; for the non-trivial kernels the discrete zero mode is multiplied by 0
(for the Davey-Stewartson symbol xi_1^2/|xi|^2 this matches the operator
d_x1 Laplace^{-1} d_x1, which annihilates constants; the dipolar symbol has
zero angular average).  The identity and zero kernels keep their constant
symbol at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridFunction, SpectralGrid

DIPOLAR_SCALE = (2.0 / 3.0) * (2.0 * np.pi) ** 2.5
_VALIDATION_TOL = 1e-10


@dataclass(frozen=True)
class KernelSpec:
    """A degree-zero Fourier multiplier, selectable by kind.

    Use the constructors :func:`identity`, :func:`zero`,
    :func:`davey_stewartson`, :func:`dipolar`, :func:`custom` rather than
    instantiating directly.
    """

    kind: str
    dim: int
    axis: tuple = ()
    fn: object = None

    def __post_init__(self):
        if self.kind not in ("identity", "zero", "ds", "dipolar", "custom"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "ds" and self.dim != 2:
            raise ValueError("Davey-Stewartson kernel requires dim=2")
        if self.kind == "dipolar":
            if self.dim != 3:
                raise ValueError("dipolar kernel requires dim=3")
            ax = np.asarray(self.axis, dtype=float)
            if ax.shape != (3,) or abs(np.linalg.norm(ax) - 1.0) > 1e-12:
                raise ValueError("dipolar axis must be a unit 3-vector")
        if self.kind == "custom":
            if not callable(self.fn):
                raise ValueError("custom kernel needs a callable symbol")
            _validate_custom(self.fn, self.dim)


def identity(dim: int) -> KernelSpec:
    """Khat == 1 (the multiplier acts as the identity)."""
    return KernelSpec("identity", dim)


def zero(dim: int) -> KernelSpec:
    """Khat == 0."""
    return KernelSpec("zero", dim)


def davey_stewartson() -> KernelSpec:
    """Khat(xi) = xi_1^2 / (xi_1^2 + xi_2^2) on R^2."""
    return KernelSpec("ds", 2)


def dipolar(axis) -> KernelSpec:
    """Dipole-dipole symbol (2/3)(2 pi)^{5/2} (3 cos^2 Theta - 1) on R^3.

    Theta is the angle between xi and the dipole axis.
    """
    ax = np.asarray(axis, dtype=float)
    return KernelSpec("dipolar", 3, axis=tuple(ax))


def custom(dim: int, fn) -> KernelSpec:
    """Wrap a user symbol; evenness, reality and homogeneity are spot-checked.

    The callable is probed on 32 random +/-xi pairs and rays c*xi for
    c in {0.5, 2, 10}; violations raise ValueError at construction.
    """
    return KernelSpec("custom", dim, fn=fn)


def parse_kernel(text: str, dim: int) -> KernelSpec:
    """Build a kernel from a CLI/config string.

    Accepted forms: "identity", "zero", "ds", "dipolar:ax,ay,az".
    """
    if text == "identity":
        return identity(dim)
    if text == "zero":
        return zero(dim)
    if text == "ds":
        if dim != 2:
            raise ValueError(f"'ds' kernel is two-dimensional, got dim={dim}")
        return davey_stewartson()
    if text.startswith("dipolar:"):
        if dim != 3:
            raise ValueError(f"'dipolar' kernel is three-dimensional, got dim={dim}")
        parts = text.split(":", 1)[1].split(",")
        if len(parts) != 3:
            raise ValueError(f"dipolar axis needs three components, got {text!r}")
        return dipolar(tuple(float(p) for p in parts))
    raise ValueError(f"unknown kernel {text!r}")


def _call_symbol(fn, pts: np.ndarray) -> np.ndarray:
    """Evaluate a custom symbol on an (N, d) stack, tolerating scalar-only fns."""
    try:
        out = np.asarray(fn(pts))
        if out.shape == (pts.shape[0],):
            return out
    except Exception:
        pass
    return np.array([fn(p) for p in pts])


def _validate_custom(fn, dim: int) -> None:
    rng = np.random.default_rng(1234)
    pts = rng.normal(size=(32, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    base = _call_symbol(fn, pts)
    if np.iscomplexobj(base) and np.max(np.abs(np.imag(base))) > _VALIDATION_TOL:
        raise ValueError("custom kernel symbol must be real-valued")
    base = np.real(base)
    neg = np.real(_call_symbol(fn, -pts))
    if np.max(np.abs(neg - base)) > _VALIDATION_TOL:
        raise ValueError("custom kernel symbol must be even: Khat(-xi) == Khat(xi)")
    for c in (0.5, 2.0, 10.0):
        scaled = np.real(_call_symbol(fn, c * pts))
        if np.max(np.abs(scaled - base)) > _VALIDATION_TOL:
            raise ValueError(
                "custom kernel symbol must be homogeneous of degree zero")


def evaluate(kernel: KernelSpec, xi) -> float:
    """Khat(xi) for a single nonzero frequency vector."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (kernel.dim,):
        raise ValueError(f"expected {kernel.dim}-vector, got shape {xi.shape}")
    if not np.any(xi):
        raise ValueError("kernel symbol is undefined at xi = 0; "
                         "use apply(), which fixes the zero-mode convention")
    if kernel.kind == "identity":
        return 1.0
    if kernel.kind == "zero":
        return 0.0
    if kernel.kind == "ds":
        return float(xi[0] ** 2 / (xi[0] ** 2 + xi[1] ** 2))
    if kernel.kind == "dipolar":
        cos_theta = np.dot(kernel.axis, xi) / np.linalg.norm(xi)
        return float(DIPOLAR_SCALE * (3.0 * cos_theta ** 2 - 1.0))
    return float(np.real(_call_symbol(kernel.fn, xi[None, :])[0]))


@lru_cache(maxsize=64)
def _multiplier(kernel: KernelSpec, grid: SpectralGrid) -> np.ndarray:
    """Symbol sampled on the grid frequency lattice, zero mode fixed."""
    if kernel.kind == "identity":
        return np.ones(grid.shape)
    if kernel.kind == "zero":
        return np.zeros(grid.shape)
    mesh = grid.frequency_mesh()
    if kernel.kind == "ds":
        num = mesh[0] ** 2
        den = mesh[0] ** 2 + mesh[1] ** 2
        den[0, 0] = 1.0
        out = num / den
    elif kernel.kind == "dipolar":
        dot = sum(a * m for a, m in zip(kernel.axis, mesh))
        norm2 = sum(m ** 2 for m in mesh)
        norm2[(0,) * grid.dim] = 1.0
        out = DIPOLAR_SCALE * (3.0 * dot ** 2 / norm2 - 1.0)
    else:
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        pts[0] = 1.0  # placeholder for the origin, overwritten below
        out = np.real(_call_symbol(kernel.fn, pts)).reshape(grid.shape)
    out[(0,) * grid.dim] = 0.0
    out.setflags(write=False)
    return out


def apply(kernel: KernelSpec, f: GridFunction) -> GridFunction:
    """E(f) = F^{-1}(Khat . F f) with the zero-mode convention above."""
    if f.grid.dim != kernel.dim:
        raise ValueError(
            f"kernel dim {kernel.dim} != field dim {f.grid.dim}")
    coeffs = f.grid.forward(f.values)
    return GridFunction(f.grid, f.grid.inverse(_multiplier(kernel, f.grid) * coeffs))


def apply_raw(kernel: KernelSpec, grid: SpectralGrid, values: np.ndarray) -> np.ndarray:
    """Array-level version of :func:`apply` for hot loops."""
    return grid.inverse(_multiplier(kernel, grid) * grid.forward(values))


def oscillatory_coefficient_limit(kernel: KernelSpec, kappa, A: GridFunction,
                                  eps_list) -> list:
    """L2 distance between e^{-ik.x/eps} E(A e^{ik.x/eps}) and Khat(kappa) A.

    As eps decreases, the modulated multiplier sees Khat(kappa + eps zeta) on
    the spectral support of A, so the sequence decays toward 0 for symbols
    continuous at kappa.  kappa must be nonzero (the limit coefficient
    Khat(kappa) would otherwise be undefined).
    """
    kappa = np.asarray(kappa, dtype=float)
    if not np.any(kappa):
        raise ValueError("kappa must be nonzero")
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be strictly decreasing")
    if A.grid.dim != kernel.dim:
        raise ValueError("grid dimension mismatch")
    k_at_kappa = evaluate(kernel, kappa)
    mesh = A.grid.mesh()
    out = []
    for eps in eps_list:
        phase = np.exp(1j * sum(k / eps * m for k, m in zip(kappa, mesh)))
        modulated = GridFunction(A.grid, A.values * phase)
        back = apply(kernel, modulated).values / phase
        diff = GridFunction(A.grid, back - k_at_kappa * A.values)
        out.append(diff.l2_norm())
    return out
