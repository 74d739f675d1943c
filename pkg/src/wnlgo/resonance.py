"""Resonance combinatorics for characteristic wave vectors.

A (2 nu + 1)-tuple of wave vectors (kappa_{l_1}, ..., kappa_{l_{2nu+1}})
interacts resonantly onto a target kappa when both the alternating vector sum
and the alternating signed-square sum close:

    sum_k (-1)^{k+1} kappa_{l_k}          == kappa,
    sum_k (-1)^{k+1} Q(kappa_{l_k})       == Q(kappa),   Q(v) = sum_m eta_m v_m^2.

Everything in this module is exact integer arithmetic on Z^d; no floating
point enters any resonance decision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels as _kernels


def as_wave_vector(v) -> tuple:
    """Coerce to a tuple of exact Python ints, rejecting non-integers."""
    out = []
    for c in v:
        i = int(c)
        if i != c:
            raise ValueError(f"wave vectors must be integer lattice points, got {v}")
        out.append(i)
    return tuple(out)


@dataclass(frozen=True)
class Signature:
    """The vector of signs eta in {-1,+1}^d defining the signed Laplacian."""

    etas: tuple

    def __post_init__(self):
        if not self.etas or any(e not in (-1, 1) for e in self.etas):
            raise ValueError(f"signature entries must be +-1, got {self.etas}")
        object.__setattr__(self, "etas", tuple(int(e) for e in self.etas))

    @classmethod
    def elliptic(cls, dim: int) -> "Signature":
        return cls((1,) * dim)

    @classmethod
    def from_string(cls, s: str) -> "Signature":
        """Parse e.g. '+-' into (+1, -1)."""
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[c] for c in s))
        except KeyError:
            raise ValueError(f"signature string must use only '+'/'-', got {s!r}")

    @property
    def dim(self) -> int:
        return len(self.etas)

    def quad(self, kappa) -> int:
        """Q(kappa) = sum_m eta_m kappa_m^2 (exact)."""
        return sum(e * int(c) * int(c) for e, c in zip(self.etas, kappa))


def is_resonant(signature: Signature, nu: int, kappas, target) -> bool:
    """Exact test of the two resonance conditions for a (2 nu + 1)-tuple."""
    kappas = [as_wave_vector(k) for k in kappas]
    target = as_wave_vector(target)
    d = signature.dim
    if len(kappas) != 2 * nu + 1:
        raise ValueError(f"expected {2 * nu + 1} wave vectors, got {len(kappas)}")
    if any(len(k) != d for k in kappas) or len(target) != d:
        raise ValueError("wave vector dimension mismatch with signature")
    lin = tuple(
        sum((-1) ** idx * k[m] for idx, k in enumerate(kappas)) for m in range(d))
    if lin != target:
        return False
    quad = sum((-1) ** idx * signature.quad(k) for idx, k in enumerate(kappas))
    return quad == signature.quad(target)


def rectangle_oracle(kappas, target) -> bool:
    """Geometric test equivalent to is_resonant for nu=1, all-plus signature.

    (kappa_k, kappa_l, kappa_m) hits kappa_j exactly when the four points are
    the corners of a (possibly degenerate) rectangle with kappa_l opposite
    kappa_j: the diagonals share a midpoint and the sides at the kappa_l
    corner are orthogonal.  Deliberately a different formulation from the
    alternating-sum test, so the two can cross-check each other.
    """
    k, l, m = (as_wave_vector(v) for v in kappas)
    j = as_wave_vector(target)
    if any(len(v) != len(j) for v in (k, l, m)):
        raise ValueError("wave vector dimension mismatch")
    if tuple(a + b for a, b in zip(k, m)) != tuple(a + b for a, b in zip(j, l)):
        return False
    dot = sum((a - b) * (c - b) for a, b, c in zip(k, l, m))
    return dot == 0


def parallelogram_oracle(kappas, target) -> bool:
    """Geometric test equivalent to is_resonant for nu=1, signature (-1,+1).

    After translating everything by -target (the conditions are translation
    invariant), the tuple resonates exactly when kappa'_l = kappa'_k +
    kappa'_m and the translated components satisfy p'_k p'_m == q'_k q'_m.
    Geometrically: a parallelogram whose corners pair across the first
    bisector.
    """
    k, l, m = (as_wave_vector(v) for v in kappas)
    j = as_wave_vector(target)
    if not all(len(v) == 2 for v in (k, l, m, j)):
        raise ValueError("hyperbolic oracle is two-dimensional")
    pk, qk = k[0] - j[0], k[1] - j[1]
    pl, ql = l[0] - j[0], l[1] - j[1]
    pm, qm = m[0] - j[0], m[1] - j[1]
    if (pl, ql) != (pk + pm, qk + qm):
        return False
    return pk * pm == qk * qm


@dataclass(frozen=True)
class ResonantTuple:
    """Indices (l_1, ..., l_{2nu+1}) into a PhaseSet, resonant onto target."""

    indices: tuple
    target: int


@dataclass(frozen=True)
class PhaseSet:
    """A resonance-closed, ordered set of wave vectors.

    The first ``origin_count`` vectors are the seed set (data-carrying
    modes); generated vectors follow in generation order, lexicographically
    sorted within each generation, so indices are stable across runs.
    """

    dim: int
    signature: Signature
    nu: int
    vectors: tuple
    origin_count: int
    truncated_by_box: bool = False
    truncated_by_generations: bool = False
    generations: int = 0

    def __post_init__(self):
        if len(set(self.vectors)) != len(self.vectors):
            raise ValueError("phase set vectors must be distinct")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def truncated(self) -> bool:
        return self.truncated_by_box or self.truncated_by_generations

    def index(self, kappa) -> int:
        return self.vectors.index(as_wave_vector(kappa))

    def array(self) -> np.ndarray:
        return np.array(self.vectors, dtype=np.int64)


def _candidate_targets(vectors, signature: Signature, nu: int):
    """All (target, resonant?) reachable by one interaction, vectorized.

    Returns int64 arrays (tuples_count, d) of alternating linear sums and the
    boolean resonance mask.  int64 is exact here: components stay below a few
    hundred and the squared sums below ~1e7.
    """
    vecs = np.array(vectors, dtype=np.int64)
    d = vecs.shape[1]
    quads = (np.array(signature.etas, dtype=np.int64) * vecs * vecs).sum(axis=1)
    m = 2 * nu + 1
    lin = np.zeros((1, d), dtype=np.int64)
    quad = np.zeros((1,), dtype=np.int64)
    for pos in range(m):
        sign = 1 if pos % 2 == 0 else -1
        lin = (lin[:, None, :] + sign * vecs[None, :, :]).reshape(-1, d)
        quad = (quad[:, None] + sign * quads[None, :]).reshape(-1)
    eta = np.array(signature.etas, dtype=np.int64)
    target_quads = (eta * lin * lin).sum(axis=1)
    return lin, quad == target_quads


def close_phase_set(phi0, signature: Signature, nu: int,
                    max_generations: int = 8, box_radius: int = 0) -> PhaseSet:
    """Grow phi0 to a fixed point under resonant interactions within a box.

    Each generation enumerates every (2 nu + 1)-tuple from the current set,
    adds every resonant target with sup-norm <= box_radius, and stops at a
    fixed point or after max_generations.  Truncation (by the box or by the
    generation limit) is recorded on the result.
    """
    vectors = [as_wave_vector(k) for k in phi0]
    if not vectors:
        raise ValueError("phi0 must be nonempty")
    if len(set(vectors)) != len(vectors):
        raise ValueError("phi0 vectors must be distinct")
    d = signature.dim
    if any(len(v) != d for v in vectors):
        raise ValueError("wave vector dimension mismatch with signature")
    seed_radius = max(abs(c) for v in vectors for c in v)
    if box_radius < seed_radius:
        raise ValueError(
            f"box_radius {box_radius} smaller than seed sup-norm {seed_radius}")

    origin_count = len(vectors)
    known = set(vectors)
    truncated_by_box = False
    generations = 0
    for _ in range(max_generations):
        lin, mask = _candidate_targets(vectors, signature, nu)
        targets = lin[mask]
        inside = np.max(np.abs(targets), axis=1) <= box_radius if len(targets) else \
            np.zeros(0, dtype=bool)
        if np.any(~inside):
            truncated_by_box = True
        fresh = sorted({tuple(int(c) for c in t) for t in targets[inside]} - known)
        if not fresh:
            break
        generations += 1
        vectors.extend(fresh)
        known.update(fresh)
    else:
        # ran out of generations; check whether a fixed point was reached
        lin, mask = _candidate_targets(vectors, signature, nu)
        targets = lin[mask]
        if len(targets):
            inside = np.max(np.abs(targets), axis=1) <= box_radius
            if np.any(~inside):
                truncated_by_box = True
            leftover = {tuple(int(c) for c in t) for t in targets[inside]} - known
            if leftover:
                return PhaseSet(d, signature, nu, tuple(vectors), origin_count,
                                truncated_by_box, True, generations)
    return PhaseSet(d, signature, nu, tuple(vectors), origin_count,
                    truncated_by_box, False, generations)


def resonant_tuples(phase_set: PhaseSet, target_index: int) -> list:
    """Exhaustive list of resonant index tuples onto one target.

    Meet-in-the-middle on the paired (linear, quadratic) partial sums keeps
    the enumeration at O(|J|^{nu+1}) instead of O(|J|^{2nu+1}); output is in
    lexicographic index order.
    """
    vectors = phase_set.vectors
    count = len(vectors)
    if not 0 <= target_index < count:
        raise ValueError(f"target index {target_index} out of range")
    sig, nu = phase_set.signature, phase_set.nu
    m = 2 * nu + 1
    quads = [sig.quad(v) for v in vectors]
    target = vectors[target_index]
    target_quad = quads[target_index]
    d = phase_set.dim

    split = (m + 1) // 2
    signs = [1 if pos % 2 == 0 else -1 for pos in range(m)]

    # partial sums over the tail positions, keyed by what the head must supply
    tail_positions = range(split, m)
    tails: dict = {}
    for combo in itertools.product(range(count), repeat=m - split):
        lin = [0] * d
        quad = 0
        for offset, idx in enumerate(combo):
            s = signs[split + offset]
            quad += s * quads[idx]
            v = vectors[idx]
            for comp in range(d):
                lin[comp] += s * v[comp]
        key = (tuple(lin), quad)
        tails.setdefault(key, []).append(combo)

    found = []
    for combo in itertools.product(range(count), repeat=split):
        lin = [0] * d
        quad = 0
        for offset, idx in enumerate(combo):
            s = signs[offset]
            quad += s * quads[idx]
            v = vectors[idx]
            for comp in range(d):
                lin[comp] += s * v[comp]
        need = (tuple(t - l for t, l in zip(target, lin)), target_quad - quad)
        for tail in tails.get(need, ()):
            found.append(ResonantTuple(combo + tail, target_index))
    found.sort(key=lambda rt: rt.indices)
    return found


def find_admissible_triple(kernel, lam: float, mu: float, dim: int,
                           search_radius: int):
    """Search for three modes whose interaction creates a nonzero zero mode.

    Looks for nonzero orthogonal integer vectors kappa_1, kappa_3 with
    Khat(kappa_1) + Khat(kappa_3) != -2 mu / lambda (tolerance 1e-9) and
    returns (kappa_1, kappa_1 + kappa_3, kappa_3) — the rectangle
    0, kappa_1, kappa_2, kappa_3 — or None when the box holds no such pair.
    Requires lambda != 0 (for lambda = 0 the creation coefficient is just
    2 mu, with no kernel dependence to search over).
    """
    if lam == 0:
        raise ValueError("find_admissible_triple needs lambda != 0")
    if dim < 2:
        raise ValueError("needs dim >= 2")
    ranges = [range(-search_radius, search_radius + 1)] * dim
    candidates = [v for v in itertools.product(*ranges) if any(v)]
    candidates.sort(key=lambda v: (max(abs(c) for c in v),
                                   sum(abs(c) for c in v),
                                   tuple(-c for c in v)))
    threshold = -2.0 * mu / lam
    for k1 in candidates:
        for k3 in candidates:
            if sum(a * b for a, b in zip(k1, k3)) != 0:
                continue
            total = (_kernels.evaluate(kernel, np.array(k1, dtype=float))
                     + _kernels.evaluate(kernel, np.array(k3, dtype=float)))
            if abs(total - threshold) > 1e-9:
                k2 = tuple(a + b for a, b in zip(k1, k3))
                return k1, k2, k3
    return None
