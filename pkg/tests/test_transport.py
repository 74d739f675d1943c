import math

import numpy as np
import pytest

from wnlgo import GridFunction, ProfileSet, Signature, SpectralGrid, \
    TransportParams, close_phase_set, davey_stewartson, evolve_profiles, \
    identity, profile_norms, shift_in_fourier, transport_rhs, zero_mode_rate
from wnlgo.kernels import apply as apply_kernel
from wnlgo.transport import _rhs_stack, _tuple_coefficients

ELLIPTIC = Signature.elliptic(2)
HYPERBOLIC = Signature.from_string("-+")
RECT = ((1, 0), (1, 1), (0, 1))


def gaussian(grid, amp, width=0.8, center=(0.0, 0.0)):
    mesh = grid.mesh()
    r2 = sum((c - c0) ** 2 for c, c0 in zip(mesh, center))
    return GridFunction(grid, amp * np.exp(-r2 / (2.0 * width ** 2)))


def rect_state(grid, params, signature=ELLIPTIC, amps=(0.9, 0.7, 0.8)):
    ps = close_phase_set(RECT, signature, params.nu, box_radius=4)
    seeds = [gaussian(grid, a) for a in amps]
    return ProfileSet.from_seed(ps, grid, seeds, params)


def test_params_reject_bad_nu():
    with pytest.raises(ValueError):
        TransportParams(lam=1.0, mu=0.0, nu=0, kernel=identity(2))


def test_profile_set_validation():
    grid = SpectralGrid(2, np.pi, 16)
    other = SpectralGrid(2, np.pi, 32)
    params = TransportParams(1.0, 0.0, 1, davey_stewartson())
    ps = close_phase_set(RECT, ELLIPTIC, 1, box_radius=4)
    with pytest.raises(ValueError, match="amplitudes"):
        ProfileSet(ps, grid, (GridFunction.zeros(grid),), 0.0, params)
    with pytest.raises(ValueError, match="seed"):
        ProfileSet.from_seed(ps, grid, [GridFunction.zeros(grid)], params)
    mixed = [GridFunction.zeros(grid), GridFunction.zeros(other),
             GridFunction.zeros(grid)]
    with pytest.raises(ValueError, match="grids"):
        ProfileSet.from_seed(ps, grid, mixed, params)


def test_single_mode_closed_form():
    # one mode: the interaction reduces to a pointwise phase rotation riding
    # the advected envelope, exactly solvable for any multiplier
    grid = SpectralGrid(2, 2 * np.pi, 64)
    params = TransportParams(lam=0.7, mu=0.3, nu=1,
                             kernel=davey_stewartson(), weight=1.0)
    ps = close_phase_set(((1, 1),), ELLIPTIC, 1, box_radius=1)
    alpha = gaussian(grid, 1.0, width=1.1)
    state = ProfileSet.from_seed(ps, grid, [alpha], params)

    t = 0.4
    out = evolve_profiles(state, t, dt=0.004)

    intensity = GridFunction(grid, np.abs(alpha.values) ** 2)
    phase = params.lam * apply_kernel(params.kernel, intensity).values \
        + params.mu * intensity.values
    exact0 = alpha.values * np.exp(-1j * params.weight * t * phase)
    # then advect the exact profile at the group velocity (1, 1)
    exact = shift_in_fourier(GridFunction(grid, exact0), (1.0, 1.0), t)
    err = np.max(np.abs(out.amplitudes[0].values - exact.values))
    assert err < 2e-6


def test_free_streaming_matches_fourier_shift():
    grid = SpectralGrid(2, np.pi, 32)
    params = TransportParams(lam=0.0, mu=0.0, nu=1, kernel=identity(2))
    state = rect_state(grid, params, signature=HYPERBOLIC)
    t = 0.37
    out = evolve_profiles(state, t, dt=0.037)
    etas = HYPERBOLIC.etas
    for j, kappa in enumerate(state.phase_set.vectors):
        v = tuple(e * k for e, k in zip(etas, kappa))
        expect = shift_in_fourier(state.amplitudes[j], v, t)
        err = np.max(np.abs(out.amplitudes[j].values - expect.values))
        assert err < 1e-12


def test_mass_conserved():
    # RK4 on the coupling is not exactly unitary; the drift is O(dt^4) and
    # far below the 1e-8 working tolerance at practical step sizes
    grid = SpectralGrid(2, np.pi, 32)
    params = TransportParams(1.0, 0.5, 1, davey_stewartson(), weight=1.0)
    state = rect_state(grid, params)
    mass0 = state.total_mass()
    drift = [abs(evolve_profiles(state, 0.5, dt=dt).total_mass() - mass0)
             for dt in (0.01, 0.005)]
    assert drift[0] < 1e-9 * mass0
    assert drift[1] < drift[0] / 8.0


def test_strang_is_second_order():
    grid = SpectralGrid(2, np.pi, 32)
    params = TransportParams(1.0, 0.5, 1, davey_stewartson(), weight=1.0)
    state = rect_state(grid, params)
    ref = evolve_profiles(state, 0.3, dt=0.3 / 256).stack()
    errs = []
    for steps in (8, 16, 32):
        got = evolve_profiles(state, 0.3, dt=0.3 / steps).stack()
        errs.append(np.max(np.abs(got - ref)))
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


def test_global_phase_covariance():
    grid = SpectralGrid(2, np.pi, 32)
    params = TransportParams(1.0, -0.3, 1, davey_stewartson(), weight=1.0)
    state = rect_state(grid, params)
    theta = 0.83
    rotated = ProfileSet(
        state.phase_set, grid,
        tuple(GridFunction(grid, np.exp(1j * theta) * a.values)
              for a in state.amplitudes),
        0.0, params)
    a = evolve_profiles(state, 0.25, dt=0.0125).stack()
    b = evolve_profiles(rotated, 0.25, dt=0.0125).stack()
    assert np.max(np.abs(b - np.exp(1j * theta) * a)) < 1e-12


def test_grouped_and_generic_paths_agree():
    # the nu = 1 pair-class evaluation must reproduce the straight
    # tuple-by-tuple sum on a state with every mode populated
    grid = SpectralGrid(2, np.pi, 16)
    params = TransportParams(0.8, -0.4, 1, davey_stewartson(), weight=1.3)
    ps = close_phase_set(RECT, ELLIPTIC, 1, box_radius=4)
    rng = np.random.default_rng(7)
    stack = rng.standard_normal((4,) + grid.shape) \
        + 1j * rng.standard_normal((4,) + grid.shape)
    grouped = _rhs_stack(stack, ps, grid, params,
                         _tuple_coefficients(ps, params, grouped=True),
                         grouped=True)
    generic = _rhs_stack(stack, ps, grid, params,
                         _tuple_coefficients(ps, params, grouped=False),
                         grouped=False)
    scale = np.max(np.abs(generic))
    assert np.max(np.abs(grouped - generic)) < 1e-13 * scale


def test_weight_scales_interaction():
    grid = SpectralGrid(2, np.pi, 16)
    ps = close_phase_set(RECT, ELLIPTIC, 1, box_radius=4)
    seeds = [gaussian(grid, a) for a in (0.9, 0.7, 0.8)]
    base = TransportParams(1.0, 0.5, 1, davey_stewartson(), weight=1.0)
    heavy = TransportParams(1.0, 0.5, 1, davey_stewartson(), weight=2.5)
    r1 = transport_rhs(ProfileSet.from_seed(ps, grid, seeds, base))
    r2 = transport_rhs(ProfileSet.from_seed(ps, grid, seeds, heavy))
    for a, b in zip(r1, r2):
        assert np.allclose(b.values, 2.5 * a.values, rtol=1e-14, atol=0.0)


class TestZeroModeRate:
    def test_rectangle_closed_form(self):
        grid = SpectralGrid(2, np.pi, 32)
        lam, mu = 1.0, 0.25
        params = TransportParams(lam, mu, 1, davey_stewartson(), weight=1.0)
        alphas = [gaussian(grid, a) for a in (0.9, 0.7, 0.8)]
        rate = zero_mode_rate(RECT, alphas, params)
        # Khat(1,0) + Khat(0,1) = 1 for this kernel, so the coefficient
        # collapses to lam + 2 mu
        expect = -1j * (lam + 2 * mu) * alphas[0].values \
            * np.conj(alphas[1].values) * alphas[2].values
        assert np.max(np.abs(rate.values - expect)) < 1e-14

    def test_matches_full_rhs_at_start(self):
        grid = SpectralGrid(2, np.pi, 32)
        params = TransportParams(1.0, 0.25, 1, davey_stewartson(), weight=0.7)
        state = rect_state(grid, params)
        rate = zero_mode_rate(RECT, state.amplitudes[:3], params)
        j0 = state.phase_set.index((0, 0))
        rhs = transport_rhs(state)[j0]
        scale = np.max(np.abs(rate.values))
        assert np.max(np.abs(rhs.values - rate.values)) < 1e-13 * scale

    def test_validation(self):
        grid = SpectralGrid(2, np.pi, 16)
        params = TransportParams(1.0, 0.0, 1, davey_stewartson())
        a = GridFunction.constant(grid, 1.0)
        with pytest.raises(ValueError, match="three"):
            zero_mode_rate(((1, 0), (0, 1)), [a, a], params)
        with pytest.raises(ValueError, match="nonzero"):
            zero_mode_rate(((0, 0), (1, 1), (0, 1)), [a, a, a], params)
        with pytest.raises(ValueError, match="interact"):
            zero_mode_rate(((1, 0), (2, 1), (0, 1)), [a, a, a], params)


def test_evolve_validates_time_arguments():
    grid = SpectralGrid(2, np.pi, 16)
    params = TransportParams(0.0, 1.0, 1, identity(2))
    state = rect_state(grid, params)
    with pytest.raises(ValueError):
        evolve_profiles(state, 0.5, dt=0.0)
    with pytest.raises(ValueError):
        evolve_profiles(state, -0.1, dt=0.1)
    assert evolve_profiles(state, 0.0, dt=0.1) is state


class TestProfileNorms:
    def test_gaussian_reference_values(self):
        # fhat of exp(-|x|^2/2) in d=2 is exp(-|xi|^2/2):
        # integral norms 2*pi (l1) and sqrt(pi) (l2)
        params = TransportParams(0.0, 1.0, 1, identity(2))
        ps = close_phase_set(((1, 1),), ELLIPTIC, 1, box_radius=1)

        def norms_on(half_length, n):
            grid = SpectralGrid(2, half_length, n)
            state = ProfileSet.from_seed(
                ps, grid, [gaussian(grid, 1.0, width=1.0)], params)
            return profile_norms(state, s_list=(1,))

        coarse = norms_on(8.0, 128)
        l1, l2 = 2.0 * math.pi, math.sqrt(math.pi)
        assert abs(coarse.x_norm - (l1 + l2)) < 1e-8
        # s = 1 adds the <kappa> mode weight plus the plain and the two
        # first-derivative terms; the |xi| kink makes the lattice sum
        # second-order accurate in the spectral spacing, not spectral
        d1_l1 = 2.0 * math.sqrt(2.0 * math.pi)
        d1_l2 = math.sqrt(math.pi / 2.0)
        expect = math.sqrt(3.0) * (l1 + l2) + (l1 + l2) + 2.0 * (d1_l1 + d1_l2)
        err_coarse = abs(coarse.xs_norms[1] - expect)
        err_fine = abs(norms_on(16.0, 256).xs_norms[1] - expect)
        assert err_coarse < 5e-3 * expect
        assert 3.5 < err_coarse / err_fine < 4.5

    def test_rejects_bad_weights(self):
        grid = SpectralGrid(2, np.pi, 16)
        params = TransportParams(0.0, 1.0, 1, identity(2))
        state = rect_state(grid, params)
        with pytest.raises(ValueError):
            profile_norms(state, s_list=(0.5,))
        with pytest.raises(ValueError):
            profile_norms(state, s_list=(-1,))
