import math

import numpy as np
import pytest

from osotoc.bath import ContinuousKernel, DiscreteKernel, dephasing_integral_D
from osotoc.exceptions import (
    CapabilityError,
    NonCommutingChainError,
    SpanMismatchError,
)
from osotoc.hamiltonians import discretize_bath
from osotoc.influence import (
    PathConfiguration,
    PiecewiseTrajectory,
    branch_phase_table,
    chi_t,
    dephasing_otoc,
    dephasing_series,
    displacement_trace_analytic,
    displacement_trace_oracle,
    kernel_dephasing_D,
    phi_B,
    phi_fbte,
    phi_pbte,
    xi_phase_t,
)
from osotoc.models import (
    BathMode,
    BathSpec,
    ObservableSpec,
    SpectralDensity,
    SpinChainSpec,
    ThermalContext,
)
from osotoc.quantum import FockSpace, State, basis_projector
from osotoc.types import Axis, ChainFamily, Convention, Scheme

MODE = BathMode(omega=1.0, coupling=1.0)
CTX = ThermalContext(1.0)


def _constant(value: float, span: float) -> PiecewiseTrajectory:
    return PiecewiseTrajectory.constant(value, span)


def test_trajectory_validation() -> None:
    """Test contiguity, range and start-time checks."""
    with pytest.raises(ValueError):
        PiecewiseTrajectory(((0.0, 1.0, 1.0), (1.5, 2.0, 1.0)))
    with pytest.raises(ValueError):
        PiecewiseTrajectory(((0.0, 1.0, 1.5),))
    with pytest.raises(ValueError):
        PiecewiseTrajectory(((0.5, 1.0, 1.0),))
    with pytest.raises(ValueError):
        PiecewiseTrajectory(())


def test_trajectory_concatenation() -> None:
    """Test steps, concatenation and lookup."""
    steps = PiecewiseTrajectory.from_steps([1.0, -1.0], 2.0)
    joined = PiecewiseTrajectory.concatenate([steps, _constant(0.5, 1.0)])
    assert joined.span == pytest.approx(3.0)
    assert joined.value_at(0.5) == 1.0
    assert joined.value_at(1.5) == -1.0
    assert joined.value_at(2.5) == 0.5
    assert joined.value_at(3.0) == 0.5
    assert joined.negated().value_at(0.5) == -1.0


def test_phi_b_vanishes_for_equal_paths() -> None:
    """Test Φ^B(z, z) = 0."""
    z = PiecewiseTrajectory.from_steps([1.0, -1.0, 1.0], 2.0)
    assert phi_B(z, z, [MODE], CTX, 2.0) == 0j


def test_phi_b_span_mismatch() -> None:
    """Test that paths must cover [0, t]."""
    with pytest.raises(SpanMismatchError):
        phi_B(_constant(1.0, 1.0), _constant(-1.0, 2.0), [MODE], CTX, 1.0)


def test_phi_b_opposite_constants_is_four_d() -> None:
    """Test Φ^B(+1, −1) = 4·D(t), a real number."""
    for t in (0.5, 1.0, 2.5):
        value = phi_B(_constant(1.0, t), _constant(-1.0, t), [MODE], CTX, t)
        coth = 1.0 / math.tanh(0.5)
        expected = 4.0 * coth * (1.0 - math.cos(t))
        assert value.real == pytest.approx(expected, rel=1e-12)
        assert abs(value.imag) < 1e-12


def test_phi_b_continuum_matches_dephasing() -> None:
    """Test the continuum phase of opposite constants against quadrature."""
    spectral = SpectralDensity(s=1.0)
    value = phi_B(_constant(1.0, 1.5), _constant(-1.0, 1.5), spectral, CTX, 1.5)
    assert value.real == pytest.approx(
        4.0 * dephasing_integral_D(spectral, CTX, 1.5), rel=1e-7
    )


def test_kernel_dephasing_matches_quadrature() -> None:
    """Test D(t) from the continuum kernel against the direct integral."""
    spectral = SpectralDensity(s=3.0)
    kernel = ContinuousKernel(spectral, CTX)
    assert kernel_dephasing_D(kernel, 2.0) == pytest.approx(
        dephasing_integral_D(spectral, CTX, 2.0), rel=1e-7
    )
    assert kernel_dephasing_D(kernel, 0.0) == 0.0


def test_segment_split_does_not_change_phase() -> None:
    """Test that splitting a constant path into steps leaves Φ^B unchanged."""
    t = 1.7
    whole = phi_B(_constant(1.0, t), _constant(-0.5, t), [MODE], CTX, t)
    split = phi_B(
        PiecewiseTrajectory.from_steps([1.0, 1.0, 1.0], t),
        PiecewiseTrajectory.from_steps([-0.5, -0.5], t),
        [MODE],
        CTX,
        t,
    )
    assert abs(whole - split) < 1e-12


def test_phi_b_small_frequency_series() -> None:
    """Test the series branch of the segment kernels below |ωL| = 0.5."""
    t = 1.0
    z, zp = _constant(1.0, t), _constant(-1.0, t)
    for omega in (1e-4, 0.3, 0.4999):
        value = phi_B(z, zp, [BathMode(omega=omega, coupling=1.0)], CTX, t)
        coth = 1.0 / math.tanh(0.5 * omega)
        expected = 4.0 * coth * 2.0 * math.sin(0.5 * omega * t) ** 2 / omega**2
        assert value.real == pytest.approx(expected, rel=1e-12)


def test_pbte_reduces_to_phi_b() -> None:
    """Test σ = (+1, +1, +1, −1): the pbte phase is Φ^B over [0, 3t]."""
    t = 0.8
    cfg = PathConfiguration.constant(Scheme.PBTE, [(1, 1, 1, -1)], t)
    pbte = phi_pbte(cfg, [MODE], CTX, 1.0, t)
    direct = phi_B(_constant(1.0, 3 * t), _constant(-1.0, 3 * t), [MODE], CTX, 3 * t)
    assert abs(pbte - direct) < 1e-12


def test_calibrated_pbte_is_conjugate() -> None:
    """Test that the calibrated pbte phase conjugates the printed one."""
    t = 0.9
    cfg = PathConfiguration(
        Scheme.PBTE,
        (
            (
                PiecewiseTrajectory.from_steps([1.0, -1.0], t),
                _constant(-1.0, t),
                _constant(1.0, t),
                PiecewiseTrajectory.from_steps([1.0, -1.0, 1.0], 3 * t),
            ),
        ),
    )
    printed = phi_pbte(cfg, [MODE], CTX, 0.3, t, Convention.PRINTED)
    calibrated = phi_pbte(cfg, [MODE], CTX, 0.3, t, Convention.CALIBRATED)
    assert abs(calibrated - printed.conjugate()) < 1e-12


def test_fbte_phase_scales_with_coupling() -> None:
    """Test λ² scaling and the per-site sum."""
    t = 1.2
    cfg = PathConfiguration.constant(Scheme.FBTE, [(1, -1, 1, 1), (1, 1, -1, 1)], t)
    unit = phi_fbte(cfg, [MODE], CTX, 1.0, t)
    scaled = phi_fbte(cfg, [MODE], CTX, (0.5, 0.5), t)
    assert abs(scaled - 0.25 * unit) < 1e-12
    assert phi_fbte(cfg, [MODE], CTX, (0.0, 0.0), t) == 0j


def test_fbte_rejects_pbte_configuration() -> None:
    """Test that each phase checks the scheme and the branch spans."""
    cfg = PathConfiguration.constant(Scheme.PBTE, [(1, 1, 1, -1)], 1.0)
    with pytest.raises(ValueError):
        phi_fbte(cfg, [MODE], CTX, 1.0, 1.0)
    with pytest.raises(SpanMismatchError):
        phi_pbte(cfg, [MODE], CTX, 1.0, 2.0)
    with pytest.raises(ValueError):
        PathConfiguration.constant(Scheme.CLOSED, [(1, 1, 1, 1)], 1.0)


@pytest.mark.parametrize("scheme", [Scheme.FBTE, Scheme.PBTE])
@pytest.mark.parametrize("s", [1.0, 2.0, 3.0])
@pytest.mark.parametrize("beta", [1.0, 10.0])
def test_influence_magnitude_bounded(scheme: Scheme, s: float, beta: float) -> None:
    """Test Re Φ ≥ 0 for every constant single-site branch configuration."""
    modes = discretize_bath(SpectralDensity(s=s), 32, 30.0)
    kernel = DiscreteKernel(modes, beta)
    for t in (0.5, 1.0, 2.0, 3.0, 5.0):
        table = branch_phase_table(scheme, kernel, t)
        assert np.min(table.real) >= -1e-12
        assert np.max(np.abs(np.exp(-table))) <= 1 + 1e-12


@pytest.mark.parametrize("scheme", [Scheme.FBTE, Scheme.PBTE])
def test_influence_magnitude_bounded_continuum(scheme: Scheme) -> None:
    """Test Re Φ ≥ 0 with the continuum ohmic kernel."""
    kernel = ContinuousKernel(SpectralDensity(s=1.0), CTX)
    table = branch_phase_table(scheme, kernel, 2.0)
    assert np.min(table.real) >= -1e-12


def test_branch_phase_table_diagonal_is_zero() -> None:
    """Test that σ₁ = σ₂ and σ₃ = σ₄ paths carry no phase in fbte."""
    kernel = DiscreteKernel([MODE], 1.0)
    table = branch_phase_table(Scheme.FBTE, kernel, 1.3)
    for a in (0, 1):
        for b in (0, 1):
            assert table[a, a, b, b] == 0j
    assert not np.any(branch_phase_table(Scheme.PBTE, kernel, 0.0))


def test_chi_constant_path() -> None:
    """Test χ = −λCσ(e^{iωt} − 1)/ω for a constant path."""
    t, lam, sigma = 1.3, 0.2, -1.0
    mode = BathMode(omega=2.0, coupling=0.7)
    expected = -lam * mode.coupling * sigma * (np.exp(2j * t) - 1.0) / mode.omega
    assert abs(chi_t(_constant(sigma, t), mode, lam) - expected) < 1e-13


def test_xi_phase_constant_path() -> None:
    """Test C²σ²(ωt − sin ωt)/ω² for a single mode."""
    t = 2.0
    mode = BathMode(omega=1.5, coupling=0.8)
    expected = 0.64 * (1.5 * t - math.sin(1.5 * t)) / 1.5**2
    assert xi_phase_t(_constant(-1.0, t), [mode], t) == pytest.approx(
        expected, rel=1e-12
    )


def test_single_displacement_characteristic_function() -> None:
    """Test |Tr(D(χ)ρ_th)| = e^{−|χ|²(2n̄+1)/2} at βω = 1."""
    chi = 0.3 + 0.1j
    value = displacement_trace_oracle([chi], FockSpace(30, 1.0), 1.0)
    n_bar = 1.0 / math.expm1(1.0)
    expected = math.exp(-(abs(chi) ** 2) * (2 * n_bar + 1) / 2)
    assert abs(abs(value) - expected) < 1e-10


def test_displacement_oracle_matches_analytic() -> None:
    """Test the four-displacement trace against the BCH closed form."""
    chis = [0.2 + 0.1j, -0.1 + 0.3j, 0.25 - 0.05j, 0.05 + 0.2j]
    oracle = displacement_trace_oracle(chis, FockSpace(30, 1.0), 1.0)
    analytic = displacement_trace_analytic(chis, 1.0, 1.0)
    assert abs(oracle - analytic) < 1e-10


def test_displacement_ordering_changes_only_phase() -> None:
    """Test that swapping two displacements keeps the modulus."""
    a, b = 0.3 + 0.2j, -0.1 + 0.4j
    mode = FockSpace(30, 1.0)
    ab = displacement_trace_oracle([a, b], mode, 1.0, alternate=False)
    ba = displacement_trace_oracle([b, a], mode, 1.0, alternate=False)
    assert abs(abs(ab) - abs(ba)) < 1e-10
    assert abs(ab - ba) > 1e-3


def test_dephasing_otoc_sum_rule_at_zero() -> None:
    """Test F(0) = Tr(W†V†WVρ_S) for a two-site chain."""
    chain = SpinChainSpec(n_sites=2, couplings=(1.0,), fields=(0.2, -0.3))
    W = ObservableSpec.single(0, Axis.X)
    V = ObservableSpec.single(1, Axis.Z)
    rho = basis_projector(1, (2, 2))
    for scheme in (Scheme.FBTE, Scheme.PBTE):
        value = dephasing_otoc(scheme, chain, W, V, rho, [MODE], CTX, 0.3, 0.0)
        assert abs(value - 1.0) < 1e-12


def test_dephasing_otoc_decoupled_limit() -> None:
    """Test that λ = 0 gives the closed-system value."""
    chain = SpinChainSpec(n_sites=2, couplings=(1.0,), fields=(0.4, 0.0))
    W = ObservableSpec.single(0, Axis.X)
    V = ObservableSpec.single(1, Axis.X)
    rho = State.maximally_mixed((2, 2))
    t = 0.7
    # W_t = e^{iHt} σx0 e^{-iHt} anticommutes with σx1 through the zz bond
    expected = math.cos(4.0 * t)
    for scheme in (Scheme.FBTE, Scheme.PBTE):
        value = dephasing_otoc(scheme, chain, W, V, rho, [MODE], CTX, 0.0, t)
        assert abs(value - expected) < 1e-12


def test_dephasing_otoc_long_uncoupled_chain() -> None:
    """Test the site-factorized path beyond three sites."""
    chain = SpinChainSpec(n_sites=5, fields=(0.1, 0.2, 0.3, 0.4, 0.5))
    W = ObservableSpec.single(0, Axis.X)
    V = ObservableSpec.single(0, Axis.X)
    rho = State.maximally_mixed((2,) * 5)
    single = SpinChainSpec(n_sites=1, fields=(0.1,))
    t = 1.1
    long_value = dephasing_otoc(Scheme.FBTE, chain, W, V, rho, [MODE], CTX, 0.2, t)
    site_value = dephasing_otoc(
        Scheme.FBTE, single, W, V, State.maximally_mixed((2,)), [MODE], CTX, 0.2, t
    )
    assert abs(long_value - site_value) < 1e-12


def test_dephasing_otoc_capabilities() -> None:
    """Test the non-commuting and coupled-long-chain rejections."""
    W = ObservableSpec.single(0, Axis.X)
    transverse = SpinChainSpec(
        n_sites=2, family=ChainFamily.TRANSVERSE_ISING, transverse=(0.5, 0.5)
    )
    with pytest.raises(NonCommutingChainError):
        dephasing_otoc(
            Scheme.FBTE,
            transverse,
            W,
            W,
            State.maximally_mixed((2, 2)),
            [MODE],
            CTX,
            0.1,
            1.0,
        )
    coupled = SpinChainSpec(n_sites=4, couplings=(1.0, 0.0, 0.0))
    with pytest.raises(CapabilityError):
        dephasing_otoc(
            Scheme.FBTE,
            coupled,
            W,
            W,
            State.maximally_mixed((2,) * 4),
            [MODE],
            CTX,
            0.1,
            1.0,
        )


def test_dephasing_series_metadata(
    single_spin: SpinChainSpec,
    sigma_x: ObservableSpec,
    single_mode_bath: BathSpec,
    mixed_qubit: State,
) -> None:
    """Test that the series records engine, convention and kernel."""
    series = dephasing_series(
        Scheme.PBTE,
        single_spin,
        sigma_x,
        sigma_x,
        mixed_qubit,
        single_mode_bath,
        [0.0, 0.5, 1.0],
    )
    assert series.metadata["engine"] == "influence"
    assert series.metadata["convention"] == "calibrated"
    assert series.metadata["kernel"] == "discrete"
    assert abs(series.values[0] - 1.0) < 1e-12
    assert np.all(np.abs(series.values) <= 1 + 1e-9)
