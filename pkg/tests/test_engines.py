import numpy as np
import pytest
from scipy.linalg import expm

from osotoc.engines import (
    JointEvolution,
    OTOCProblem,
    closed_otoc,
    converge_truncation,
    fbte_otoc,
    initial_state,
    otoc_series,
    pbte_otoc,
)
from osotoc.exceptions import TruncationError
from osotoc.hamiltonians import (
    build_chain_hamiltonian,
    build_joint_model,
    local_operator,
)
from osotoc.models import (
    BathSpec,
    InitialStateSpec,
    ObservableSpec,
    SpinChainSpec,
)
from osotoc.quantum import Operator, State, trace_product
from osotoc.types import Axis, ChainFamily, Engine, InitialKind, Scheme

X0 = ObservableSpec.single(0, Axis.X)
X1 = ObservableSpec.single(1, Axis.X)


def _random_state(dim: int, dims: tuple[int, ...], seed: int) -> State:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return State(rho / np.trace(rho), dims)


def test_closed_otoc_matches_heisenberg_expm() -> None:
    """Test the closed OTOC against a direct matrix exponential."""
    spec = SpinChainSpec(
        n_sites=2,
        family=ChainFamily.TRANSVERSE_ISING,
        couplings=(1.0,),
        transverse=(0.5, 0.5),
    )
    h = build_chain_hamiltonian(spec)
    w = local_operator(2, X0)
    v = local_operator(2, ObservableSpec.single(1, Axis.Z))
    rho = State.maximally_mixed((2, 2))
    t = 1.0

    u = expm(-1j * h.entries * t)
    w_t = u.conj().T @ w.entries @ u
    expected = np.trace(
        w_t.conj().T @ v.entries.conj().T @ w_t @ v.entries @ rho.entries
    )
    assert abs(closed_otoc(h, w, v, rho, t) - expected) < 1e-12


def test_closed_otoc_conjugate_is_reversed_string() -> None:
    """Test conj F = Tr(V† W_t† V W_t ρ)."""
    spec = SpinChainSpec(
        n_sites=2,
        family=ChainFamily.TRANSVERSE_ISING,
        couplings=(0.7,),
        transverse=(0.4, 0.9),
    )
    h = build_chain_hamiltonian(spec)
    w = local_operator(2, X0)
    v = local_operator(2, ObservableSpec.single(1, Axis.Y))
    rho = _random_state(4, (2, 2), seed=4)
    t = 1.3
    u = Operator(expm(-1j * h.entries * t), (2, 2))
    w_t = u.dagger() @ w @ u
    reversed_ = trace_product([v.dagger(), w_t.dagger(), v, w_t], rho)
    assert abs(closed_otoc(h, w, v, rho, t).conjugate() - reversed_) < 1e-12


def test_closed_otoc_at_zero_for_anticommuting_pair() -> None:
    """Test F(0) = −1 when W and V anticommute on the same site."""
    h = build_chain_hamiltonian(SpinChainSpec(n_sites=1, fields=(0.3,)))
    w = local_operator(1, X0)
    v = local_operator(1, ObservableSpec.single(0, Axis.Z))
    value = closed_otoc(h, w, v, State.maximally_mixed((2,)), 0.0)
    assert abs(value + 1.0) < 1e-12


def test_open_otoc_reduces_to_closed_without_coupling() -> None:
    """Test that λ = 0 reproduces the closed OTOC for both schemes."""
    problem = OTOCProblem(
        chain=SpinChainSpec(n_sites=2, couplings=(1.0,), fields=(0.3, 0.5)),
        W=X0,
        V=X1,
        bath=BathSpec(coupling=0.0, beta=1.0, modes_per_site=1, n_max=4),
    )
    times = np.linspace(0.0, 5.0, 20)
    closed = otoc_series(Scheme.CLOSED, problem, times)
    for scheme in (Scheme.FBTE, Scheme.PBTE):
        series = otoc_series(scheme, problem, times)
        assert np.max(np.abs(series.values - closed.values)) < 1e-10


@pytest.mark.parametrize("scheme", [Scheme.FBTE, Scheme.PBTE])
def test_exact_and_influence_engines_agree(
    scheme: Scheme,
    single_spin: SpinChainSpec,
    single_mode_bath: BathSpec,
) -> None:
    """Test the truncated joint evolution against the influence functional."""
    problem = OTOCProblem(chain=single_spin, W=X0, V=X0, bath=single_mode_bath)
    times = np.linspace(0.25, 4.75, 10)
    exact = otoc_series(scheme, problem, times, engine=Engine.EXACT)
    influence = otoc_series(scheme, problem, times, engine=Engine.INFLUENCE)
    assert np.max(np.abs(exact.values - influence.values)) < 1e-6
    assert exact.metadata["truncation"]["deviation"] < 1e-8


@pytest.mark.parametrize("scheme", [Scheme.FBTE, Scheme.PBTE])
@pytest.mark.parametrize(
    "chain, W, V, initial, n_max",
    [
        (
            SpinChainSpec(n_sites=1, fields=(0.7,)),
            X0,
            ObservableSpec.single(0, Axis.Y),
            InitialStateSpec(),
            20,
        ),
        (
            SpinChainSpec(n_sites=1, fields=(0.4,)),
            X0,
            X0,
            InitialStateSpec(InitialKind.BASIS, "0"),
            20,
        ),
        (
            SpinChainSpec(n_sites=2, couplings=(1.0,), fields=(0.3, 0.5)),
            X0,
            X1,
            InitialStateSpec(),
            24,
        ),
    ],
    ids=["field_x_y", "basis_state", "ising_two_sites"],
)
def test_exact_and_influence_engines_agree_at_fixed_cutoff(
    scheme: Scheme,
    chain: SpinChainSpec,
    W: ObservableSpec,
    V: ObservableSpec,
    initial: InitialStateSpec,
    n_max: int,
    single_mode_bath: BathSpec,
) -> None:
    """Test joint evolution against the influence functional beyond H_S = 0."""
    bath = single_mode_bath.with_cutoff(n_max)
    problem = OTOCProblem(chain=chain, W=W, V=V, initial=initial, bath=bath)
    times = [0.5, 1.5, 3.0]
    rho_s = initial_state(initial, build_chain_hamiltonian(chain))
    evolution = JointEvolution(
        build_joint_model(chain, bath), partial=scheme is Scheme.PBTE
    )
    single = fbte_otoc if scheme is Scheme.FBTE else pbte_otoc
    exact = np.array([single(evolution, W, V, rho_s, t) for t in times])
    influence = otoc_series(scheme, problem, times, engine=Engine.INFLUENCE)
    assert np.max(np.abs(exact - influence.values)) < 1e-6


def test_open_otoc_magnitude_bounded(
    single_spin: SpinChainSpec, single_mode_bath: BathSpec
) -> None:
    """Test |F| ≤ 1 for unitary observables."""
    joint = build_joint_model(single_spin, single_mode_bath.with_cutoff(16))
    rho = State.maximally_mixed((2,))
    for t in (0.5, 1.5, 3.0):
        for single in (fbte_otoc, pbte_otoc):
            assert abs(single(joint, X0, X0, rho, t)) <= 1 + 1e-9


def test_open_otoc_at_zero_time(
    single_spin: SpinChainSpec, single_mode_bath: BathSpec
) -> None:
    """Test F(0) = Tr(W†V†WVρ) for both schemes."""
    joint = build_joint_model(single_spin, single_mode_bath)
    rho = State.maximally_mixed((2,))
    z = ObservableSpec.single(0, Axis.Z)
    assert abs(fbte_otoc(joint, X0, z, rho, 0.0) + 1.0) < 1e-12
    assert abs(pbte_otoc(joint, X0, z, rho, 0.0) + 1.0) < 1e-12


def test_converge_truncation_doubles_until_stable() -> None:
    """Test the cutoff doubling gate on a synthetic 2^-n_max error."""
    bath = BathSpec(coupling=0.1, n_max=4, n_max_ceiling=64)

    def evaluate(candidate: BathSpec) -> np.ndarray:
        return np.array([1.0 + 2.0 ** -candidate.n_max], dtype=np.complex128)

    values, report = converge_truncation(evaluate, bath, 1, max_dim=10**6)
    assert report.cutoffs == (4, 8, 16, 32)
    assert report.accepted_n_max == 32
    assert report.deviation < 1e-8
    assert values[0] == pytest.approx(1.0 + 2.0**-32)


def test_converge_truncation_ceiling() -> None:
    """Test that the ceiling stops the doubling."""
    bath = BathSpec(coupling=0.1, n_max=4, n_max_ceiling=16)

    def evaluate(candidate: BathSpec) -> np.ndarray:
        return np.array([float(candidate.n_max)], dtype=np.complex128)

    with pytest.raises(TruncationError) as exc_info:
        converge_truncation(evaluate, bath, 1, max_dim=10**6)
    assert exc_info.value.cutoffs == (4, 8, 16)
    assert exc_info.value.exit_code == 2


def test_converge_truncation_dimension_cap() -> None:
    """Test that the dimension cap stops the doubling."""
    bath = BathSpec(coupling=0.1, modes_per_site=2, n_max=4)

    def evaluate(candidate: BathSpec) -> np.ndarray:
        return np.array([0j])

    with pytest.raises(TruncationError, match="above the cap"):
        converge_truncation(evaluate, bath, 2, max_dim=4096)


def test_initial_state_kinds() -> None:
    """Test ground and basis initial states."""
    h = build_chain_hamiltonian(SpinChainSpec(n_sites=2, couplings=(-1.0,)))
    basis = initial_state(InitialStateSpec(InitialKind.BASIS, "01"), h)
    assert basis.entries[1, 1] == 1.0
    ground = initial_state(InitialStateSpec(InitialKind.GROUND), h)
    energy = np.real(np.trace(h.entries @ ground.entries))
    assert energy == pytest.approx(-1.0)
    mixed = initial_state(InitialStateSpec(), h)
    assert np.allclose(mixed.entries, np.eye(4) / 4)


def test_problem_validation() -> None:
    """Test observable sites and basis labels against the chain."""
    with pytest.raises(ValueError):
        OTOCProblem(chain=SpinChainSpec(n_sites=1), W=X0, V=X1)
    with pytest.raises(ValueError):
        OTOCProblem(
            chain=SpinChainSpec(n_sites=2),
            W=X0,
            V=X1,
            initial=InitialStateSpec(InitialKind.BASIS, "0"),
        )


def test_otoc_series_rejects_bound_engine_and_missing_bath() -> None:
    """Test that otoc_series refuses the bound engine and bath-less open runs."""
    problem = OTOCProblem(chain=SpinChainSpec(n_sites=2), W=X0, V=X1)
    with pytest.raises(ValueError):
        otoc_series(Scheme.CLOSED, problem, [0.0, 1.0], engine=Engine.BOUND)
    with pytest.raises(ValueError, match="needs a bath"):
        otoc_series(Scheme.FBTE, problem, [0.0, 1.0])


def test_otoc_series_is_independent_of_workers() -> None:
    """Test that threaded grid evaluation returns identical values."""
    problem = OTOCProblem(
        chain=SpinChainSpec(
            n_sites=3,
            family=ChainFamily.TRANSVERSE_ISING,
            couplings=(1.0, 1.0),
            transverse=(0.5, 0.5, 0.5),
        ),
        W=X0,
        V=ObservableSpec.single(2, Axis.Z),
    )
    times = np.linspace(0.0, 3.0, 12)
    sequential = otoc_series(Scheme.CLOSED, problem, times, workers=1)
    threaded = otoc_series(Scheme.CLOSED, problem, times, workers=4)
    assert np.array_equal(sequential.values, threaded.values)
    assert sequential.metadata["engine"] == "exact"
