"""Exact OTOC evaluation for closed chains and chains coupled to truncated baths."""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from osotoc.exceptions import TruncationError
from osotoc.grid import evaluate_grid
from osotoc.hamiltonians import (
    JointModel,
    build_chain_hamiltonian,
    build_joint_model,
    joint_dimension,
    local_operator,
)
from osotoc.influence import dephasing_series
from osotoc.logging import get_logger
from osotoc.models import (
    BathSpec,
    InitialStateSpec,
    ObservableSpec,
    OTOCSeries,
    SpinChainSpec,
    TruncationReport,
)
from osotoc.quantum import (
    DEFAULT_MAX_DIMENSION,
    Operator,
    SpectralPropagator,
    State,
    basis_projector,
    trace_product,
)
from osotoc.types import ComplexArray, Engine, InitialKind, JsonDict, Scheme

logger = get_logger()

TRUNCATION_TOLERANCE = 1e-8
DEGENERACY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class OTOCProblem:
    """Chain, observables, initial state and optional bath of one run."""

    chain: SpinChainSpec
    W: ObservableSpec
    V: ObservableSpec
    initial: InitialStateSpec = InitialStateSpec()
    bath: Optional[BathSpec] = None
    max_dim: int = DEFAULT_MAX_DIMENSION

    def __post_init__(self) -> None:
        """Check observables and the basis label against the chain length."""
        n = self.chain.n_sites
        for name, obs in (("W", self.W), ("V", self.V)):
            for site, _ in obs.factors:
                if site >= n:
                    raise ValueError(f"{name} acts on site {site} of a {n}-site chain")
        if self.initial.label is not None and len(self.initial.label) != n:
            raise ValueError(f"basis label must have {n} characters")

    def metadata(self) -> JsonDict:
        """Plain description of the problem for series metadata."""
        data: JsonDict = {
            "sites": self.chain.n_sites,
            "family": self.chain.family.value,
            "W": self.W.describe(),
            "V": self.V.describe(),
            "initial_state": self.initial.kind.value,
        }
        if self.initial.label is not None:
            data["initial_label"] = self.initial.label
        if self.bath is not None:
            data["bath"] = {
                "s": self.bath.spectral.s,
                "cutoff": self.bath.spectral.cutoff,
                "coupling": self.bath.coupling,
                "temperature": self.bath.thermal.temperature,
                "modes_per_site": self.bath.modes_per_site,
            }
        return data


def initial_state(spec: InitialStateSpec, hamiltonian: Operator) -> State:
    """Build ρ_S on the chain space."""
    dims = hamiltonian.subsystem_dims
    if spec.kind is InitialKind.MAXIMALLY_MIXED:
        return State.maximally_mixed(dims)
    if spec.kind is InitialKind.GROUND:
        propagator = SpectralPropagator(hamiltonian)
        energies = propagator.energies
        if len(energies) > 1 and energies[1] - energies[0] < DEGENERACY_TOLERANCE:
            logger.warning_with_fields(
                "Ground state is degenerate; using the first eigenvector",
                operation="initial_state",
                gap=float(energies[1] - energies[0]),
            )
        return State.pure(propagator.ground_vector, dims)
    assert spec.label is not None
    if len(spec.label) != len(dims):
        raise ValueError(f"basis label must have {len(dims)} characters")
    return basis_projector(int(spec.label, 2), dims)


def closed_otoc(
    H_S: Operator, W: Operator, V: Operator, rho_s: State, t: float
) -> complex:
    """Tr(W_t† V† W_t V ρ_S) with W_t = e^{iHt} W e^{−iHt}."""
    return _closed_value(SpectralPropagator(H_S), W, V, rho_s, t)


def _closed_value(
    propagator: SpectralPropagator,
    W: Operator,
    V: Operator,
    rho_s: State,
    t: float,
) -> complex:
    u = propagator.at(t)
    w_t = u.dagger() @ W @ u
    return trace_product([w_t.dagger(), V.dagger(), w_t, V], rho_s)


class JointEvolution:
    """Eigendecompositions of the joint Hamiltonians, shared across a grid."""

    def __init__(self, joint: JointModel, partial: bool = True):
        self.joint = joint
        self._forward = SpectralPropagator(joint.forward)
        self._reversed = SpectralPropagator(joint.system_reversed) if partial else None

    def forward(self, t: float) -> Operator:
        """U_SE = e^{−i(H_S+H_E+H_{S:E})t}."""
        return self._forward.at(t)

    def partial_backward(self, t: float) -> Operator:
        """U_{S†E} = e^{i(H_S−H_E−H_{S:E})t}."""
        if self._reversed is None:
            self._reversed = SpectralPropagator(self.joint.system_reversed)
        return self._reversed.at(t)


JointLike = Union[JointModel, JointEvolution]


def _evolution(joint: JointLike, partial: bool) -> JointEvolution:
    if isinstance(joint, JointEvolution):
        return joint
    return JointEvolution(joint, partial)


def _lifted(
    joint: JointModel, W: ObservableSpec, V: ObservableSpec
) -> Tuple[Operator, Operator]:
    return (
        joint.lift(local_operator(joint.n_sites, W)),
        joint.lift(local_operator(joint.n_sites, V)),
    )


def fbte_otoc(
    joint: JointLike,
    W: ObservableSpec,
    V: ObservableSpec,
    rho_s: State,
    t: float,
) -> complex:
    """Tr(U_SE† W† U_SE V† U_SE† W U_SE V ρ_S⊗ρ_E)."""
    evolution = _evolution(joint, partial=False)
    model = evolution.joint
    w, v = _lifted(model, W, V)
    rho = model.joint_state(rho_s)
    u = evolution.forward(t)
    ud = u.dagger()
    return trace_product([ud, w.dagger(), u, v.dagger(), ud, w, u, v], rho)


def pbte_otoc(
    joint: JointLike,
    W: ObservableSpec,
    V: ObservableSpec,
    rho_s: State,
    t: float,
) -> complex:
    """Tr(U_SE† U_{SE†} U_SE† W† U_SE V† U_{S†E} W U_SE V ρ_S⊗ρ_E).

    U_{SE†} is taken as the adjoint of U_{S†E}; the prefix is kept as is.
    """
    evolution = _evolution(joint, partial=True)
    model = evolution.joint
    w, v = _lifted(model, W, V)
    rho = model.joint_state(rho_s)
    u = evolution.forward(t)
    ud = u.dagger()
    partial = evolution.partial_backward(t)
    string = [ud, partial.dagger(), ud, w.dagger(), u, v.dagger(), partial, w, u, v]
    return trace_product(string, rho)


def converge_truncation(
    evaluate: Callable[[BathSpec], ComplexArray],
    bath: BathSpec,
    n_sites: int,
    max_dim: int = DEFAULT_MAX_DIMENSION,
    tolerance: float = TRUNCATION_TOLERANCE,
) -> Tuple[ComplexArray, TruncationReport]:
    """Double the Fock cutoff until two successive grids agree to `tolerance`.

    Returns the values at the finer accepted cutoff.
    """
    n_max = bath.n_max
    cutoffs: List[int] = [n_max]
    deviation: Optional[float] = None
    current = evaluate(bath)

    while True:
        refined_cutoff = 2 * n_max
        if refined_cutoff > bath.n_max_ceiling:
            raise TruncationError(
                cutoffs, deviation, f"ceiling n_max={bath.n_max_ceiling} reached"
            )
        dimension = joint_dimension(n_sites, bath.with_cutoff(refined_cutoff))
        if dimension > max_dim:
            raise TruncationError(
                cutoffs,
                deviation,
                f"n_max={refined_cutoff} needs dimension {dimension:,} "
                f"above the cap of {max_dim:,}",
            )
        refined = evaluate(bath.with_cutoff(refined_cutoff))
        cutoffs.append(refined_cutoff)
        deviation = float(np.max(np.abs(refined - current)))
        if deviation < tolerance:
            report = TruncationReport(
                refined_cutoff, tuple(cutoffs), deviation, tolerance
            )
            logger.info_with_fields(
                "Fock truncation converged",
                operation="converge_truncation",
                **report.as_dict(),
            )
            return refined, report
        logger.warning_with_fields(
            "Raising Fock cutoff",
            operation="converge_truncation",
            n_max=refined_cutoff,
            deviation=deviation,
        )
        current, n_max = refined, refined_cutoff


def otoc_series(
    scheme: Scheme,
    problem: OTOCProblem,
    times: Sequence[float],
    engine: Engine = Engine.EXACT,
    workers: Optional[int] = None,
    continuum: bool = False,
) -> OTOCSeries:
    """OTOC of `problem` on a time grid with the requested scheme and engine."""
    scheme, engine = Scheme(scheme), Engine(engine)
    grid = np.asarray(times, dtype=np.float64)
    points = [float(t) for t in grid]
    hamiltonian = build_chain_hamiltonian(problem.chain, problem.max_dim)
    rho_s = initial_state(problem.initial, hamiltonian)
    metadata = problem.metadata()
    metadata["engine"] = engine.value

    if engine is Engine.BOUND:
        raise ValueError("the bound engine produces bound series, not OTOC values")

    if scheme is Scheme.CLOSED:
        propagator = SpectralPropagator(hamiltonian)
        w = local_operator(problem.chain.n_sites, problem.W)
        v = local_operator(problem.chain.n_sites, problem.V)
        values = evaluate_grid(
            lambda t: _closed_value(propagator, w, v, rho_s, t),
            points,
            workers,
            "closed",
        )
        return OTOCSeries(grid, np.array(values), scheme, metadata)

    if problem.bath is None:
        raise ValueError(f"scheme {scheme.value} needs a bath")

    if engine is Engine.INFLUENCE:
        series = dephasing_series(
            scheme,
            problem.chain,
            problem.W,
            problem.V,
            rho_s,
            problem.bath,
            points,
            continuum=continuum,
            workers=workers,
        )
        metadata.update(series.metadata)
        return OTOCSeries(grid, series.values, scheme, metadata)

    single = fbte_otoc if scheme is Scheme.FBTE else pbte_otoc

    def evaluate(bath: BathSpec) -> ComplexArray:
        joint = build_joint_model(problem.chain, bath, problem.max_dim)
        evolution = JointEvolution(joint, partial=scheme is Scheme.PBTE)
        values = evaluate_grid(
            lambda t: single(evolution, problem.W, problem.V, rho_s, t),
            points,
            workers,
            scheme.value,
        )
        return np.array(values, dtype=np.complex128)

    values, report = converge_truncation(
        evaluate, problem.bath, problem.chain.n_sites, problem.max_dim
    )
    metadata["truncation"] = report.as_dict()
    return OTOCSeries(grid, values, scheme, metadata)
