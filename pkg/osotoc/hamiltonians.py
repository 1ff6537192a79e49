"""Chain Hamiltonians, local observables, bath discretization and joint models."""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from osotoc.bath import spectral_value
from osotoc.exceptions import DimensionCapError, NonCommutingChainError
from osotoc.logging import get_logger
from osotoc.models import (
    BathMode,
    BathSpec,
    ObservableSpec,
    SpectralDensity,
    SpinChainSpec,
)
from osotoc.quantum import (
    DEFAULT_MAX_DIMENSION,
    FockSpace,
    Operator,
    State,
    check_dimension,
    embed,
    kron,
    kron_all,
    pauli,
    thermal_state,
)
from osotoc.types import Axis, ChainFamily, ComplexMatrix, Variant

logger = get_logger()

COMMUTATION_TOLERANCE = 1e-12


def _site_term(n_sites: int, ops: Sequence[Tuple[int, Axis]]) -> ComplexMatrix:
    dims = (2,) * n_sites
    term = np.eye(2**n_sites, dtype=np.complex128)
    for site, axis in ops:
        term = embed(pauli(axis), site, dims) @ term
    return term


def build_chain_hamiltonian(
    spec: SpinChainSpec, max_dim: int = DEFAULT_MAX_DIMENSION
) -> Operator:
    """Dense Hamiltonian of a spin chain, site 0 leftmost in the tensor order."""
    n = spec.n_sites
    dims = (2,) * n
    check_dimension(dims, max_dim)

    if spec.family is ChainFamily.CUSTOM_DIAGONAL:
        energies = np.asarray(spec.diagonal, dtype=np.complex128)
        return Operator(np.diag(energies), dims)

    h = np.zeros((2**n, 2**n), dtype=np.complex128)
    for bond, coupling in enumerate(spec.bond_couplings):
        if coupling == 0.0:
            continue
        if spec.family is ChainFamily.XXZ:
            weights = ((Axis.X, 1.0), (Axis.Y, 1.0), (Axis.Z, spec.anisotropy))
            for axis, weight in weights:
                pair = [(bond, axis), (bond + 1, axis)]
                h += coupling * weight * _site_term(n, pair)
        else:
            h += coupling * _site_term(n, [(bond, Axis.Z), (bond + 1, Axis.Z)])

    for site, strength in enumerate(spec.site_fields):
        if strength != 0.0:
            h += strength * _site_term(n, [(site, Axis.Z)])

    for site, strength in enumerate(spec.transverse_fields):
        if strength != 0.0:
            h += strength * _site_term(n, [(site, Axis.X)])

    return Operator(h, dims)


def local_operator(n_sites: int, obs: ObservableSpec) -> Operator:
    """Tensor product of Paulis at the listed sites, identity elsewhere."""
    for site, _ in obs.factors:
        if site >= n_sites:
            raise ValueError(
                f"Observable site {site} out of range for {n_sites} sites"
            )
    return Operator(_site_term(n_sites, obs.factors), (2,) * n_sites)


def sigma_z_diagonal(n_sites: int) -> np.ndarray:
    """σ_z eigenvalue (+1 for '0') of every site in every basis state."""
    indices = np.arange(2**n_sites)
    bits = (indices[:, None] >> np.arange(n_sites - 1, -1, -1)[None, :]) & 1
    return np.asarray(1 - 2 * bits, dtype=np.float64)


def noncommuting_term(spec: SpinChainSpec, hamiltonian: Operator) -> Optional[str]:
    """Name the first term that breaks [H_S, σ_z,k] = 0, if any."""
    if spec.family is ChainFamily.TRANSVERSE_ISING:
        for site, strength in enumerate(spec.transverse_fields):
            if strength != 0.0:
                return f"transverse field g_{site} sigma_x,{site} (g={strength})"
    if spec.family is ChainFamily.XXZ:
        for bond, coupling in enumerate(spec.bond_couplings):
            if coupling != 0.0:
                return (
                    f"flip-flop term J_{bond}(sigma_x sigma_x + sigma_y sigma_y) "
                    f"on bond ({bond},{bond + 1})"
                )
    for site in range(spec.n_sites):
        z = local_operator(spec.n_sites, ObservableSpec.single(site, Axis.Z))
        if hamiltonian.commutator_norm(z) > COMMUTATION_TOLERANCE:
            return f"term not commuting with sigma_z,{site}"
    return None


def require_dephasing_chain(spec: SpinChainSpec, hamiltonian: Operator) -> None:
    """Reject chains whose Hamiltonian is not σ_z-diagonal."""
    term = noncommuting_term(spec, hamiltonian)
    if term is not None:
        raise NonCommutingChainError(term)


def discretize_bath(
    spectral: SpectralDensity, n_modes: int, omega_max: float
) -> List[BathMode]:
    """Gauss–Legendre discretization with C_j² = J(ω_j)·w_j on (0, ω_max]."""
    if n_modes < 1:
        raise ValueError("mode count must be at least 1")
    if omega_max <= 0:
        raise ValueError("omega_max must be positive")
    nodes, weights = np.polynomial.legendre.leggauss(n_modes)
    omegas = 0.5 * omega_max * (nodes + 1.0)
    scaled = 0.5 * omega_max * weights
    amplitudes = np.sqrt(spectral_value(spectral, omegas) * scaled)
    return [
        BathMode(omega=float(w), coupling=float(c))
        for w, c in zip(omegas, amplitudes, strict=True)
    ]


def bath_modes(bath: BathSpec) -> List[BathMode]:
    """Modes attached to every site."""
    if bath.explicit_modes is not None:
        return list(bath.explicit_modes)
    return discretize_bath(bath.spectral, bath.modes_per_site, bath.omega_max)


def joint_dimension(n_sites: int, bath: BathSpec) -> int:
    """Dimension of the chain plus all truncated modes."""
    return int(2**n_sites * bath.n_max ** (n_sites * bath.modes_per_site))


@dataclass(frozen=True, eq=False)
class JointModel:
    """System plus environment Hamiltonians on the truncated joint space."""

    chain: Operator
    forward: Operator
    system_reversed: Operator
    env_state: State
    n_sites: int
    bath: BathSpec

    @property
    def system_dim(self) -> int:
        """Chain dimension."""
        return self.chain.dim

    @property
    def dim(self) -> int:
        """Joint dimension."""
        return self.forward.dim

    def lift(self, op: Operator) -> Operator:
        """Extend a chain operator trivially over the environment."""
        env_identity = Operator.identity(self.env_state.subsystem_dims)
        return kron(op, env_identity, max_dim=self.dim)

    def joint_state(self, rho_s: State) -> State:
        """ρ_S ⊗ ρ_E."""
        joint = kron(rho_s, self.env_state, max_dim=self.dim)
        assert isinstance(joint, State)
        return joint


def _environment_terms(
    n_sites: int, bath: BathSpec, max_dim: int
) -> Tuple[ComplexMatrix, ComplexMatrix, Tuple[int, ...], List[BathMode]]:
    modes = bath_modes(bath)
    m = len(modes)
    dims = (2,) * n_sites + (bath.n_max,) * (n_sites * m)
    check_dimension(dims, max_dim)

    fock = FockSpace(bath.n_max, 1.0)
    number = np.diag(fock.levels).astype(np.complex128)
    quadrature = fock.quadrature
    dim = math.prod(dims)

    h_env = np.zeros((dim, dim), dtype=np.complex128)
    h_int = np.zeros((dim, dim), dtype=np.complex128)
    for site in range(n_sites):
        z = embed(pauli(Axis.Z), site, dims)
        collective = np.zeros((dim, dim), dtype=np.complex128)
        for j, mode in enumerate(modes):
            position = n_sites + site * m + j
            h_env += mode.omega * embed(number, position, dims)
            collective += mode.coupling * embed(quadrature, position, dims)
        strength = bath.coupling_for_site(site)
        h_int += strength * (np.diag(z)[:, None] * collective)
    return h_env, h_int, dims, modes


def assemble_joint(
    chain: Operator,
    bath: BathSpec,
    variant: Variant,
    max_dim: int = DEFAULT_MAX_DIMENSION,
) -> Operator:
    """H_S + H_E + H_{S:E} (forward) or −H_S + H_E + H_{S:E} (system_reversed)."""
    n_sites = len(chain.subsystem_dims)
    h_env, h_int, dims, _ = _environment_terms(n_sites, bath, max_dim)
    env_dim = math.prod(dims[n_sites:])
    h_sys = np.kron(chain.entries, np.eye(env_dim))
    sign = 1.0 if Variant(variant) is Variant.FORWARD else -1.0
    return Operator(sign * h_sys + h_env + h_int, dims)


def environment_state(n_sites: int, bath: BathSpec) -> State:
    """Product of truncated thermal states over every mode of every site."""
    states = [
        thermal_state(FockSpace(bath.n_max, mode.omega), bath.beta)
        for _ in range(n_sites)
        for mode in bath_modes(bath)
    ]
    env = kron_all(states, max_dim=math.prod(s.dim for s in states))
    assert isinstance(env, State)
    return env


def build_joint_model(
    chain_spec: SpinChainSpec,
    bath: BathSpec,
    max_dim: int = DEFAULT_MAX_DIMENSION,
) -> JointModel:
    """Assemble both joint Hamiltonians and the thermal environment."""
    dimension = joint_dimension(chain_spec.n_sites, bath)
    if dimension > max_dim:
        raise DimensionCapError(dimension, max_dim)

    chain = build_chain_hamiltonian(chain_spec, max_dim)
    h_env, h_int, dims, modes = _environment_terms(chain_spec.n_sites, bath, max_dim)
    env_dim = math.prod(dims[chain_spec.n_sites :])
    h_sys = np.kron(chain.entries, np.eye(env_dim))

    logger.info_with_fields(
        "Assembled joint model",
        operation="assemble_joint",
        sites=chain_spec.n_sites,
        modes_per_site=len(modes),
        n_max=bath.n_max,
        dimension=dimension,
    )
    return JointModel(
        chain=chain,
        forward=Operator(h_sys + h_env + h_int, dims),
        system_reversed=Operator(-h_sys + h_env + h_int, dims),
        env_state=environment_state(chain_spec.n_sites, bath),
        n_sites=chain_spec.n_sites,
        bath=bath,
    )
