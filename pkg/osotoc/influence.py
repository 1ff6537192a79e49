"""Influence phases for piecewise-constant spin paths and the dephasing engine.

Every double time integral of the bath correlation function is evaluated in
frequency space: for piecewise-constant paths the time integrals over each
pair of segments have closed forms, leaving a single integral over ω that
a `CorrelationKernel` performs for continuous or discretized baths alike.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from osotoc.bath import (
    ContinuousKernel,
    CorrelationKernel,
    DiscreteKernel,
)
from osotoc.exceptions import (
    CapabilityError,
    SpanMismatchError,
    TruncationError,
)
from osotoc.grid import evaluate_grid
from osotoc.hamiltonians import (
    bath_modes,
    build_chain_hamiltonian,
    local_operator,
    require_dephasing_chain,
    sigma_z_diagonal,
)
from osotoc.logging import get_logger
from osotoc.models import (
    BathMode,
    BathSpec,
    ObservableSpec,
    OTOCSeries,
    SpectralDensity,
    SpinChainSpec,
    ThermalContext,
)
from osotoc.quantum import (
    FockSpace,
    Operator,
    SpectralPropagator,
    State,
    kron_all,
    partial_trace,
    thermal_state,
)
from osotoc.types import ChainFamily, ComplexArray, Convention, RealArray, Scheme

logger = get_logger()

SPAN_TOLERANCE = 1e-12
SERIES_RADIUS = 0.5
SERIES_TERMS = 14
MAX_ENUMERATED_SITES = 3
PRODUCT_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-10

BathLike = Union[SpectralDensity, Sequence[BathMode], CorrelationKernel]
Couplings = Union[float, Sequence[float]]


@dataclass(frozen=True)
class PiecewiseTrajectory:
    """Piecewise-constant n_z path given as contiguous (start, end, value) steps."""

    segments: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self) -> None:
        """Check contiguity from t = 0 and the value range."""
        steps = tuple((float(a), float(b), float(v)) for a, b, v in self.segments)
        if not steps:
            raise ValueError("a trajectory needs at least one segment")
        if steps[0][0] != 0.0:
            raise ValueError("trajectories start at t = 0")
        scale = max(1.0, steps[-1][1])
        for index, (start, end, value) in enumerate(steps):
            if not end > start:
                raise ValueError(f"segment {index} has non-positive length")
            if abs(value) > 1.0:
                raise ValueError(f"segment {index} value {value} outside [-1, 1]")
            if index and abs(start - steps[index - 1][1]) > SPAN_TOLERANCE * scale:
                raise ValueError(f"segment {index} leaves a gap or overlap")
        object.__setattr__(self, "segments", steps)

    @classmethod
    def constant(cls, value: float, span: float) -> "PiecewiseTrajectory":
        """A single step covering [0, span]."""
        return cls(((0.0, span, value),))

    @classmethod
    def from_steps(cls, values: Sequence[float], span: float) -> "PiecewiseTrajectory":
        """Equal-length steps over [0, span]."""
        if not values:
            raise ValueError("values must not be empty")
        edges = np.linspace(0.0, span, len(values) + 1)
        return cls(
            tuple(
                (float(a), float(b), float(v))
                for a, b, v in zip(edges[:-1], edges[1:], values, strict=True)
            )
        )

    @classmethod
    def concatenate(
        cls, parts: Sequence["PiecewiseTrajectory"]
    ) -> "PiecewiseTrajectory":
        """Place trajectories one after another on a common time axis."""
        steps: List[Tuple[float, float, float]] = []
        offset = 0.0
        for part in parts:
            for start, end, value in part.segments:
                steps.append((offset + start, offset + end, value))
            offset += part.span
        return cls(tuple(steps))

    @property
    def span(self) -> float:
        """Length of the covered interval."""
        return self.segments[-1][1]

    @property
    def breakpoints(self) -> RealArray:
        """Segment edges including 0 and the span."""
        return np.array([0.0] + [end for _, end, _ in self.segments])

    def value_at(self, t: float) -> float:
        """n_z at time t (right-continuous, last value at the end point)."""
        ends = [end for _, end, _ in self.segments]
        index = min(int(np.searchsorted(ends, t, side="right")), len(ends) - 1)
        return self.segments[index][2]

    def scaled(self, factor: float) -> "PiecewiseTrajectory":
        """Multiply every value by `factor`."""
        return PiecewiseTrajectory(
            tuple((a, b, factor * v) for a, b, v in self.segments)
        )

    def negated(self) -> "PiecewiseTrajectory":
        """Flip the sign of every value."""
        return self.scaled(-1.0)


def _check_span(traj: PiecewiseTrajectory, span: float, label: str) -> None:
    if abs(traj.span - span) > SPAN_TOLERANCE * max(1.0, span):
        raise SpanMismatchError(f"{label} spans {traj.span}, expected {span}")


Branches = Tuple[
    PiecewiseTrajectory, PiecewiseTrajectory, PiecewiseTrajectory, PiecewiseTrajectory
]


@dataclass(frozen=True)
class PathConfiguration:
    """Four branch trajectories per site for one path-integral configuration."""

    scheme: Scheme
    sites: Tuple[Branches, ...]

    def __post_init__(self) -> None:
        """Validate the scheme and the branch count."""
        scheme = Scheme(self.scheme)
        if scheme is Scheme.CLOSED:
            raise ValueError("path configurations exist only for fbte and pbte")
        if not self.sites:
            raise ValueError("a configuration needs at least one site")
        for index, branches in enumerate(self.sites):
            if len(branches) != 4:
                raise ValueError(
                    f"site {index} has {len(branches)} branches, expected 4"
                )
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "sites", tuple(tuple(b) for b in self.sites))

    @classmethod
    def constant(
        cls,
        scheme: Scheme,
        values: Sequence[Sequence[float]],
        t: float,
    ) -> "PathConfiguration":
        """Constant branches (σ₁, σ₂, σ₃, σ₄) per site over the scheme's spans."""
        scheme = Scheme(scheme)
        long_span = 3.0 * t if scheme is Scheme.PBTE else t
        sites = []
        for sigma in values:
            if len(sigma) != 4:
                raise ValueError("each site needs four branch values")
            s1, s2, s3, s4 = (float(v) for v in sigma)
            sites.append(
                (
                    PiecewiseTrajectory.constant(s1, t),
                    PiecewiseTrajectory.constant(s2, t),
                    PiecewiseTrajectory.constant(s3, t),
                    PiecewiseTrajectory.constant(s4, long_span),
                )
            )
        return cls(scheme, tuple(sites))

    def check_span(self, t: float) -> None:
        """Raise SpanMismatchError unless every branch matches the scheme's span."""
        for index, branches in enumerate(self.sites):
            for number, branch in enumerate(branches[:3], start=1):
                _check_span(branch, t, f"site {index} branch {number}")
            long_span = 3.0 * t if self.scheme is Scheme.PBTE else t
            _check_span(branches[3], long_span, f"site {index} branch 4")


@lru_cache(maxsize=None)
def _series_coefficients(offset: int) -> Tuple[float, ...]:
    return tuple(1.0 / math.factorial(k + offset) for k in range(SERIES_TERMS))


def _exponential_ratio(z: ComplexArray, offset: int) -> ComplexArray:
    """Σ_k z^k/(k+offset)!: (e^z−1)/z for offset 1, (e^z−1−z)/z² for offset 2."""
    small = np.abs(z) < SERIES_RADIUS
    series = np.zeros_like(z)
    for c in reversed(_series_coefficients(offset)):
        series = series * z + c
    safe = np.where(small, 1.0, z)
    if offset == 1:
        direct = np.expm1(safe) / safe
    else:
        direct = (np.expm1(safe) - safe) / (safe * safe)
    return np.where(small, series, direct)


class _SegmentIntegrand:
    """q(ω) = Σ c·∫∫_{t″<t′} f(t′)g(t″)e^{iω(t′−t″)}, optionally conjugated."""

    def __init__(
        self,
        edges: RealArray,
        terms: Sequence[Tuple[complex, RealArray, RealArray, bool]],
    ):
        self.starts = edges[:-1]
        self.lengths = np.diff(edges)
        self.terms = tuple(terms)

    def __call__(self, omega: float) -> complex:
        z = 1j * omega * self.lengths
        phase = np.exp(1j * omega * self.starts)
        rect = phase * self.lengths * _exponential_ratio(z, 1)
        tri = self.lengths**2 * _exponential_ratio(z, 2)
        total = 0j
        for coefficient, f, g, conjugate in self.terms:
            weighted = g * rect
            earlier = np.concatenate(([0j], np.cumsum(weighted)[:-1]))
            value = complex(np.sum(f * rect * np.conj(earlier)) + np.sum(f * g * tri))
            total += coefficient * (value.conjugate() if conjugate else value)
        return total


def _refine(
    trajectories: Sequence[PiecewiseTrajectory],
) -> Tuple[RealArray, List[RealArray]]:
    """Common segment grid and the value of each trajectory on it."""
    span = trajectories[0].span
    raw = np.unique(np.concatenate([traj.breakpoints for traj in trajectories]))
    keep = np.concatenate(([True], np.diff(raw) > SPAN_TOLERANCE * max(1.0, span)))
    edges = raw[keep]
    edges[-1] = span
    mids = 0.5 * (edges[:-1] + edges[1:])
    values = [
        np.array([traj.value_at(float(m)) for m in mids], dtype=np.float64)
        for traj in trajectories
    ]
    return edges, values


def resolve_kernel(bath: BathLike, ctx: Optional[ThermalContext]) -> CorrelationKernel:
    """Kernel for a continuous density, a list of modes, or a ready kernel."""
    if isinstance(bath, CorrelationKernel):
        return bath
    context = ctx if ctx is not None else ThermalContext(1.0)
    if isinstance(bath, SpectralDensity):
        return ContinuousKernel(bath, context)
    return DiscreteKernel(list(bath), context.beta)


def kernel_for_bath(bath: BathSpec, continuum: bool = False) -> CorrelationKernel:
    """Continuum kernel of the spectral density or the discretized modes."""
    if continuum and bath.explicit_modes is None:
        return ContinuousKernel(bath.spectral, bath.thermal)
    return DiscreteKernel(bath_modes(bath), bath.beta)


def _site_couplings(coupling: Couplings, n_sites: int) -> Tuple[float, ...]:
    if isinstance(coupling, (int, float)):
        return (float(coupling),) * n_sites
    values = tuple(float(c) for c in coupling)
    if len(values) != n_sites:
        raise ValueError(f"expected {n_sites} couplings, got {len(values)}")
    return values


def _phi_b_terms(
    z: RealArray, z_prime: RealArray, conjugate: bool
) -> List[Tuple[complex, RealArray, RealArray, bool]]:
    d = z - z_prime
    return [(1.0, d, z, conjugate), (-1.0, d, z_prime, not conjugate)]


def phi_B(
    z: PiecewiseTrajectory,
    z_prime: PiecewiseTrajectory,
    J: BathLike,
    ctx: Optional[ThermalContext],
    t: float,
) -> complex:
    """Bosonic influence phase of the path pair (z, z′).

    ∫₀^t dt′∫₀^{t′} dt″ (z−z′)(t′)[ξ(t′−t″)z(t″) − ξ*(t′−t″)z′(t″)]
    """
    _check_span(z, t, "z")
    _check_span(z_prime, t, "z'")
    if z == z_prime or t == 0:
        return 0j
    edges, (zv, zpv) = _refine([z, z_prime])
    if np.array_equal(zv, zpv):
        return 0j
    kernel = resolve_kernel(J, ctx)
    return kernel.transform(_SegmentIntegrand(edges, _phi_b_terms(zv, zpv, False)), t)


def _fbte_site_terms(
    branches: Branches, convention: Convention
) -> Tuple[RealArray, List[Tuple[complex, RealArray, RealArray, bool]]]:
    edges, (n1, n2, n3, n4) = _refine(branches)
    d1, d3 = n1 - n2, n3 - n4
    if not d1.any() and not d3.any():
        return edges, []
    calibrated = convention is Convention.CALIBRATED
    terms = _phi_b_terms(n1, n2, calibrated) + _phi_b_terms(n3, n4, calibrated)
    terms.append((1.0, d1, d3, False))
    terms.append((1.0, d3, d1, calibrated))
    return edges, terms


def phi_fbte(
    cfg: PathConfiguration,
    J: BathLike,
    ctx: Optional[ThermalContext],
    coupling: Couplings,
    t: float,
    convention: Convention = Convention.PRINTED,
) -> complex:
    """Influence phase of the full backward time evolution, summed over sites."""
    if cfg.scheme is not Scheme.FBTE:
        raise ValueError("phi_fbte needs an fbte configuration")
    cfg.check_span(t)
    lambdas = _site_couplings(coupling, len(cfg.sites))
    if t == 0:
        return 0j
    kernel = resolve_kernel(J, ctx)
    total = 0j
    for lam, branches in zip(lambdas, cfg.sites, strict=True):
        if lam == 0.0:
            continue
        edges, terms = _fbte_site_terms(branches, Convention(convention))
        if terms:
            total += lam**2 * kernel.transform(_SegmentIntegrand(edges, terms), t)
    return total


def pbte_external_path(branches: Branches) -> PiecewiseTrajectory:
    """Branches 1–3 laid end to end over [0, 3t]."""
    return PiecewiseTrajectory.concatenate(branches[:3])


def phi_pbte(
    cfg: PathConfiguration,
    J: BathLike,
    ctx: Optional[ThermalContext],
    coupling: Couplings,
    t: float,
    convention: Convention = Convention.PRINTED,
) -> complex:
    """Influence phase of the partial backward time evolution, summed over sites."""
    if cfg.scheme is not Scheme.PBTE:
        raise ValueError("phi_pbte needs a pbte configuration")
    cfg.check_span(t)
    lambdas = _site_couplings(coupling, len(cfg.sites))
    if t == 0:
        return 0j
    kernel = resolve_kernel(J, ctx)
    calibrated = Convention(convention) is Convention.CALIBRATED
    total = 0j
    for lam, branches in zip(lambdas, cfg.sites, strict=True):
        if lam == 0.0:
            continue
        external = pbte_external_path(branches)
        edges, (forward, backward) = _refine([external, branches[3]])
        if np.array_equal(forward, backward):
            continue
        terms = _phi_b_terms(forward, backward, calibrated)
        integrand = _SegmentIntegrand(edges, terms)
        total += lam**2 * kernel.transform(integrand, 3.0 * t)
    return total


def kernel_dephasing_D(kernel: CorrelationKernel, t: float) -> float:
    """D(t) as the real part of a constant-path triangle transform."""
    if t < 0:
        raise ValueError("D(t) is defined for t ≥ 0")
    if t == 0:
        return 0.0
    ones = np.ones(1)
    integrand = _SegmentIntegrand(np.array([0.0, t]), [(1.0, ones, ones, False)])
    return kernel.transform(integrand, t).real


def chi_t(traj: PiecewiseTrajectory, mode: BathMode, coupling: float) -> complex:
    """Displacement argument −iλC Σ_seg n_seg ∫_seg e^{iωt′} dt′."""
    edges = traj.breakpoints
    values = np.array([v for _, _, v in traj.segments])
    lengths = np.diff(edges)
    z = 1j * mode.omega * lengths
    rect = np.exp(1j * mode.omega * edges[:-1]) * lengths * _exponential_ratio(z, 1)
    return complex(-1j * coupling * mode.coupling * np.sum(values * rect))


def xi_phase_t(traj: PiecewiseTrajectory, J: BathLike, t: float) -> float:
    """Phase ∫J(ω)∫∫_{t″<t′} n_z(t′)n_z(t″) sin ω(t′−t″)."""
    _check_span(traj, t, "trajectory")
    if t == 0:
        return 0.0
    edges, (values,) = _refine([traj])
    kernel = resolve_kernel(J, None)
    return kernel.sine_transform(
        _SegmentIntegrand(edges, [(1.0, values, values, False)]), t
    )


def displacement_operator(chi: complex, mode: FockSpace) -> Operator:
    """Truncated D(χ) = exp(χa† − χ*a)."""
    a = mode.annihilation
    generator = 1j * (chi * a.conj().T - np.conj(chi) * a)
    return SpectralPropagator(Operator(generator, (mode.n_max,))).at(1.0)


def _displacement_trace(
    chis: Sequence[complex], mode: FockSpace, beta: float, alternate: bool
) -> complex:
    rho = thermal_state(mode, beta)
    product = np.eye(mode.n_max, dtype=np.complex128)
    for index, chi in enumerate(chis):
        op = displacement_operator(chi, mode).entries
        if alternate and index % 2 == 1:
            op = op.conj().T
        product = op @ product
    return complex(np.einsum("ij,ji->", product, rho.entries))


def displacement_trace_oracle(
    chis: Sequence[complex],
    mode: FockSpace,
    beta: float,
    alternate: bool = True,
    tolerance: float = ORACLE_TOLERANCE,
) -> complex:
    """Tr(…D†(χ₄)D(χ₃)D†(χ₂)D(χ₁)ρ_th) on a truncated Fock space.

    `chis` is ordered from the rightmost factor outwards; with
    `alternate=False` every factor is a plain D(χ).  The trace is repeated at
    twice the cutoff and accepted only when both agree to `tolerance`.
    """
    coarse = _displacement_trace(chis, mode, beta, alternate)
    fine_mode = FockSpace(2 * mode.n_max, mode.omega)
    fine = _displacement_trace(chis, fine_mode, beta, alternate)
    deviation = abs(fine - coarse)
    if deviation > tolerance:
        raise TruncationError(
            (mode.n_max, fine_mode.n_max),
            deviation,
            "displacement trace did not settle",
        )
    return fine


def displacement_trace_analytic(
    chis: Sequence[complex], omega: float, beta: float, alternate: bool = True
) -> complex:
    """Closed form: BCH phase times the thermal characteristic function."""
    total = 0j
    phase = 0j
    for index, chi in enumerate(chis):
        alpha = -chi if alternate and index % 2 == 1 else chi
        phase += 0.5 * (alpha * np.conj(total) - np.conj(alpha) * total)
        total += alpha
    coth = 1.0 / math.tanh(0.5 * beta * omega)
    return complex(np.exp(phase - 0.5 * abs(total) ** 2 * coth))


def branch_phase_table(
    scheme: Scheme,
    kernel: CorrelationKernel,
    t: float,
    convention: Convention = Convention.CALIBRATED,
) -> ComplexArray:
    """Φ per site at unit coupling, indexed by the four branch bits (0 ↔ +1)."""
    table = np.zeros((2, 2, 2, 2), dtype=np.complex128)
    if t == 0:
        return table
    phi = phi_fbte if scheme is Scheme.FBTE else phi_pbte
    for bits in np.ndindex(2, 2, 2, 2):
        sigma = tuple(1.0 - 2.0 * b for b in bits)
        cfg = PathConfiguration.constant(scheme, [sigma], t)
        table[bits] = phi(cfg, kernel, None, 1.0, t, convention)
    return table


def _enumerated_otoc(
    energies: RealArray,
    w: Operator,
    v: Operator,
    rho_s: State,
    table: Optional[ComplexArray],
    lambdas: Sequence[float],
    t: float,
) -> complex:
    n_sites = len(lambdas)
    wm, vm = w.entries, v.entries
    weight = np.einsum(
        "dc,cb,ba,ad->abcd",
        wm.conj().T,
        vm.conj().T,
        wm,
        vm @ rho_s.entries,
    )
    e = energies
    phase = np.exp(
        1j
        * t
        * (
            -e[:, None, None, None]
            + e[None, :, None, None]
            - e[None, None, :, None]
            + e[None, None, None, :]
        )
    )
    exponent = np.zeros_like(weight)
    if table is not None:
        bits = ((1.0 - sigma_z_diagonal(n_sites)) / 2.0).astype(int)
        for site, lam in enumerate(lambdas):
            if lam == 0.0:
                continue
            b = bits[:, site]
            exponent += lam**2 * table[
                b[:, None, None, None],
                b[None, :, None, None],
                b[None, None, :, None],
                b[None, None, None, :],
            ]
    return complex(np.sum(weight * phase * np.exp(-exponent)))


def _product_marginals(rho_s: State, n_sites: int) -> Optional[List[State]]:
    marginals = [partial_trace(rho_s, [k]) for k in range(n_sites)]
    product = kron_all(marginals, max_dim=rho_s.dim)
    if np.max(np.abs(product.entries - rho_s.entries)) > PRODUCT_TOLERANCE:
        return None
    return marginals


def _site_observable(obs: ObservableSpec, site: int) -> ObservableSpec:
    return ObservableSpec(tuple((0, axis) for k, axis in obs.factors if k == site))


def dephasing_otoc(
    scheme: Scheme,
    chain: SpinChainSpec,
    W: ObservableSpec,
    V: ObservableSpec,
    rho_s: State,
    J: BathLike,
    ctx: Optional[ThermalContext],
    coupling: Couplings,
    t: float,
    convention: Convention = Convention.CALIBRATED,
) -> complex:
    """Open-system OTOC of a σ_z-diagonal chain as a sum over branch labels.

    Each quadruple of σ_z product-basis labels (s₁, s₂, s₃, s₄) contributes
    its system phase e^{i(E₄−E₃+E₂−E₁)t}, the matrix elements
    ⟨s₄|W†|s₃⟩⟨s₃|V†|s₂⟩⟨s₂|W|s₁⟩⟨s₁|Vρ_S|s₄⟩ and the influence weight
    e^{−Φ} of the constant branch paths.  Up to three sites are enumerated
    directly; longer chains must be uncoupled with a product initial state,
    in which case the result is the product of single-site values.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.CLOSED:
        raise ValueError("dephasing_otoc evaluates the fbte and pbte schemes")
    if t < 0:
        raise ValueError("t must be non-negative")
    hamiltonian = build_chain_hamiltonian(chain)
    require_dephasing_chain(chain, hamiltonian)
    n_sites = chain.n_sites
    lambdas = _site_couplings(coupling, n_sites)

    table: Optional[ComplexArray] = None
    if any(lam != 0.0 for lam in lambdas) and t > 0:
        kernel = resolve_kernel(J, ctx)
        table = branch_phase_table(scheme, kernel, t, Convention(convention))

    if n_sites <= MAX_ENUMERATED_SITES:
        energies = np.real(np.diag(hamiltonian.entries))
        return _enumerated_otoc(
            energies,
            local_operator(n_sites, W),
            local_operator(n_sites, V),
            rho_s,
            table,
            lambdas,
            t,
        )

    if chain.family is ChainFamily.CUSTOM_DIAGONAL or any(chain.bond_couplings):
        raise CapabilityError(
            f"dephasing engine enumerates at most {MAX_ENUMERATED_SITES} coupled "
            f"sites; {n_sites} sites require zero couplings"
        )
    marginals = _product_marginals(rho_s, n_sites)
    if marginals is None:
        raise CapabilityError(
            f"dephasing engine needs a product initial state beyond "
            f"{MAX_ENUMERATED_SITES} sites"
        )

    result = 1 + 0j
    for site in range(n_sites):
        field = chain.site_fields[site]
        energies = np.array([field, -field])
        result *= _enumerated_otoc(
            energies,
            local_operator(1, _site_observable(W, site)),
            local_operator(1, _site_observable(V, site)),
            marginals[site],
            table,
            (lambdas[site],),
            t,
        )
    return result


def dephasing_series(
    scheme: Scheme,
    chain: SpinChainSpec,
    W: ObservableSpec,
    V: ObservableSpec,
    rho_s: State,
    bath: BathSpec,
    times: Sequence[float],
    continuum: bool = False,
    workers: Optional[int] = None,
) -> OTOCSeries:
    """dephasing_otoc over a time grid with a shared correlation kernel."""
    kernel = kernel_for_bath(bath, continuum)
    couplings = tuple(bath.coupling_for_site(k) for k in range(chain.n_sites))
    grid = np.asarray(times, dtype=np.float64)

    def evaluate(t: float) -> complex:
        return dephasing_otoc(scheme, chain, W, V, rho_s, kernel, None, couplings, t)

    values = evaluate_grid(evaluate, [float(t) for t in grid], workers, "dephasing")
    logger.info_with_fields(
        "Dephasing series evaluated",
        operation="dephasing_series",
        scheme=Scheme(scheme).value,
        points=len(values),
        kernel=type(kernel).__name__,
    )
    kernel_label = "continuum" if isinstance(kernel, ContinuousKernel) else "discrete"
    return OTOCSeries(
        grid,
        np.array(values, dtype=np.complex128),
        Scheme(scheme),
        {
            "engine": "influence",
            "convention": Convention.CALIBRATED.value,
            "kernel": kernel_label,
        },
    )
