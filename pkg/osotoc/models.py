"""Data model for chains, baths and computed series."""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from osotoc.types import (
    Axis,
    ChainFamily,
    ComplexArray,
    InitialKind,
    JsonDict,
    RealArray,
    Scheme,
)


@dataclass(frozen=True)
class SpinChainSpec:
    """Nearest-neighbour spin-1/2 chain Hamiltonian parameters."""

    n_sites: int
    family: ChainFamily = ChainFamily.ISING_ZZ
    couplings: Tuple[float, ...] = ()
    fields: Tuple[float, ...] = ()
    transverse: Tuple[float, ...] = ()
    anisotropy: float = 1.0
    diagonal: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        """Validate list lengths against the family arity."""
        object.__setattr__(self, "family", ChainFamily(self.family))
        for name in ("couplings", "fields", "transverse", "diagonal"):
            object.__setattr__(
                self, name, tuple(float(v) for v in getattr(self, name))
            )
        if self.n_sites < 1:
            raise ValueError("n_sites must be at least 1")

        n = self.n_sites
        if self.family is ChainFamily.CUSTOM_DIAGONAL:
            if len(self.diagonal) != 2**n:
                raise ValueError(f"diagonal needs {2**n} energies for {n} sites")
            if self.couplings or self.fields or self.transverse:
                raise ValueError("custom_diagonal takes only diagonal energies")
            return

        if self.diagonal:
            raise ValueError("diagonal energies are only valid for custom_diagonal")
        if self.couplings and len(self.couplings) != n - 1:
            raise ValueError(f"couplings needs {n - 1} values for {n} sites")
        if self.fields and len(self.fields) != n:
            raise ValueError(f"fields needs {n} values for {n} sites")
        if self.transverse:
            if self.family is not ChainFamily.TRANSVERSE_ISING:
                raise ValueError("transverse fields require transverse_ising")
            if len(self.transverse) != n:
                raise ValueError(f"transverse needs {n} values for {n} sites")

    @property
    def bond_couplings(self) -> Tuple[float, ...]:
        """Per-bond couplings, zero when omitted."""
        return self.couplings or (0.0,) * (self.n_sites - 1)

    @property
    def site_fields(self) -> Tuple[float, ...]:
        """Per-site longitudinal fields, zero when omitted."""
        return self.fields or (0.0,) * self.n_sites

    @property
    def transverse_fields(self) -> Tuple[float, ...]:
        """Per-site transverse fields, zero when omitted."""
        return self.transverse or (0.0,) * self.n_sites

    @property
    def dimension(self) -> int:
        """Hilbert-space dimension of the chain."""
        return int(2**self.n_sites)


@dataclass(frozen=True)
class ObservableSpec:
    """Product of Pauli matrices at distinct sites; identity when empty."""

    factors: Tuple[Tuple[int, Axis], ...] = ()

    def __post_init__(self) -> None:
        """Normalize axes and reject repeated sites."""
        normalized = tuple((int(site), Axis(axis)) for site, axis in self.factors)
        sites = [site for site, _ in normalized]
        if len(set(sites)) != len(sites):
            raise ValueError(f"Observable sites must be distinct, got {sites}")
        if any(site < 0 for site in sites):
            raise ValueError("Observable sites must be non-negative")
        object.__setattr__(self, "factors", normalized)

    @classmethod
    def single(cls, site: int, axis: Axis | str) -> "ObservableSpec":
        """Single Pauli factor."""
        return cls(((site, Axis(axis)),))

    def describe(self) -> str:
        """Compact label such as 'x0*z2'."""
        if not self.factors:
            return "I"
        return "*".join(f"{axis.value}{site}" for site, axis in self.factors)


@dataclass(frozen=True)
class InitialStateSpec:
    """Initial chain state: maximally mixed, ground state or a basis label."""

    kind: InitialKind = InitialKind.MAXIMALLY_MIXED
    label: Optional[str] = None

    def __post_init__(self) -> None:
        """Require a 0/1 label exactly for basis states."""
        kind = InitialKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is InitialKind.BASIS:
            if not self.label or set(self.label) - {"0", "1"}:
                raise ValueError("basis states need a label of 0/1 characters")
        elif self.label is not None:
            raise ValueError(f"{kind.value} states take no label")


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic-family spectral density J(ω) = ω^s Λ^{1-s} e^{-ω/Λ}."""

    s: float = 1.0
    cutoff: float = 1.0

    def __post_init__(self) -> None:
        """Validate exponent and cutoff."""
        if self.s <= 0:
            raise ValueError("ohmicity exponent s must be positive")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")


@dataclass(frozen=True)
class ThermalContext:
    """Inverse temperature of the bath."""

    beta: float

    def __post_init__(self) -> None:
        """Validate the inverse temperature."""
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    @classmethod
    def from_temperature(cls, temperature: float) -> "ThermalContext":
        """Build from k_BT (in units of the cutoff)."""
        if not temperature > 0:
            raise ValueError("temperature must be positive")
        return cls(beta=1.0 / temperature)

    @property
    def temperature(self) -> float:
        """k_BT."""
        return 1.0 / self.beta

    @property
    def thermal_time(self) -> float:
        """τ_T = 1/(π k_BT)."""
        return self.beta / math.pi


@dataclass(frozen=True)
class BathMode:
    """A single discretized bath oscillator."""

    omega: float
    coupling: float

    def __post_init__(self) -> None:
        """Validate the mode frequency."""
        if not self.omega > 0:
            raise ValueError("bath mode frequency must be positive")
        if not math.isfinite(self.coupling):
            raise ValueError("bath mode coupling must be finite")


@dataclass(frozen=True)
class BathSpec:
    """Per-site bosonic environment and its truncation."""

    spectral: SpectralDensity = field(default_factory=SpectralDensity)
    coupling: float = 0.0
    beta: float = 1.0
    modes_per_site: int = 1
    n_max: int = 4
    omega_max: float = 10.0
    n_max_ceiling: int = 128
    explicit_modes: Optional[Tuple[BathMode, ...]] = None
    site_couplings: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        """Validate coupling, temperature and discretization."""
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.modes_per_site < 1:
            raise ValueError("modes_per_site must be at least 1")
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.n_max_ceiling < self.n_max:
            raise ValueError("n_max_ceiling must not be below n_max")
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        if self.explicit_modes is not None:
            modes = tuple(self.explicit_modes)
            if not modes:
                raise ValueError("explicit_modes must not be empty")
            object.__setattr__(self, "explicit_modes", modes)
            object.__setattr__(self, "modes_per_site", len(modes))
        if self.site_couplings is not None:
            couplings = tuple(float(c) for c in self.site_couplings)
            if any(c < 0 for c in couplings):
                raise ValueError("site_couplings must be non-negative")
            object.__setattr__(self, "site_couplings", couplings)

    @property
    def thermal(self) -> ThermalContext:
        """Thermal context of the bath."""
        return ThermalContext(self.beta)

    def coupling_for_site(self, site: int) -> float:
        """λ_k, falling back to the uniform λ."""
        if self.site_couplings is None:
            return self.coupling
        return self.site_couplings[site]

    @property
    def is_uniform(self) -> bool:
        """Whether every site couples with the same λ."""
        if self.site_couplings is None:
            return True
        return all(c == self.coupling for c in self.site_couplings)

    def with_cutoff(self, n_max: int) -> "BathSpec":
        """Copy with a different Fock cutoff."""
        return BathSpec(
            spectral=self.spectral,
            coupling=self.coupling,
            beta=self.beta,
            modes_per_site=self.modes_per_site,
            n_max=n_max,
            omega_max=self.omega_max,
            n_max_ceiling=max(self.n_max_ceiling, n_max),
            explicit_modes=self.explicit_modes,
            site_couplings=self.site_couplings,
        )


@dataclass(frozen=True)
class TruncationReport:
    """Outcome of the Fock cutoff doubling gate."""

    accepted_n_max: int
    cutoffs: Tuple[int, ...]
    deviation: float
    tolerance: float

    def as_dict(self) -> JsonDict:
        """Plain representation for metadata and summaries."""
        return {
            "n_max": self.accepted_n_max,
            "cutoffs": list(self.cutoffs),
            "deviation": self.deviation,
            "tolerance": self.tolerance,
        }


def _check_grid(times: RealArray) -> None:
    if times.ndim != 1 or times.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if np.any(times < 0):
        raise ValueError("time grid must be non-negative")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly ascending")


@dataclass(frozen=True, eq=False)
class OTOCSeries:
    """OTOC values on a time grid."""

    times: RealArray
    values: ComplexArray
    scheme: Scheme
    metadata: JsonDict = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate grid and value lengths."""
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.complex128)
        _check_grid(times)
        if values.shape != times.shape:
            raise ValueError("times and values must have equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def rows(self) -> list[Tuple[float, float, float, float]]:
        """(t, Re F, Im F, |F|) per grid point."""
        return [
            (float(t), float(v.real), float(v.imag), float(abs(v)))
            for t, v in zip(self.times, self.values, strict=True)
        ]


@dataclass(frozen=True, eq=False)
class BoundSeries:
    """Dephasing bound factors on a time grid.

    Factors lie in (0, 1] mathematically. A stored 0 means e^{-exponent}
    underflowed; `bounds.bound_exponents` keeps the finite exponent.
    """

    times: RealArray
    d_values: RealArray
    d3_values: RealArray
    fbte_factor: RealArray
    pbte_factor: RealArray
    difference: Optional[RealArray]
    methods: Tuple[str, ...]
    params: JsonDict = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate lengths and the factor range."""
        times = np.asarray(self.times, dtype=np.float64)
        _check_grid(times)
        for name in ("d_values", "d3_values", "fbte_factor", "pbte_factor"):
            values = np.asarray(getattr(self, name), dtype=np.float64)
            if values.shape != times.shape:
                raise ValueError(f"{name} must match the time grid")
            object.__setattr__(self, name, values)
        if self.difference is not None:
            difference = np.asarray(self.difference, dtype=np.float64)
            if difference.shape != times.shape:
                raise ValueError("difference must match the time grid")
            object.__setattr__(self, "difference", difference)
        if len(self.methods) != times.size:
            raise ValueError("one D(t) method label per grid point is required")
        for factor in (self.fbte_factor, self.pbte_factor):
            if not np.all((factor >= 0) & (factor <= 1)):
                raise ValueError("bound factors must lie in [0, 1]")
        object.__setattr__(self, "times", times)
