"""Run configuration: TOML loading and schema validation."""

import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from osotoc.bounds import D_METHODS, BoundParams
from osotoc.engines import OTOCProblem
from osotoc.exceptions import ConfigError
from osotoc.logging import get_logger
from osotoc.models import (
    BathMode,
    BathSpec,
    InitialStateSpec,
    ObservableSpec,
    SpectralDensity,
    SpinChainSpec,
    ThermalContext,
)
from osotoc.quantum import DEFAULT_MAX_DIMENSION
from osotoc.types import (
    Axis,
    ChainFamily,
    Engine,
    InitialKind,
    JsonDict,
    RealArray,
    Scheme,
)

logger = get_logger()

SCHEMA: Dict[str, Tuple[str, ...]] = {
    "chain": (
        "sites",
        "family",
        "couplings",
        "fields",
        "transverse",
        "anisotropy",
        "diagonal",
    ),
    "observables": ("W", "V"),
    "initial_state": ("kind", "label"),
    "bath": (
        "s",
        "cutoff",
        "coupling",
        "site_couplings",
        "temperature",
        "modes_per_site",
        "n_max",
        "n_max_ceiling",
        "omega_max",
        "modes",
        "kernel",
    ),
    "run": ("scheme", "engine", "output", "d_method"),
    "grid": ("t_min", "t_max", "points"),
}
KERNELS = ("discrete", "continuum")
NONUNIFORM_KEY = "bath.site_couplings"
NONUNIFORM_MESSAGE = "bound engine needs uniform couplings"

_MISSING = object()


def _section(data: JsonDict, name: str, required: bool) -> JsonDict:
    value = data.get(name)
    if value is None:
        if required:
            raise ConfigError(name, "section is required")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(name, "must be a table")
    for key in value:
        if key not in SCHEMA[name]:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return value


def _number(section: JsonDict, name: str, key: str, default: Any = _MISSING) -> float:
    value = section.get(key, default)
    if value is _MISSING:
        raise ConfigError(f"{name}.{key}", "is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}.{key}", f"expected a number, got {value!r}")
    return float(value)


def _integer(section: JsonDict, name: str, key: str, default: Any = _MISSING) -> int:
    value = section.get(key, default)
    if value is _MISSING:
        raise ConfigError(f"{name}.{key}", "is required")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}.{key}", f"expected an integer, got {value!r}")
    return value


def _string(section: JsonDict, name: str, key: str, default: Any = _MISSING) -> str:
    value = section.get(key, default)
    if value is _MISSING:
        raise ConfigError(f"{name}.{key}", "is required")
    if not isinstance(value, str):
        raise ConfigError(f"{name}.{key}", f"expected a string, got {value!r}")
    return value


def _numbers(section: JsonDict, name: str, key: str) -> Tuple[float, ...]:
    value = section.get(key, [])
    if not isinstance(value, list):
        raise ConfigError(f"{name}.{key}", "expected a list of numbers")
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{name}.{key}", f"non-numeric entry {item!r}")
    return tuple(float(v) for v in value)


def _choice(value: str, name: str, key: str, options: Tuple[str, ...]) -> str:
    if value not in options:
        raise ConfigError(f"{name}.{key}", f"must be one of {', '.join(options)}")
    return value


def _observable(section: JsonDict, key: str) -> ObservableSpec:
    value = section.get(key, _MISSING)
    if value is _MISSING:
        raise ConfigError(f"observables.{key}", "is required")
    if not isinstance(value, list):
        raise ConfigError(f"observables.{key}", "expected a list of [site, axis]")
    factors: List[Tuple[int, Axis]] = []
    for item in value:
        if (
            not isinstance(item, list)
            or len(item) != 2
            or isinstance(item[0], bool)
            or not isinstance(item[0], int)
            or item[1] not in [a.value for a in Axis]
        ):
            raise ConfigError(
                f"observables.{key}", f"entry {item!r} is not [site, 'x'|'y'|'z']"
            )
        factors.append((item[0], Axis(item[1])))
    try:
        return ObservableSpec(tuple(factors))
    except ValueError as e:
        raise ConfigError(f"observables.{key}", str(e)) from e


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid."""

    t_min: float
    t_max: float
    points: int

    def times(self) -> RealArray:
        """Grid values, a single t_min when points == 1."""
        if self.points == 1:
            return np.array([self.t_min])
        return np.linspace(self.t_min, self.t_max, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration."""

    chain: SpinChainSpec
    W: ObservableSpec
    V: ObservableSpec
    initial: InitialStateSpec
    bath: Optional[BathSpec]
    scheme: Scheme
    engine: Engine
    grid: GridSpec
    output: Path
    kernel: str = "discrete"
    d_method: str = "auto"
    raw: JsonDict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: JsonDict) -> "RunConfig":
        """Build from parsed TOML, raising ConfigError on the first bad key."""
        for name in data:
            if name not in SCHEMA:
                raise ConfigError(name, "unknown section")

        run = _section(data, "run", required=True)
        scheme = Scheme(
            _choice(
                _string(run, "run", "scheme"),
                "run",
                "scheme",
                tuple(s.value for s in Scheme),
            )
        )
        engine = Engine(
            _choice(
                _string(run, "run", "engine", "exact"),
                "run",
                "engine",
                tuple(e.value for e in Engine),
            )
        )
        output = Path(_string(run, "run", "output"))
        d_method = _choice(
            _string(run, "run", "d_method", "auto"), "run", "d_method", D_METHODS
        )

        chain = _chain(_section(data, "chain", required=True))
        observables = _section(data, "observables", engine is not Engine.BOUND)
        if engine is Engine.BOUND and not observables:
            W = V = ObservableSpec()
        else:
            W, V = _observable(observables, "W"), _observable(observables, "V")
        initial = _initial(_section(data, "initial_state", required=False))
        bath_section = _section(data, "bath", required=False)
        bath = _bath(bath_section, chain.n_sites) if bath_section else None
        kernel_name = _string(bath_section, "bath", "kernel", "discrete")
        kernel = _choice(kernel_name, "bath", "kernel", KERNELS)
        grid = _grid(_section(data, "grid", required=True))

        if scheme is Scheme.CLOSED and engine is Engine.INFLUENCE:
            raise ConfigError("run.engine", "the closed scheme has no influence phase")
        if scheme is not Scheme.CLOSED and bath is None:
            raise ConfigError("bath", f"section is required for scheme {scheme.value}")
        if engine is Engine.BOUND:
            if bath is None:
                raise ConfigError("bath", "section is required for the bound engine")
            if bath.explicit_modes is not None:
                raise ConfigError("bath.modes", "the bound engine needs a continuum J")
            if not bath.is_uniform:
                raise ConfigError(NONUNIFORM_KEY, NONUNIFORM_MESSAGE)

        try:
            OTOCProblem(chain, W, V, initial, bath)
        except ValueError as e:
            raise ConfigError("observables", str(e)) from e

        return cls(
            chain=chain,
            W=W,
            V=V,
            initial=initial,
            bath=bath,
            scheme=scheme,
            engine=engine,
            grid=grid,
            output=output,
            kernel=kernel,
            d_method=d_method,
            raw=data,
        )

    def problem(self, max_dim: int = DEFAULT_MAX_DIMENSION) -> OTOCProblem:
        """Engine input for OTOC runs."""
        return OTOCProblem(
            self.chain, self.W, self.V, self.initial, self.bath, max_dim=max_dim
        )

    def bound_params(self) -> BoundParams:
        """Bound input for bound runs."""
        if self.bath is None:
            raise ConfigError("bath", "section is required for the bound engine")
        if not self.bath.is_uniform:
            raise ConfigError(NONUNIFORM_KEY, NONUNIFORM_MESSAGE)
        return BoundParams(
            coupling=self.bath.coupling,
            n_sites=self.chain.n_sites,
            spectral=self.bath.spectral,
            ctx=self.bath.thermal,
            d_method=self.d_method,
        )


def _chain(section: JsonDict) -> SpinChainSpec:
    family = _choice(
        _string(section, "chain", "family", ChainFamily.ISING_ZZ.value),
        "chain",
        "family",
        tuple(f.value for f in ChainFamily),
    )
    try:
        return SpinChainSpec(
            n_sites=_integer(section, "chain", "sites"),
            family=ChainFamily(family),
            couplings=_numbers(section, "chain", "couplings"),
            fields=_numbers(section, "chain", "fields"),
            transverse=_numbers(section, "chain", "transverse"),
            anisotropy=_number(section, "chain", "anisotropy", 1.0),
            diagonal=_numbers(section, "chain", "diagonal"),
        )
    except ValueError as e:
        raise ConfigError("chain", str(e)) from e


def _initial(section: JsonDict) -> InitialStateSpec:
    kind = _choice(
        _string(section, "initial_state", "kind", InitialKind.MAXIMALLY_MIXED.value),
        "initial_state",
        "kind",
        tuple(k.value for k in InitialKind),
    )
    label = section.get("label")
    if label is not None and not isinstance(label, str):
        raise ConfigError("initial_state.label", "expected a string of 0/1")
    try:
        return InitialStateSpec(InitialKind(kind), label)
    except ValueError as e:
        raise ConfigError("initial_state.label", str(e)) from e


def _modes(section: JsonDict) -> Optional[Tuple[BathMode, ...]]:
    value = section.get("modes")
    if value is None:
        return None
    if not isinstance(value, list) or not value:
        raise ConfigError("bath.modes", "expected a non-empty list of [omega, C]")
    modes = []
    for item in value:
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigError("bath.modes", f"entry {item!r} is not [omega, C]")
        try:
            modes.append(BathMode(omega=float(item[0]), coupling=float(item[1])))
        except (TypeError, ValueError) as e:
            raise ConfigError("bath.modes", str(e)) from e
    return tuple(modes)


def _bath(section: JsonDict, n_sites: int) -> BathSpec:
    temperature = _number(section, "bath", "temperature")
    if not temperature > 0:
        raise ConfigError("bath.temperature", "must be positive (k_BT/Λ)")
    site_couplings = None
    if "site_couplings" in section:
        site_couplings = _numbers(section, "bath", "site_couplings")
        if len(site_couplings) != n_sites:
            raise ConfigError("bath.site_couplings", f"needs {n_sites} values")
    try:
        spectral = SpectralDensity(
            s=_number(section, "bath", "s", 1.0),
            cutoff=_number(section, "bath", "cutoff", 1.0),
        )
    except ValueError as e:
        raise ConfigError("bath.s", str(e)) from e
    try:
        return BathSpec(
            spectral=spectral,
            coupling=_number(section, "bath", "coupling"),
            beta=ThermalContext.from_temperature(temperature).beta,
            modes_per_site=_integer(section, "bath", "modes_per_site", 1),
            n_max=_integer(section, "bath", "n_max", 4),
            omega_max=_number(section, "bath", "omega_max", 10.0),
            n_max_ceiling=_integer(section, "bath", "n_max_ceiling", 128),
            explicit_modes=_modes(section),
            site_couplings=site_couplings,
        )
    except ValueError as e:
        raise ConfigError("bath", str(e)) from e


def _grid(section: JsonDict) -> GridSpec:
    t_min = _number(section, "grid", "t_min", 0.0)
    t_max = _number(section, "grid", "t_max", t_min)
    points = _integer(section, "grid", "points")
    if t_min < 0:
        raise ConfigError("grid.t_min", "must be non-negative")
    if points < 1:
        raise ConfigError("grid.points", "must be at least 1")
    if points > 1 and not t_max > t_min:
        raise ConfigError("grid.t_max", "must exceed t_min when points > 1")
    return GridSpec(t_min, t_max, points)


def load_config(path: Path) -> RunConfig:
    """Read and validate a TOML run configuration."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(str(path), f"cannot read file: {e}") from e
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(str(path), f"invalid TOML: {e}") from e
    config = RunConfig.from_mapping(data)
    logger.info_with_fields(
        "Loaded run configuration",
        operation="load_config",
        path=str(path),
        scheme=config.scheme.value,
        engine=config.engine.value,
        points=config.grid.points,
    )
    return config
