"""Dephasing lower bounds on open-system OTOCs and the Taylor difference bound."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from jinja2 import BaseLoader, Environment
from scipy.optimize import brentq

from osotoc.bath import (
    LOW_TEMPERATURE_RATIO,
    D_closed_s1,
    D_closed_s_gt1,
    XiTable,
    abs_xi_double_integral,
    dephasing_integral_D,
)
from osotoc.engines import OTOCProblem, otoc_series
from osotoc.exceptions import DimensionCapError, DomainError, NumericalError
from osotoc.grid import evaluate_grid
from osotoc.influence import branch_phase_table, kernel_dephasing_D, kernel_for_bath
from osotoc.logging import get_logger
from osotoc.models import (
    BathMode,
    BathSpec,
    BoundSeries,
    ObservableSpec,
    SpectralDensity,
    SpinChainSpec,
    ThermalContext,
)
from osotoc.quantum import DEFAULT_MAX_DIMENSION
from osotoc.types import Axis, Engine, JsonDict, Scheme

logger = get_logger()

D_METHODS = ("auto", "closed", "quadrature")
FIGURE2_SITES = 20
FIGURE2_COUPLING = 0.1
FIGURE2_TEMPERATURES = {"lowT": 1e-2, "midT": 1.0}
FIGURE2_GRID = (0.0, 10.0, 101)
VIOLATION_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BoundParams:
    """Coupling, chain length and bath of a dephasing bound."""

    coupling: float
    n_sites: int
    spectral: SpectralDensity
    ctx: ThermalContext
    d_method: str = "auto"

    def __post_init__(self) -> None:
        """Validate the bound parameters."""
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")
        if self.n_sites < 1:
            raise ValueError("n_sites must be at least 1")
        if self.d_method not in D_METHODS:
            raise ValueError(f"d_method must be one of {', '.join(D_METHODS)}")

    def as_dict(self) -> JsonDict:
        """Flat parameter record for headers and summaries."""
        return {
            "coupling": self.coupling,
            "sites": self.n_sites,
            "s": self.spectral.s,
            "cutoff": self.spectral.cutoff,
            "temperature": self.ctx.temperature,
            "d_method": self.d_method,
        }


def dephasing_D(
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    d_method: str = "auto",
) -> Tuple[float, str]:
    """D(t) and the label of the method that produced it.

    `auto` uses the ohmic closed form only in its low-temperature regime and
    the zeta/digamma form for every s > 1, falling back to quadrature.
    `closed` forces a closed form; `quadrature` never uses one.
    """
    if d_method not in D_METHODS:
        raise ValueError(f"d_method must be one of {', '.join(D_METHODS)}")
    s, cutoff = spectral.s, spectral.cutoff
    if d_method != "quadrature":
        if s == 1.0:
            low_temperature = ctx.temperature <= LOW_TEMPERATURE_RATIO * cutoff
            if d_method == "closed" or low_temperature:
                return D_closed_s1(cutoff, ctx, t, warn=False), "closed_s1"
        elif s > 1.0:
            label = "closed_digamma" if s == 2.0 else "closed_zeta"
            try:
                return D_closed_s_gt1(spectral, ctx, t), label
            except NumericalError as e:
                if d_method == "closed":
                    raise
                logger.warning_with_fields(
                    "Closed form rejected, using quadrature",
                    operation="dephasing_D",
                    t=t,
                    error_message=str(e),
                )
        elif d_method == "closed":
            raise DomainError(f"no closed form of D(t) for s={s}")
    return dephasing_integral_D(spectral, ctx, t), "quadrature"


def _check_bound_args(coupling: float, n_sites: int, t: float) -> None:
    if coupling < 0:
        raise ValueError("coupling must be non-negative")
    if n_sites < 1:
        raise ValueError("n_sites must be at least 1")
    if t < 0:
        raise ValueError("t must be non-negative")


def bound_exponents(
    coupling: float,
    n_sites: int,
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    d_method: str = "auto",
) -> Tuple[float, float]:
    """(4λ²N·D(t), λ²N·D(3t)), the exponents of both bound factors."""
    _check_bound_args(coupling, n_sites, t)
    scale = coupling**2 * n_sites
    d_t, _ = dephasing_D(spectral, ctx, t, d_method)
    d_3t, _ = dephasing_D(spectral, ctx, 3.0 * t, d_method)
    return 4.0 * scale * d_t, scale * d_3t


def fbte_bound_factor(
    coupling: float,
    n_sites: int,
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    d_method: str = "auto",
) -> float:
    """e^{−4λ²N·D(t)}."""
    _check_bound_args(coupling, n_sites, t)
    d_t, _ = dephasing_D(spectral, ctx, t, d_method)
    return math.exp(-4.0 * coupling**2 * n_sites * d_t)


def pbte_bound_factor(
    coupling: float,
    n_sites: int,
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    d_method: str = "auto",
) -> float:
    """e^{−λ²N·D(3t)}."""
    _check_bound_args(coupling, n_sites, t)
    d_3t, _ = dephasing_D(spectral, ctx, 3.0 * t, d_method)
    return math.exp(-(coupling**2) * n_sites * d_3t)


def difference_bound(
    coupling: float,
    n_sites: int,
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    table: Optional[XiTable] = None,
) -> float:
    """e^{4λ²N·∫∫|ξ_J|} − 1, bounding the Taylor remainder of the influence weight."""
    _check_bound_args(coupling, n_sites, t)
    if coupling == 0 or t == 0:
        return 0.0
    if table is not None:
        integral = table.abs_double_integral(t)
    else:
        integral = abs_xi_double_integral(spectral, ctx, t)
    value = math.expm1(4.0 * coupling**2 * n_sites * integral)
    if value > 1.0:
        logger.debug_with_fields(
            "Difference bound saturated",
            operation="difference_bound",
            t=t,
            value=value,
        )
    return value


def difference_bound_crossing(
    coupling: float,
    n_sites: int,
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t_max: float,
    table: Optional[XiTable] = None,
) -> Optional[float]:
    """Time at which the difference bound reaches 1, or None before t_max."""
    _check_bound_args(coupling, n_sites, t_max)
    if coupling == 0 or t_max == 0:
        return None
    target = math.log(2.0) / (4.0 * coupling**2 * n_sites)

    def excess(t: float) -> float:
        if table is not None:
            return table.abs_double_integral(t) - target
        return abs_xi_double_integral(spectral, ctx, t) - target

    if excess(t_max) < 0:
        return None
    return float(brentq(excess, 0.0, t_max, xtol=1e-8))


def bound_series(
    params: BoundParams,
    times: Sequence[float],
    workers: Optional[int] = None,
    with_difference: bool = True,
) -> BoundSeries:
    """D(t), D(3t), both bound factors and optionally the difference bound."""
    grid = np.asarray(times, dtype=np.float64)
    scale = params.coupling**2 * params.n_sites
    spectral, ctx = params.spectral, params.ctx
    if (
        params.d_method == "closed"
        and spectral.s == 1.0
        and ctx.temperature > LOW_TEMPERATURE_RATIO * spectral.cutoff
    ):
        logger.warning_with_fields(
            "Ohmic closed form forced outside its low-temperature regime",
            operation="bound_series",
            temperature=ctx.temperature,
            cutoff=spectral.cutoff,
        )

    def point(t: float) -> Tuple[float, float, str]:
        d_t, first = dephasing_D(spectral, ctx, t, params.d_method)
        d_3t, second = dephasing_D(spectral, ctx, 3.0 * t, params.d_method)
        return d_t, d_3t, first if first == second else f"{first}+{second}"

    results = evaluate_grid(point, [float(t) for t in grid], workers, "bounds")
    d_values = np.array([r[0] for r in results])
    d3_values = np.array([r[1] for r in results])
    methods = tuple(r[2] for r in results)

    difference: Optional[np.ndarray] = None
    if with_difference:
        difference = np.zeros_like(grid)
        t_max = float(grid[-1])
        if t_max > 0 and params.coupling > 0:
            table = XiTable(spectral, ctx, t_max)
            difference = np.array(
                [
                    difference_bound(
                        params.coupling, params.n_sites, spectral, ctx, float(t), table
                    )
                    for t in grid
                ]
            )
            saturated = grid[difference > 1.0]
            if saturated.size:
                logger.warning_with_fields(
                    "Difference bound exceeds 1 and carries no information",
                    operation="bound_series",
                    first_time=float(saturated[0]),
                )

    logger.info_with_fields(
        "Bound series evaluated",
        operation="bound_series",
        points=int(grid.size),
        **params.as_dict(),
    )
    return BoundSeries(
        times=grid,
        d_values=d_values,
        d3_values=d3_values,
        fbte_factor=np.exp(-4.0 * scale * d_values),
        pbte_factor=np.exp(-scale * d3_values),
        difference=difference,
        methods=methods,
        params=params.as_dict(),
    )


def figure2_panels() -> Dict[str, BoundParams]:
    """Panel name → parameters of the pure-dephasing bound plots.

    The extra `s1_midT_lowT_formula` panel evaluates the ohmic low-temperature
    closed form outside its regime next to the quadrature panel.
    """
    panels: Dict[str, BoundParams] = {}
    for s in (1, 3):
        for label, temperature in FIGURE2_TEMPERATURES.items():
            panels[f"s{s}_{label}"] = BoundParams(
                coupling=FIGURE2_COUPLING,
                n_sites=FIGURE2_SITES,
                spectral=SpectralDensity(s=float(s)),
                ctx=ThermalContext.from_temperature(temperature),
            )
    panels["s1_midT_lowT_formula"] = BoundParams(
        coupling=FIGURE2_COUPLING,
        n_sites=FIGURE2_SITES,
        spectral=SpectralDensity(s=1.0),
        ctx=ThermalContext.from_temperature(FIGURE2_TEMPERATURES["midT"]),
        d_method="closed",
    )
    return panels


@dataclass(frozen=True)
class ValidityRow:
    """One grid point of the bound-validity comparison."""

    config: str
    scheme: str
    engine: str
    t: float
    abs_open: float
    abs_closed: float
    factor: float
    worst_re_phi: float
    bound_exponent: float

    @property
    def margin(self) -> float:
        """|F^{OS}| − |F|·factor; negative values violate the bound."""
        return self.abs_open - self.abs_closed * self.factor

    @property
    def violated(self) -> bool:
        """Whether the exact value falls below the bound."""
        return self.margin < -VIOLATION_TOLERANCE


@dataclass(frozen=True)
class ValidityReport:
    """Exact open-system OTOC magnitudes against the dephasing bounds."""

    rows: Tuple[ValidityRow, ...]
    configs: Dict[str, JsonDict] = field(default_factory=dict)

    @property
    def violations(self) -> Tuple[ValidityRow, ...]:
        """Rows where the bound fails."""
        return tuple(row for row in self.rows if row.violated)


def validity_configs() -> Dict[str, Tuple[OTOCProblem, BathSpec]]:
    """Single spin with one explicit mode and with a three-mode ohmic bath."""
    chain = SpinChainSpec(n_sites=1)
    sigma_x = ObservableSpec.single(0, Axis.X)
    single_mode = BathSpec(
        coupling=0.2,
        beta=1.0,
        explicit_modes=(BathMode(omega=1.0, coupling=1.0),),
        n_max=4,
    )
    three_mode = BathSpec(
        spectral=SpectralDensity(s=1.0, cutoff=1.0),
        coupling=0.2,
        beta=1.0,
        modes_per_site=3,
        omega_max=5.0,
        n_max=4,
    )
    return {
        name: (OTOCProblem(chain, sigma_x, sigma_x, bath=bath), bath)
        for name, bath in (("single_mode", single_mode), ("ohmic_3_modes", three_mode))
    }


def _flatten(data: JsonDict, prefix: str = "") -> JsonDict:
    flat: JsonDict = {}
    for key, value in data.items():
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{prefix}{key}."))
        else:
            flat[f"{prefix}{key}"] = value
    return flat


def _open_series(
    scheme: Scheme,
    problem: OTOCProblem,
    times: Sequence[float],
    workers: Optional[int],
) -> Tuple[np.ndarray, str]:
    try:
        series = otoc_series(scheme, problem, times, Engine.EXACT, workers)
        return series.values, Engine.EXACT.value
    except (NumericalError, DimensionCapError) as e:
        logger.warning_with_fields(
            "Exact engine unavailable, using the influence engine",
            operation="bound_validity_report",
            scheme=scheme.value,
            error_message=str(e),
        )
        series = otoc_series(scheme, problem, times, Engine.INFLUENCE, workers)
        return series.values, Engine.INFLUENCE.value


def bound_validity_report(
    times: Optional[Sequence[float]] = None,
    workers: Optional[int] = None,
    max_dim: int = DEFAULT_MAX_DIMENSION,
) -> ValidityReport:
    """Compare |F^{OS}| with |F|·bound factor for the validity configurations.

    D(t) comes from the same discretized modes the exact engine simulates.
    The worst-case Re Φ over the 16 constant branch configurations is
    reported next to the bound exponent.
    """
    grid = [float(t) for t in (times if times is not None else np.linspace(0, 5, 20))]
    rows: List[ValidityRow] = []
    configs: Dict[str, JsonDict] = {}
    for name, (base, bath) in validity_configs().items():
        problem = OTOCProblem(
            base.chain, base.W, base.V, base.initial, bath, max_dim=max_dim
        )
        kernel = kernel_for_bath(bath)
        closed = otoc_series(Scheme.CLOSED, problem, grid, workers=workers).values
        configs[name] = _flatten(problem.metadata())
        for scheme in (Scheme.FBTE, Scheme.PBTE):
            values, engine = _open_series(scheme, problem, grid, workers)
            configs[name][f"{scheme.value}_engine"] = engine
            for index, t in enumerate(grid):
                lam2 = bath.coupling**2
                if scheme is Scheme.FBTE:
                    exponent = 4.0 * lam2 * kernel_dephasing_D(kernel, t)
                else:
                    exponent = lam2 * kernel_dephasing_D(kernel, 3.0 * t)
                table = branch_phase_table(scheme, kernel, t)
                rows.append(
                    ValidityRow(
                        config=name,
                        scheme=scheme.value,
                        engine=engine,
                        t=t,
                        abs_open=float(abs(values[index])),
                        abs_closed=float(abs(closed[index])),
                        factor=math.exp(-exponent),
                        worst_re_phi=float(lam2 * np.max(table.real)),
                        bound_exponent=exponent,
                    )
                )
    report = ValidityReport(tuple(rows), configs)
    for row in report.violations:
        logger.warning_with_fields(
            "Dephasing bound violated",
            operation="bound_validity_report",
            config=row.config,
            scheme=row.scheme,
            t=row.t,
            margin=row.margin,
        )
    return report


REPORT_TEMPLATE = """\
# Dephasing bound validity

{% for name, config in configs.items() %}
## {{ name }}

{% for key, value in config.items() %}
- {{ key }}: {{ value }}
{% endfor %}

{% endfor %}
## Comparison

| config | scheme | engine | t | abs F_OS | abs F | factor | margin | max Re phi | exp |
|---|---|---|---|---|---|---|---|---|---|
{% for row in rows %}
| {{ row.config }} | {{ row.scheme }} | {{ row.engine }} | {{ "%.4g"|format(row.t) }} \
| {{ "%.6g"|format(row.abs_open) }} | {{ "%.6g"|format(row.abs_closed) }} \
| {{ "%.6g"|format(row.factor) }} | {{ "%.3e"|format(row.margin) }} \
| {{ "%.6g"|format(row.worst_re_phi) }} | {{ "%.6g"|format(row.bound_exponent) }} |
{% endfor %}

## Violations

{% if violations %}
{% for row in violations %}
- {{ row.config }} / {{ row.scheme }} at t={{ "%.4g"|format(row.t) }}: \
margin {{ "%.3e"|format(row.margin) }}
{% endfor %}
{% else %}
None.
{% endif %}
"""


def render_validity_markdown(report: ValidityReport) -> str:
    """Markdown rendering of a validity report."""
    env = Environment(
        loader=BaseLoader(), autoescape=True, trim_blocks=True, lstrip_blocks=True
    )
    template = env.from_string(REPORT_TEMPLATE)
    return template.render(
        configs=report.configs,
        rows=report.rows,
        violations=report.violations,
    )
