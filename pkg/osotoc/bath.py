"""Bath correlation function, dephasing integrals and their closed forms."""

import math
from abc import ABC, abstractmethod
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union, overload

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import gamma, gammaincc

from osotoc.exceptions import DomainError, NumericalError, QuadratureError
from osotoc.logging import get_logger
from osotoc.models import BathMode, SpectralDensity, ThermalContext
from osotoc.special import digamma, hurwitz_zeta
from osotoc.types import RealArray

logger = get_logger()

TAIL_TOLERANCE = 1e-12
XI_TOLERANCE = 1e-10
D_TOLERANCE = 1e-9
QUAD_RELATIVE = 1e-10
ERROR_SLACK = 100.0
LOW_TEMPERATURE_RATIO = 0.05
MAX_OSCILLATION_POINTS = 40

SpectralIntegrand = Callable[[float], complex]


@overload
def spectral_value(spectral: SpectralDensity, omega: float) -> float: ...


@overload
def spectral_value(spectral: SpectralDensity, omega: RealArray) -> RealArray: ...


def spectral_value(
    spectral: SpectralDensity, omega: Union[float, RealArray]
) -> Union[float, RealArray]:
    """J(ω) = ω^s Λ^{1-s} e^{-ω/Λ}."""
    w = np.asarray(omega, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("spectral density is defined for ω ≥ 0")
    lam = spectral.cutoff
    value = w**spectral.s * lam ** (1.0 - spectral.s) * np.exp(-w / lam)
    if np.ndim(omega) == 0:
        return float(value)
    return value


def thermal_weight(
    spectral: SpectralDensity, beta: float, omega: Union[float, RealArray]
) -> Any:
    """J(ω)·coth(βω/2), continuous at ω → 0."""
    w = np.asarray(omega, dtype=np.float64)
    x = 0.5 * beta * w
    small = x < 1e-8
    safe_x = np.where(small, 1.0, x)
    regular = spectral_value(spectral, np.atleast_1d(w)).reshape(w.shape) / np.tanh(
        safe_x
    )
    lam = spectral.cutoff
    with np.errstate(divide="ignore"):
        limit = (
            2.0
            / beta
            * w ** (spectral.s - 1.0)
            * lam ** (1.0 - spectral.s)
            * np.exp(-w / lam)
        )
    value = np.where(small, limit, regular)
    if np.ndim(omega) == 0:
        return float(value)
    return value


def frequency_cutoff(
    spectral: SpectralDensity,
    beta: Optional[float] = None,
    tol: float = TAIL_TOLERANCE,
) -> float:
    """Upper frequency beyond which ∫J·coth is below `tol`."""
    s, lam = spectral.s, spectral.cutoff

    def excess(x: float) -> float:
        tail = lam**2 * gamma(s + 1.0) * gammaincc(s + 1.0, x)
        if beta is not None:
            tail /= math.tanh(0.5 * beta * lam * x)
        return math.log(max(tail, 1e-300)) - math.log(tol)

    lower, upper = 1.0, 400.0
    if excess(lower) <= 0:
        return lam * lower
    return lam * float(brentq(excess, lower, upper, xtol=1e-6))


def _split_points(
    spectral: SpectralDensity, ctx: Optional[ThermalContext], upper: float
) -> List[float]:
    candidates = [spectral.cutoff]
    if ctx is not None:
        candidates.append(ctx.temperature)
    return sorted({p for p in candidates if 0.0 < p < upper})


def adaptive_quad(
    func: Callable[[float], float],
    lower: float,
    upper: float,
    quantity: str,
    epsabs: float,
    epsrel: float = QUAD_RELATIVE,
    points: Optional[Sequence[float]] = None,
    weight: Optional[str] = None,
    wvar: Optional[float] = None,
    limit: int = 200,
) -> Tuple[float, float]:
    """Gauss–Kronrod quadrature that raises when the error estimate is poor."""
    kwargs: dict[str, Any] = {}
    if points:
        kwargs["points"] = list(points)
        limit = max(limit, 4 * len(points) + 50)
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
    result = quad(
        func,
        lower,
        upper,
        epsabs=epsabs,
        epsrel=epsrel,
        limit=limit,
        full_output=1,
        **kwargs,
    )
    value, error = float(result[0]), float(result[1])
    if len(result) > 3:
        allowed = max(epsabs, epsrel * abs(value)) * ERROR_SLACK
        if error > allowed or not math.isfinite(value):
            raise QuadratureError(quantity, error, str(result[3]))
        logger.debug_with_fields(
            "Quadrature flagged but within tolerance",
            operation="quadrature",
            quantity=quantity,
            estimated_error=error,
        )
    return value, error


def _check_ohmic_or_super(spectral: SpectralDensity) -> None:
    if spectral.s < 1:
        raise DomainError(
            f"bath correlation needs s ≥ 1 for a finite ω→0 limit, got s={spectral.s}"
        )


def xi_real(
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    epsabs: float = XI_TOLERANCE,
) -> float:
    """Re ξ_J(t) = ∫ J(ω) coth(βω/2) cos(ωt) dω."""
    _check_ohmic_or_super(spectral)
    tau = abs(t)
    upper = frequency_cutoff(spectral, ctx.beta)
    edges = [0.0, *_split_points(spectral, ctx, upper), upper]
    share = epsabs / (len(edges) - 1)

    def weight(w: float) -> float:
        return float(thermal_weight(spectral, ctx.beta, w))

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:], strict=True):
        if tau == 0:
            value, _ = adaptive_quad(weight, a, b, "Re xi_J", share)
        else:
            value, _ = adaptive_quad(
                weight, a, b, "Re xi_J", share, weight="cos", wvar=tau
            )
        total += value
    return total


def xi_imag(
    spectral: SpectralDensity,
    t: float,
    epsabs: float = XI_TOLERANCE,
) -> float:
    """Im ξ_J(t) = ∫ J(ω) sin(ωt) dω (odd in t)."""
    if t == 0:
        return 0.0
    tau = abs(t)
    upper = frequency_cutoff(spectral)
    edges = [0.0, *_split_points(spectral, None, upper), upper]
    share = epsabs / (len(edges) - 1)

    def density(w: float) -> float:
        return spectral_value(spectral, w)

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:], strict=True):
        value, _ = adaptive_quad(
            density, a, b, "Im xi_J", share, weight="sin", wvar=tau
        )
        total += value
    return math.copysign(1.0, t) * total


def xi_J(
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    epsabs: float = XI_TOLERANCE,
) -> complex:
    """ξ_J(t) = ∫ J(ω)[coth(βω/2) cos(ωt) + i sin(ωt)] dω."""
    return complex(
        xi_real(spectral, ctx, t, 0.5 * epsabs), xi_imag(spectral, t, 0.5 * epsabs)
    )


def _one_minus_cos_over_square(w: float, t: float) -> float:
    if w == 0.0:
        return 0.5 * t * t
    half = math.sin(0.5 * w * t)
    return 2.0 * half * half / (w * w)


def _oscillation_points(span: float, upper: float) -> List[float]:
    if span <= 0:
        return []
    period = 2.0 * math.pi / span
    return [
        k * period
        for k in range(1, MAX_OSCILLATION_POINTS + 1)
        if k * period < upper
    ]


def dephasing_integral_D(
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    method: str = "frequency",
    epsabs: float = D_TOLERANCE,
) -> float:
    """D(t) = ∫₀^t dt′∫₀^{t′} dt″ Re ξ_J(t′−t″).

    `method="frequency"` integrates J(ω)coth(βω/2)(1−cos ωt)/ω² once;
    `method="time"` integrates (t−τ) Re ξ_J(τ) over τ ∈ [0, t].
    """
    if t < 0:
        raise ValueError("D(t) is defined for t ≥ 0")
    _check_ohmic_or_super(spectral)
    if t == 0:
        return 0.0

    if method == "frequency":
        upper = frequency_cutoff(spectral, ctx.beta)
        points = sorted(
            set(_split_points(spectral, ctx, upper) + _oscillation_points(t, upper))
        )

        def integrand(w: float) -> float:
            weight = thermal_weight(spectral, ctx.beta, w)
            return float(weight) * _one_minus_cos_over_square(w, t)

        value, _ = adaptive_quad(
            integrand, 0.0, upper, "D(t)", epsabs, points=points
        )
        return value

    if method == "time":

        def convolved(tau: float) -> float:
            return (t - tau) * xi_real(spectral, ctx, tau, epsabs * 1e-2)

        value, _ = adaptive_quad(convolved, 0.0, t, "D(t)", epsabs)
        return value

    raise ValueError(f"Unknown D(t) method: {method}")


def _log_sinhc(x: float) -> float:
    """ln(sinh(x)/x) without overflow or cancellation."""
    if x < 1e-3:
        x2 = x * x
        return x2 / 6.0 - x2 * x2 / 180.0
    if x < 20.0:
        return math.log(math.sinh(x) / x)
    return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0 * x)


def D_closed_s1(
    cutoff: float, ctx: ThermalContext, t: float, warn: bool = True
) -> float:
    """Low-temperature ohmic form ln[√(1+Λ²t²)·sinh(t/τ_T)/(t/τ_T)]."""
    if t < 0:
        raise ValueError("D(t) is defined for t ≥ 0")
    if warn and ctx.temperature > LOW_TEMPERATURE_RATIO * cutoff:
        logger.warning_with_fields(
            "Ohmic closed form used outside its low-temperature regime",
            operation="D_closed_s1",
            temperature=ctx.temperature,
            cutoff=cutoff,
        )
    if t == 0:
        return 0.0
    x = t / ctx.thermal_time
    return 0.5 * math.log1p((cutoff * t) ** 2) + _log_sinhc(x)


def _residue_check(bracket: complex, scale: float) -> float:
    if abs(bracket.imag) > 1e-12 * max(1.0, scale):
        raise NumericalError(
            f"Closed-form D(t) has imaginary residue {bracket.imag:.3e}"
        )
    return bracket.real


def D_closed_s_gt1(
    spectral: SpectralDensity, ctx: ThermalContext, t: float
) -> float:
    """Superohmic closed form in Hurwitz zeta functions (digamma for s = 2)."""
    s, lam, beta = spectral.s, spectral.cutoff, ctx.beta
    if s <= 1:
        raise DomainError(f"superohmic closed form needs s > 1, got s={s}")
    if t < 0:
        raise ValueError("D(t) is defined for t ≥ 0")
    if t == 0:
        return 0.0

    q = 1.0 / (lam * beta)
    shifted = 1j * t / beta
    anchors = (q, q + 1.0)

    if s == 2.0:
        static = [digamma(a) for a in anchors]
        moving = [digamma(a + sign * shifted) for a in anchors for sign in (1, -1)]
        bracket = 0.5 * sum(moving) - sum(static)
        scale = sum(abs(v) for v in static + moving)
        return _residue_check(bracket, scale) / (beta * lam)

    p = s - 1.0
    static = [hurwitz_zeta(p, a) for a in anchors]
    moving = [hurwitz_zeta(p, a + sign * shifted) for a in anchors for sign in (1, -1)]
    bracket = sum(static) - 0.5 * sum(moving)
    scale = sum(abs(v) for v in static + moving)
    return float(gamma(p)) / (beta * lam) ** p * _residue_check(bracket, scale)


def abs_xi_double_integral(
    spectral: SpectralDensity,
    ctx: ThermalContext,
    t: float,
    epsabs: float = D_TOLERANCE,
) -> float:
    """∫₀^t dt′∫₀^{t′} dt″ |ξ_J(t′−t″)| via ∫₀^t (t−τ)|ξ_J(τ)| dτ."""
    if t < 0:
        raise ValueError("the double integral is defined for t ≥ 0")
    if t == 0:
        return 0.0

    def convolved(tau: float) -> float:
        return (t - tau) * abs(xi_J(spectral, ctx, tau, epsabs * 1e-2))

    value, _ = adaptive_quad(convolved, 0.0, t, "|xi_J| double integral", epsabs)
    return value


class XiTable:
    """Spline of ξ_J samples on [0, t_max] for repeated grid queries."""

    def __init__(
        self,
        spectral: SpectralDensity,
        ctx: ThermalContext,
        t_max: float,
        step: float = 0.05,
    ):
        if t_max <= 0:
            raise ValueError("t_max must be positive")
        count = max(41, math.ceil(t_max / step) + 1)
        self.t_max = t_max
        self.nodes = np.linspace(0.0, t_max, count)
        self.samples = np.array(
            [xi_J(spectral, ctx, float(tau)) for tau in self.nodes],
            dtype=np.complex128,
        )
        modulus = np.abs(self.samples)
        self._first = CubicSpline(self.nodes, modulus).antiderivative()
        self._second = CubicSpline(self.nodes, self.nodes * modulus).antiderivative()
        logger.info_with_fields(
            "Tabulated bath correlation",
            operation="xi_table",
            samples=count,
            t_max=t_max,
        )

    def abs_double_integral(self, t: float) -> float:
        """∫₀^t (t−τ)|ξ_J(τ)| dτ from the spline antiderivatives."""
        if not 0 <= t <= self.t_max * (1 + 1e-12):
            raise ValueError(f"t={t} outside the tabulated range [0, {self.t_max}]")
        return float(t * self._first(t) - self._second(t))


class CorrelationKernel(ABC):
    """Frequency-space access to the bath correlation function.

    transform(q) = ∫ J(ω)[coth(βω/2) Re q(ω) + i Im q(ω)] dω, so that the
    double time integral of ξ_J against any segment kernel is a single
    frequency integral.
    """

    @abstractmethod
    def transform(self, q: SpectralIntegrand, span: float) -> complex:
        """Integrate q against the thermal (real) and sine (imaginary) weights."""

    @abstractmethod
    def sine_transform(self, q: SpectralIntegrand, span: float) -> float:
        """∫ J(ω) Im q(ω) dω."""


class ContinuousKernel(CorrelationKernel):
    """Kernel of a continuous ohmic-family spectral density."""

    def __init__(
        self,
        spectral: SpectralDensity,
        ctx: ThermalContext,
        epsabs: float = 1e-9,
    ):
        _check_ohmic_or_super(spectral)
        self.spectral = spectral
        self.ctx = ctx
        self.epsabs = epsabs
        self.upper = frequency_cutoff(spectral, ctx.beta)

    def _points(self, span: float) -> List[float]:
        return sorted(
            set(
                _split_points(self.spectral, self.ctx, self.upper)
                + _oscillation_points(span, self.upper)
            )
        )

    def transform(self, q: SpectralIntegrand, span: float) -> complex:
        points = self._points(span)

        def real_part(w: float) -> float:
            weight = thermal_weight(self.spectral, self.ctx.beta, w)
            return float(weight) * q(w).real

        re, _ = adaptive_quad(
            real_part, 0.0, self.upper, "influence phase", self.epsabs, points=points
        )
        return complex(re, self.sine_transform(q, span))

    def sine_transform(self, q: SpectralIntegrand, span: float) -> float:
        def imag_part(w: float) -> float:
            return spectral_value(self.spectral, w) * q(w).imag

        im, _ = adaptive_quad(
            imag_part,
            0.0,
            self.upper,
            "influence phase",
            self.epsabs,
            points=self._points(span),
        )
        return im


class DiscreteKernel(CorrelationKernel):
    """Kernel of a finite set of modes, J(ω) = Σ_j C_j² δ(ω−ω_j)."""

    def __init__(self, modes: Sequence[BathMode], beta: float):
        if not modes:
            raise ValueError("a discrete kernel needs at least one mode")
        if beta <= 0:
            raise ValueError("beta must be positive")
        self.modes = tuple(modes)
        self.beta = beta

    def transform(self, q: SpectralIntegrand, span: float) -> complex:
        total = 0j
        for mode in self.modes:
            value = q(mode.omega)
            weight = mode.coupling**2
            coth = 1.0 / math.tanh(0.5 * self.beta * mode.omega)
            total += weight * complex(coth * value.real, value.imag)
        return total

    def sine_transform(self, q: SpectralIntegrand, span: float) -> float:
        return float(sum(m.coupling**2 * q(m.omega).imag for m in self.modes))
