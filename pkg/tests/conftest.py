"""Common test fixtures."""

from pathlib import Path
from typing import Callable

import pytest
from rich.console import Console

from osotoc.models import BathMode, BathSpec, ObservableSpec, SpinChainSpec
from osotoc.quantum import State
from osotoc.types import Axis

DEPHASING_MODE = BathMode(omega=1.0, coupling=1.0)


@pytest.fixture
def test_console() -> Console:
    """Create a test console with consistent settings."""
    return Console(force_terminal=True, no_color=True, width=100)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str, str], Path]:
    """Factory fixture writing a TOML run configuration into tmp_path."""

    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


@pytest.fixture
def sigma_x() -> ObservableSpec:
    """σ_x on site 0."""
    return ObservableSpec.single(0, Axis.X)


@pytest.fixture
def single_spin() -> SpinChainSpec:
    """One spin with H_S = 0."""
    return SpinChainSpec(n_sites=1)


@pytest.fixture
def single_mode_bath() -> BathSpec:
    """One mode ω = C = 1 at λ = 0.2, β = 1."""
    return BathSpec(
        coupling=0.2,
        beta=1.0,
        explicit_modes=(DEPHASING_MODE,),
        n_max=4,
    )


@pytest.fixture
def mixed_qubit() -> State:
    """ρ_S = I/2."""
    return State.maximally_mixed((2,))


@pytest.fixture
def closed_config_text() -> Callable[[str], str]:
    """TOML text of a two-site closed run writing to `output`."""

    def _text(output: str) -> str:
        return f"""
[run]
scheme = "closed"
output = "{output}"

[chain]
sites = 2
family = "ising_zz"
couplings = [1.0]
fields = [0.3, 0.5]

[observables]
W = [[0, "x"]]
V = [[1, "x"]]

[grid]
t_min = 0.0
t_max = 2.0
points = 5
"""

    return _text
