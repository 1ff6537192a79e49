"""Type definitions for osotoc."""

from enum import Enum
from typing import Any, Dict, Tuple, TypeAlias

import numpy as np
import numpy.typing as npt

# Dense matrices and sample arrays
ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
RealArray: TypeAlias = npt.NDArray[np.float64]
ComplexArray: TypeAlias = npt.NDArray[np.complex128]

# Common type aliases
JsonDict: TypeAlias = Dict[str, Any]
SubsystemDims: TypeAlias = Tuple[int, ...]
BranchLabels: TypeAlias = Tuple[int, int, int, int]


class Scheme(Enum):
    """OTOC evaluation schemes."""

    CLOSED = "closed"
    FBTE = "fbte"  # full backward time evolution
    PBTE = "pbte"  # partial backward time evolution


class Engine(Enum):
    """Numerical engines available to a run."""

    EXACT = "exact"
    INFLUENCE = "influence"
    BOUND = "bound"


class Variant(Enum):
    """Joint Hamiltonian variants."""

    FORWARD = "forward"
    SYSTEM_REVERSED = "system_reversed"


class ChainFamily(Enum):
    """Supported spin-chain Hamiltonian families."""

    ISING_ZZ = "ising_zz"
    TRANSVERSE_ISING = "transverse_ising"
    XXZ = "xxz"
    CUSTOM_DIAGONAL = "custom_diagonal"


class Axis(Enum):
    """Pauli axes."""

    X = "x"
    Y = "y"
    Z = "z"


class Convention(Enum):
    """Bookkeeping of the influence-phase formulas."""

    PRINTED = "printed"
    CALIBRATED = "calibrated"


class InitialKind(Enum):
    """Initial system states selectable from a run config."""

    MAXIMALLY_MIXED = "maximally_mixed"
    GROUND = "ground"
    BASIS = "basis"
