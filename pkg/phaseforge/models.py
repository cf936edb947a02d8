"""
Domain value types.

All arrays held by these types are float64 and read-only; a value is
fully validated when its constructor returns.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from phaseforge import matnum
from phaseforge.config import settings
from phaseforge.errors import (
    DimensionMismatch,
    InvalidRealization,
    NotMetzler,
    NotNonnegative,
    ProbabilityOutOfRange,
)

logger = logging.getLogger(__name__)

# Tolerance on the exit-vector identity of a PH representation.
EXIT_TOL = 1e-9

# Tolerance on the total initial mass of a PH representation.
MASS_TOL = 1e-10


class SystemKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


def clamp_nonnegative(x: np.ndarray, name: str, off_diagonal: bool = False) -> np.ndarray:
    """
    Zero out floating noise below zero, reject genuinely negative data.

    Entries at or above -REJECT_TOL are clamped to 0 (entries below
    -CLAMP_TOL are logged); anything lower raises. With off_diagonal the
    diagonal of a square matrix is left untouched.
    """
    x = np.array(x, dtype=float)
    mask = np.ones(x.shape, dtype=bool)
    if off_diagonal:
        np.fill_diagonal(mask, False)

    negative = mask & (x < 0.0)
    if np.any(x[negative] < -settings.REJECT_TOL):
        worst = float(np.min(x[negative]))
        error = NotMetzler if off_diagonal else NotNonnegative
        where = "off-diagonal entries of " if off_diagonal else ""
        raise error(f"{where}{name} must be nonnegative, found {worst:.6g}")
    if np.any(x[negative] < -settings.CLAMP_TOL):
        logger.warning("%s has entries down to %.3e; clamped to 0", name, float(np.min(x[negative])))

    x[negative] = 0.0
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class Realization:
    """A positive SISO LTI system x' = Ax + Bu, y = Cx."""

    kind: SystemKind
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        try:
            kind = SystemKind(self.kind)
        except ValueError:
            raise InvalidRealization(f"unknown system kind {self.kind!r}")
        A = matnum.as_square(self.A, "A")
        B = matnum.as_vector(self.B, "B")
        C = matnum.as_vector(self.C, "C")
        n = A.shape[0]
        if B.size != n or C.size != n:
            raise DimensionMismatch(f"A is {n}x{n} but B has length {B.size} and C has length {C.size}")

        B = clamp_nonnegative(B, "B")
        C = clamp_nonnegative(C, "C")
        if kind is SystemKind.DISCRETE:
            A = clamp_nonnegative(A, "A")
        else:
            A = clamp_nonnegative(A, "A", off_diagonal=True)

        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def is_continuous(self) -> bool:
        return self.kind is SystemKind.CONTINUOUS


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time
    outputs: np.ndarray


def _initial_vector(alpha, n: int) -> np.ndarray:
    alpha = matnum.as_vector(alpha, "alpha")
    if alpha.size != n:
        raise DimensionMismatch(f"alpha has length {alpha.size}, expected {n}")
    alpha = clamp_nonnegative(alpha, "alpha")
    if alpha.sum() > 1.0 + MASS_TOL:
        raise ProbabilityOutOfRange(f"initial weights sum to {alpha.sum():.12g} > 1")
    return alpha


@dataclass(frozen=True)
class ContPH:
    """
    Continuous phase-type representation.

    Absorption-time law of a CTMC with sub-generator T and exit rates t.
    The mass 1 - sum(alpha) starts in the absorbing state.
    """

    alpha: np.ndarray
    T: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        T = matnum.as_square(self.T, "T")
        n = T.shape[0]
        T = clamp_nonnegative(T, "T", off_diagonal=True)
        if np.any(np.diag(T) >= 0.0):
            raise NotMetzler("sub-generator diagonal must be strictly negative")

        t = matnum.as_vector(self.t, "t")
        if t.size != n:
            raise DimensionMismatch(f"t has length {t.size}, expected {n}")
        residual = matnum.inf_norm(t + T.sum(axis=1))
        if residual > EXIT_TOL * max(1.0, matnum.inf_norm(T)):
            raise InvalidRealization(f"exit rates differ from -T.1 by {residual:.3e}")
        t = clamp_nonnegative(t, "t")

        object.__setattr__(self, "alpha", _initial_vector(self.alpha, n))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def deficit(self) -> float:
        return max(0.0, 1.0 - float(self.alpha.sum()))


@dataclass(frozen=True)
class DiscPH:
    """
    Discrete phase-type representation.

    Absorption-time law of a DTMC with sub-stochastic block T and exit
    probabilities t = (I - T).1.
    """

    alpha: np.ndarray
    T: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        T = clamp_nonnegative(matnum.as_square(self.T, "T"), "T")
        n = T.shape[0]
        t = matnum.as_vector(self.t, "t")
        if t.size != n:
            raise DimensionMismatch(f"t has length {t.size}, expected {n}")
        t = clamp_nonnegative(t, "t")

        row_sums = T.sum(axis=1) + t
        residual = matnum.inf_norm(row_sums - 1.0)
        if residual > EXIT_TOL:
            raise InvalidRealization(f"rows of [T | t] differ from 1 by {residual:.3e}")
        # absorption must be certain
        matnum.solve_linear(np.eye(n) - T, np.ones(n))

        object.__setattr__(self, "alpha", _initial_vector(self.alpha, n))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.T.shape[0]

    @property
    def deficit(self) -> float:
        return max(0.0, 1.0 - float(self.alpha.sum()))


PhaseType = Union[ContPH, DiscPH]


@dataclass(frozen=True)
class SampleSet:
    values: np.ndarray
    seed: int
    mean: float
    variance: float

    @property
    def count(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class ContinuousSimilarity:
    """Scaling data of the continuous transform: U = diag(nu[:n]) / nu[n]."""

    nu: np.ndarray
    U: np.ndarray
    eta: Optional[float] = None  # shift used by the power-iteration cross-check
    crosscheck_error: Optional[float] = None


@dataclass(frozen=True)
class DiscreteSimilarity:
    """Scaling data of the discrete transform: M = diag(z), z = (I - A)^-1 B."""

    z: np.ndarray
    M: np.ndarray


@dataclass(frozen=True)
class TransformResult:
    """
    Outcome of turning a realization into a phase-type representation.

    ph is always built from the normalized initial vector alpha_raw / psi.
    raw_alpha_kept tells whether alpha_raw is itself a (defective) initial
    vector, which holds exactly when psi <= 1.
    """

    kind: SystemKind
    similarity: Union[ContinuousSimilarity, DiscreteSimilarity]
    alpha_raw: np.ndarray
    psi: float
    ph: PhaseType
    raw_alpha_kept: bool = field(default=False)

    @property
    def alpha_star(self) -> np.ndarray:
        return self.ph.alpha

    @property
    def T(self) -> np.ndarray:
        return self.ph.T

    @property
    def t(self) -> np.ndarray:
        return self.ph.t


@dataclass(frozen=True)
class EquivalenceReport:
    grid: np.ndarray
    y_system: np.ndarray
    y_ph: np.ndarray
    max_abs_err: float
    psi: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs_err <= self.tolerance
