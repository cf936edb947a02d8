"""
Dense real-matrix kernel.

Linear solves, the matrix exponential, integer powers and the dominant
eigenpair of nonnegative matrices. Every function takes array-likes,
returns fresh float64 arrays and never mutates its arguments.
"""
import logging
import warnings
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as la

from phaseforge.config import settings
from phaseforge.errors import (
    DimensionMismatch,
    NoConvergence,
    NonFinite,
    NotNonnegative,
    Overflow,
    SingularMatrix,
    UsageError,
)

logger = logging.getLogger(__name__)

# Pade(13,13) numerator coefficients; the denominator uses the same ones
# with alternating signs.
PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

# Scaled-norm ceiling before the approximant is applied.
EXPM_SCALED_NORM = 0.5


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, read-only 2-D float64 array."""
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains NaN or Inf")
    m.setflags(write=False)
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite, read-only 1-D float64 array."""
    x = np.array(v, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"{name} contains NaN or Inf")
    x.setflags(write=False)
    return x


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def inf_norm(a) -> float:
    """Maximum absolute row sum (the vector max-norm for 1-D input)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return float(np.max(np.abs(a))) if a.size else 0.0
    return float(np.max(np.sum(np.abs(a), axis=1)))


def _finite(result: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(result)):
        raise Overflow(f"{what} left the representable range")
    result.setflags(write=False)
    return result


def solve_linear(A, b) -> np.ndarray:
    """
    Solve A x = b by row-pivoted LU elimination.

    Raises SingularMatrix when a pivot falls below PIVOT_RTOL times the
    largest entry magnitude of A.
    """
    A = as_square(A, "A")
    b = as_vector(b, "b")
    if A.shape[0] != b.size:
        raise DimensionMismatch(f"A is {A.shape[0]}x{A.shape[1]} but b has length {b.size}")

    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        raise SingularMatrix("matrix is identically zero")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(A, check_finite=False)

    pivots = np.abs(np.diag(lu))
    smallest = float(np.min(pivots))
    if smallest < settings.PIVOT_RTOL * scale:
        raise SingularMatrix(
            f"pivot {smallest:.3e} below {settings.PIVOT_RTOL:.0e} x largest entry {scale:.3e}"
        )

    x = la.lu_solve((lu, piv), b, check_finite=False)
    return _finite(x, "linear solve")


def _pade13(a: np.ndarray, ident: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    b = PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
    return u, v


def mat_exp(A) -> np.ndarray:
    """
    Matrix exponential by scaling and squaring.

    A is scaled by 2**-s so that its infinity norm is at most 0.5, the
    order-13 diagonal Pade approximant is evaluated, and the result is
    squared s times.
    """
    A = as_square(A, "A")
    n = A.shape[0]
    ident = np.eye(n)

    norm = inf_norm(A)
    if norm == 0.0:
        return _finite(ident, "matrix exponential")

    squarings = max(0, int(np.ceil(np.log2(norm / EXPM_SCALED_NORM))))
    scaled = A / (2.0 ** squarings)

    with np.errstate(over="ignore", invalid="ignore"):
        u, v = _pade13(scaled, ident)
        r = la.solve(v - u, v + u, check_finite=False)
        for _ in range(squarings):
            r = r @ r

    return _finite(np.array(r), "matrix exponential")


def mat_pow(A, k: int) -> np.ndarray:
    """A**k by repeated squaring; A**0 is the identity."""
    A = as_square(A, "A")
    k = int(k)
    if k < 0:
        raise UsageError(f"matrix power must be nonnegative, got {k}")
    with np.errstate(over="ignore", invalid="ignore"):
        result = np.linalg.matrix_power(A, k)
    return _finite(np.array(result, dtype=float), "matrix power")


def dominant_eigenpair(
    A,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[float, np.ndarray]:
    """
    Perron eigenpair of a nonnegative matrix by power iteration.

    Iterates from the all-ones vector until ||Av - lambda v||_inf is at
    most tol * ||v||_inf. The returned vector has unit Euclidean length and
    nonnegative entries. Callers shift by eta*I so the diagonal is
    strictly positive.
    """
    A = as_square(A, "A")
    tol = settings.POWER_TOL if tol is None else tol
    max_iter = settings.POWER_MAX_ITER if max_iter is None else max_iter
    if tol <= 0:
        raise UsageError("tolerance must be positive")
    if np.min(A) < -settings.CLAMP_TOL:
        raise NotNonnegative("power iteration needs an entrywise nonnegative matrix")

    A = np.clip(A, 0.0, None)
    n = A.shape[0]
    v = np.ones(n) / np.sqrt(n)

    for iteration in range(max_iter):
        w = A @ v
        lam = float(v @ w)
        residual = inf_norm(w - lam * v)
        if residual <= tol * inf_norm(v):
            logger.debug("power iteration converged after %d steps", iteration)
            v = np.abs(v)
            v.setflags(write=False)
            return lam, v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            break
        v = w / norm

    raise NoConvergence(f"power iteration did not reach tol {tol:.1e} within {max_iter} steps")


def perron_bounds(A, threshold: float, max_iter: Optional[int] = None) -> Tuple[float, float]:
    """
    Collatz-Wielandt bracket on the Perron root of a nonnegative matrix.

    Runs the power iteration from the all-ones vector and returns
    (min_i (Av)_i / v_i, max_i (Av)_i / v_i) as soon as the bracket lies
    entirely on one side of threshold. The bracket is valid for every
    positive v, so a defective dominant eigenvalue does not stall the
    decision the way a residual test would.
    """
    A = as_square(A, "A")
    max_iter = settings.POWER_MAX_ITER if max_iter is None else max_iter
    if np.min(A) < -settings.CLAMP_TOL:
        raise NotNonnegative("Collatz-Wielandt bounds need an entrywise nonnegative matrix")
    if np.min(np.diag(A)) <= 0.0:
        raise UsageError("shift the matrix so its diagonal is strictly positive")

    A = np.clip(A, 0.0, None)
    v = np.ones(A.shape[0])
    lo, hi = 0.0, np.inf
    for _ in range(max_iter):
        w = A @ v
        ratios = w / v
        lo, hi = max(lo, float(np.min(ratios))), min(hi, float(np.max(ratios)))
        if hi < threshold or lo >= threshold:
            return lo, hi
        v = w / float(np.max(w))

    raise NoConvergence(
        f"Perron root bracket [{lo:.15g}, {hi:.15g}] still straddles {threshold:.15g}"
    )
