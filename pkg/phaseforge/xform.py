"""
Positive realization -> phase-type representation.

Both directions of time share one diagonal similarity: a positive scaling
vector s turns (A, B, C) into

    alpha~ = C diag(s),  T~ = diag(s)^-1 A diag(s),  t~ = diag(s)^-1 B.

The continuous transform takes s from the null vector of the augmented
matrix [[A, B], [0, 0]], the discrete one takes s = (I - A)^-1 B.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from phaseforge import matnum, possys
from phaseforge.config import settings
from phaseforge.errors import (
    DimensionMismatch,
    DomainError,
    InvalidRealization,
    NoConvergence,
    NonpositiveZ,
    NotExcitable,
    NotMetzler,
    NotNonnegative,
    NotStable,
    PsiOutOfRange,
    ZeroMass,
)
from phaseforge.models import (
    EXIT_TOL,
    ContinuousSimilarity,
    ContPH,
    DiscPH,
    DiscreteSimilarity,
    PhaseType,
    Realization,
    SystemKind,
    TransformResult,
    clamp_nonnegative,
)

logger = logging.getLogger(__name__)

# Scaling entries must exceed this to keep the similarity nonsingular.
SCALING_FLOOR = 1e-12

# Total initial mass below this cannot be normalized.
ZERO_MASS = 1e-14

# Agreement required between the solved and the power-iterated null vector.
CROSSCHECK_TOL = 1e-8


def augment(A, B) -> np.ndarray:
    """Augmented realization [[A, B], [0, 0]] of order n + 1."""
    A = matnum.as_square(A, "A")
    B = matnum.as_vector(B, "B")
    n = A.shape[0]
    if B.size != n:
        raise DimensionMismatch(f"A is {n}x{n} but B has length {B.size}")
    delta = np.zeros((n + 1, n + 1))
    delta[:n, :n] = A
    delta[:n, n] = B
    return delta


def shifted_perron_vector(
    delta,
    eta: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> Tuple[float, np.ndarray]:
    """
    Perron vector of delta + eta*I by power iteration.

    eta defaults to 1 + the largest absolute row sum of delta, which makes
    the shifted matrix nonnegative with a positive diagonal. Returns
    (eta, unit vector).
    """
    delta = matnum.as_square(delta, "delta")
    if eta is None:
        eta = possys.perron_shift(delta)
    max_iter = settings.CROSSCHECK_MAX_ITER if max_iter is None else max_iter
    _, nu = matnum.dominant_eigenpair(delta + eta * np.eye(delta.shape[0]), max_iter=max_iter)
    return eta, nu


def diagonal_scaling(nu) -> np.ndarray:
    """Diagonal of U = diag(nu_1..nu_n) / nu_{n+1}."""
    nu = matnum.as_vector(nu, "nu")
    if nu[-1] <= 0:
        raise NonpositiveZ("last entry of the null vector must be positive")
    return nu[:-1] / nu[-1]


def similarity_transform(r: Realization, scaling) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(C S, S^-1 A S, S^-1 B) for S = diag(scaling)."""
    s = matnum.as_vector(scaling, "scaling")
    if s.size != r.n:
        raise DimensionMismatch(f"scaling has length {s.size}, expected {r.n}")
    if np.any(s <= SCALING_FLOOR):
        raise NonpositiveZ(f"scaling vector must be positive, smallest entry is {s.min():.3e}")
    alpha = r.C * s
    T = r.A * s[np.newaxis, :] / s[:, np.newaxis]
    t = r.B / s
    return alpha, T, t


def normalize_alpha(alpha_raw) -> Tuple[np.ndarray, float]:
    """Split alpha~ into the probability vector alpha~* and its mass psi."""
    alpha_raw = clamp_nonnegative(matnum.as_vector(alpha_raw, "alpha_raw"), "alpha_raw")
    psi = float(alpha_raw.sum())
    if psi <= ZERO_MASS:
        raise ZeroMass(f"initial weights sum to {psi:.3e}; C gives no output")
    alpha_star = alpha_raw / psi
    alpha_star.setflags(write=False)
    return alpha_star, psi


def _require(r: Realization, kind: SystemKind):
    if r.kind is not kind:
        raise InvalidRealization(f"expected a {kind.value}-time realization, got {r.kind.value}")
    if kind is SystemKind.CONTINUOUS and not possys.is_metzler(r.A):
        raise NotMetzler("A must be Metzler (nonnegative off-diagonal)")
    if kind is SystemKind.DISCRETE and not possys.is_nonnegative(r.A):
        raise NotNonnegative("A must be entrywise nonnegative")
    if not possys.is_excitable(r.A, r.B):
        raise NotExcitable("(A, B) is not excitable: some state cannot be reached from the input")
    if not possys.is_stable(r):
        bound = "0" if kind is SystemKind.CONTINUOUS else "1"
        raise NotStable(f"Perron root of A is not below {bound}")


def _crosscheck(delta: np.ndarray, nu: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
    """Compare the solved null vector with the shifted power iteration."""
    try:
        eta, iterated = shifted_perron_vector(delta)
    except NoConvergence as e:
        logger.warning("skipping Perron cross-check: %s", e.detail)
        return None, None
    unit = nu / np.linalg.norm(nu)
    error = matnum.inf_norm(unit - iterated)
    if error > CROSSCHECK_TOL:
        raise DomainError(f"null vector and Perron vector disagree by {error:.3e}")
    return eta, error


def cont_to_cph(r: Realization, crosscheck: bool = True) -> TransformResult:
    """
    Continuous-time transform.

    Solves A v = -B so that nu = (v, 1) spans the null space of the
    augmented matrix, then scales by U = diag(v).
    """
    _require(r, SystemKind.CONTINUOUS)
    v = matnum.solve_linear(r.A, -r.B)
    nu = np.append(v, 1.0)
    if np.any(nu <= SCALING_FLOOR):
        raise NonpositiveZ(f"null vector of the augmented matrix is not positive: {nu}")

    eta, error = _crosscheck(augment(r.A, r.B), nu) if crosscheck else (None, None)

    u = diagonal_scaling(nu)
    alpha_raw, T, t = similarity_transform(r, u)
    residual = matnum.inf_norm(t + T.sum(axis=1))
    if residual > EXIT_TOL * (1.0 + matnum.inf_norm(t)):
        raise DomainError(f"exit rates differ from -T.1 by {residual:.3e}")

    alpha_star, psi = normalize_alpha(alpha_raw)
    similarity = ContinuousSimilarity(nu=nu, U=np.diag(u), eta=eta, crosscheck_error=error)
    logger.info("continuous transform: psi=%.10g", psi)
    return TransformResult(
        kind=SystemKind.CONTINUOUS,
        similarity=similarity,
        alpha_raw=alpha_raw,
        psi=psi,
        ph=ContPH(alpha=alpha_star, T=T, t=t),
        raw_alpha_kept=psi <= 1.0,
    )


def disc_to_dph(r: Realization) -> TransformResult:
    """Discrete-time transform with M = diag(z), z = (I - A)^-1 B."""
    _require(r, SystemKind.DISCRETE)
    z = matnum.solve_linear(np.eye(r.n) - r.A, r.B)
    if np.any(z <= SCALING_FLOOR):
        raise NonpositiveZ(f"z = (I - A)^-1 B must be positive, got {z}")

    alpha_raw, T, t = similarity_transform(r, z)
    residual = matnum.inf_norm(T.sum(axis=1) + t - 1.0)
    if residual > EXIT_TOL:
        raise DomainError(f"rows of [T | t] differ from 1 by {residual:.3e}")

    alpha_star, psi = normalize_alpha(alpha_raw)
    logger.info("discrete transform: psi=%.10g", psi)
    return TransformResult(
        kind=SystemKind.DISCRETE,
        similarity=DiscreteSimilarity(z=z, M=np.diag(z)),
        alpha_raw=alpha_raw,
        psi=psi,
        ph=DiscPH(alpha=alpha_star, T=T, t=t),
        raw_alpha_kept=psi <= 1.0,
    )


def to_ph(r: Realization) -> TransformResult:
    if r.is_continuous:
        return cont_to_cph(r)
    return disc_to_dph(r)


def raw_ph(tr: TransformResult) -> PhaseType:
    """
    The representation with the unnormalized alpha~ as initial vector.

    Only defined for psi <= 1, where 1 - psi becomes a point mass at zero.
    """
    if not tr.raw_alpha_kept:
        raise PsiOutOfRange(f"psi = {tr.psi:.10g} > 1; alpha~ is not a sub-probability vector")
    alpha = tr.alpha_raw / max(1.0, float(tr.alpha_raw.sum()))
    if tr.kind is SystemKind.CONTINUOUS:
        return ContPH(alpha=alpha, T=tr.T, t=tr.t)
    return DiscPH(alpha=alpha, T=tr.T, t=tr.t)


def markov_parameters(r: Realization, K: int) -> np.ndarray:
    """C A^{k-1} B for k = 1..K."""
    params = np.empty(K)
    x = np.array(r.B)
    for k in range(K):
        params[k] = float(r.C @ x)
        x = r.A @ x
    return params
