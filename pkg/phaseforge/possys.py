"""
Positive SISO systems: structural hypotheses and trajectory simulation.
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from phaseforge import matnum
from phaseforge.errors import DimensionMismatch, InvalidRealization, NoConvergence, SingularMatrix, UsageError
from phaseforge.models import Realization, SystemKind, Trajectory

logger = logging.getLogger(__name__)

# Entries at or below this magnitude do not count as graph edges.
EDGE_TOL = 1e-12

# Margin a Perron root must clear to count as stable.
STABILITY_MARGIN = 1e-12


def is_metzler(A) -> bool:
    """True iff every off-diagonal entry is >= -1e-12."""
    A = matnum.as_square(A, "A")
    off = A[~np.eye(A.shape[0], dtype=bool)]
    return bool(np.all(off >= -EDGE_TOL))


def is_nonnegative(A) -> bool:
    A = matnum.as_matrix(A, "A")
    return bool(np.all(A >= -EDGE_TOL))


def is_excitable(A, B) -> bool:
    """
    True iff every state is reachable from the input.

    The graph has an edge j -> i whenever |A_ij| > 1e-12 and an edge
    input -> i whenever B_i > 1e-12; the input is node n.
    """
    A = matnum.as_square(A, "A")
    B = matnum.as_vector(B, "B")
    n = A.shape[0]
    if B.size != n:
        raise DimensionMismatch(f"A is {n}x{n} but B has length {B.size}")

    adjacency = np.zeros((n + 1, n + 1))
    adjacency[:n, :n] = (np.abs(A) > EDGE_TOL).T  # row j holds edges leaving state j
    adjacency[n, :n] = B > EDGE_TOL
    reached = breadth_first_order(csr_matrix(adjacency), n, directed=True, return_predecessors=False)
    return len(reached) == n + 1


def perron_shift(A) -> float:
    """eta = 1 + max_i sum_j |A_ij|; A + eta*I is nonnegative with positive diagonal."""
    return 1.0 + matnum.inf_norm(A)


def perron_root(A, tol: Optional[float] = None, max_iter: Optional[int] = None) -> float:
    """Dominant real eigenvalue of a Metzler matrix via the shifted power iteration."""
    A = matnum.as_square(A, "A")
    eta = perron_shift(A)
    lam, _ = matnum.dominant_eigenpair(A + eta * np.eye(A.shape[0]), tol=tol, max_iter=max_iter)
    return lam - eta


def is_stable(r: Realization) -> bool:
    """
    Continuous: Perron root of A below 0. Discrete: below 1.

    The shifted matrix A + eta*I is bracketed with Collatz-Wielandt bounds
    until the bracket clears the threshold. A bracket that runs out of
    iterations (a spectral gap near zero) is settled by the linear
    certificate instead.
    """
    eta = perron_shift(r.A)
    bound = 0.0 if r.is_continuous else 1.0
    shifted = r.A + eta * np.eye(r.n)
    threshold = eta + bound - STABILITY_MARGIN
    try:
        lo, hi = matnum.perron_bounds(shifted, threshold)
    except NoConvergence as e:
        logger.warning("%s; deciding stability by linear certificate", e)
        return _has_linear_certificate(r.A - bound * np.eye(r.n))
    logger.debug("Perron root of A in [%.15g, %.15g]", lo - eta, hi - eta)
    return hi < threshold


def _has_linear_certificate(M) -> bool:
    """A Metzler M is Hurwitz iff x = -M^{-1} 1 exists and is entrywise positive."""
    try:
        x = matnum.solve_linear(M, -np.ones(M.shape[0]))
    except SingularMatrix:
        return False
    return bool(np.all(x > 0.0))


def simulate_discrete(
    r: Realization,
    u: Union[Sequence[float], np.ndarray],
    x0,
    K: int,
) -> Trajectory:
    """x(k+1) = A x(k) + B u(k), y(k) = C x(k) for k = 0..K."""
    if r.kind is not SystemKind.DISCRETE:
        raise InvalidRealization("simulate_discrete needs a discrete-time realization")
    u = np.asarray(u, dtype=float)
    x0 = matnum.as_vector(x0, "x0")
    if u.ndim != 1 or u.size != K:
        raise DimensionMismatch(f"input sequence has {u.size} entries, horizon is {K}")
    if x0.size != r.n:
        raise DimensionMismatch(f"x0 has length {x0.size}, expected {r.n}")

    states = np.empty((K + 1, r.n))
    states[0] = x0
    for k in range(K):
        states[k + 1] = r.A @ states[k] + r.B * u[k]

    return Trajectory(
        times=np.arange(K + 1, dtype=float),
        states=states,
        outputs=states @ r.C,
    )


def simulate_continuous(r: Realization, u: float, x0, grid) -> Trajectory:
    """
    Step response under a constant input.

    x(t) = e^{At} x0 + A^-1 (e^{At} - I) B u and y(t) = C x(t).
    """
    if r.kind is not SystemKind.CONTINUOUS:
        raise InvalidRealization("simulate_continuous needs a continuous-time realization")
    x0 = matnum.as_vector(x0, "x0")
    grid = matnum.as_vector(grid, "grid")
    if x0.size != r.n:
        raise DimensionMismatch(f"x0 has length {x0.size}, expected {r.n}")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise UsageError("time grid must be nonnegative and strictly increasing")

    steady = matnum.solve_linear(r.A, r.B)  # A^-1 B
    states = np.empty((grid.size, r.n))
    for i, time in enumerate(grid):
        E = matnum.mat_exp(r.A * time)
        states[i] = E @ x0 + (E @ steady - steady) * float(u)

    return Trajectory(times=grid, states=states, outputs=states @ r.C)
