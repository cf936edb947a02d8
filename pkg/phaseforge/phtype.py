"""
Phase-type distributions: evaluation and absorption-time sampling.

Continuous (CPH) and discrete (DPH) representations share one set of
entry points where the formulas coincide; the kind-specific evaluators
carry a cph_/dph_ prefix.
"""
import logging
import operator
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from phaseforge import matnum
from phaseforge.errors import (
    InvalidCount,
    NegativeTime,
    NoConvergence,
    ProbabilityOutOfRange,
    UsageError,
)
from phaseforge.models import ContPH, DiscPH, PhaseType, SampleSet

logger = logging.getLogger(__name__)

# Raw probabilities outside [-WINDOW, 1 + WINDOW] indicate a logic error.
WINDOW = 1e-10

# Transition-matrix entries are clamped into [0, 1] within this slack.
TPM_SLACK = 1e-12

# Upper limit on the number of steps searched by the discrete quantile.
MAX_QUANTILE_STEPS = 1_000_000


def _probability(value: float, what: str) -> float:
    if value < -WINDOW or value > 1.0 + WINDOW:
        raise ProbabilityOutOfRange(f"{what} evaluated to {value:.15g}")
    return min(1.0, max(0.0, value))


def _check_time(x: float) -> float:
    x = float(x)
    if x < 0:
        raise NegativeTime(f"time must be nonnegative, got {x}")
    return x


def _check_step(k) -> int:
    try:
        k = operator.index(k)
    except TypeError:
        if float(k) != int(k):
            raise UsageError(f"discrete time must be an integer, got {k}")
        k = int(k)
    if k < 0:
        raise NegativeTime(f"step must be nonnegative, got {k}")
    return k


# Continuous


def cph_pdf(d: ContPH, x: float) -> float:
    """f(x) = alpha e^{Tx} t."""
    x = _check_time(x)
    value = float(d.alpha @ matnum.mat_exp(d.T * x) @ d.t)
    if value < -WINDOW:
        raise ProbabilityOutOfRange(f"density evaluated to {value:.15g}")
    return max(0.0, value)


def cph_cdf(d: ContPH, x: float) -> float:
    """F(x) = 1 - alpha e^{Tx} 1; F(0) is the deficit."""
    x = _check_time(x)
    survival = float(d.alpha @ matnum.mat_exp(d.T * x).sum(axis=1))
    return _probability(1.0 - survival, "cdf")


def cph_lst(d: ContPH, s: float) -> float:
    """Laplace-Stieltjes transform alpha (sI - T)^-1 t of the absorbed part."""
    s = float(s)
    if s <= 0:
        raise UsageError(f"transform argument must be positive, got {s}")
    return float(d.alpha @ matnum.solve_linear(s * np.eye(d.n) - d.T, d.t))


def generator(d: ContPH) -> np.ndarray:
    """Full generator [[T, t], [0, 0]] of the absorbing chain."""
    n = d.n
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = d.T
    full[:n, n] = d.t
    return full


def cph_tpm(d: ContPH, s: float) -> np.ndarray:
    """Transition probability matrix e^{Lambda s} over the n transient states plus absorption."""
    s = _check_time(s)
    P = matnum.mat_exp(generator(d) * s)
    if np.min(P) < -WINDOW or np.max(P) > 1.0 + WINDOW:
        raise ProbabilityOutOfRange(f"transition probabilities left [0, 1] at s={s}")
    P = np.where(np.abs(P) <= TPM_SLACK, 0.0, P)
    return np.clip(P, 0.0, 1.0)


# Discrete


def dph_pmf(d: DiscPH, k: int) -> float:
    """f(0) = deficit, f(k) = alpha T^{k-1} t for k >= 1."""
    k = _check_step(k)
    if k == 0:
        return d.deficit
    return _probability(float(d.alpha @ matnum.mat_pow(d.T, k - 1) @ d.t), "pmf")


def dph_cdf(d: DiscPH, k: int) -> float:
    """F(k) = 1 - alpha T^k 1."""
    k = _check_step(k)
    survival = float(d.alpha @ matnum.mat_pow(d.T, k).sum(axis=1))
    return _probability(1.0 - survival, "cdf")


def transition_matrix(d: DiscPH) -> np.ndarray:
    """One-step matrix [[T, t], [0, 1]] of the absorbing chain."""
    n = d.n
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = d.T
    full[:n, n] = d.t
    full[n, n] = 1.0
    return full


def dph_tpm(d: DiscPH, k: int) -> np.ndarray:
    k = _check_step(k)
    return np.clip(matnum.mat_pow(transition_matrix(d), k), 0.0, 1.0)


# Shared


def pdf(d: PhaseType, x) -> float:
    """Density (continuous) or mass (discrete) at x."""
    return cph_pdf(d, x) if isinstance(d, ContPH) else dph_pmf(d, x)


def cdf(d: PhaseType, x) -> float:
    return cph_cdf(d, x) if isinstance(d, ContPH) else dph_cdf(d, x)


def tpm(d: PhaseType, s) -> np.ndarray:
    return cph_tpm(d, s) if isinstance(d, ContPH) else dph_tpm(d, s)


def _expected_visits(d: PhaseType, v: np.ndarray) -> np.ndarray:
    """(-T)^-1 v for CPH, (I - T)^-1 v for DPH."""
    if isinstance(d, ContPH):
        return matnum.solve_linear(-d.T, v)
    return matnum.solve_linear(np.eye(d.n) - d.T, v)


def ph_mean(d: PhaseType) -> float:
    """Mean absorption time; the deficit mass contributes time 0."""
    return float(d.alpha @ _expected_visits(d, np.ones(d.n)))


def ph_variance(d: PhaseType) -> float:
    first = _expected_visits(d, np.ones(d.n))
    mean = float(d.alpha @ first)
    if isinstance(d, ContPH):
        second = 2.0 * float(d.alpha @ _expected_visits(d, first))
    else:
        # E[X^2] = alpha (I + T)(I - T)^-2 1
        second = float(d.alpha @ (np.eye(d.n) + d.T) @ _expected_visits(d, first))
    return max(0.0, second - mean * mean)


def ph_quantile(d: PhaseType, p: float) -> float:
    """Smallest time whose cdf reaches p."""
    p = float(p)
    if not 0.0 <= p < 1.0:
        raise UsageError(f"quantile level must lie in [0, 1), got {p}")
    if p <= d.deficit:
        return 0.0

    if isinstance(d, DiscPH):
        survival = d.alpha.copy()
        for k in range(1, MAX_QUANTILE_STEPS + 1):
            survival = survival @ d.T
            if 1.0 - float(survival.sum()) >= p:
                return float(k)
        raise NoConvergence(f"quantile {p} not reached within {MAX_QUANTILE_STEPS} steps")

    hi = max(ph_mean(d), 1e-12)
    while cph_cdf(d, hi) < p:
        hi *= 2.0
    return float(brentq(lambda x: cph_cdf(d, x) - p, 0.0, hi, xtol=1e-12))


def exit_edges(d: PhaseType) -> List[Tuple[int, int, float]]:
    """
    Nonzero transitions of the absorbing chain as (from, to, weight).

    States are numbered from 1 and n + 1 is the absorbing state. Weights
    are rates for a CPH (self-transitions omitted) and probabilities for a
    DPH (self-loops included).
    """
    n = d.n
    edges = []
    for i in range(n):
        for j in range(n):
            if i == j and isinstance(d, ContPH):
                continue
            if d.T[i, j] > 0.0:
                edges.append((i + 1, j + 1, float(d.T[i, j])))
        if d.t[i] > 0.0:
            edges.append((i + 1, n + 1, float(d.t[i])))
    return edges


# Sampling


def substream(seed: int, index: int) -> np.random.Generator:
    """
    Generator for sample number index under seed.

    Each index owns an independent Mersenne Twister stream keyed by
    (seed, index), so draws do not depend on evaluation order.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.MT19937(sequence))


def _cumulative(rows: np.ndarray) -> np.ndarray:
    totals = rows.sum(axis=-1, keepdims=True)
    cumulative = np.cumsum(rows / totals, axis=-1)
    cumulative[..., -1] = 1.0
    return cumulative


def ph_sample(d: PhaseType, count: int, seed: int) -> SampleSet:
    """
    Draw absorption times by simulating the absorbing chain.

    The initial phase comes from (alpha, deficit), the deficit meaning
    absorption at time 0. A DPH then steps through rows of [T | t]; a CPH
    holds an exponential time at rate -T_ii and jumps along the
    off-diagonal row plus exit rate.
    """
    count = int(count)
    if count < 1:
        raise InvalidCount(f"sample count must be at least 1, got {count}")
    seed = int(seed)
    if seed < 0:
        raise InvalidCount(f"seed must be nonnegative, got {seed}")

    n = d.n
    start = _cumulative(np.append(d.alpha, d.deficit))
    continuous = isinstance(d, ContPH)
    if continuous:
        rates = -np.diag(d.T)
        jumps = np.column_stack([d.T - np.diag(np.diag(d.T)), d.t])
    else:
        jumps = np.column_stack([d.T, d.t])
    steps = _cumulative(jumps)

    values = np.empty(count)
    for index in range(count):
        rng = substream(seed, index)
        state = int(np.searchsorted(start, rng.random(), side="right"))
        elapsed = 0.0
        while state < n:
            if continuous:
                elapsed += rng.exponential(1.0 / rates[state])
            else:
                elapsed += 1.0
            state = int(np.searchsorted(steps[state], rng.random(), side="right"))
        values[index] = elapsed

    values.setflags(write=False)
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if count > 1 else 0.0
    logger.info("drew %d absorption times (seed %d): mean %.6g", count, seed, mean)
    return SampleSet(values=values, seed=seed, mean=mean, variance=variance)
