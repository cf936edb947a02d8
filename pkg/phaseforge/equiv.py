"""
Output equivalence between a positive system and its phase-type image.

Under zero initial state and a constant input u, the system output equals
psi * u * F(t), F being the cdf of the normalized representation.
Time-varying inputs would need a convolution with the density and are not
supported.
"""
import logging

import numpy as np

from phaseforge import matnum, phtype, possys, xform
from phaseforge.errors import PsiOutOfRange, UsageError, ZeroDensityAtOrigin
from phaseforge.models import EquivalenceReport, Realization, SystemKind, TransformResult

logger = logging.getLogger(__name__)

# Relative tolerance of the equivalence verdict.
EQUIVALENCE_RTOL = 1e-8


def _grid(tr: TransformResult, grid) -> np.ndarray:
    grid = matnum.as_vector(grid, "grid")
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise UsageError("grid must be nonnegative and strictly increasing")
    if tr.kind is SystemKind.DISCRETE and np.any(grid != np.round(grid)):
        raise UsageError("discrete grids hold integer steps")
    return grid


def y_ph(tr: TransformResult, u_level: float, grid) -> np.ndarray:
    """psi * u * F*(g) at each grid point."""
    grid = _grid(tr, grid)
    scale = tr.psi * float(u_level)
    return np.array([scale * phtype.cdf(tr.ph, g) for g in grid])


def y_ph_deficit_variants(tr: TransformResult, u_level: float, grid) -> np.ndarray:
    """
    Output built from the defective representation (alpha~, T~) when 0 < psi < 1.

    Continuous: (F(g) - (1 - psi)) / f(0) * u with f(0) = alpha~ t~.
    Discrete:   (F(g) - (1 - psi)) * u.
    """
    if not 0.0 < tr.psi < 1.0:
        raise PsiOutOfRange(f"point-mass variants need 0 < psi < 1, got psi = {tr.psi:.10g}")
    grid = _grid(tr, grid)
    d = xform.raw_ph(tr)
    shifted = np.array([phtype.cdf(d, g) for g in grid]) - (1.0 - tr.psi)

    if tr.kind is SystemKind.DISCRETE:
        return shifted * float(u_level)

    density_at_origin = float(tr.alpha_raw @ tr.t)
    if density_at_origin <= 1e-14:
        raise ZeroDensityAtOrigin(f"f(0) = {density_at_origin:.3e}; alpha~ puts no mass on exiting phases")
    return shifted / density_at_origin * float(u_level)


def system_output(r: Realization, u_level: float, grid) -> np.ndarray:
    """Output of r from the zero state under a constant input, sampled on grid."""
    zero = np.zeros(r.n)
    if r.is_continuous:
        return possys.simulate_continuous(r, u_level, zero, grid).outputs
    steps = np.asarray(grid).astype(int)
    horizon = int(steps[-1])
    trajectory = possys.simulate_discrete(r, np.full(horizon, float(u_level)), zero, horizon)
    return trajectory.outputs[steps]


def verify_equivalence(r: Realization, tr: TransformResult, u_level: float, grid) -> EquivalenceReport:
    grid = _grid(tr, grid)
    y_system = system_output(r, u_level, grid)
    y_model = y_ph(tr, u_level, grid)
    max_abs_err = float(np.max(np.abs(y_system - y_model)))
    tolerance = EQUIVALENCE_RTOL * (1.0 + float(np.max(np.abs(y_system))))
    report = EquivalenceReport(
        grid=grid,
        y_system=y_system,
        y_ph=y_model,
        max_abs_err=max_abs_err,
        psi=tr.psi,
        tolerance=tolerance,
    )
    logger.info("equivalence max error %.3e (tolerance %.3e)", max_abs_err, tolerance)
    return report
