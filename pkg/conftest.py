"""Shared fixtures and hypothesis strategies."""
import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phaseforge import scenarios, xform
from phaseforge.models import Realization, SystemKind

settings.register_profile(
    "phaseforge",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("phaseforge")

MAX_ORDER = 6

# Gershgorin margin that keeps random continuous systems Hurwitz.
STABILITY_MARGIN = 0.5

# Largest column sum of random discrete systems; bounds the Perron root.
MAX_COLUMN_SUM = 0.9

unit_floats = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_subnormal=False)


@st.composite
def positive_realizations(draw, kind: SystemKind):
    """
    Random realizations satisfying every transform hypothesis.

    The input feeds state 1 and the subdiagonal chains every state to its
    predecessor, so the system is excitable; column dominance keeps it
    stable.
    """
    n = draw(st.integers(min_value=1, max_value=MAX_ORDER))
    A = draw(arrays(np.float64, (n, n), elements=unit_floats))
    chain = draw(arrays(np.float64, (max(n - 1, 0),), elements=st.floats(0.1, 1.0)))
    A[np.arange(1, n), np.arange(n - 1)] = chain

    B = draw(arrays(np.float64, (n,), elements=unit_floats))
    B[0] = max(B[0], 0.1)
    C = draw(arrays(np.float64, (n,), elements=unit_floats))
    C[-1] = max(C[-1], 0.1)

    if kind is SystemKind.CONTINUOUS:
        np.fill_diagonal(A, 0.0)
        slack = draw(arrays(np.float64, (n,), elements=st.floats(0.0, 1.0)))
        np.fill_diagonal(A, -(A.sum(axis=0) + STABILITY_MARGIN + slack))
    else:
        columns = A.sum(axis=0)
        A = A * np.minimum(1.0, MAX_COLUMN_SUM / np.maximum(columns, 1e-300))[np.newaxis, :]

    return Realization(kind=kind, A=A, B=B, C=C)


@pytest.fixture
def student():
    return scenarios.build_scenario("student")


@pytest.fixture
def student_tr(student):
    return xform.disc_to_dph(student)


@pytest.fixture
def supply():
    return scenarios.build_scenario("supply-chain")


@pytest.fixture
def supply_tr(supply):
    return xform.disc_to_dph(supply)


@pytest.fixture
def continuous():
    return scenarios.continuous_example()


@pytest.fixture
def continuous_tr(continuous):
    return xform.cont_to_cph(continuous)
