import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import positive_realizations
from phaseforge import equiv, xform
from phaseforge.errors import PsiOutOfRange, UsageError, ZeroDensityAtOrigin
from phaseforge.models import Realization, SystemKind


def test_continuous_example_output(continuous, continuous_tr):
    grid = np.round(np.arange(101) * 0.1, 10)
    report = equiv.verify_equivalence(continuous, continuous_tr, 50.0, grid)
    assert report.passed
    assert report.max_abs_err <= 1e-8 * (1.0 + np.max(np.abs(report.y_system)))
    assert report.y_system[0] == 0.0
    # steady state psi * u
    assert report.y_ph[-1] == pytest.approx(1.5 * 50.0, rel=1e-2)


def test_student_output(student, student_tr):
    report = equiv.verify_equivalence(student, student_tr, 50.0, np.arange(11))
    assert report.passed
    assert report.y_system[3] == pytest.approx(21.6)
    assert report.psi == pytest.approx(0.6905371, abs=1e-7)


def test_supply_chain_output(supply, supply_tr):
    report = equiv.verify_equivalence(supply, supply_tr, 100.0, np.arange(14))
    assert report.passed


def test_grids_are_validated(student_tr, continuous_tr):
    with pytest.raises(UsageError):
        equiv.y_ph(student_tr, 1.0, [0.0, 0.5])
    with pytest.raises(UsageError):
        equiv.y_ph(continuous_tr, 1.0, [1.0, 1.0])
    with pytest.raises(UsageError):
        equiv.y_ph(continuous_tr, 1.0, [-0.5, 1.0])


def test_discrete_point_mass_variant_matches_output(student, student_tr):
    steps = np.arange(11)
    variant = equiv.y_ph_deficit_variants(student_tr, 50.0, steps)
    assert np.allclose(variant, equiv.system_output(student, 50.0, steps), atol=1e-9)


def test_continuous_point_mass_variant_is_scaled_by_density_at_origin():
    r = Realization(
        kind="continuous",
        A=[[-2.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, -1.0]],
        B=[1.0, 1.0, 1.0],
        C=[0.5, 0.0, 0.0],
    )
    tr = xform.cont_to_cph(r)
    assert tr.psi == pytest.approx(0.75)
    grid = np.linspace(0.0, 5.0, 11)
    variant = equiv.y_ph_deficit_variants(tr, 10.0, grid)
    # f(0) = 0.75 * 2/3
    assert np.allclose(variant * 0.5, equiv.system_output(r, 10.0, grid), atol=1e-9)


def test_point_mass_variant_needs_psi_below_one(continuous_tr):
    with pytest.raises(PsiOutOfRange):
        equiv.y_ph_deficit_variants(continuous_tr, 1.0, [0.0, 1.0])


def test_point_mass_variant_needs_density_at_origin():
    r = Realization(kind="continuous", A=[[-1.0, 0.0], [1.0, -1.0]], B=[1.0, 0.0], C=[0.0, 0.5])
    tr = xform.cont_to_cph(r)
    with pytest.raises(ZeroDensityAtOrigin):
        equiv.y_ph_deficit_variants(tr, 1.0, [0.0, 1.0])


def test_failed_verdict(student, supply_tr):
    report = equiv.verify_equivalence(student, supply_tr, 50.0, np.arange(6))
    assert not report.passed


@given(positive_realizations(SystemKind.DISCRETE), st.floats(0.1, 200.0))
@settings(max_examples=20)
def test_random_discrete_systems_are_equivalent(r, u_level):
    tr = xform.disc_to_dph(r)
    assert equiv.verify_equivalence(r, tr, u_level, np.arange(31)).passed


@given(positive_realizations(SystemKind.CONTINUOUS), st.floats(0.1, 200.0))
@settings(max_examples=20)
def test_random_continuous_systems_are_equivalent(r, u_level):
    tr = xform.cont_to_cph(r)
    grid = np.linspace(0.0, 10.0, 41)
    assert equiv.verify_equivalence(r, tr, u_level, grid).passed


def _grid_for(tr):
    return np.arange(31) if tr.kind is SystemKind.DISCRETE else np.linspace(0.0, 10.0, 41)


@given(
    st.one_of(positive_realizations(SystemKind.DISCRETE), positive_realizations(SystemKind.CONTINUOUS)),
    st.floats(0.1, 200.0),
    st.floats(0.1, 10.0),
)
@settings(max_examples=25)
def test_output_scales_with_input(r, u_level, c):
    tr = xform.to_ph(r)
    grid = _grid_for(tr)
    scaled = equiv.y_ph(tr, c * u_level, grid)
    np.testing.assert_allclose(scaled, c * equiv.y_ph(tr, u_level, grid), rtol=1e-13, atol=0.0)


@given(
    st.one_of(positive_realizations(SystemKind.DISCRETE), positive_realizations(SystemKind.CONTINUOUS)),
    st.floats(0.1, 200.0),
)
@settings(max_examples=25)
def test_output_is_nondecreasing(r, u_level):
    tr = xform.to_ph(r)
    y = equiv.y_ph(tr, u_level, _grid_for(tr))
    assert y[0] >= 0.0
    assert np.all(np.diff(y) >= -1e-12 * (1.0 + np.max(y)))


def test_scenario_outputs_rise_to_steady_state(student_tr, supply_tr, continuous_tr):
    for tr, u_level in [(student_tr, 50.0), (supply_tr, 100.0), (continuous_tr, 50.0)]:
        y = equiv.y_ph(tr, u_level, _grid_for(tr))
        assert np.all(np.diff(y) >= -1e-12 * (1.0 + np.max(y)))
        assert y[-1] <= tr.psi * u_level * (1.0 + 1e-12)
