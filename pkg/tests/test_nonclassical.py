import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from well_ladder.cli import render_table
from well_ladder.coherent import CoherentSpec, bg_state, gp_state
from well_ladder.nonclassical import (
    FLAG_GROUND, FLAG_Q_UNDEFINED, FLAG_TAIL, ComplexExpectation, MetricPoint,
    SingularDenominator, amplitude_squared_squeezing, default_alphas, expectation,
    interior_extrema, mandel_q, metric_point, metric_sweep, quadrature_operators, squeezing,
    sweep_levels, worker_count,
)
from well_ladder.su11 import LevelVector, ladder_matrices

METRICS = ("s_x1", "s_y1", "s_x2", "s_y2", "mandel_q")


def test_quadrature_structure():
    x1, y1, x2, y2 = quadrature_operators(10)
    one = LevelVector.basis(1, 10)
    assert expectation(one, x1) == 0
    assert expectation(one, x2) == 0 and expectation(one, y2) == 0
    comm = x1.entries @ y1.entries - y1.entries @ x1.entries
    for j in range(1, 9):
        assert (comm @ LevelVector.basis(j, 10).coeffs)[j - 1] == pytest.approx(1j * j)
    # X2 connects only levels two apart
    rows, cols = np.nonzero(x2.entries)
    assert set(np.abs(rows - cols)) == {2}
    with pytest.raises(ValueError):
        quadrature_operators(3)


def test_ground_state_is_unsqueezed():
    one = LevelVector.basis(1, 16)
    assert squeezing(one) == (0.0, 0.0)
    assert amplitude_squared_squeezing(one) == (0.0, 0.0)
    with pytest.raises(SingularDenominator):
        mandel_q(one)


def test_gp_number_moment():
    x = 0.5
    v = gp_state(CoherentSpec("GP", math.sqrt(x), 200, 1e-30))
    kp, km, _ = (op.entries for op in ladder_matrices(200))
    n1 = (np.vdot(v.coeffs, kp @ km @ v.coeffs)).real
    assert n1 == pytest.approx(2 * x / (1 - x) ** 2, rel=1e-12)  # = 4


@pytest.mark.parametrize("x", [0.1, 0.5, 0.8])
def test_gp_mandel_series_oracle(x):
    p = lambda j: (1 - x) * x ** (j - 1)
    n1 = mpmath.nsum(lambda j: p(j) * j * (j - 1), [1, mpmath.inf])
    n2 = mpmath.nsum(lambda j: p(j) * j * (j - 1) ** 2 * (j - 2), [1, mpmath.inf])
    expected = float((n2 - n1**2) / n1 - 1)
    v = gp_state(CoherentSpec("GP", math.sqrt(x), 400, 1e-30))
    assert mandel_q(v) == pytest.approx(expected, rel=1e-11)


def test_bg_mandel_small_alpha_limit():
    for a in (1e-2, 1e-3):
        q = mandel_q(bg_state(CoherentSpec("BG", a, 32)))
        assert q == pytest.approx(a * a / 6 - 1, abs=a**4)


def test_mandel_matches_matrix_moments():
    v = bg_state(CoherentSpec("BG", 1.3, 64))
    kp, km, _ = (op.entries for op in ladder_matrices(64))
    c = v.coeffs
    n1 = np.vdot(c, kp @ km @ c).real
    n2 = np.vdot(c, kp @ kp @ km @ km @ c).real
    assert mandel_q(v) == pytest.approx((n2 - n1 * n1) / n1 - 1, rel=1e-13)


@settings(max_examples=40)
@given(st.floats(min_value=0.01, max_value=2.0), st.sampled_from(["BG", "GP"]))
def test_metrics_even_in_alpha(a, family):
    if family == "GP":
        a = min(a, 0.95) / 2.0
    J = 128
    p, m = metric_point(family, a, J), metric_point(family, -a, J)
    for name in METRICS:
        assert getattr(p, name) == pytest.approx(getattr(m, name), abs=1e-12)


@settings(max_examples=40)
@given(st.floats(min_value=0.05, max_value=2.0))
def test_bg_signs(a):
    p = metric_point("BG", a, 64)
    assert p.s_x1 > 0 > p.s_y1 and p.s_x2 > 0 > p.s_y2 and p.mandel_q < 0
    assert p.s_y1 > -1 and p.s_y2 > -1


@settings(max_examples=40)
@given(st.floats(min_value=0.05, max_value=0.9))
def test_gp_signs(a):
    p = metric_point("GP", a, sweep_levels("GP", [a]))
    assert p.s_x1 > 0 > p.s_y1 and p.s_x2 > 0 > p.s_y2
    assert p.s_y1 > -1 and p.s_y2 > -1


def test_complex_alpha_gate():
    with pytest.raises(ValueError):
        metric_point("BG", 1 + 1j, 64)
    p = metric_point("BG", 1 + 1j, 64, allow_complex=True)
    assert "complex_alpha" in p.flags
    v = bg_state(CoherentSpec("BG", 1 + 1j, 64))
    with pytest.raises(ComplexExpectation):
        squeezing(v)
    assert isinstance(squeezing(v, allow_complex=True)[0], complex)


def test_flags():
    p = metric_point("BG", 0.0, 64)
    assert FLAG_GROUND in p.flags and FLAG_Q_UNDEFINED in p.flags
    assert math.isnan(p.mandel_q) and p.mandel_q_limit == -1.0 and not p.valid
    assert FLAG_TAIL in metric_point("GP", 0.9, 64).flags
    assert metric_point("BG", 1.0, 64).valid


def test_default_alphas_symmetric():
    for family in ("BG", "GP"):
        a = default_alphas(family)
        assert a.size == 161 and a[80] == 0.0
        assert np.array_equal(a, -a[::-1])
    assert default_alphas("GP")[-1] == 0.96
    assert default_alphas("BG", 0).size == 0
    with pytest.raises(ValueError):
        default_alphas("BG", 10)


def test_sweep_empty_and_domain():
    assert metric_sweep("BG", []) == []
    with pytest.raises(ValueError):
        metric_sweep("GP", [0.5, 1.0])


def test_sweep_order_independent_of_threads():
    alphas = default_alphas("BG", 21)
    one = metric_sweep("BG", alphas, threads=1)
    many = metric_sweep("BG", alphas, threads=4)
    # compare rendered text: the ground-state row carries a NaN
    assert render_table([p.as_row() for p in one]) == render_table([p.as_row() for p in many])
    assert [p.alpha for p in one] == list(alphas)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("WELL_LADDER_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("WELL_LADDER_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("WELL_LADDER_THREADS", "x")
    with pytest.raises(ValueError):
        worker_count()


def test_sweep_levels_grows_toward_unit_disc():
    assert sweep_levels("BG", [2.0]) == 64
    assert sweep_levels("GP", [0.5]) < sweep_levels("GP", [0.9]) < sweep_levels("GP", [0.96])


def test_interior_extrema():
    a = np.linspace(-1, 1, 11)
    assert interior_extrema(a, a**2) == [0.0]
    assert interior_extrema(a, a) == []


def test_metric_row_keys():
    row = MetricPoint(0.5, 1, 2, 3, 4, 5, ("x", "y")).as_row()
    assert list(row) == ["alpha", "s_x1", "s_y1", "s_x2", "s_y2", "mandel_q", "flags"]
    assert row["flags"] == "x;y"
