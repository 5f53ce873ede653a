import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from well_ladder.coherent import (
    CoherentSpec, TruncationInsufficient, bg_state, bg_weight, bg_weight_product, coherent_state,
    displacement_alpha, gp_state, identity_resolution_diag, moment_check, overlap,
    required_levels, truncation_tail,
)
from well_ladder.special import bessel_k0, bg_norm_series
from well_ladder.su11 import LevelVector, SizeMismatch, ladder_matrices
from well_ladder.linalg import expm

amplitudes = st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False)
disc = st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False)


def test_ground_state_limit():
    for family in ("BG", "GP"):
        v = coherent_state(CoherentSpec(family, 0.0, 16))
        assert np.array_equal(v.coeffs, LevelVector.basis(1, 16).coeffs)
    assert overlap(bg_state(CoherentSpec("bg", 0, 16)), gp_state(CoherentSpec("gp", 0, 16))) == 1


def test_bg_ratio():
    v = bg_state(CoherentSpec("BG", 2.0, 32)).coeffs
    assert v[2] / v[1] == pytest.approx(2.0 / 3.0, rel=1e-15)


@given(amplitudes)
def test_bg_unit_norm(alpha):
    assert bg_state(CoherentSpec("BG", alpha, 64)).norm() == pytest.approx(1.0, abs=1e-12)


@given(amplitudes.filter(lambda a: abs(a) > 1e-3))
def test_bg_eigenvector(alpha):
    _, km, _ = ladder_matrices(64)
    v = bg_state(CoherentSpec("BG", alpha, 64))
    r = (km @ v).coeffs - alpha * v.coeffs
    assert np.linalg.norm(r[:-1]) / abs(alpha) < 1e-10


def test_gp_geometric_norm():
    v = gp_state(CoherentSpec("GP", 0.5, 80))
    assert v.norm() ** 2 == pytest.approx(1 - 0.25**80, abs=1e-15)


def test_gp_tail_values():
    assert truncation_tail("GP", 0.81, 64) < 1e-5
    assert truncation_tail("GP", 0.81, 256) < 1e-22


@given(disc)
def test_gp_norm_within_tail(alpha):
    tol = 1e-12
    J = required_levels("GP", abs(alpha) ** 2, tol)
    v = gp_state(CoherentSpec("GP", alpha, J, tol))
    assert abs(v.norm() ** 2 - 1) <= tol


def test_gp_domain_and_truncation():
    with pytest.raises(ValueError):
        CoherentSpec("GP", 1.0)
    with pytest.raises(ValueError):
        CoherentSpec("XY", 0.1)
    with pytest.raises(TruncationInsufficient):
        gp_state(CoherentSpec("GP", 0.99, 16, 1e-10))
    with pytest.raises(TruncationInsufficient):
        bg_state(CoherentSpec("BG", 30.0, 8, 1e-10))


def test_tail_mass_matches_dropped_probability():
    for family, alpha in (("BG", 3.0), ("GP", 0.7)):
        short = coherent_state(CoherentSpec(family, alpha, 12, tail_tol=1.0))
        assert 1 - short.norm() ** 2 == pytest.approx(truncation_tail(family, alpha**2, 12), rel=1e-9)


def test_displacement_alpha():
    assert displacement_alpha(0) == 0
    assert displacement_alpha(0.5) == pytest.approx(0.46211715726000974, rel=1e-15)
    assert displacement_alpha(0.5j) == pytest.approx(0.46211715726000974j, rel=1e-15)
    assert 1 - displacement_alpha(40.0).real < 1e-15


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
def test_displacement_in_disc(xi):
    assert abs(displacement_alpha(xi)) < 1 or abs(xi) > 18  # tanh rounds to 1 beyond ~18


@pytest.mark.parametrize("xi", [0.3, 0.8j, 0.5 - 0.4j])
def test_displacement_operator_direction(xi):
    # literal exp(xi K+ - xi* K-)|1> with these ladders is the GP direction
    # for tanh|xi|, scaled by sqrt(1 - |alpha|^2)
    J = 160
    kp, km, _ = (op.entries for op in ladder_matrices(J))
    v = expm(xi * kp - np.conj(xi) * km)[:, 0]
    alpha = displacement_alpha(xi)
    gp = gp_state(CoherentSpec("GP", alpha, J, 1e-12)).coeffs
    assert np.abs(v - math.sqrt(1 - abs(alpha) ** 2) * gp).max() < 1e-12


def test_overlaps():
    a = bg_state(CoherentSpec("BG", 1.0, 64))
    b = bg_state(CoherentSpec("BG", -1.0, 64))
    ov = overlap(a, b)
    # alternating series sum (-1)^j/((j+1)!)^2 / S(1)
    assert ov.imag == 0 and ov.real == pytest.approx(0.6065318345262838, rel=1e-14)
    gp = gp_state(CoherentSpec("GP", 0.3, 64))
    bg = bg_state(CoherentSpec("BG", 0.3, 64))
    assert overlap(gp, bg).real == pytest.approx(0.9870310310146692, rel=1e-14)
    assert overlap(a, a) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(SizeMismatch):
        overlap(a, LevelVector.basis(1, 3))


@given(amplitudes, amplitudes)
def test_overlap_hermitian(a, b):
    u = bg_state(CoherentSpec("BG", a, 64))
    v = bg_state(CoherentSpec("BG", b, 64))
    assert overlap(u, v) == pytest.approx(overlap(v, u).conjugate(), abs=1e-14)
    assert abs(overlap(u, v)) <= 1 + 1e-12


def test_weight_values():
    assert bg_weight(1.0) == pytest.approx(0.09277900839875507, rel=1e-13)
    assert bg_weight(1e-12) < 1e-9
    with pytest.raises(ValueError):
        bg_weight(0.0)
    x = 2.3
    assert bg_weight(x) / bg_norm_series(x) == pytest.approx(bg_weight_product(x), rel=1e-15)
    assert bg_weight_product(x) == pytest.approx(2 * x * bessel_k0(2 * math.sqrt(x)) / math.pi)


@given(st.floats(min_value=1e-8, max_value=300.0))
def test_weight_positive(x):
    assert bg_weight(x) > 0


@pytest.mark.parametrize("j, expected, tol", [(0, 1.0, 1e-8), (1, 4.0, 1e-8), (5, 518400.0, 1e-7)])
def test_moment_examples(j, expected, tol):
    lhs, rhs = moment_check(j)
    assert rhs == pytest.approx(expected, rel=1e-12)
    assert lhs == pytest.approx(expected, rel=tol)


def test_moments_up_to_ten():
    for j in range(11):
        lhs, rhs = moment_check(j)
        assert abs(lhs / rhs - 1) < 1e-7
    with pytest.raises(ValueError):
        moment_check(13)


def test_identity_resolution():
    diag = identity_resolution_diag(6)
    assert np.allclose(diag, 1.0, rtol=0, atol=1e-7)
    assert identity_resolution_diag(1)[0] == pytest.approx(moment_check(0)[0], rel=1e-12)
    doubled = identity_resolution_diag(3, weight_product=lambda x: 2 * bg_weight_product(x))
    assert np.allclose(doubled, 2.0, atol=2e-7)


@pytest.mark.parametrize("panels", [1, 4, 32])
def test_identity_resolution_panel_independent(panels):
    assert np.allclose(identity_resolution_diag(4, panels), 1.0, atol=1e-12)
