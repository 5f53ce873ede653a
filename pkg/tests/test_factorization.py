import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from well_ladder.factorization import (
    FactorChain, NumericalBlowup, apply_a, eigenpair_chain, exact_eigenfunction,
    intertwining_defect, null_eigenfunction, rayleigh_quotient, riccati_residual, superpotential,
)
from well_ladder.grid import Grid, GridFunction, Units, differentiate, inner_product, l2_distance


def test_factor_chain_constants():
    chain = FactorChain(Units(hbar=1.0, m=2.0, L=3.0), j_max=5)
    assert chain.b == pytest.approx(math.pi / 3)
    assert np.all(np.diff(chain.c) > 0)
    j = np.arange(1, 6)
    assert np.allclose(chain.E, j**2 * math.pi**2 / (2 * 2.0 * 9.0), rtol=1e-15)
    assert chain.energy(3) == pytest.approx(chain.E[2], rel=1e-15)


@pytest.mark.parametrize("j", range(1, 12))
def test_branch_selection(j):
    chain = FactorChain()
    kept, rejected = chain.branch_energies(j)
    assert kept > chain.energy(j)
    assert kept == pytest.approx(chain.energy(j + 1), rel=1e-14)
    assert rejected == pytest.approx(chain.energy(j), rel=1e-14)


def test_superpotential_values():
    g = Grid(math.pi, 511)  # has x = L/2 and x = L/4 as grid points
    f1 = superpotential(1, g).values
    f2 = superpotential(2, g).values
    assert abs(f1[255]) < 1e-15
    assert f2[127].real == pytest.approx(2.0, rel=1e-14)


def test_riccati_ground_level():
    g = Grid(math.pi, 1024)
    units = Units()
    assert riccati_residual(superpotential(1, g), units.energy_scale) < 1e-6
    wrong = riccati_residual(superpotential(1, g), 2 * units.energy_scale)
    assert wrong == pytest.approx(2 * units.m * units.energy_scale / units.hbar, rel=1e-6)


def test_riccati_other_member():
    # analytically f' + f^2 + 1 = 2 cot^2 x - 1 for f = 2 cot x, E = 1/2
    g = Grid(math.pi, 1024)
    x = g.points[g.window()]
    expected = np.abs(2 / np.tan(x) ** 2 - 1).max()
    assert riccati_residual(superpotential(2, g), 0.5) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("L", [math.pi, 1.0, 4.0])
def test_riccati_general_units(L):
    units = Units(hbar=0.7, m=1.3, L=L)
    g = Grid(L, 1024)
    f = superpotential(1, g, units)
    assert riccati_residual(f, units.energy_scale, units) < 1e-6 * max(1.0, units.energy_scale)


@pytest.mark.parametrize("j", [1, 2, 4, 7])
def test_a_annihilates_null_function(j):
    g = Grid(math.pi, 512)
    xi = null_eigenfunction(j, g)
    out = apply_a(j, xi)
    assert np.abs(out.values).max() < 1e-8 * np.abs(xi.values).max()


def test_a_on_constant():
    g = Grid(math.pi, 64)
    out = apply_a(3, GridFunction(g, np.ones(64)), dagger=True)
    assert np.allclose(out.values, 3 / np.tan(g.points) / math.sqrt(2), rtol=1e-12)


def test_a_dagger_maps_null_function_to_eigenfunction():
    # a_1^ sin^2 x = (2 sin cos + cot sin^2)/sqrt(2) = (3/(2 sqrt 2)) sin 2x
    g = Grid(math.pi, 512)
    up = apply_a(1, null_eigenfunction(2, g), dagger=True)
    expected = 3 / (2 * math.sqrt(2)) * np.sin(2 * g.points)
    assert np.abs(up.values - expected).max() < 1e-9
    assert np.abs(apply_a(1, exact_eigenfunction(1, g)).values).max() < 1e-9


def test_null_eigenfunction():
    g = Grid(math.pi, 511)
    assert np.allclose(null_eigenfunction(1, g).values, np.sin(g.points))
    assert null_eigenfunction(2, g).values[255].real == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        null_eigenfunction(0, g)


@pytest.mark.parametrize("j", [1, 3, 6])
def test_null_eigenfunction_first_order_equation(j):
    g = Grid(math.pi, 512)
    xi = null_eigenfunction(j, g)
    rhs = j / np.tan(g.points) * xi.values
    assert np.abs(differentiate(xi).values - rhs).max() < 1e-7


def test_chain_ground_and_third():
    g = Grid(math.pi, 512)
    p1 = eigenpair_chain(1, g)
    assert p1.energy == 0.5
    assert l2_distance(p1.psi, exact_eigenfunction(1, g)) < 1e-7
    p3 = eigenpair_chain(3, g)
    assert p3.energy == 4.5
    assert l2_distance(p3.psi, exact_eigenfunction(3, g)) < 1e-6


def test_chain_rayleigh_fifth():
    g = Grid(math.pi, 512)
    p5 = eigenpair_chain(5, g)
    assert abs(rayleigh_quotient(p5.psi) / p5.energy - 1) < 1e-5


@pytest.mark.parametrize("j", range(1, 9))
def test_chain_norm_matches_energy_ladder(j):
    # |c_j| * ||a_1^ ... a_{j-1}^ xi_j|| = ||xi_j||
    g = Grid(math.pi, 512)
    pair = eigenpair_chain(j, g)
    assert pair.raw_norm * pair.norm_constant == pytest.approx(
        null_eigenfunction(j, g).norm(), rel=1e-10)


def test_chain_orthonormal_against_analytic():
    g = Grid(math.pi, 512)
    built = [eigenpair_chain(j, g).psi for j in range(1, 7)]
    exact = [exact_eigenfunction(k, g) for k in range(1, 7)]
    gram = np.array([[inner_product(b, e) for e in exact] for b in built])
    assert np.abs(gram - np.eye(6)).max() < 1e-6


def test_chain_sign_convention():
    g = Grid(2.0, 256)
    for j in (2, 5):
        assert eigenpair_chain(j, g, FactorChain(Units(L=2.0))).psi.values[0].real > 0


def test_chain_general_units():
    units = Units(hbar=1.7, m=0.6, L=2.0)
    g = Grid(2.0, 512)
    pair = eigenpair_chain(4, g, FactorChain(units))
    assert pair.energy == pytest.approx(16 * units.energy_scale, rel=1e-15)
    assert l2_distance(pair.psi, exact_eigenfunction(4, g)) < 1e-10
    assert rayleigh_quotient(pair.psi, units) == pytest.approx(pair.energy, rel=1e-10)


def test_double_precision_chain_small_levels():
    g = Grid(math.pi, 512)
    for j in (1, 2, 4):
        pair = eigenpair_chain(j, g, extended=False)
        assert l2_distance(pair.psi, exact_eigenfunction(j, g)) < 1e-9


def test_chain_validation():
    g = Grid(math.pi, 64)
    with pytest.raises(ValueError):
        eigenpair_chain(0, g)
    with pytest.raises(ValueError):
        eigenpair_chain(17, g)
    with pytest.raises(ValueError):
        eigenpair_chain(2, g, FactorChain(Units(L=1.0)))


def test_chain_blowup_guard():
    # large hbar scales every stage up; the guard trips before overflow
    units = Units(hbar=1e3, L=math.pi)
    with pytest.raises(NumericalBlowup):
        eigenpair_chain(8, Grid(math.pi, 64), FactorChain(units), extended=False)


@settings(max_examples=20)
@given(st.integers(1, 5), st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_intertwining(j, weights):
    g = Grid(math.pi, 1024)
    values = sum(w * np.sin((k + 1) * g.points) ** 3 for k, w in enumerate(weights))
    f = GridFunction(g, values + np.sin(g.points), dirichlet=True, parity=-1)
    assert intertwining_defect(j, f) < 1e-5
