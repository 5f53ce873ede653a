"""Factorisation hierarchy for the infinite square well.

With ``f_j(x) = (j pi hbar / L) cot(pi x / L)`` the first-order operators are
taken in a real phase convention,

    a_j  f = (-hbar f' + f_j f) / sqrt(2m)
    a_j^ f = ( hbar f' + f_j f) / sqrt(2m)

which differ from ``(p +/- i f_j)/sqrt(2m)`` only by the unit phases ``-i``
and ``+i``. Those phases cancel in ``a_j^ a_j`` and ``a_j a_j^``, so every
Hamiltonian in the hierarchy is unchanged, and ``a_j`` annihilates
``sin(pi x / L)**j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

import mpmath

from .grid import (
    Grid, GridFunction, Units, differentiate, differentiate_samples, inner_product,
)

BLOWUP_LIMIT = 1e12
DEFAULT_J_MAX = 16
# Each a^ stage amplifies rounding noise by roughly 1/h relative to the
# signal, so at n_points ~ 1e3 a double-precision chain is lost by j ~ 8.
CHAIN_DPS = 40


class NumericalBlowup(ArithmeticError):
    pass


@dataclass(frozen=True)
class FactorChain:
    """Constants ``c_j``, ``b_j`` and ``E_j`` of the hierarchy up to ``j_max``."""

    units: Units = field(default_factory=Units)
    j_max: int = DEFAULT_J_MAX

    def __post_init__(self):
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")

    @property
    def b(self) -> float:
        return math.pi / self.units.L

    @property
    def c(self) -> np.ndarray:
        u = self.units
        return np.arange(1, self.j_max + 1) * math.pi * u.hbar / u.L

    @property
    def E(self) -> np.ndarray:
        return self.c**2 / (2.0 * self.units.m)

    def energy(self, j: int) -> float:
        return j * j * self.units.energy_scale

    def branch_energies(self, j: int) -> tuple[float, float]:
        """Energies of level ``j+1`` for the two roots of the ``c`` recursion.

        Returns ``(E from c_j + pi hbar/L, E from -c_j)``.
        """
        u = self.units
        cj = j * math.pi * u.hbar / u.L
        up = cj + math.pi * u.hbar / u.L
        return up**2 / (2 * u.m), (-cj) ** 2 / (2 * u.m)

    def norm_constant(self, j: int) -> float:
        """``|c_j| = prod_{k<j} (E_j - E_k)^(-1/2)``, the chain normalisation."""
        ej = self.energy(j)
        prod = 1.0
        for k in range(1, j):
            prod *= ej - self.energy(k)
        return prod**-0.5


def superpotential(j: int, grid: Grid, units: Units | None = None) -> GridFunction:
    units = units or Units(L=grid.L)
    x = grid.points
    return GridFunction(grid, j * math.pi * units.hbar / grid.L / np.tan(math.pi * x / grid.L))


def riccati_residual(f: GridFunction, E: float, units: Units | None = None,
                     window: tuple[float, float] = (0.1, 0.9)) -> float:
    """``max |f' + f^2/hbar + 2 m E / hbar|`` over the interior window."""
    units = units or Units(L=f.grid.L)
    df = differentiate(f).values
    r = df + f.values**2 / units.hbar + 2.0 * units.m * E / units.hbar
    return float(np.abs(r[f.grid.window(*window)]).max())


def apply_a(j: int, f: GridFunction, dagger: bool = False,
            units: Units | None = None) -> GridFunction:
    """Apply ``a_j`` (or ``a_j^`` when ``dagger``) in the real phase convention."""
    units = units or Units(L=f.grid.L)
    grid = f.grid
    fj = j * math.pi * units.hbar / grid.L / np.tan(math.pi * grid.points / grid.L)
    df = differentiate(f).values
    sign = 1.0 if dagger else -1.0
    out = (sign * units.hbar * df + fj * f.values) / math.sqrt(2.0 * units.m)
    # f' and cot * f both flip the wall parity of f
    parity = None if f.parity is None else -f.parity
    return GridFunction(grid, out, dirichlet=parity == -1, parity=parity)


def null_eigenfunction(j: int, grid: Grid) -> GridFunction:
    """``xi_j = sin(pi x / L)**j`` (unnormalised), annihilated by ``a_j``."""
    if j < 1:
        raise ValueError("level index starts at 1")
    return GridFunction(grid, np.sin(math.pi * grid.points / grid.L) ** j,
                        dirichlet=True, parity=(-1) ** j)


def exact_eigenfunction(j: int, grid: Grid) -> GridFunction:
    return GridFunction(
        grid, math.sqrt(2.0 / grid.L) * np.sin(j * math.pi * grid.points / grid.L),
        dirichlet=True, parity=-1,
    )


@dataclass(frozen=True)
class Eigenpair:
    j: int
    energy: float
    psi: GridFunction
    norm_constant: float  # |c_j| from the energy ladder
    raw_norm: float  # quadrature norm of the unnormalised chain product


def _to_mpf(q) -> mpmath.mpf:
    if isinstance(q, Fraction):
        return mpmath.mpf(q.numerator) / q.denominator
    return mpmath.mpf(q)


def _envelope_step(u, du, sin_y, cos_y, m: int, k: int, kappa, scale):
    """One ``a_k^`` stage on ``psi = sin**m * u``; returns the new ``u`` (power ``m-1``).

    ``a_k^ (s^m u) = s^(m-1) (hbar/sqrt(2m)) [kappa (m+k) cos u + s u']`` with
    ``kappa = pi / L``, so the cot singularity never appears on the grid.
    """
    return [scale * (kappa * (m + k) * c * v + s * d)
            for v, d, s, c in zip(u, du, sin_y, cos_y)]


def _chain_extended(j: int, grid: Grid, units: Units, dps: int) -> np.ndarray:
    """Chain product sampled in ``dps``-digit arithmetic, rounded to float."""
    n = grid.n_points
    with mpmath.workdps(dps):
        L = mpmath.mpf(grid.L)
        kappa = mpmath.pi / L
        y = [kappa * (i * L / (n + 1)) for i in range(1, n + 1)]
        sin_y = [mpmath.sin(v) for v in y]
        cos_y = [mpmath.cos(v) for v in y]
        scale = mpmath.mpf(units.hbar) / mpmath.sqrt(2 * mpmath.mpf(units.m))
        u = [mpmath.mpf(1)] * n
        m = j
        for k in range(j - 1, 0, -1):
            du = differentiate_samples(u, grid, parity=1, convert=_to_mpf)
            u = _envelope_step(u, du, sin_y, cos_y, m, k, kappa, scale)
            m -= 1
            peak = max(abs(v) for v in u)
            if peak > BLOWUP_LIMIT:
                raise NumericalBlowup(
                    f"chain for level {j} exceeded {BLOWUP_LIMIT:g} at a_{k}^"
                )
        return np.array([float(s * v) for s, v in zip(sin_y, u)])


def _chain_double(j: int, grid: Grid, units: Units) -> np.ndarray:
    y = math.pi * grid.points / grid.L
    sin_y, cos_y = np.sin(y), np.cos(y)
    kappa = math.pi / grid.L
    scale = units.hbar / math.sqrt(2.0 * units.m)
    u = GridFunction(grid, np.ones(grid.n_points), parity=1)
    m = j
    for k in range(j - 1, 0, -1):
        du = differentiate(u).values
        u = GridFunction(grid, scale * (kappa * (m + k) * cos_y * u.values + sin_y * du),
                         parity=1)
        m -= 1
        peak = float(np.abs(u.values).max())
        if not np.isfinite(peak) or peak > BLOWUP_LIMIT:
            raise NumericalBlowup(f"chain for level {j} exceeded {BLOWUP_LIMIT:g} at a_{k}^")
    return sin_y * u.values


def eigenpair_chain(j: int, grid: Grid, chain: FactorChain | None = None,
                    extended: bool = True) -> Eigenpair:
    """Build ``psi_j ~ a_1^ a_2^ ... a_{j-1}^ xi_j`` and normalise it.

    The intermediate after ``a_k^`` is ``sin(pi x/L)**k`` times a polynomial
    ``u`` in ``cos``. Only ``u`` is carried on the grid: it is smooth and even
    about both walls, so its derivative uses mirrored ghost values and the
    ``cot`` factor is applied analytically. Differentiating the full product
    instead lets stencil error near the wall, which does not vanish at the
    right order, be amplified by ``cot`` at every stage. With ``extended`` the
    stencil arithmetic runs at ``CHAIN_DPS`` digits and only the finished
    product is rounded to double; ``extended=False`` stays in double
    precision throughout and is only trustworthy for small ``j``.
    The sign is fixed so the first sample is positive.
    """
    chain = chain or FactorChain(Units(L=grid.L))
    if not 1 <= j <= chain.j_max:
        raise ValueError(f"j must lie in [1, {chain.j_max}], got {j}")
    if not math.isclose(chain.units.L, grid.L):
        raise ValueError("grid and chain disagree on L")
    if extended:
        values = _chain_extended(j, grid, chain.units, CHAIN_DPS)
    else:
        values = _chain_double(j, grid, chain.units)
    psi = GridFunction(grid, values, dirichlet=True, parity=-1)
    raw = psi.norm()
    psi = psi * (1.0 / raw)
    if psi.values[0].real < 0:
        psi = psi * -1.0
    return Eigenpair(j, chain.energy(j), psi, chain.norm_constant(j), raw)


def apply_hamiltonian(psi: GridFunction, units: Units | None = None) -> GridFunction:
    """``-(hbar^2 / 2m) psi''`` by two passes of :func:`differentiate`."""
    units = units or Units(L=psi.grid.L)
    d2 = differentiate(differentiate(psi))
    return d2 * (-(units.hbar**2) / (2.0 * units.m))


def rayleigh_quotient(psi: GridFunction, units: Units | None = None) -> float:
    h_psi = apply_hamiltonian(psi, units)
    return (inner_product(psi, h_psi) / inner_product(psi, psi)).real


def intertwining_defect(j: int, f: GridFunction, units: Units | None = None,
                        window: tuple[float, float] = (0.1, 0.9)) -> float:
    """Max over the window of ``|a_j a_j^ f - a_{j+1}^ a_{j+1} f - (E_{j+1}-E_j) f|``."""
    units = units or Units(L=f.grid.L)
    lhs = apply_a(j, apply_a(j, f, dagger=True, units=units), units=units)
    rhs = apply_a(j + 1, apply_a(j + 1, f, units=units), dagger=True, units=units)
    gap = ((j + 1) ** 2 - j**2) * units.energy_scale
    r = lhs.values - rhs.values - gap * f.values
    return float(np.abs(r[f.grid.window(*window)]).max())
