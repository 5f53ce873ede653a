"""Uniform open grid on ``(0, L)``, finite differences and quadrature.

Wall points are never stored: superpotentials ``cot(pi x / L)`` are singular
there. Functions that vanish at both walls are marked ``dirichlet=True``;
this lets the derivative stencils use the known zero wall values and lets
the inner product fold the integrand onto ``(-L, L)`` by odd reflection.
"""

from __future__ import annotations

import csv
import math
from fractions import Fraction
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

STENCIL_WIDTH = 9  # 8th-order first derivative
MIN_POINTS = STENCIL_WIDTH


class GridTooSmall(ValueError):
    pass


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Units:
    """Physical constants; the defaults make ``y = pi x / L`` equal ``x``."""

    hbar: float = 1.0
    m: float = 1.0
    L: float = math.pi

    def __post_init__(self):
        for name in ("hbar", "m", "L"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def energy_scale(self) -> float:
        """``pi^2 hbar^2 / (2 m L^2)``, the ground-level energy."""
        return (math.pi * self.hbar / self.L) ** 2 / (2.0 * self.m)


@dataclass(frozen=True)
class Grid:
    L: float = math.pi
    n_points: int = 512

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.n_points < 1:
            raise GridTooSmall("need at least one interior point")

    @property
    def h(self) -> float:
        return self.L / (self.n_points + 1)

    @cached_property
    def points(self) -> np.ndarray:
        x = self.h * np.arange(1, self.n_points + 1)
        x.flags.writeable = False
        return x

    def window(self, lo: float = 0.1, hi: float = 0.9) -> np.ndarray:
        """Boolean mask of points with ``lo*L <= x <= hi*L``."""
        x = self.points
        return (x >= lo * self.L) & (x <= hi * self.L)

    def sample(self, func, *, dirichlet: bool = False, parity: int | None = None) -> "GridFunction":
        return GridFunction(self, func(self.points), dirichlet=dirichlet, parity=parity)


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    dirichlet: bool = False
    parity: int | None = None  # +1/-1: even/odd about both walls

    def __post_init__(self):
        if self.parity not in (None, 1, -1):
            raise ValueError("parity must be None, +1 or -1")
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def _check(self, other: "GridFunction") -> None:
        if other.grid != self.grid:
            raise GridMismatch("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values + other.values,
                            self.dirichlet and other.dirichlet,
                            _common_parity(self, other))

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values - other.values,
                            self.dirichlet and other.dirichlet,
                            _common_parity(self, other))

    def __mul__(self, scalar: complex) -> "GridFunction":
        return GridFunction(self.grid, scalar * self.values, self.dirichlet, self.parity)

    __rmul__ = __mul__

    def with_flags(self, *, dirichlet: bool | None = None, parity: int | None = None) -> "GridFunction":
        """Copy with wall metadata replaced (``parity=None`` keeps the old value)."""
        return GridFunction(
            self.grid, self.values,
            self.dirichlet if dirichlet is None else dirichlet,
            self.parity if parity is None else parity,
        )

    def forget_parity(self) -> "GridFunction":
        return GridFunction(self.grid, self.values, self.dirichlet, None)

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))

    def to_csv(self, path: str | Path) -> None:
        """Write ``x, re[, im]`` columns; the imaginary column only if nonzero."""
        path = Path(path)
        with_im = bool(np.any(self.values.imag != 0))
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "re", "im"] if with_im else ["x", "re"])
            for x, v in zip(self.grid.points, self.values):
                row = [repr(float(x)), repr(float(v.real))]
                if with_im:
                    row.append(repr(float(v.imag)))
                writer.writerow(row)


def _common_parity(f: GridFunction, g: GridFunction) -> int | None:
    return f.parity if f.parity == g.parity else None


def _fornberg(offsets, order: int = 1) -> list:
    """Fornberg's recursion on plain Python numbers (exact with ``Fraction``)."""
    z = list(offsets)
    n = len(z)
    zero = z[0] - z[0]
    c = [[zero] * (order + 1) for _ in range(n)]
    c1, c4 = zero + 1, z[0]
    c[0][0] = zero + 1
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = zero + 1, c4, z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return [row[order] for row in c]


def fd_weights(offsets, order: int = 1) -> np.ndarray:
    """Finite-difference weights at 0 for integer ``offsets`` (exact, then rounded)."""
    exact = _fornberg([Fraction(int(o)) for o in offsets], order)
    return np.array([float(w) for w in exact])


@lru_cache(maxsize=None)
def _exact_weights(offsets: tuple[int, ...]) -> tuple[Fraction, ...]:
    return tuple(_fornberg([Fraction(o) for o in offsets]))


@lru_cache(maxsize=None)
def _weights(offsets: tuple[int, ...]) -> tuple[float, ...]:
    return tuple(float(w) for w in _exact_weights(offsets))


def _stencil(first: int, width: int = STENCIL_WIDTH) -> tuple[float, ...]:
    return _weights(tuple(range(first, first + width)))


def _wall_stencil(p: int, n: int, parity: int | None, dirichlet: bool):
    """Grid indices and weights for the derivative at grid index ``p``.

    Grid indices run 0..n+1 with the walls at 0 and n+1. Indices beyond a wall
    are mirrored ghosts when ``parity`` is known.
    """
    half = STENCIL_WIDTH // 2
    if parity is not None:
        nodes = list(range(p - half, p + half + 1))
        if parity == 1 and (0 in nodes or n + 1 in nodes):
            # wall value unknown for even functions: drop the wall node and
            # take one more node on the opposite side
            wall = 0 if 0 in nodes else n + 1
            nodes.remove(wall)
            nodes.append(p + half + 1 if wall == 0 else p - half - 1)
            nodes.sort()
        return nodes
    first, last = (0, n + 1) if dirichlet else (1, n)
    start = min(max(p - half, first), last - STENCIL_WIDTH + 1)
    return list(range(start, start + STENCIL_WIDTH))


def _node_value(values: np.ndarray, q: int, n: int, parity: int | None) -> complex:
    if 1 <= q <= n:
        return values[q - 1]
    if q == 0 or q == n + 1:
        return 0.0
    mirror = -q if q < 0 else 2 * (n + 1) - q
    return parity * values[mirror - 1]


def differentiate(f: GridFunction) -> GridFunction:
    """First derivative, 8th order everywhere.

    Interior points use the centred 9-point stencil. Near a wall:

    * ``f.parity`` set: mirrored ghost values, so the stencil stays centred;
    * ``f.dirichlet``: shifted stencil that includes the zero wall value;
    * otherwise: shifted stencil over stored samples only.

    The result has the opposite parity to ``f``.
    """
    n = f.grid.n_points
    if n < MIN_POINTS:
        raise GridTooSmall(f"differentiate needs n_points >= {MIN_POINTS}, got {n}")
    h = f.grid.h
    half = STENCIL_WIDTH // 2
    v = f.values
    out = np.empty(n, dtype=complex)

    centre = np.array(_stencil(-half))
    lo, hi = half, n - half
    acc = np.zeros(hi - lo, dtype=complex)
    for k, w in enumerate(centre):
        acc += w * v[k:k + hi - lo]
    out[lo:hi] = acc

    for i in (*range(half), *range(hi, n)):
        p = i + 1
        nodes = _wall_stencil(p, n, f.parity, f.dirichlet)
        weights = _weights(tuple(q - p for q in nodes))
        out[i] = sum(w * _node_value(v, q, n, f.parity) for q, w in zip(nodes, weights))
    parity = None if f.parity is None else -f.parity
    return GridFunction(f.grid, out / h, dirichlet=parity == -1, parity=parity)


def differentiate_samples(values: list, grid: Grid, parity: int | None,
                         dirichlet: bool = False, convert=float) -> list:
    """Scalar-loop twin of :func:`differentiate` for arbitrary number types.

    ``values`` is a list of interior samples (e.g. ``mpmath.mpf``); ``convert``
    maps the exact rational stencil weights and the spacing into that type.
    """
    n = grid.n_points
    if n < MIN_POINTS:
        raise GridTooSmall(f"differentiate needs n_points >= {MIN_POINTS}, got {n}")
    if len(values) != n:
        raise ValueError(f"expected {n} samples, got {len(values)}")
    half = STENCIL_WIDTH // 2
    zero = values[0] - values[0]
    inv_h = convert(Fraction(grid.n_points + 1)) / convert(grid.L)
    centre = [convert(w) for w in _exact_weights(tuple(range(-half, half + 1)))]
    out = []
    for i in range(n):
        p = i + 1
        if half <= i < n - half:
            acc = zero
            for k, w in enumerate(centre):
                acc += w * values[i - half + k]
        else:
            nodes = _wall_stencil(p, n, parity, dirichlet)
            weights = _exact_weights(tuple(q - p for q in nodes))
            acc = zero
            for q, w in zip(nodes, weights):
                if 1 <= q <= n:
                    v = values[q - 1]
                elif q in (0, n + 1):
                    continue
                else:
                    v = parity * values[(-q if q < 0 else 2 * (n + 1) - q) - 1]
                acc += convert(w) * v
        out.append(acc * inv_h)
    return out


def _simpson_closed(y: np.ndarray, h: float) -> complex:
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def inner_product(f: GridFunction, g: GridFunction) -> complex:
    """``int_0^L conj(f) g dx`` by composite Simpson with zero wall values.

    With an odd number of panels the product (even about both walls when the
    factors vanish there) is unfolded onto ``(-L, L)``, which always has an
    even panel count, and half the Simpson sum is returned.
    """
    f._check(g)
    y = np.conj(f.values) * g.values
    h = f.grid.h
    if (f.grid.n_points + 1) % 2 == 0:
        return complex(_simpson_closed(np.concatenate([[0.0], y, [0.0]]), h))
    unfolded = np.concatenate([[0.0], y[::-1], [0.0], y, [0.0]])
    return complex(0.5 * _simpson_closed(unfolded, h))


def l2_distance(f: GridFunction, g: GridFunction) -> float:
    return (f - g).norm()
