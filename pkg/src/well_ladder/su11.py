"""su(1,1) ladder operators of the square well, on levels and on the grid.

Levels are indexed from 1 (``psi_0 = sin(0) = 0`` is the zero vector, not a
state). Array index ``i`` holds level ``i + 1``. The matrices are

    K+ |j> = j |j+1>,    K- |j> = j |j-1>,    K0 |j> = j |j>

so ``K+`` is not the conjugate transpose of ``K-`` in this orthonormal basis:
``(K+)_{j+1,j} = j`` while ``(K-)_{j,j+1} = j+1``. The commutators still
close exactly. The last level carries the truncation: ``K+ |J_max> = 0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .factorization import exact_eigenfunction
from .grid import GridFunction, Units, differentiate, inner_product

DEFAULT_J_MAX = 64
LABELS = ("K+", "K-", "K0", "H", "X1", "Y1", "X2", "Y2", "custom")


class HintRequired(ValueError):
    """The grid ladder needs the K0 eigenvalue of its input."""


class SizeMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LevelVector:
    """Complex amplitudes over levels ``1..J_max``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coeffs must be a nonempty 1-d array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def J_max(self) -> int:
        return self.coeffs.size

    @classmethod
    def basis(cls, level: int, J_max: int) -> "LevelVector":
        if not 1 <= level <= J_max:
            raise ValueError(f"level {level} outside 1..{J_max}")
        c = np.zeros(J_max, dtype=complex)
        c[level - 1] = 1.0
        return cls(c)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "LevelVector":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalise the zero vector")
        return LevelVector(self.coeffs / n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def __add__(self, other: "LevelVector") -> "LevelVector":
        _same_size(self.J_max, other.J_max)
        return LevelVector(self.coeffs + other.coeffs)

    def __sub__(self, other: "LevelVector") -> "LevelVector":
        _same_size(self.J_max, other.J_max)
        return LevelVector(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "LevelVector":
        return LevelVector(scalar * self.coeffs)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class LevelOperator:
    """Dense ``J_max x J_max`` operator with a descriptive label."""

    entries: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be square, got shape {a.shape}")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def J_max(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, LevelVector):
            _same_size(self.J_max, other.J_max)
            return LevelVector(self.entries @ other.coeffs)
        if isinstance(other, LevelOperator):
            _same_size(self.J_max, other.J_max)
            return LevelOperator(self.entries @ other.entries)
        return NotImplemented

    def __add__(self, other: "LevelOperator") -> "LevelOperator":
        _same_size(self.J_max, other.J_max)
        return LevelOperator(self.entries + other.entries)

    def __sub__(self, other: "LevelOperator") -> "LevelOperator":
        _same_size(self.J_max, other.J_max)
        return LevelOperator(self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "LevelOperator":
        return LevelOperator(scalar * self.entries)

    __rmul__ = __mul__

    def to_csv(self, path: str | Path) -> None:
        """Dense export: one row per matrix row, ``re`` and ``im`` interleaved."""
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            n = self.J_max
            writer.writerow([f"{part}{k}" for k in range(1, n + 1) for part in ("re", "im")])
            for row in self.entries:
                writer.writerow([repr(float(getattr(v, part))) for v in row
                                 for part in ("real", "imag")])


def _same_size(a: int, b: int) -> None:
    if a != b:
        raise SizeMismatch(f"J_max mismatch: {a} vs {b}")


def commutator(a: LevelOperator, b: LevelOperator) -> LevelOperator:
    return LevelOperator(a.entries @ b.entries - b.entries @ a.entries)


def ladder_matrices(J_max: int = DEFAULT_J_MAX) -> tuple[LevelOperator, LevelOperator, LevelOperator]:
    """``(K+, K-, K0)`` truncated to levels ``1..J_max``."""
    if J_max < 2:
        raise ValueError("J_max must be >= 2")
    levels = np.arange(1, J_max + 1, dtype=float)
    k_plus = np.diag(levels[:-1], k=-1)
    k_minus = np.diag(levels[1:], k=1)
    return (LevelOperator(k_plus, "K+"), LevelOperator(k_minus, "K-"),
            LevelOperator(np.diag(levels), "K0"))


def hamiltonian_forms(J_max: int = DEFAULT_J_MAX, units: Units | None = None) -> dict[str, np.ndarray]:
    """The three equivalent ladder forms of the well Hamiltonian.

    ``normal``: ``e (K+K- + K0)``; ``antinormal``: ``e (K-K+ - K0)``;
    ``symmetric``: ``(e/2) {K+, K-}``; ``e`` is the ground-level energy.
    Only the first is free of truncation error on the top level.
    """
    units = units or Units()
    kp, km, k0 = (op.entries for op in ladder_matrices(J_max))
    e = units.energy_scale
    return {
        "normal": e * (kp @ km + k0),
        "antinormal": e * (km @ kp - k0),
        "symmetric": 0.5 * e * (kp @ km + km @ kp),
    }


def hamiltonian_fock(J_max: int = DEFAULT_J_MAX, units: Units | None = None) -> LevelOperator:
    """``E_1 (K+K- + K0)``, diagonal with entries ``j^2 E_1``.

    The other two forms are checked against it below the top level; the
    entries are small integers times ``E_1`` so agreement is exact.
    """
    forms = hamiltonian_forms(J_max, units)
    h = forms["normal"]
    inner = slice(0, J_max - 1)
    for name in ("antinormal", "symmetric"):
        if not np.array_equal(forms[name][inner, inner], h[inner, inner]):
            raise ArithmeticError(f"{name} Hamiltonian form disagrees below the top level")
    return LevelOperator(h, "H")


def adjoint_defect(J_max: int = DEFAULT_J_MAX) -> float:
    """``max |K+ - (K-)^dagger|`` over levels below ``J_max``.

    Equals 1 for every ``J_max >= 3``: ``j`` versus ``j + 1`` on each
    subdiagonal entry. The representation is not unitary in this basis.
    """
    if J_max < 3:
        raise ValueError("J_max must be >= 3")
    kp, km, _ = ladder_matrices(J_max)
    inner = slice(0, J_max - 1)
    return float(np.abs(kp.entries - km.entries.conj().T)[inner, inner].max())


def _angle_derivative(f: GridFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(sin y, cos y, df/dy)`` with ``y = pi x / L``."""
    grid = f.grid
    y = math.pi * grid.points / grid.L
    df_dy = differentiate(f).values * (grid.L / math.pi)
    return np.sin(y), np.cos(y), df_dy


def apply_position_ladder(f: GridFunction, direction: str,
                          k0_eigenvalue_hint: int | None = None) -> GridFunction:
    """``K+/- f = +/- sin(y) f' + cos(y) j f`` for a level-``j`` eigenfunction.

    ``K0`` is the level index, which is not a local operator on samples, so
    the caller supplies it.
    """
    if k0_eigenvalue_hint is None:
        raise HintRequired("apply_position_ladder needs the level index of f")
    if direction not in ("raise", "lower"):
        raise ValueError("direction must be 'raise' or 'lower'")
    s, c, df = _angle_derivative(f)
    sign = 1.0 if direction == "raise" else -1.0
    out = sign * s * df + c * k0_eigenvalue_hint * f.values
    return GridFunction(f.grid, out, dirichlet=True, parity=-1)


def sin_times_angular_ladder(j: int, f: GridFunction, dagger: bool) -> GridFunction:
    """``sin(y) A_j^ f`` or ``sin(y) A_j f`` in the angle variable.

    ``A_j^ = d/dy + j cot y`` and ``A_j = -d/dy + j cot y``, so that on the
    normalised eigenfunctions ``sin A_j^ psi_j = j psi_{j+1}`` and
    ``sin A_j psi_j = j psi_{j-1}``. The ``sin`` prefactor cancels the
    ``cot`` singularity, so nothing singular is sampled.
    """
    s, c, df = _angle_derivative(f)
    sign = 1.0 if dagger else -1.0
    out = sign * s * df + j * c * f.values
    return GridFunction(f.grid, out, dirichlet=True, parity=-1)


def level_coordinates(f: GridFunction, J_max: int) -> LevelVector:
    """Expansion ``<psi_k, f>`` on the analytic eigenfunctions ``k = 1..J_max``."""
    coeffs = [inner_product(exact_eigenfunction(k, f.grid), f) for k in range(1, J_max + 1)]
    return LevelVector(np.array(coeffs))
