"""Barut-Girardello and Gilmore-Perelomov coherent states of the well ladder.

BG:  |alpha> = N(|alpha|^2) sum_j alpha^j / (j+1)! |j+1>,  N = S(|alpha|^2)^(-1/2)
GP:  |alpha> = sqrt(1 - |alpha|^2) sum_j alpha^j |j+1>,     |alpha| < 1

The BG resolution of the identity uses the weight
``w(x) N^2(x) = 2 x K0(2 sqrt(x)) / pi`` and reduces level by level to the
moment identity ``2 int_0^inf x^(j+1) K0(2 sqrt x) dx = Gamma(j+2)^2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import integrate
from .special import bessel_k0, bg_norm_series, bg_tail_series, ln_gamma
from .su11 import DEFAULT_J_MAX, LevelVector, SizeMismatch

DEFAULT_TAIL_TOL = 1e-5
MOMENT_RTOL = 1e-13
MOMENT_MAX_J = 12
PEAK_CUTOFF = 1e-18  # integrand tail cut relative to its peak
FAMILIES = ("BG", "GP")


class TruncationInsufficient(ValueError):
    """Probability outside the kept levels exceeds the tail tolerance."""


@dataclass(frozen=True)
class CoherentSpec:
    family: str
    alpha: complex
    J_max: int = DEFAULT_J_MAX
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        family = self.family.upper()
        if family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.J_max < 2:
            raise ValueError("J_max must be >= 2")
        if not self.tail_tol >= 0:
            raise ValueError("tail_tol must be nonnegative")
        if family == "GP" and not abs(self.alpha) < 1:
            raise ValueError(f"GP states need |alpha| < 1, got {abs(self.alpha)}")

    def tail_mass(self) -> float:
        return truncation_tail(self.family, abs(self.alpha) ** 2, self.J_max)


def truncation_tail(family: str, x: float, J_max: int) -> float:
    """Exact probability carried by levels above ``J_max`` (``x = |alpha|^2``)."""
    family = family.upper()
    if family == "GP":
        return x**J_max
    if family == "BG":
        return bg_tail_series(x, J_max) / bg_norm_series(x)
    raise ValueError(f"unknown family {family!r}")


def required_levels(family: str, x: float, tol: float, weight_power: int = 0,
                    floor: int = 2, limit: int = 1 << 16) -> int:
    """Smallest ``J_max >= floor`` with ``tail * J_max**weight_power < tol``.

    ``weight_power`` accounts for observables growing like a power of the
    level (the fourth-order moments in the Mandel parameter grow as ``j^4``).
    """
    J = max(floor, 2)
    while truncation_tail(family, x, J) * float(J) ** weight_power >= tol:
        J = J + max(1, J // 8)
        if J > limit:
            raise TruncationInsufficient(f"no J_max <= {limit} meets tail tolerance {tol:g}")
    # step back to the smallest passing size
    while J > floor and truncation_tail(family, x, J - 1) * float(J - 1) ** weight_power < tol:
        J -= 1
    return J


def _check_tail(spec: CoherentSpec) -> None:
    tail = spec.tail_mass()
    if tail > spec.tail_tol:
        raise TruncationInsufficient(
            f"{spec.family} alpha={spec.alpha}: tail {tail:.3g} beyond J_max={spec.J_max} "
            f"exceeds {spec.tail_tol:g}"
        )


def bg_state(spec: CoherentSpec) -> LevelVector:
    """Right eigenvector of ``K-`` with eigenvalue ``alpha``, levels ``1..J_max``."""
    if spec.family != "BG":
        raise ValueError("bg_state needs a BG spec")
    _check_tail(spec)
    a = spec.alpha
    coeffs = np.empty(spec.J_max, dtype=complex)
    term = 1.0 + 0j  # alpha^j / (j+1)!
    for j in range(spec.J_max):
        coeffs[j] = term
        term = term * a / (j + 2)
    return LevelVector(coeffs / math.sqrt(bg_norm_series(abs(a) ** 2)))


def gp_state(spec: CoherentSpec) -> LevelVector:
    """Geometric state ``sqrt(1-|alpha|^2) alpha^j`` on level ``j+1``."""
    if spec.family != "GP":
        raise ValueError("gp_state needs a GP spec")
    _check_tail(spec)
    a = spec.alpha
    powers = a ** np.arange(spec.J_max)
    powers[0] = 1.0  # 0**0
    return LevelVector(math.sqrt(1.0 - abs(a) ** 2) * powers)


def coherent_state(spec: CoherentSpec) -> LevelVector:
    return bg_state(spec) if spec.family == "BG" else gp_state(spec)


def displacement_alpha(xi: complex) -> complex:
    """GP amplitude ``(xi/|xi|) tanh|xi|`` of the displacement ``exp(xi K+ - xi* K-)``."""
    xi = complex(xi)
    r = abs(xi)
    if r == 0:
        return 0j
    return cmath.exp(1j * cmath.phase(xi)) * math.tanh(r)


def overlap(a: LevelVector, b: LevelVector) -> complex:
    """``sum conj(a_j) b_j``."""
    if a.J_max != b.J_max:
        raise SizeMismatch(f"J_max mismatch: {a.J_max} vs {b.J_max}")
    return complex(np.vdot(a.coeffs, b.coeffs))


def bg_weight_product(x: float) -> float:
    """``w(x) N^2(x) = 2 x K0(2 sqrt x) / pi``, the weight with the normalisation divided out."""
    if not x > 0:
        raise ValueError(f"weight defined for x > 0, got {x!r}")
    return 2.0 * x * bessel_k0(2.0 * math.sqrt(x)) / math.pi


def bg_weight(x: float) -> float:
    """Resolution-of-identity weight ``w(x) = 2 x K0(2 sqrt x) S(x) / pi``."""
    return bg_weight_product(x) * bg_norm_series(x)


def _radial_integral(integrand: Callable[[float], float], peak_t: float,
                     panels: int = 1) -> float:
    """``int_0^inf integrand(t) dt`` for an integrand decaying like ``exp(-t)``.

    Split at ``peak_t`` and extend the upper limit until the integrand falls
    below ``PEAK_CUTOFF`` of its value at the split.
    """
    peak = abs(integrand(peak_t))
    hi = 2.0 * peak_t
    while abs(integrand(hi)) > PEAK_CUTOFF * peak:
        hi += peak_t
    f = np.vectorize(integrand, otypes=[float])
    breaks = tuple(np.linspace(0.0, hi, panels + 1)[1:-1]) + (peak_t,)
    value, _ = integrate(f, 0.0, hi, rtol=MOMENT_RTOL, breakpoints=breaks)
    return value


def moment_check(j: int) -> tuple[float, float]:
    """``(2 int_0^inf x^(j+1) K0(2 sqrt x) dx, Gamma(j+2)^2)``.

    With ``x = t^2/4`` the left side is ``2 int (t^2/4)^(j+1) K0(t) (t/2) dt``,
    which has no square root and only a mild ``t^(2j+3) log t`` at zero.
    """
    if not 0 <= j <= MOMENT_MAX_J:
        raise ValueError(f"moment_check supports 0 <= j <= {MOMENT_MAX_J}, got {j}")

    def integrand(t: float) -> float:
        if t == 0.0:
            return 0.0
        return (0.25 * t * t) ** (j + 1) * bessel_k0(t) * t

    lhs = _radial_integral(integrand, 2.0 * (j + 2))
    rhs = math.exp(2.0 * ln_gamma(j + 2))
    return lhs, rhs


def identity_resolution_diag(J_levels: int, radial_points: int = 8,
                             weight_product: Callable[[float], float] | None = None) -> list[float]:
    """Diagonal of ``int d^2 alpha w(|alpha|^2) |alpha><alpha|`` on levels ``1..J_levels``.

    The angular integral gives ``2 pi delta_{jk}`` exactly, so off-diagonal
    entries vanish identically and only the diagonal is computed:

        D_j = pi int_0^inf w(x) N^2(x) x^j dx / ((j+1)!)^2

    ``weight_product`` replaces ``w N^2`` (default :func:`bg_weight_product`);
    ``radial_points`` sets the number of initial quadrature panels.
    """
    if not 1 <= J_levels <= MOMENT_MAX_J:
        raise ValueError(f"J_levels must lie in 1..{MOMENT_MAX_J}")
    if radial_points < 1:
        raise ValueError("radial_points must be >= 1")
    wn2 = weight_product or bg_weight_product
    diag = []
    for j in range(J_levels):
        def integrand(t: float, j=j) -> float:
            if t == 0.0:
                return 0.0
            x = 0.25 * t * t
            return math.pi * wn2(x) * x**j * 0.5 * t

        value = _radial_integral(integrand, 2.0 * (j + 2), radial_points)
        diag.append(value / math.exp(2.0 * ln_gamma(j + 2)))
    return diag
