"""Quadrature squeezing, amplitude-squared squeezing and Mandel Q.

The field operators are built from the ladder matrices as they stand,

    X1 = (K- + K+)/2,    Y1 = (K- - K+)/(2i)
    X2 = (K-^2 + K+^2)/2, Y2 = (K-^2 - K+^2)/(2i)

and are not Hermitian because ``K+ != K-^dagger``. For real ``alpha`` every
coefficient and matrix entry is real, so the expectations entering the
metrics are real anyway; complex ``alpha`` must be requested explicitly.

    s = Var(X) / (|<[X, Y]>| / 2) - 1
    Q = (<K+^2 K-^2> - <K+K->^2) / <K+K-> - 1
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .coherent import CoherentSpec, coherent_state, required_levels
from .su11 import DEFAULT_J_MAX, LevelOperator, LevelVector, ladder_matrices

SINGULAR_TOL = 1e-14
REALITY_TOL = 1e-12
TOP_LEVEL_WARN = 1e-10
SWEEP_TAIL_TOL = 1e-20  # tail * J^4 bound used to size sweeps automatically
SWEEP_POINTS = 161
SWEEP_RANGE = {"BG": 2.0, "GP": 0.96}
MANDEL_LIMIT_AT_ZERO = -1.0

FLAG_GROUND = "ground_state"  # alpha = 0: metrics are exactly 0, excluded from sign checks
FLAG_Q_UNDEFINED = "q_undefined"
FLAG_SINGULAR = "singular_denominator"
FLAG_TAIL = "tail_warning"
FLAG_COMPLEX = "complex_alpha"


class SingularDenominator(ArithmeticError):
    pass


class ComplexExpectation(ArithmeticError):
    """An expectation that must be real for real alpha came out complex."""


def quadrature_operators(J_max: int = DEFAULT_J_MAX) -> tuple[LevelOperator, ...]:
    """``(X1, Y1, X2, Y2)`` from the literal ladder matrices."""
    if J_max < 4:
        raise ValueError("J_max must be >= 4")
    return _quadratures(J_max)


@lru_cache(maxsize=8)
def _quadratures(J_max: int) -> tuple[LevelOperator, ...]:
    kp, km, _ = (op.entries for op in ladder_matrices(J_max))
    kp2, km2 = kp @ kp, km @ km
    return (
        LevelOperator((km + kp) / 2, "X1"),
        LevelOperator((km - kp) / 2j, "Y1"),
        LevelOperator((km2 + kp2) / 2, "X2"),
        LevelOperator((km2 - kp2) / 2j, "Y2"),
    )


def expectation(state: LevelVector, op: LevelOperator) -> complex:
    """``<psi|O|psi> / <psi|psi>``."""
    c = state.coeffs
    return complex(np.vdot(c, op.entries @ c) / np.vdot(c, c).real)


def _real(value: complex, allow_complex: bool):
    if allow_complex:
        return value
    if abs(value.imag) > REALITY_TOL * max(1.0, abs(value.real)):
        raise ComplexExpectation(f"expectation {value} is not real")
    return value.real


def _squeeze_pair(state: LevelVector, x: LevelOperator, y: LevelOperator,
                  allow_complex: bool):
    c = state.coeffs
    norm2 = np.vdot(c, c).real
    xc, yc = x.entries @ c, y.entries @ c

    def ev(vec):
        return complex(np.vdot(c, vec) / norm2)

    comm = ev(x.entries @ yc - y.entries @ xc)
    denom = 0.5 * abs(comm)
    if denom <= SINGULAR_TOL:
        raise SingularDenominator(f"|<[X, Y]>|/2 = {denom:g}")
    var_x = ev(x.entries @ xc) - ev(xc) ** 2
    var_y = ev(y.entries @ yc) - ev(yc) ** 2
    return (_real(var_x / denom - 1.0, allow_complex),
            _real(var_y / denom - 1.0, allow_complex))


def squeezing(state: LevelVector, allow_complex: bool = False):
    """``(s_X1, s_Y1)``; squeezing in a quadrature means ``-1 < s < 0``."""
    x1, y1, _, _ = quadrature_operators(state.J_max)
    return _squeeze_pair(state, x1, y1, allow_complex)


def amplitude_squared_squeezing(state: LevelVector, allow_complex: bool = False):
    """``(S_X2, S_Y2)`` for the squared-amplitude quadratures."""
    _, _, x2, y2 = quadrature_operators(state.J_max)
    return _squeeze_pair(state, x2, y2, allow_complex)


def mandel_q(state: LevelVector) -> float:
    """Mandel parameter from the diagonal moments.

    ``K+K-`` and ``K+^2 K-^2`` are diagonal with entries ``j(j-1)`` and
    ``j(j-1)^2(j-2)``, so both are probability-weighted level sums.
    """
    p = state.probabilities()
    p = p / p.sum()
    j = np.arange(1, state.J_max + 1, dtype=float)
    n1 = float(p @ (j * (j - 1)))
    n2 = float(p @ (j * (j - 1) ** 2 * (j - 2)))
    if n1 <= SINGULAR_TOL:
        raise SingularDenominator(f"<K+K-> = {n1:g}")
    return (n2 - n1 * n1) / n1 - 1.0


@dataclass(frozen=True)
class MetricPoint:
    alpha: float
    s_x1: float
    s_y1: float
    s_x2: float
    s_y2: float
    mandel_q: float
    flags: tuple[str, ...] = field(default=())
    mandel_q_limit: float | None = None  # reported where Q itself is undefined

    @property
    def valid(self) -> bool:
        """True when every metric is defined and the point is not the ground state."""
        return not {FLAG_GROUND, FLAG_Q_UNDEFINED, FLAG_SINGULAR} & set(self.flags)

    def as_row(self) -> dict:
        return {
            "alpha": self.alpha, "s_x1": self.s_x1, "s_y1": self.s_y1,
            "s_x2": self.s_x2, "s_y2": self.s_y2, "mandel_q": self.mandel_q,
            "flags": ";".join(self.flags),
        }


def metric_point(family: str, alpha, J_max: int, allow_complex: bool = False) -> MetricPoint:
    """All five metrics at one amplitude; singular cases are flagged, never raised."""
    if isinstance(alpha, complex) and alpha.imag != 0 and not allow_complex:
        raise ValueError("complex alpha needs allow_complex=True")
    spec = CoherentSpec(family, alpha, J_max, tail_tol=1.0)
    state = coherent_state(spec)
    flags = []
    if alpha == 0:
        flags.append(FLAG_GROUND)
    if complex(alpha).imag != 0:
        flags.append(FLAG_COMPLEX)
    if state.probabilities()[-1] > TOP_LEVEL_WARN:
        flags.append(FLAG_TAIL)
    nan = float("nan")
    try:
        sx1, sy1 = squeezing(state, allow_complex)
        sx2, sy2 = amplitude_squared_squeezing(state, allow_complex)
    except SingularDenominator:
        sx1 = sy1 = sx2 = sy2 = nan
        flags.append(FLAG_SINGULAR)
    limit = None
    try:
        q = mandel_q(state)
    except SingularDenominator:
        q = nan
        limit = MANDEL_LIMIT_AT_ZERO
        flags.append(FLAG_Q_UNDEFINED)
    return MetricPoint(alpha if allow_complex else float(alpha),
                       sx1, sy1, sx2, sy2, q, tuple(flags), limit)


def default_alphas(family: str, n_points: int = SWEEP_POINTS,
                   amplitude: float | None = None) -> np.ndarray:
    """Symmetric sweep over ``[-a, a]``; ``alpha`` and ``-alpha`` are exact negatives."""
    family = family.upper()
    a = SWEEP_RANGE[family] if amplitude is None else amplitude
    if n_points < 1:
        return np.empty(0)
    if n_points % 2 == 0:
        raise ValueError("sweep needs an odd point count so that alpha = 0 is sampled")
    half = np.linspace(0.0, a, n_points // 2 + 1)
    return np.concatenate([-half[:0:-1], half])


def sweep_levels(family: str, alphas, floor: int = DEFAULT_J_MAX) -> int:
    """Truncation for a sweep: ``tail * J^4 < SWEEP_TAIL_TOL`` at the largest ``|alpha|``."""
    peak = max((abs(a) for a in alphas), default=0.0)
    return required_levels(family, peak**2, SWEEP_TAIL_TOL, weight_power=4, floor=floor)


def worker_count() -> int:
    """Thread cap from ``WELL_LADDER_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get("WELL_LADDER_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"WELL_LADDER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("WELL_LADDER_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def metric_sweep(family: str, alphas, J_max: int | None = None,
                 threads: int | None = None) -> list[MetricPoint]:
    """Metrics at each ``alpha`` in input order.

    ``J_max=None`` sizes the truncation from the largest ``|alpha|`` (see
    :func:`sweep_levels`); a fixed ``J_max`` is used as given. Points are
    independent, so they are mapped over a thread pool; the map preserves
    order, so output does not depend on the thread count.
    """
    family = family.upper()
    alphas = [float(a) for a in alphas]
    if not alphas:
        return []
    if family == "GP" and any(abs(a) >= 1 for a in alphas):
        raise ValueError("GP sweep needs |alpha| < 1")
    J = sweep_levels(family, alphas) if J_max is None else J_max
    quadrature_operators(J)  # build the shared matrices once, before fanning out
    n = min(threads or worker_count(), len(alphas))
    if n <= 1:
        return [metric_point(family, a, J) for a in alphas]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda a: metric_point(family, a, J), alphas))


def interior_extrema(alphas, values) -> list[float]:
    """Sample locations where the sequence turns (strict sign change of the slope)."""
    v = np.asarray(values, dtype=float)
    a = np.asarray(alphas, dtype=float)
    d = np.diff(v)
    turns = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0] + 1
    return [float(a[i]) for i in turns]
