"""Two-level atom coupled to the well ladder plus a classical drive.

    H = lam (s- e^{i phi} + s+ e^{-i phi}) + Lam (K+ s- + K- s+)      (hbar = 1)

The state space is ``atom (x) levels`` ordered ``(e, levels..., g, levels...)``
with ``s- = |g><e|`` and ``s_z |e> = +|e>``. The factored propagator

    U(t) = R^ T^(t) U_eff R,   R = exp[pi/4 (s+ - s-)] exp(i phi/2 s_z)
    T(t) = exp(i lam s_z t),   U_eff = exp[-(i Lam t/2)(K+ e^{-i phi} + K- e^{i phi}) s_z]

is applied literally. ``K+ != K-^dagger``, so none of the exponentials of the
field generators is unitary; norms are measured, not assumed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coherent import CoherentSpec, gp_state
from .linalg import expm
from .su11 import LevelVector, SizeMismatch, ladder_matrices

DEFAULT_J_MAX = 128
TOP_LEVEL_LIMIT = 1e-8
ZERO_PROBABILITY = 1e-14
PROPAGATORS = ("factored", "exact")

SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


class TruncationLeak(ArithmeticError):
    """The top field level picked up more than ``TOP_LEVEL_LIMIT`` occupation."""


class ZeroProbabilityOutcome(ValueError):
    pass


@dataclass(frozen=True)
class JCConfig:
    drive: float = 1.0 / 200.0  # classical coupling lam
    coupling: float = 1.0  # quantized coupling Lam
    phi: float = 2.0 * math.pi
    t: float = 1.0
    J_max: int = DEFAULT_J_MAX
    propagator: str = "factored"

    def __post_init__(self):
        if not self.coupling > 0:
            raise ValueError("field coupling must be positive")
        if self.drive < 0:
            raise ValueError("drive must be nonnegative")
        if self.J_max < 2:
            raise ValueError("J_max must be >= 2")
        if self.propagator not in PROPAGATORS:
            raise ValueError(f"propagator must be one of {PROPAGATORS}")

    @property
    def coupling_ratio(self) -> float:
        """``Lam / lam`` (infinite without a drive)."""
        return math.inf if self.drive == 0 else self.coupling / self.drive

    @property
    def xi(self) -> complex:
        """Displacement parameter ``-(i Lam t / 2) e^{-i phi}`` of ``U_eff``."""
        return -0.5j * self.coupling * self.t * cmath.exp(-1j * self.phi)

    @property
    def alpha_eff(self) -> complex:
        """Normalisable GP amplitude ``-i e^{-i phi} tanh(Lam t / 2)``."""
        return -1j * cmath.exp(-1j * self.phi) * math.tanh(0.5 * self.coupling * self.t)


@dataclass(frozen=True, eq=False)
class AtomFieldState:
    """Amplitudes over ``(e, g) x levels 1..J_max`` as one flat vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size % 2 or a.size < 4:
            raise ValueError("amplitudes must be a 1-d array of even length >= 4")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_blocks(cls, excited, ground) -> "AtomFieldState":
        excited, ground = np.asarray(excited), np.asarray(ground)
        if excited.shape != ground.shape:
            raise SizeMismatch("atomic blocks differ in length")
        return cls(np.concatenate([excited, ground]))

    @property
    def J_max(self) -> int:
        return self.amplitudes.size // 2

    @property
    def excited(self) -> np.ndarray:
        return self.amplitudes[: self.J_max]

    @property
    def ground(self) -> np.ndarray:
        return self.amplitudes[self.J_max:]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "AtomFieldState":
        return AtomFieldState(self.amplitudes / self.norm())

    def top_level_occupation(self) -> float:
        """Largest relative weight on level ``J_max`` in either atomic block."""
        a = self.amplitudes
        return float(max(abs(a[self.J_max - 1]), abs(a[-1])) ** 2 / np.vdot(a, a).real)


def initial_state(J_max: int = DEFAULT_J_MAX) -> AtomFieldState:
    """``(|e> + |g>)/sqrt(2) (x) |1>``."""
    excited = np.zeros(J_max, dtype=complex)
    excited[0] = 1.0 / math.sqrt(2.0)
    return AtomFieldState.from_blocks(excited, excited.copy())


def build_jc_hamiltonian(cfg: JCConfig) -> np.ndarray:
    """Dense ``2 J_max`` square Hamiltonian."""
    kp, km, _ = (op.entries for op in ladder_matrices(cfg.J_max))
    eye = np.eye(cfg.J_max)
    drive = SIGMA_MINUS * cmath.exp(1j * cfg.phi) + SIGMA_PLUS * cmath.exp(-1j * cfg.phi)
    return (cfg.drive * np.kron(drive, eye)
            + cfg.coupling * (np.kron(SIGMA_MINUS, kp) + np.kron(SIGMA_PLUS, km)))


def _check_state(cfg: JCConfig, state: AtomFieldState) -> None:
    if state.J_max != cfg.J_max:
        raise SizeMismatch(f"state has J_max={state.J_max}, config {cfg.J_max}")


def _check_leak(state: AtomFieldState) -> AtomFieldState:
    top = state.top_level_occupation()
    if top > TOP_LEVEL_LIMIT:
        raise TruncationLeak(f"top level occupation {top:.3g} exceeds {TOP_LEVEL_LIMIT:g}")
    return state


def frame_rotation(cfg: JCConfig) -> np.ndarray:
    """Atomic ``R = exp[pi/4 (s+ - s-)] exp(i phi/2 s_z)`` (2 x 2)."""
    return expm(0.25 * math.pi * (SIGMA_PLUS - SIGMA_MINUS)) @ expm(0.5j * cfg.phi * SIGMA_Z)


def factored_propagator_matrix(cfg: JCConfig) -> np.ndarray:
    J = cfg.J_max
    kp, km, _ = (op.entries for op in ladder_matrices(J))
    eye = np.eye(J)
    rot = np.kron(frame_rotation(cfg), eye)
    drift = np.kron(expm(1j * cfg.drive * cfg.t * SIGMA_Z), eye)
    field = kp * cmath.exp(-1j * cfg.phi) + km * cmath.exp(1j * cfg.phi)
    u_eff = expm(-0.5j * cfg.coupling * cfg.t * np.kron(SIGMA_Z, field))
    return rot.conj().T @ drift.conj().T @ u_eff @ rot


def factored_propagator(cfg: JCConfig, state: AtomFieldState) -> AtomFieldState:
    """Strong-drive product formula applied to ``state``."""
    _check_state(cfg, state)
    return _check_leak(AtomFieldState(factored_propagator_matrix(cfg) @ state.amplitudes))


def exact_propagator(cfg: JCConfig, state: AtomFieldState) -> AtomFieldState:
    """``exp(-i H t)`` of the full Hamiltonian, no approximation."""
    _check_state(cfg, state)
    u = expm(-1j * cfg.t * build_jc_hamiltonian(cfg))
    return _check_leak(AtomFieldState(u @ state.amplitudes))


def propagate(cfg: JCConfig, state: AtomFieldState) -> AtomFieldState:
    if cfg.propagator == "factored":
        return factored_propagator(cfg, state)
    return exact_propagator(cfg, state)


def _gp(alpha: complex, J_max: int) -> np.ndarray:
    return gp_state(CoherentSpec("GP", alpha, J_max, tail_tol=1.0)).coeffs


def analytic_final_state(cfg: JCConfig) -> AtomFieldState:
    """Closed-form evolved state of :func:`initial_state` as a GP superposition.

    Uses ``alpha_eff = -i e^{-i phi} tanh(Lam t/2)``. The result has unit
    norm up to the GP truncation tail; the product formula applied to the
    same input gives this state times ``sech(Lam t/2)``.
    """
    a = cfg.alpha_eff
    plus, minus = _gp(a, cfg.J_max), _gp(-a, cfg.J_max)
    half = 0.5 * cfg.phi
    c, s = math.cos(half), math.sin(half)
    slow = cmath.exp(-1j * cfg.drive * cfg.t)
    fast = cmath.exp(1j * cfg.drive * cfg.t)
    r2 = 1.0 / math.sqrt(2.0)
    excited = r2 * cmath.exp(-1j * half) * (slow * c * plus + 1j * fast * s * minus)
    ground = r2 * cmath.exp(1j * half) * (slow * c * plus - 1j * fast * s * minus)
    return AtomFieldState.from_blocks(excited, ground)


def outcome_probabilities(state: AtomFieldState) -> dict[str, float]:
    """Probabilities of detecting the atom in ``e`` or ``g`` (renormalised)."""
    pe = float(np.vdot(state.excited, state.excited).real)
    pg = float(np.vdot(state.ground, state.ground).real)
    total = pe + pg
    return {"e": pe / total, "g": pg / total}


def conditional_field_state(state: AtomFieldState, outcome: str) -> LevelVector:
    """Normalised field state after detecting the atom in ``outcome``."""
    if outcome not in ("e", "g"):
        raise ValueError("outcome must be 'e' or 'g'")
    block = state.excited if outcome == "e" else state.ground
    weight = float(np.vdot(block, block).real)
    if weight <= ZERO_PROBABILITY * np.vdot(state.amplitudes, state.amplitudes).real:
        raise ZeroProbabilityOutcome(f"outcome {outcome!r} has probability {weight:g}")
    return LevelVector(block / math.sqrt(weight))


def fidelity(a, b) -> float:
    """``|<a|b>|^2 / (<a|a><b|b>)`` for two LevelVectors or two AtomFieldStates."""
    if isinstance(a, LevelVector) and isinstance(b, LevelVector):
        u, v = a.coeffs, b.coeffs
    elif isinstance(a, AtomFieldState) and isinstance(b, AtomFieldState):
        u, v = a.amplitudes, b.amplitudes
    else:
        raise TypeError("fidelity needs two LevelVectors or two AtomFieldStates")
    if u.size != v.size:
        raise SizeMismatch(f"dimension mismatch: {u.size} vs {v.size}")
    den = np.vdot(u, u).real * np.vdot(v, v).real
    return float(min(1.0, abs(np.vdot(u, v)) ** 2 / den))


def gp_reference(alpha: complex, J_max: int) -> LevelVector:
    return LevelVector(_gp(alpha, J_max))


def exact_block_state(cfg: JCConfig) -> AtomFieldState:
    """Undriven (``lam = 0``) evolution of :func:`initial_state` in closed form.

    Without the drive ``H`` couples only ``(e, j)`` and ``(g, j+1)`` through
    ``Lam [[0, j+1], [j, 0]]``. The initial state touches two blocks:
    ``(e,1)-(g,2)`` and the isolated ``(g,1)``, which ``H`` annihilates.
    For ``[[0, b], [c, 0]]`` with ``w = sqrt(bc)`` the exponential is
    ``[[cos wt, -i b sin(wt)/w], [-i c sin(wt)/w, cos wt]]``.
    """
    if cfg.drive != 0:
        raise ValueError("closed form holds only without the classical drive")
    b, c = 2.0 * cfg.coupling, 1.0 * cfg.coupling
    w = math.sqrt(b * c)
    r2 = 1.0 / math.sqrt(2.0)
    excited = np.zeros(cfg.J_max, dtype=complex)
    ground = np.zeros(cfg.J_max, dtype=complex)
    excited[0] = r2 * math.cos(w * cfg.t)
    ground[1] = r2 * (-1j * c * math.sin(w * cfg.t) / w)
    ground[0] = r2
    return AtomFieldState.from_blocks(excited, ground)


def regime_scan(ratios, base: JCConfig | None = None) -> list[dict]:
    """Factored-versus-exact fidelity for ``Lam/lam`` in ``ratios`` at fixed ``Lam t``."""
    base = base or JCConfig()
    psi0 = initial_state(base.J_max)
    rows = []
    for r in ratios:
        cfg = JCConfig(base.coupling / r, base.coupling, base.phi, base.t, base.J_max)
        f = factored_propagator(cfg, psi0)
        e = exact_propagator(cfg, psi0)
        rows.append({"ratio": float(r), "fidelity": fidelity(f, e),
                     "norm_factored": f.norm(), "norm_exact": e.norm()})
    return rows
