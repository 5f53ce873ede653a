"""Dense matrix exponential by scaling and squaring (Higham 2005).

Pade approximants of degree 3, 5, 7, 9 or 13 are selected from the 1-norm,
which targets a relative backward error of about ``2**-53``.
"""

from __future__ import annotations

import math

import numpy as np

_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}

_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ),
}


def _pade_low(a: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE[m]
    eye = np.eye(a.shape[0], dtype=a.dtype)
    powers = [eye, a @ a]
    for _ in range(2, m // 2 + 1):
        powers.append(powers[-1] @ powers[1])
    u = sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
    v = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
    return a @ u, v


def _pade13(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE[13]
    eye = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye)
    return u, v


def expm(a: np.ndarray) -> np.ndarray:
    """Exponential of a square (real or complex) matrix."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {a.shape}")
    if not np.issubdtype(a.dtype, np.inexact):
        a = a.astype(float)
    if a.shape[0] == 0:
        return a.copy()
    norm = float(np.abs(a).sum(axis=0).max())
    if not np.isfinite(norm):
        raise ValueError("expm input has non-finite entries")

    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            u, v = _pade_low(a, m)
            return np.linalg.solve(v - u, v + u)

    s = max(0, math.ceil(math.log2(norm / _THETA[13])))
    scaled = a / 2.0**s
    u, v = _pade13(scaled)
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r
