"""Matrix exponential by scaling and squaring.

Uses the diagonal Pade approximant of fixed order 13 with 1-norm based
scaling: the argument is halved until its norm is below the order-13
accuracy radius, the rational approximant is evaluated, and the result is
squared back up.
"""

import math

import numpy as np

__all__ = ["expm"]

# Pade-13 numerator coefficients b_0..b_13 for exp
_B = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)

# largest 1-norm for which the order-13 approximant is accurate to eps
_THETA13 = 5.371920351148152


def expm(M):
    """exp(M) for a square real or complex matrix."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n == 0:
        return np.zeros_like(M, dtype=float if not np.iscomplexobj(M) else complex)
    if not np.issubdtype(M.dtype, np.inexact):
        M = M.astype(float)

    norm = float(np.linalg.norm(M, 1))
    if norm == 0.0:
        return np.eye(n, dtype=M.dtype)
    squarings = 0
    if norm > _THETA13:
        squarings = int(math.ceil(math.log2(norm / _THETA13)))
        M = M / (2.0**squarings)

    eye = np.eye(n, dtype=M.dtype)
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M2 @ M4
    U = M @ (
        M6 @ (_B[13] * M6 + _B[11] * M4 + _B[9] * M2)
        + _B[7] * M6
        + _B[5] * M4
        + _B[3] * M2
        + _B[1] * eye
    )
    V = (
        M6 @ (_B[12] * M6 + _B[10] * M4 + _B[8] * M2)
        + _B[6] * M6
        + _B[4] * M4
        + _B[2] * M2
        + _B[0] * eye
    )
    R = np.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        R = R @ R
    return R
