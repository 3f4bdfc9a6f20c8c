"""Laplace-domain verification of the resolvent and solution identities.

Everything here checks exact rational identities of the pencil by sampling:
the commutation and shift identities of the resolvent, the asymptotic
expansion of (sE+A)^{-1}E on the IV spaces, the distributional solution
formula, and the match between the classical solution's Laplace transform
and (sE+A)^{-1} E u0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import IvChain
from .exceptions import InconsistentInitialValueError, SingularMatrixError
from .pencils import Pencil, resolvent
from .solvers import classical_solution, is_consistent

__all__ = [
    "IdentityReport",
    "expansion_grid",
    "verify_commutation",
    "verify_shift",
    "verify_expansion",
    "hat_solution",
    "verify_solution_formula",
    "verify_transform_match",
]

COMMUTATION_TOL = 1e-10
SHIFT_TOL = 1e-10
SOLUTION_FORMULA_TOL = 1e-10
EXPANSION_C_MAX = 10.0
TRANSFORM_TOL = 1e-6
MIN_ST = 30.0

_TINY = 1e-300


@dataclass(frozen=True)
class IdentityReport:
    """Result of sampling one identity.

    max_relative_error is the worst sampled error in the identity's own
    normalization; for expansion_e it is the remainder constant C, compared
    against EXPANSION_C_MAX instead of a relative tolerance.
    """

    identity: str  # commutation_b | shift_d | expansion_e | solution_formula | transform_match
    sample_points: tuple
    max_relative_error: float
    passed: bool
    details: dict = field(default_factory=dict)


def _resolvent_retry(pencil, s, tries=6):
    for _ in range(tries):
        try:
            return resolvent(pencil, s), s
        except SingularMatrixError:
            s = s * 1.01
    raise SingularMatrixError(f"resolvent failed near s = {s}")


def verify_commutation(pencil: Pencil, points) -> IdentityReport:
    """E (sE+A)^{-1} A = A (sE+A)^{-1} E at every sample point."""
    nE = np.linalg.norm(pencil.E, 2)
    nA = np.linalg.norm(pencil.A, 2)
    worst = 0.0
    for s in points:
        R = resolvent(pencil, s)
        diff = pencil.E @ R @ pencil.A - pencil.A @ R @ pencil.E
        denom = max(nE * nA * np.linalg.norm(R, 2), _TINY)
        worst = max(worst, float(np.linalg.norm(diff, 2) / denom))
    return IdentityReport(
        "commutation_b", tuple(points), worst, worst <= COMMUTATION_TOL
    )


def verify_shift(pencil: Pencil, points) -> IdentityReport:
    """(sE+A)^{-1} E = I/s - (1/s)(sE+A)^{-1} A at every nonzero sample point."""
    eye = np.eye(pencil.n)
    worst = 0.0
    for s in points:
        if s == 0:
            raise ValueError("the shift identity is undefined at s = 0")
        R = resolvent(pencil, s)
        lhs = R @ pencil.E
        rhs = eye / s - (R @ pencil.A) / s
        denom = max(np.linalg.norm(lhs, 2), np.linalg.norm(rhs, 2), _TINY)
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2) / denom))
    return IdentityReport("shift_d", tuple(points), worst, worst <= SHIFT_TOL)


def expansion_grid(k: int, s_floor=1e3, s_cap=1e6, points=12):
    """Sample grid for verify_expansion, capped where float64 can still decide.

    Roundoff of the stored pencil contributes ~eps * s^(k+1) to the measured
    remainder constant, so points beyond ~(1/eps)^(1/(k+2)) carry no
    information about the identity; returns None when no admissible point
    remains above the floor (k too high for the requested range).
    """
    limit = 0.3 * (1.0 / np.finfo(float).eps) ** (1.0 / (k + 2))
    if limit < s_floor:
        return None
    return np.geomspace(s_floor, min(s_cap, limit), points)


def _fit_expansion_coefficients(pencil, x, k, s_ref=100.0, ratio=2.0):
    """Fit x_1..x_k from samples of (sE+A)^{-1}Ex at k+2 geometric points.

    The model y(s) = c_0/s + ... + c_{k+1}/s^{k+2} is solved as a Vandermonde
    system in the scaled variable s_ref/s; the extra top coefficient absorbs
    the leading remainder so it cannot contaminate x_k.  Returns the fitted
    x_l stack and the Vandermonde condition number.
    """
    samples = []
    nodes = []
    for s in s_ref * ratio ** np.arange(k + 2):
        R, s_used = _resolvent_retry(pencil, float(s), tries=6)
        samples.append((R @ (pencil.E @ x)) * s_used)
        nodes.append(s_used)
    nodes = np.array(nodes)  # retries may have nudged points off the grid
    tau = nodes[0] / nodes
    V = np.vander(tau, k + 2, increasing=True)
    gamma = np.linalg.solve(V, np.array(samples))
    coeffs = gamma * (nodes[0] ** np.arange(k + 2))[:, None]
    return coeffs[1 : k + 1], float(np.linalg.cond(V))


def verify_expansion(pencil: Pencil, chain: IvChain, k: int, s_grid=None) -> IdentityReport:
    """Bounded-remainder form of the resolvent expansion on IV_k.

    For each basis vector x of IV_k, coefficients x_l are fitted from
    resolvent samples; the check is that s^{k+1} times the remainder
    y(s) - x/s - sum x_l / s^{l+1} stays below C * (1 + ||(sE+A)^{-1}|| ||A||)
    across the grid with C <= EXPANSION_C_MAX.  The reported
    max_relative_error is the observed C.

    In floating point the check is only meaningful while s^{k+1} stays a few
    orders below 1/eps; beyond that the sampled remainder is dominated by
    roundoff of the stored pencil, not by the identity.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if chain.stabilization is not None and k > chain.stabilization + 1:
        raise ValueError(
            f"k = {k} exceeds stabilization + 1 = {chain.stabilization + 1}"
        )
    if k >= len(chain.spaces):
        raise ValueError(f"chain only records spaces up to IV_{len(chain.spaces) - 1}")
    if s_grid is None:
        s_grid = np.geomspace(1e3, 1e6, 16)
    s_grid = np.asarray(s_grid, dtype=float)

    iv_k = chain.spaces[k]
    nA = np.linalg.norm(pencil.A, 2)
    details = {"k": k, "basis_dim": iv_k.dim}
    if iv_k.dim == 0:
        return IdentityReport("expansion_e", tuple(s_grid), 0.0, True, details)

    fits = []
    worst_cond = 0.0
    for x in iv_k.basis.T:
        coeffs, cond = _fit_expansion_coefficients(pencil, x, k)
        fits.append(coeffs)
        worst_cond = max(worst_cond, cond)
    details["fit_condition"] = worst_cond
    if worst_cond > 1e10:
        details["ill_conditioned_fit"] = True

    worst_c = 0.0
    for s in s_grid:
        R, s_used = _resolvent_retry(pencil, float(s), tries=6)
        bound = 1.0 + np.linalg.norm(R, 2) * nA
        powers = s_used ** -(np.arange(1, k + 1) + 1.0)
        for x, coeffs in zip(iv_k.basis.T, fits):
            remainder = R @ (pencil.E @ x) - x / s_used
            if k:
                remainder = remainder - powers @ coeffs
            c = float(np.linalg.norm(remainder) * s_used ** (k + 1) / bound)
            worst_c = max(worst_c, c)
    return IdentityReport(
        "expansion_e", tuple(s_grid), worst_c, worst_c <= EXPANSION_C_MAX, details
    )


def hat_solution(pencil: Pencil, u0, s):
    """(sE+A)^{-1} E u0: the Laplace transform of the distributional solution."""
    u0 = np.asarray(u0)
    return resolvent(pencil, s) @ (pencil.E @ u0)


def verify_solution_formula(pencil: Pencil, u0, points) -> IdentityReport:
    """hat u(s) = u0/s - (sE+A)^{-1} A u0 / s at every nonzero sample point.

    This is the shift identity applied to u0, so it holds for every initial
    value, consistent or not.
    """
    u0 = np.asarray(u0)
    worst = 0.0
    for s in points:
        if s == 0:
            raise ValueError("the solution formula is undefined at s = 0")
        R = resolvent(pencil, s)
        lhs = R @ (pencil.E @ u0)
        rhs = u0 / s - (R @ (pencil.A @ u0)) / s
        denom = max(np.linalg.norm(lhs), np.linalg.norm(rhs), _TINY)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / denom))
    return IdentityReport(
        "solution_formula", tuple(points), worst, worst <= SOLUTION_FORMULA_TOL
    )


def _simpson_weights(times):
    m = times.size - 1
    h = times[1] - times[0]
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def verify_transform_match(
    pencil: Pencil,
    chain: IvChain,
    u0,
    s_points,
    T: float,
    quad_steps: int = 1600,
) -> IdentityReport:
    """Compare the truncated Laplace integral of the classical solution
    against (sE+A)^{-1} E u0.

    The integral over [0, T] uses composite Simpson on classical-solution
    states; every s must satisfy s*T >= 30 so the truncation tail
    exp(-sT) ||u||_inf / s sits below the tolerance.  Halving the step count
    is rechecked; a change above 10% of the tolerance sets a
    quadrature_warning in the details.
    """
    s_points = [float(s) for s in s_points]
    if not s_points:
        raise ValueError("need at least one sample point")
    for s in s_points:
        if s <= 0 or s * T < MIN_ST:
            raise ValueError(f"require s > 0 and s*T >= {MIN_ST}, got s={s}, T={T}")
    ok, dist = is_consistent(pencil, chain, u0)
    if not ok:
        raise InconsistentInitialValueError(
            f"transform match needs a consistent u0 (distance {dist:.6e})",
            distance=dist,
        )

    steps = max(4, int(np.ceil(quad_steps / 4)) * 4)  # full and halved Simpson
    times = np.linspace(0.0, T, steps + 1)
    traj = classical_solution(pencil, chain, u0, times)
    weights = _simpson_weights(times)
    half = slice(None, None, 2)
    weights_half = _simpson_weights(times[half])

    worst = 0.0
    quadrature_warning = False
    for s in s_points:
        kernel = np.exp(-s * times)
        integral = (weights * kernel) @ traj.states
        integral_half = (weights_half * kernel[half]) @ traj.states[half]
        hat = hat_solution(pencil, u0, s)
        scale = max(float(np.linalg.norm(hat)), _TINY)
        worst = max(worst, float(np.linalg.norm(integral - hat)) / scale)
        if np.linalg.norm(integral - integral_half) > 0.1 * TRANSFORM_TOL * scale:
            quadrature_warning = True

    details = {"T": float(T), "quad_steps": steps}
    if quadrature_warning:
        details["quadrature_warning"] = True
    return IdentityReport(
        "transform_match", tuple(s_points), worst, worst <= TRANSFORM_TOL, details
    )
