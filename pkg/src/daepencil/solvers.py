"""Classical solutions of Eu' + Au = 0 on the consistent space.

The main route restricts E to an isomorphism IV_{k+1} -> E[IV_k], forms the
reduced generator M representing E~^{-1}A there, and evolves coordinates with
the matrix exponential.  An implicit Euler stepper provides a first-order
reference, and a spectral-splitting oracle built from a single resolvent
gives an independent cross-check of uniqueness and consistency.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .chains import IvChain, check_restricted_iso, consistent_space
from .exceptions import (
    ConditioningWarning,
    InconsistentInitialValueError,
    IsomorphismError,
    NotRegularError,
    ShapeMismatchError,
    SingularMatrixError,
)
from .expm import expm
from .pencils import Pencil, certify_regularity, resolvent
from .rng import make_rng
from .subspaces import (
    RankTolerance,
    distance,
    equal,
    full_space,
    image,
    preimage,
    project,
    zero_space,
)

__all__ = [
    "ReducedGenerator",
    "Trajectory",
    "FittingSplit",
    "is_consistent",
    "nearest_consistent",
    "reduced_generator",
    "classical_solution",
    "implicit_euler",
    "fitting_splitting",
    "decomposition_oracle",
]

# relative distance from the consistent space below which u0 counts as consistent
CONSISTENT_RTOL = 1e-9

# generator residual cap: ||E lift(M e_j) - A b_j|| <= this * (||E|| + ||A||)
GENERATOR_RTOL = 1e-8


@dataclass(frozen=True)
class ReducedGenerator:
    """The matrix M of E~^{-1}A on IV_{k+1} in an orthonormal basis.

    For every basis vector b_j the lifted image satisfies
    E (basis @ M[:, j]) = A b_j up to GENERATOR_RTOL * (||E|| + ||A||);
    max_residual records the worst observed defect.
    """

    k: int
    basis: np.ndarray  # (n, d), orthonormal columns spanning IV_{k+1}
    M: np.ndarray  # (d, d)
    max_residual: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class Trajectory:
    """A computed solution: time grid, states, and equation residuals.

    derivative_residuals[i] is ||E u'(t_i) + A u(t_i) - f(t_i)|| with u'
    taken analytically for the exponential routes and as a difference
    quotient of the computed states for the stepper.
    """

    times: np.ndarray
    states: np.ndarray  # (len(times), n)
    derivative_residuals: np.ndarray
    method: str  # "exponential" | "implicit_euler" | "decomposition_oracle"


def _check_u0(pencil, u0):
    u0 = np.asarray(u0, dtype=complex if pencil.is_complex else float)
    if u0.shape != (pencil.n,):
        raise ShapeMismatchError(
            f"initial value shape {u0.shape} does not match pencil size {pencil.n}"
        )
    return u0


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-d grid")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be nonnegative and strictly increasing")
    return times


def is_consistent(pencil: Pencil, chain: IvChain, u0):
    """Whether u0 admits a classical solution, with its distance to IV_{k+1}."""
    u0 = _check_u0(pencil, u0)
    dist = distance(consistent_space(pencil, chain), u0)
    return dist <= CONSISTENT_RTOL * max(1.0, float(np.linalg.norm(u0))), dist


def nearest_consistent(pencil: Pencil, chain: IvChain, u0):
    """Orthogonal projection of u0 onto the consistent space."""
    return project(consistent_space(pencil, chain), _check_u0(pencil, u0))


def reduced_generator(pencil: Pencil, chain: IvChain) -> ReducedGenerator:
    """Solve E y = A b_j inside IV_{k+1} for every basis vector b_j.

    The solve happens in the orthonormal bases of IV_{k+1} and E[IV_k]
    (never through a pseudo-inverse of E on the whole space, which would be
    wrong off the subspace).  Raises IsomorphismError when the restricted map
    is not bijective or the lifted solutions fail the residual cap.
    """
    iso = check_restricted_iso(pencil, chain)
    if not iso.bijective:
        raise IsomorphismError(
            f"restricted E is not bijective (domain dim {iso.dim_domain}, "
            f"codomain dim {iso.dim_codomain}, sigma_min {iso.sigma_min})"
        )
    k = chain.stabilization
    B = chain.spaces[k + 1].basis
    d = B.shape[1]
    if d == 0:
        return ReducedGenerator(k, B, np.zeros((0, 0)), 0.0)
    C = image(pencil.E, chain.spaces[k]).basis
    restricted = C.conj().T @ (pencil.E @ B)
    rhs = C.conj().T @ (pencil.A @ B)
    M = np.linalg.lstsq(restricted, rhs, rcond=None)[0]

    defect = pencil.E @ (B @ M) - pencil.A @ B
    scale = float(np.linalg.norm(pencil.E, 2) + np.linalg.norm(pencil.A, 2))
    worst = float(max(np.linalg.norm(defect[:, j]) for j in range(d)))
    if worst > GENERATOR_RTOL * scale:
        raise IsomorphismError(
            f"reduced generator residual {worst:.3e} exceeds "
            f"{GENERATOR_RTOL:.0e} * (||E|| + ||A||) = {GENERATOR_RTOL * scale:.3e}"
        )
    return ReducedGenerator(k, B, M, worst)


def _is_uniform(times):
    if times.size < 3:
        return False
    steps = np.diff(times)
    h = steps[0]
    return h > 0 and float(np.max(np.abs(steps - h))) <= 1e-12 * h


def _evolve(M, c0, times):
    """Coordinates exp(-t_i M) c0 for every grid point.

    Uniform grids advance by one precomputed step matrix; general grids get
    a fresh exponential per point.
    """
    if M.shape[0] == 0:
        return np.zeros((times.size, 0))
    cols = np.atleast_2d(c0.T).T
    out = np.empty((times.size, *cols.shape), dtype=np.result_type(M, cols))
    if _is_uniform(times):
        step = expm(-float(np.diff(times)[0]) * M)
        c = cols if times[0] == 0.0 else expm(-times[0] * M) @ cols
        out[0] = c
        for i in range(1, times.size):
            c = step @ c
            out[i] = c
    else:
        for i, t in enumerate(times):
            out[i] = (expm(-t * M) @ cols) if t != 0.0 else cols
    return out.reshape((times.size, *c0.shape))


def classical_solution(pencil: Pencil, chain: IvChain, u0, times) -> Trajectory:
    """The unique continuously differentiable solution for consistent u0.

    Coordinates in the IV_{k+1} basis evolve by exp(-tM); states and the
    analytic derivative are lifted back to the ambient space, and the
    residual ||E u'(t) + A u(t)|| is recorded per grid point.
    """
    u0 = _check_u0(pencil, u0)
    times = _check_times(times)
    ok, dist = is_consistent(pencil, chain, u0)
    if not ok:
        raise InconsistentInitialValueError(
            f"u0 is {dist:.6e} away from the consistent space; "
            "no classical solution exists",
            distance=dist,
            nearest=nearest_consistent(pencil, chain, u0),
        )
    gen = reduced_generator(pencil, chain)
    B, M = gen.basis, gen.M
    c0 = B.conj().T @ u0
    coords = _evolve(M, c0, times)
    states = coords @ B.T
    # E u' + A u = (A B - E B M) c per grid point
    defect_map = pencil.A @ B - pencil.E @ (B @ M)
    residuals = np.linalg.norm(coords @ defect_map.T, axis=1)
    return Trajectory(times, states, residuals.astype(float), "exponential")


def _difference_quotient_residuals(pencil, times, states, forcing_values):
    """||E q_i + A u_i - f_i|| with q the gradient of the computed states."""
    if times.size == 1:
        q = np.zeros_like(states)
    else:
        q = np.gradient(states, times, axis=0)
    r = q @ pencil.E.T + states @ pencil.A.T - forcing_values
    return np.linalg.norm(r, axis=1).astype(float)


def implicit_euler(pencil: Pencil, u0, h: float, T: float, forcing=None) -> Trajectory:
    """Backward Euler for E u' + A u = f with constant step h.

    Each step solves (E/h + A) u_{m+1} = (E/h) u_m + f(t_{m+1}), a single
    resolvent application at s = 1/h.  A singular step matrix is retried once
    with h * 1.01 (reported as a warning) before giving up.
    """
    u0 = _check_u0(pencil, u0)
    if h <= 0 or T <= 0:
        raise ValueError("require h > 0 and T > 0")

    step_matrix = None
    for attempt in range(2):
        S = pencil.E / h + pencil.A
        try:
            # W advances the homogeneous part; reuse the factorization via solve
            W = np.linalg.solve(S, pencil.E / h)
            step_matrix = S
            break
        except np.linalg.LinAlgError:
            if attempt == 0:
                warnings.warn(
                    f"step matrix singular at h={h:.6g}; retrying with h*1.01",
                    ConditioningWarning,
                    stacklevel=2,
                )
                h *= 1.01
    if step_matrix is None:
        raise SingularMatrixError(f"E/h + A is singular at h = {h}")

    steps = max(1, int(round(T / h)))
    times = np.arange(steps + 1) * h
    n = pencil.n
    dtype = np.result_type(u0, W)
    states = np.empty((steps + 1, n), dtype=dtype)
    states[0] = u0

    if forcing is None:
        forcing_values = np.zeros((steps + 1, n), dtype=dtype)
        driven = forcing_values
    else:
        forcing_values = np.array([np.asarray(forcing(t), dtype=dtype) for t in times])
        if forcing_values.shape != (steps + 1, n):
            raise ShapeMismatchError("forcing must return vectors of pencil size")
        driven = np.linalg.solve(step_matrix, forcing_values.T).T

    u = u0
    for m in range(steps):
        u = W @ u + driven[m + 1]
        states[m + 1] = u

    residuals = _difference_quotient_residuals(pencil, times, states, forcing_values)
    return Trajectory(times, states, residuals, "implicit_euler")


@dataclass(frozen=True)
class FittingSplit:
    """Decomposition H = range(F^n) (+) ker(F^n) for F = (s0 E + A)^{-1} E.

    range_basis and kernel_basis are orthonormal within each summand but the
    splitting itself is oblique; basis_sigma_min (smallest singular value of
    the combined basis) measures how oblique.  generator is F_r^{-1} G_r on
    the range part (G = I - s0 F), so solutions there are exp(-t generator)
    applied to the range component.
    """

    shift: float
    range_basis: np.ndarray
    kernel_basis: np.ndarray
    generator: np.ndarray
    basis_sigma_min: float

    def components(self, u0):
        """Oblique components (range part, kernel part) of u0."""
        V = np.hstack([self.range_basis, self.kernel_basis])
        c = np.linalg.solve(V, u0)
        r = self.range_basis.shape[1]
        return self.range_basis @ c[:r], self.kernel_basis @ c[r:], c[:r]


def fitting_splitting(pencil: Pencil, seed: int = 0) -> FittingSplit:
    """Split the space along the eigenvalue-zero structure of F.

    The two invariant subspaces are found by iterating images (for the range
    part) and preimages (for the kernel part) of F until they stabilize; no
    canonical-form transformation is involved.  Warns when the spectral gap
    between the zero cluster and the rest, or the conditioning of the
    combined basis, is below 1e-8.
    """
    if not certify_regularity(pencil, seed).regular:
        raise NotRegularError("the splitting oracle needs a regular pencil")
    rng = make_rng(seed)
    F = None
    for _ in range(10):
        s0 = float(rng.uniform(1.0, 2.0))
        try:
            R = resolvent(pencil, s0)
            F = R @ pencil.E
            break
        except SingularMatrixError:
            continue
    if F is None:
        raise SingularMatrixError("no invertible shift found in [1, 2] after 10 tries")

    tol = RankTolerance()
    n = pencil.n
    ran = full_space(n, tol)
    while True:
        nxt = image(F, ran)
        if equal(nxt, ran):
            break
        ran = nxt
    ker = zero_space(n, tol)
    while True:
        nxt = preimage(F, ker)
        if equal(nxt, ker):
            break
        ker = nxt

    if ran.dim + ker.dim != n:
        raise SingularMatrixError(
            f"splitting failed: range dim {ran.dim} + kernel dim {ker.dim} != {n}"
        )

    mags = np.sort(np.abs(np.linalg.eigvals(F)))
    if 0 < ker.dim < n:
        gap = float(mags[ker.dim] - mags[ker.dim - 1])
        if gap < 1e-8:
            warnings.warn(
                f"spectral gap {gap:.3e} between the zero cluster and the rest "
                "is below 1e-8; the splitting may be ill-conditioned",
                ConditioningWarning,
                stacklevel=2,
            )
    V = np.hstack([ran.basis, ker.basis])
    smin = float(np.linalg.svd(V, compute_uv=False)[-1]) if n else 0.0
    if smin < 1e-8:
        warnings.warn(
            f"combined splitting basis has sigma_min {smin:.3e} < 1e-8",
            ConditioningWarning,
            stacklevel=2,
        )

    if ran.dim:
        Br = ran.basis
        Fr = Br.conj().T @ (F @ Br)
        Gr = Br.conj().T @ ((np.eye(n) - s0 * F) @ Br)
        try:
            generator = np.linalg.solve(Fr, Gr)
        except np.linalg.LinAlgError:
            raise SingularMatrixError("F is singular on its stabilized range") from None
    else:
        generator = np.zeros((0, 0))
    return FittingSplit(s0, ran.basis, ker.basis, generator, smin)


def decomposition_oracle(pencil: Pencil, u0, times, seed: int = 0) -> Trajectory:
    """Independent solution via the splitting H = range(F^n) (+) ker(F^n).

    On the range part F is invertible and Eu' + Au = 0 reduces to the plain
    ODE u' = -F_r^{-1} G_r u; on the kernel part the only classical solution
    is zero, so a nonzero kernel component of u0 is flagged as inconsistent.
    """
    u0 = _check_u0(pencil, u0)
    times = _check_times(times)
    split = fitting_splitting(pencil, seed)
    range_part, kernel_part, c_r = split.components(u0)
    knorm = float(np.linalg.norm(kernel_part))
    # oblique components amplify input noise by up to 1/sigma_min(V), so the
    # consistency threshold is widened accordingly (capped to keep genuine
    # O(1) kernel components detectable)
    amplification = min(1e3, 1.0 / max(split.basis_sigma_min, 1e-300))
    threshold = CONSISTENT_RTOL * max(1.0, float(np.linalg.norm(u0))) * max(1.0, amplification)
    if knorm > threshold:
        raise InconsistentInitialValueError(
            f"u0 has a kernel-part component of norm {knorm:.6e}; "
            "only its range part can evolve classically",
            distance=knorm,
            nearest=range_part,
        )
    Br = split.range_basis
    coords = _evolve(split.generator, c_r, times)
    states = coords @ Br.T
    defect_map = pencil.A @ Br - pencil.E @ (Br @ split.generator)
    residuals = np.linalg.norm(coords @ defect_map.T, axis=1)
    return Trajectory(times, states, residuals.astype(float), "decomposition_oracle")
