"""Linear matrix pencils (E, A): validation, regularity, resolvents, index.

The pencil s -> sE + A is regular when det(sE + A) is not identically zero.
Two independent index estimators live here: resolvent-growth sampling on the
positive real axis and the kernel-chain (nilpotency) route through a single
resolvent of the pencil.  A third route via the IV chain is in `chains`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    NonFiniteEntriesError,
    NotRegularError,
    ShapeMismatchError,
    SingularMatrixError,
)
from .rng import make_rng
from .subspaces import RankTolerance, preimage, zero_space

__all__ = [
    "Pencil",
    "RegularityCertificate",
    "IndexEstimate",
    "new_pencil",
    "certify_regularity",
    "resolvent",
    "index_by_growth",
    "index_by_nilpotency",
]

# |det| at or below this counts as an exact zero of the degree-<=n polynomial
DET_ZERO = 1e-300

# fractional parts of the fitted growth slope in this band are ambiguous
SLOPE_AMBIGUOUS = (0.35, 0.65)

# rms residual of the log-log fit above which the power law is not trusted;
# saturated or pole-polluted samples show residuals well above this
SLOPE_RMS_MAX = 0.1


@dataclass(frozen=True)
class Pencil:
    """Validated pair of same-size square matrices over a common scalar field."""

    E: np.ndarray
    A: np.ndarray

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.E)

    def __repr__(self):
        kind = "complex" if self.is_complex else "real"
        return f"Pencil(n={self.n}, {kind})"


def new_pencil(E, A) -> Pencil:
    """Validate and freeze a pencil.

    Both matrices must be square, of equal size, with finite entries.  Real
    input stays real; complex input promotes both matrices to complex.
    """
    E = np.atleast_2d(np.asarray(E))
    A = np.atleast_2d(np.asarray(A))
    for name, M in (("E", E), ("A", A)):
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ShapeMismatchError(f"{name} must be square, got shape {M.shape}")
    if E.shape != A.shape:
        raise ShapeMismatchError(f"size mismatch: E is {E.shape}, A is {A.shape}")
    dtype = complex if (np.iscomplexobj(E) or np.iscomplexobj(A)) else float
    E = E.astype(dtype)
    A = A.astype(dtype)
    for name, M in (("E", E), ("A", A)):
        if not np.all(np.isfinite(M)):
            raise NonFiniteEntriesError(f"{name} contains non-finite entries")
    E.setflags(write=False)
    A.setflags(write=False)
    return Pencil(E, A)


@dataclass(frozen=True)
class RegularityCertificate:
    """Outcome of sampling det(sE + A) at n+1 distinct points.

    Since s -> det(sE + A) is a polynomial of degree at most n, it vanishes
    identically iff it vanishes at all n+1 points; `regular` is therefore an
    exact decision up to the DET_ZERO floor.
    """

    regular: bool
    sample_points: tuple
    determinant_values: tuple
    witness: complex | None


def certify_regularity(pencil: Pencil, seed: int = 0) -> RegularityCertificate:
    """Sample det(sE + A) on a circle of radius 1 + ||E||_F + ||A||_F.

    The n+1 angles are equally spaced with a seed-dependent rotation, which
    keeps the verdict seed-independent while avoiding any fixed unlucky
    alignment of sample points with determinant roots.

    The zero test is the absolute floor DET_ZERO, so it recognizes pencils
    whose determinant collapses to an exact floating-point zero (structural
    zero rows/columns and the like).  A pencil that is singular only
    analytically can evaluate to roundoff-level determinants and be certified
    regular; that is consistent with treating the stored floats as the pencil.
    """
    n = pencil.n
    radius = 1.0 + float(np.linalg.norm(pencil.E)) + float(np.linalg.norm(pencil.A))
    phase = make_rng(seed).uniform(0.0, 2.0 * np.pi)
    angles = phase + 2.0 * np.pi * np.arange(n + 1) / (n + 1)
    points = radius * np.exp(1j * angles)
    values = [complex(np.linalg.det(s * pencil.E + pencil.A)) for s in points]
    witness = None
    for s, d in zip(points, values):
        if np.isnan(d):
            continue
        if abs(d) > DET_ZERO:
            witness = complex(s)
            break
    return RegularityCertificate(
        regular=witness is not None,
        sample_points=tuple(map(complex, points)),
        determinant_values=tuple(values),
        witness=witness,
    )


def resolvent(pencil: Pencil, s, return_cond: bool = False):
    """(sE + A)^{-1} by a pivoted dense solve.

    Raises SingularMatrixError when sE + A is numerically singular, i.e.
    s lies outside the resolvent set.  With return_cond=True also returns
    the 2-norm condition number of sE + A as a solve-quality estimate.
    """
    s = complex(s)
    if s.imag == 0.0 and not pencil.is_complex:
        s = s.real
    M = s * pencil.E + pencil.A
    try:
        X = np.linalg.solve(M, np.eye(pencil.n, dtype=M.dtype))
    except np.linalg.LinAlgError:
        raise SingularMatrixError(f"sE + A is singular at s = {s}") from None
    if not np.all(np.isfinite(X)):
        raise SingularMatrixError(f"sE + A is numerically singular at s = {s}")
    if return_cond:
        return X, float(np.linalg.cond(M))
    return X


@dataclass(frozen=True)
class IndexEstimate:
    """An estimate of the resolvent-growth index by one of three routes."""

    k: int
    method: str  # "growth" | "ivchain" | "nilpotency"
    confident: bool
    diagnostics: dict = field(default_factory=dict)


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def _resolvent_norm_retry(pencil, s, tries=6):
    """Spectral norm of the resolvent, nudging s off singular points."""
    for _ in range(tries):
        try:
            return float(np.linalg.norm(resolvent(pencil, s), 2)), s
        except SingularMatrixError:
            s = s * 1.01
    raise SingularMatrixError(
        f"resolvent failed near s = {s} after {tries - 1} perturbations"
    )


def index_by_growth(
    pencil: Pencil,
    s_min: float = 1e2,
    s_max: float = 1e7,
    samples: int = 24,
) -> IndexEstimate:
    """Index from the slope of log ||(sE+A)^{-1}|| against log s.

    Samples a geometric grid on the positive real axis and fits a least
    squares line over the upper half; the index is the slope rounded half
    away from zero and clamped at zero.  The estimate is flagged as not
    confident when the slope's fractional part is ambiguous or the fit
    residual is large (the latter happens when floating-point saturation of
    the stored pencil caps the observable growth of high-index problems).
    """
    if samples < 4:
        raise ValueError("need at least 4 samples for a slope fit")
    if not (0 < s_min < s_max):
        raise ValueError("require 0 < s_min < s_max")
    if not certify_regularity(pencil).regular:
        raise NotRegularError("growth sampling needs a regular pencil")

    grid = np.geomspace(s_min, s_max, samples)
    norms = np.empty(samples)
    used = np.empty(samples)
    for j, s in enumerate(grid):
        norms[j], used[j] = _resolvent_norm_retry(pencil, float(s))

    upper = slice(samples // 2, None)
    logs = np.log(used[upper])
    logn = np.log(norms[upper])
    (slope, intercept), res = np.polyfit(logs, logn, 1, full=True)[:2]
    rms = float(np.sqrt(res[0] / logs.size)) if res.size else 0.0

    k = max(_round_half_away(float(slope)), 0)
    frac = float(slope - math.floor(slope))
    confident = not (SLOPE_AMBIGUOUS[0] <= frac <= SLOPE_AMBIGUOUS[1])
    confident = confident and rms <= SLOPE_RMS_MAX
    return IndexEstimate(
        k=k,
        method="growth",
        confident=confident,
        diagnostics={
            "slope": float(slope),
            "intercept": float(intercept),
            "fit_residual": rms,
            "points_fitted": int(logs.size),
            "s_range": (float(used[0]), float(used[-1])),
        },
    )


def index_by_nilpotency(pencil: Pencil, seed: int = 0) -> IndexEstimate:
    """Index from the kernel chain of F = (s0 E + A)^{-1} E.

    With s0 a random shift in [1, 2] (retried on singular hits), the chain
    ker F^0 = {0} <= ker F <= ker F^2 <= ... stabilizes at step nu, the
    nilpotency degree of the eigenvalue-zero part of F.  The nilpotent part
    contributes resolvent growth |s|^(nu-1) while the invertible part decays,
    so the growth index is max(nu - 1, 0).  The chain is computed by iterated
    preimages rather than explicit powers of F, which keeps every rank
    decision at the scale of F itself.
    """
    if not certify_regularity(pencil, seed).regular:
        raise NotRegularError("the kernel-chain oracle needs a regular pencil")
    rng = make_rng(seed)
    F = None
    for _ in range(10):
        s0 = float(rng.uniform(1.0, 2.0))
        try:
            F = resolvent(pencil, s0) @ pencil.E
            break
        except SingularMatrixError:
            continue
    if F is None:
        raise SingularMatrixError("no invertible shift found in [1, 2] after 10 tries")

    tol = RankTolerance()
    space = zero_space(pencil.n, tol)
    dims = [0]
    nu = None
    for j in range(1, pencil.n + 2):
        space = preimage(F, space)
        dims.append(space.dim)
        if dims[-1] == dims[-2]:
            nu = j - 1
            break
    if nu is None:  # cannot happen: dims strictly increase until they stop
        nu = pencil.n + 1
    return IndexEstimate(
        k=max(nu - 1, 0),
        method="nilpotency",
        confident=True,
        diagnostics={"kernel_dims": dims, "shift": s0, "nilpotency": nu},
    )
