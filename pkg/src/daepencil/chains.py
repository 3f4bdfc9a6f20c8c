"""The nested chain of initial-value spaces and the restricted-E isomorphism.

IV_0 is the whole space and IV_{k+1} = {x : Ax in E[IV_k]}.  The chain is
decreasing; its stabilization step is the third, subspace-algebraic route to
the pencil index, and IV_{stabilization+1} is exactly the set of initial
values admitting a classical solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeMismatchError, TruncatedChainError
from .pencils import IndexEstimate, Pencil
from .subspaces import RankTolerance, Subspace, equal, full_space, image, preimage

__all__ = [
    "IvChain",
    "IsoReport",
    "compute_chain",
    "index_by_chain",
    "consistent_space",
    "check_restricted_iso",
]


@dataclass(frozen=True)
class IvChain:
    """The computed spaces IV_0, IV_1, ..., one past the stabilization witness.

    stabilization is the smallest k with IV_{k+1} = IV_{k+2}, or None when
    the iteration cap was hit first (then truncated is True).  In finite
    dimensions the strictly decreasing dimensions force stabilization within
    n + 1 steps, so truncation only signals a numerical pathology.
    """

    spaces: tuple
    stabilization: int | None
    truncated: bool

    @property
    def dims(self) -> tuple:
        return tuple(s.dim for s in self.spaces)

    @property
    def tol(self) -> RankTolerance:
        return self.spaces[0].tol


def compute_chain(pencil: Pencil, tol: RankTolerance = RankTolerance(), max_k=None) -> IvChain:
    """Iterate IV_{k+1} = preimage(A, image(E, IV_k)) until it stabilizes.

    Stops at the first k with IV_{k+1} = IV_{k+2}, recording one extra space
    as the witness; hitting max_k (default n + 2) first is reported through
    the truncated flag rather than raised.
    """
    n = pencil.n
    if max_k is None:
        max_k = n + 2
    spaces = [full_space(n, tol)]
    while True:
        spaces.append(preimage(pencil.A, image(pencil.E, spaces[-1])))
        j = len(spaces) - 1  # the space just computed is IV_j
        if j >= 2 and equal(spaces[-1], spaces[-2]):
            return IvChain(tuple(spaces), stabilization=j - 2, truncated=False)
        if j >= max_k:
            return IvChain(tuple(spaces), stabilization=None, truncated=True)


def index_by_chain(chain: IvChain) -> IndexEstimate:
    """The stabilization step as an index estimate.

    Agreement with the growth and nilpotency routes is exactly the
    finite-dimensional index question; callers compare the three and treat
    disagreement as a reportable failure, not as something to reconcile here.
    """
    if chain.truncated:
        raise TruncatedChainError("chain hit max_k before stabilizing")
    return IndexEstimate(
        k=chain.stabilization,
        method="ivchain",
        confident=True,
        diagnostics={"dims": list(chain.dims)},
    )


def consistent_space(pencil: Pencil, chain: IvChain) -> Subspace:
    """IV_{k+1} at the stabilization step k: the consistent initial values."""
    if chain.truncated:
        raise TruncatedChainError("chain hit max_k before stabilizing")
    space = chain.spaces[chain.stabilization + 1]
    if space.ambient_dim != pencil.n:
        raise ShapeMismatchError("chain does not belong to this pencil")
    return space


@dataclass(frozen=True)
class IsoReport:
    """Diagnostics for E restricted to IV_{k+1} -> E[IV_k].

    sigma_min/sigma_max are the extreme singular values of the restricted
    matrix expressed in the orthonormal bases of domain and codomain (None
    when both are zero-dimensional, where the map is vacuously bijective).
    bijective requires equal dimensions and sigma_min above the rank cutoff.
    """

    k: int
    dim_domain: int
    dim_codomain: int
    sigma_min: float | None
    sigma_max: float | None
    bijective: bool


def check_restricted_iso(pencil: Pencil, chain: IvChain) -> IsoReport:
    """Form the matrix of E from IV_{k+1} into E[IV_k] and test bijectivity."""
    if chain.truncated:
        raise TruncatedChainError("chain hit max_k before stabilizing")
    k = chain.stabilization
    domain = chain.spaces[k + 1]
    codomain = image(pencil.E, chain.spaces[k])
    if domain.dim == 0 and codomain.dim == 0:
        return IsoReport(k, 0, 0, None, None, True)
    restricted = codomain.basis.conj().T @ (pencil.E @ domain.basis)
    if restricted.size == 0:
        # one side trivial, the other not: dimensions already disagree
        return IsoReport(k, domain.dim, codomain.dim, None, None, False)
    svals = np.linalg.svd(restricted, compute_uv=False)
    # bijectivity floor measured against ||E||, not against the restricted
    # matrix itself, so a map that vanishes on IV_{k+1} cannot look invertible
    cutoff = chain.tol.relative * np.linalg.norm(pencil.E, 2) * max(restricted.shape)
    bijective = domain.dim == codomain.dim and float(svals[-1]) > cutoff
    return IsoReport(
        k=k,
        dim_domain=domain.dim,
        dim_codomain=codomain.dim,
        sigma_min=float(svals[-1]),
        sigma_max=float(svals[0]),
        bijective=bool(bijective),
    )
