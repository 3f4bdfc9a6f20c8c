"""The property suite behind `daepencil verify`.

Runs every invariant the package claims - subspace laws, resolvent
identities, chain monotonicity and stabilization, three-way index agreement,
solver residuals, oracle agreement, and the Laplace transform match - over a
list of generated fixtures, and reports one deterministic pass/fail row per
law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import IDENTITY_POINTS
from .chains import check_restricted_iso, compute_chain, consistent_space, index_by_chain
from .exceptions import InconsistentInitialValueError
from .fixtures import FixtureSpec, generate
from .laplace import (
    expansion_grid,
    verify_commutation,
    verify_expansion,
    verify_shift,
    verify_solution_formula,
    verify_transform_match,
)
from .pencils import certify_regularity, index_by_growth, index_by_nilpotency, resolvent
from .rng import make_rng
from .solvers import classical_solution, decomposition_oracle, reduced_generator
from .subspaces import (
    RankTolerance,
    contains,
    distance,
    equal,
    image,
    kernel,
    preimage,
    project,
    span,
)

__all__ = ["CheckRow", "SuiteResult", "run_suite", "random_specs"]

SOLVE_GRID = np.linspace(0.0, 2.0, 9)


@dataclass(frozen=True)
class CheckRow:
    name: str
    checked: int
    failures: int
    worst: float | None
    passed: bool
    note: str = ""


@dataclass
class SuiteResult:
    rows: list
    fixtures: int
    passed: bool

    def table(self) -> str:
        lines = [f"{'check':28s} {'checked':>8s} {'failed':>7s} {'worst':>12s}  status"]
        for row in self.rows:
            worst = f"{row.worst:.3e}" if row.worst is not None else "-"
            status = "PASS" if row.passed else "FAIL"
            line = f"{row.name:28s} {row.checked:8d} {row.failures:7d} {worst:>12s}  {status}"
            if row.note:
                line += f"  ({row.note})"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} on {self.fixtures} fixtures")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "fixtures": self.fixtures,
            "passed": self.passed,
            "rows": [
                {
                    "name": r.name,
                    "checked": r.checked,
                    "failures": r.failures,
                    "worst": r.worst,
                    "passed": r.passed,
                    "note": r.note,
                }
                for r in self.rows
            ],
        }


@dataclass
class _Analyzed:
    spec: FixtureSpec
    pencil: object
    truth: object
    chain: object
    growth: object
    nilpotency: object


class _Row:
    """Accumulates (metric, threshold) observations for one table row."""

    def __init__(self, name, note=""):
        self.name = name
        self.note = note
        self.checked = 0
        self.failures = 0
        self.worst = None

    def add(self, metric, ok):
        self.checked += 1
        if metric is not None:
            m = float(metric)
            self.worst = m if self.worst is None else max(self.worst, m)
        if not ok:
            self.failures += 1

    def done(self):
        return CheckRow(
            self.name, self.checked, self.failures, self.worst, self.failures == 0, self.note
        )


def _subspace_laws_row(seed):
    rng = make_rng(seed)
    row = _Row("subspace_laws")
    eps = np.finfo(float).eps
    for _ in range(25):
        n = int(rng.integers(2, 9))
        M = rng.standard_normal((n, n))
        if rng.uniform() < 0.4:  # make some maps singular
            M[:, : max(1, n // 3)] = 0.0
        S = span(list(rng.standard_normal((max(1, n // 2), n))))
        v = rng.standard_normal(n)

        gram_err = 0.0
        for T in (S, image(M, S), preimage(M, S), kernel(M)):
            d = T.dim
            if d:
                gram_err = max(
                    gram_err,
                    float(np.max(np.abs(T.basis.conj().T @ T.basis - np.eye(d)))),
                )
        row.add(gram_err, gram_err <= 10 * eps * n)

        same = equal(image(np.eye(n), S), S)
        respan = equal(span(list(S.basis.T)) if S.dim else S, S)
        row.add(None, same and respan)

        p1 = project(S, v)
        p2 = project(S, p1)
        shrink = np.linalg.norm(p1) <= np.linalg.norm(v) * (1 + 1e-12)
        idem = np.linalg.norm(p2 - p1) <= 1e-12 * max(1.0, np.linalg.norm(p1))
        row.add(None, shrink and idem)

        fwd = contains(S, image(M, preimage(M, S)))
        bwd = contains(preimage(M, image(M, S)), S)
        row.add(None, fwd and bwd)
    return row.done()


def _resolvent_identity_row(analyzed, seed):
    rng = make_rng(seed + 1)
    row = _Row("resolvent_identity")
    for item in analyzed:
        p = item.pencil
        nE = np.linalg.norm(p.E, 2)
        for _ in range(3):
            s, t = rng.uniform(0.5, 50.0, size=2)
            Rs, Rt = resolvent(p, s), resolvent(p, t)
            lhs = Rs - Rt
            rhs = (t - s) * (Rs @ (p.E @ Rt))
            # the product scale keeps cancellation in Rs - Rt for nearby
            # points from inflating the relative error
            scale = max(
                np.linalg.norm(lhs, 2),
                np.linalg.norm(rhs, 2),
                abs(t - s) * np.linalg.norm(Rs, 2) * nE * np.linalg.norm(Rt, 2),
                1e-300,
            )
            err = float(np.linalg.norm(lhs - rhs, 2) / scale)
            row.add(err, err <= 1e-9)
    return row.done()


def _identity_rows(analyzed):
    rows = {name: _Row(name) for name in ("resolvent_commutation", "resolvent_shift", "solution_formula")}
    for item in analyzed:
        rep = verify_commutation(item.pencil, IDENTITY_POINTS)
        rows["resolvent_commutation"].add(rep.max_relative_error, rep.passed)
        rep = verify_shift(item.pencil, IDENTITY_POINTS)
        rows["resolvent_shift"].add(rep.max_relative_error, rep.passed)
        rng = make_rng(item.spec.seed + 2)
        u0 = rng.standard_normal(item.pencil.n)
        u0 /= np.linalg.norm(u0)
        rep = verify_solution_formula(item.pencil, u0, IDENTITY_POINTS)
        rows["solution_formula"].add(rep.max_relative_error, rep.passed)
    return [rows[k].done() for k in ("resolvent_commutation", "resolvent_shift", "solution_formula")]


def _chain_descent_row(analyzed):
    """(sE+A)^{-1} E maps IV_k into IV_{k+1}.

    The mapped vector carries roundoff of size ~eps * ||R(s)|| * ||E||, so
    the 1e-8 relative membership bound is only decidable while that noise
    floor sits below it; undecidable (s, x) pairs are skipped and counted.
    """
    row = _Row("chain_descent")
    skipped = 0
    eps = np.finfo(float).eps
    for item in analyzed:
        p, chain = item.pencil, item.chain
        nE = np.linalg.norm(p.E, 2)
        for s in (3.0, 10.0, 100.0):
            R = resolvent(p, s)
            noise = 10.0 * eps * np.linalg.norm(R, 2) * nE
            for k in range(chain.stabilization + 1):
                ivk, ivk1 = chain.spaces[k], chain.spaces[k + 1]
                if ivk.dim == 0:
                    continue
                mapped = R @ (p.E @ ivk.basis)
                for col in mapped.T:
                    norm = np.linalg.norm(col)
                    if 1e-8 * norm <= noise:
                        skipped += 1
                        continue
                    ratio = distance(ivk1, col) / norm
                    row.add(ratio, ratio <= 1e-8)
    if skipped:
        row.note = f"{skipped} skipped below the float64 noise floor"
    return row.done()


def _expansion_row(analyzed):
    """Bounded-remainder expansion at k = stabilization.

    The sampled check is only meaningful while s^(k+2) stays below ~1/eps;
    fixtures whose index pushes the cap under the nominal grid floor of 1e3 are
    skipped and counted in the note.
    """
    row = _Row("resolvent_expansion")
    skipped = 0
    for item in analyzed:
        k = item.chain.stabilization
        grid = expansion_grid(k)
        if grid is None:
            skipped += 1
            continue
        rep = verify_expansion(item.pencil, item.chain, k, grid)
        row.add(rep.max_relative_error, rep.passed)
    if skipped:
        row.note = f"{skipped} skipped: k too high for float64 at s >= 1e3"
    return row.done()


def _chain_rows(analyzed):
    mono = _Row("chain_monotone")
    stab = _Row("chain_stabilization")
    agree = _Row("index_agreement")
    iso_row = _Row("restricted_iso")
    for item in analyzed:
        chain = item.chain
        ok = not chain.truncated and all(
            contains(chain.spaces[j], chain.spaces[j + 1])
            for j in range(len(chain.spaces) - 1)
        )
        mono.add(None, ok)

        k_nil = item.nilpotency.k
        witness = (
            k_nil == chain.stabilization
            and len(chain.spaces) > k_nil + 2
            and equal(chain.spaces[k_nil + 1], chain.spaces[k_nil + 2])
        )
        stab.add(None, witness)

        k_chain = index_by_chain(chain).k
        ok = k_chain == k_nil == item.truth.growth_index
        if item.growth.confident:
            ok = ok and item.growth.k == item.truth.growth_index
        agree.add(None, ok)

        iso = check_restricted_iso(item.pencil, chain)
        iso_row.add(iso.sigma_min, iso.bijective)
    return [mono.done(), stab.done(), agree.done(), iso_row.done()]


def _solver_rows(analyzed):
    residual = _Row("classical_residual")
    initial = _Row("initial_value")
    invariance = _Row("state_invariance")
    oracle = _Row("oracle_agreement")
    detect = _Row("inconsistency_detection")
    transform = _Row("transform_match")

    for item in analyzed:
        p, chain, truth = item.pencil, item.chain, item.truth
        cons = consistent_space(p, chain)
        scale = np.linalg.norm(p.E, 2) + np.linalg.norm(p.A, 2)

        if cons.dim:
            gen = reduced_generator(p, chain)
            for u0 in cons.basis.T.real:
                try:
                    traj = classical_solution(p, chain, u0, SOLVE_GRID)
                except InconsistentInitialValueError:
                    residual.add(None, False)  # consistent u0 was rejected
                    continue
                peak = max(np.max(np.linalg.norm(traj.states, axis=1)), 1e-300)
                r = float(np.max(traj.derivative_residuals)) / (scale * peak)
                residual.add(r, r <= 1e-8)
                d0 = float(np.linalg.norm(traj.states[0] - u0))
                initial.add(d0, d0 <= 1e-12 * np.linalg.norm(u0))
                worst_inv = max(
                    distance(cons, state) / max(np.linalg.norm(state), 1e-300)
                    for state in traj.states
                )
                invariance.add(worst_inv, worst_inv <= 1e-9)

                try:
                    ref = decomposition_oracle(p, u0, SOLVE_GRID, seed=item.spec.seed)
                except InconsistentInitialValueError:
                    oracle.add(None, False)  # consistent u0 was rejected
                    continue
                err = float(
                    np.max(np.linalg.norm(ref.states - traj.states, axis=1)) / peak
                )
                oracle.add(err, err <= 1e-7)

            alpha = max(0.0, float(np.max(-np.real(np.linalg.eigvals(gen.M)))))
            rep = verify_transform_match(
                p, chain, cons.basis[:, 0].real, (alpha + 3.0, alpha + 4.0), T=10.0
            )
            transform.add(rep.max_relative_error, rep.passed)

        if cons.dim < p.n:
            off = np.eye(p.n) - cons.basis @ cons.basis.conj().T
            j = int(np.argmax(np.linalg.norm(off, axis=0)))
            bad = off[:, j] / np.linalg.norm(off[:, j])
            if cons.dim:
                bad = bad + cons.basis[:, 0].real
            caught = 0
            try:
                classical_solution(p, chain, bad, SOLVE_GRID)
            except InconsistentInitialValueError:
                caught += 1
            try:
                decomposition_oracle(p, bad, SOLVE_GRID, seed=item.spec.seed)
            except InconsistentInitialValueError:
                caught += 1
            detect.add(None, caught == 2)

    return [
        residual.done(),
        initial.done(),
        invariance.done(),
        oracle.done(),
        detect.done(),
        transform.done(),
    ]


def run_suite(specs, seed: int = 0, tol: RankTolerance = RankTolerance()) -> SuiteResult:
    """Run every check over the given fixture specs; deterministic in (specs, seed)."""
    specs = list(specs)
    if not specs:
        raise ValueError("no fixtures to verify")
    analyzed = []
    for spec in specs:
        pencil, truth = generate(spec)
        if not certify_regularity(pencil, seed).regular:
            raise ValueError(f"generated fixture {spec} is not regular")
        analyzed.append(
            _Analyzed(
                spec=spec,
                pencil=pencil,
                truth=truth,
                chain=compute_chain(pencil, tol),
                growth=index_by_growth(pencil),
                nilpotency=index_by_nilpotency(pencil, seed=spec.seed),
            )
        )

    rows = [_subspace_laws_row(seed)]
    rows.append(_resolvent_identity_row(analyzed, seed))
    rows.extend(_identity_rows(analyzed))
    rows.append(_chain_descent_row(analyzed))
    rows.append(_expansion_row(analyzed))
    rows.extend(_chain_rows(analyzed))
    rows.extend(_solver_rows(analyzed))
    return SuiteResult(rows=rows, fixtures=len(specs), passed=all(r.passed for r in rows))


def random_specs(count, dim_range, index_range, seed, conditioning=100.0):
    """Draw fixture specs with growth indices and dimensions in the given ranges."""
    d_lo, d_hi = dim_range
    i_lo, i_hi = index_range
    if not (1 <= d_lo <= d_hi):
        raise ValueError(f"bad dimension range {dim_range}")
    if not (0 <= i_lo <= i_hi):
        raise ValueError(f"bad index range {index_range}")
    rng = make_rng(seed)
    specs = []
    for _ in range(count):
        n = int(rng.integers(d_lo, d_hi + 1))
        target = int(rng.integers(i_lo, i_hi + 1))
        kron = min(target + 1 if target else int(rng.integers(0, 2)), n)
        blocks = [kron] if kron else []
        room = n - kron
        while room > 0 and kron > 1 and rng.uniform() < 0.3:
            extra = int(rng.integers(1, min(kron, room) + 1))
            blocks.append(extra)
            room -= extra
        specs.append(
            FixtureSpec(
                n1=n - sum(blocks),
                nilpotent_blocks=tuple(blocks),
                conditioning=conditioning,
                seed=int(rng.integers(2**63)),
            )
        )
    return specs
