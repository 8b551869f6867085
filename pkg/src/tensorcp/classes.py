"""Membership checkers for structured tensor and matrix classes.

Semipositivity of a tensor is co-NP-hard in general, so the tensor checkers
are resolution-bounded by design: membership verdicts mean "no violation was
found by a simplex grid of the configured density plus local refinement" and
carry the resolution.  Non-membership is always backed by a witness vector
that re-validates by a fresh contraction.  Exactness is reserved for the
matrix checkers, which reduce to small exact LPs over every principal
submatrix, and for the degenerate one-dimensional case.

The search restricts to the standard simplex (or, for the sign-pattern
checks, the unit cross-polytope surface over both orthants): the defining
contractions are homogeneous of positive degree in ``u``, so scaling never
changes the sign pattern.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import (
    Tensor,
    add,
    contract_batch,
    identity_tensor,
    is_row_diagonal,
    majorization,
    make_tensor,
    scale,
    shao_product,
    tv_contract,
    _as_matrix,
    _as_vector,
)
from .lp import OPTIMAL, LpResult, minimax_on_simplex
from . import tcp as _tcp

__all__ = [
    "Status",
    "ClassVerdict",
    "CheckConfig",
    "DeltaShiftReport",
    "QFalsifierReport",
    "check_semipositive",
    "check_strictly_semipositive",
    "check_semimonotone",
    "check_strictly_semimonotone",
    "grid_violation_scan",
    "build_null_diagonal",
    "build_g_matrix",
    "g_combination",
    "check_delta_shift",
    "check_p0",
    "check_p",
    "check_r0",
    "check_r",
    "q_falsifier",
]


class Status(str, Enum):
    MEMBER_EXACT = "MemberExact"
    MEMBER_UP_TO_RESOLUTION = "MemberUpToResolution"
    NON_MEMBER = "NonMember"


@dataclass(frozen=True)
class ClassVerdict:
    """Outcome of a membership check.

    Non-membership always carries a witness and the contraction values at the
    witness (the certificate); membership at bounded resolution records the
    grid resolution that was searched.
    """

    status: Status
    witness: np.ndarray | None = None
    certificate: np.ndarray | None = None
    resolution: float | None = None

    @property
    def is_member(self) -> bool:
        return self.status is not Status.NON_MEMBER


@dataclass(frozen=True)
class CheckConfig:
    """Knobs for the resolution-bounded searches.

    ``tol_pos`` decides which witness components count as part of the
    support; ``tol_neg`` is the violation threshold.  They are separate knobs
    because near-boundary witnesses are the common degenerate case.
    """

    grid_resolution: int = 32
    refine_iters: int = 200
    tol_pos: float = 1e-9
    tol_neg: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise ValueError(f"grid_resolution must be >= 2, got {self.grid_resolution}")
        if self.refine_iters < 0:
            raise ValueError(f"refine_iters must be >= 0, got {self.refine_iters}")
        if self.tol_pos <= 0 or self.tol_neg <= 0:
            raise ValueError("tolerances must be positive")


_DEFAULT_CFG = CheckConfig()

# ---------------------------------------------------------------------------
# Search machinery


@lru_cache(maxsize=128)
def _simplex_grid(m: int, resolution: int) -> np.ndarray:
    """All points k/resolution on the (m-1)-simplex, lexicographic."""
    pts = []
    for comp in itertools.combinations(range(resolution + m - 1), m - 1):
        ks = []
        prev = -1
        for c in comp:
            ks.append(c - prev - 1)
            prev = c
        ks.append(resolution + m - 2 - prev)
        pts.append(ks)
    return np.array(pts, dtype=float) / float(resolution)


def _states(n: int, signed: bool):
    """(J, sigma) search states: subsets by size then lex, + before -."""
    out = []
    for size in range(1, n + 1):
        for J in itertools.combinations(range(n), size):
            Ja = np.array(J, dtype=np.intp)
            if signed:
                for sig in itertools.product((1.0, -1.0), repeat=size):
                    out.append((Ja, np.array(sig)))
            else:
                out.append((Ja, np.ones(size)))
    return out


def _objective_rows(X, V, J, sigma, pairwise: bool):
    if pairwise:
        return (X[:, J] * V[:, J]).max(axis=1)
    return V[:, J].max(axis=1)


def _validate_witness(M: Tensor, u: np.ndarray, cfg: CheckConfig, strict: bool, pairwise: bool):
    """Re-validate a candidate by a fresh contraction; None if it fails.

    The candidate is rescaled so its largest-magnitude component is 1 (the
    defining conditions are homogeneous).  Returns (witness, certificate).
    """
    u = np.asarray(u, dtype=float)
    if not pairwise:
        if np.any(u < 0):
            return None
    peak = np.max(np.abs(u))
    if peak <= 0:
        return None
    u = u / peak
    v = tv_contract(M, u)
    supp = (np.abs(u) > cfg.tol_pos) if pairwise else (u > cfg.tol_pos)
    if not supp.any():
        return None
    vals = (u * v)[supp] if pairwise else v[supp]
    ok = np.all(vals <= cfg.tol_neg) if strict else np.all(vals < -cfg.tol_neg)
    return (u, v) if ok else None


def _lp_transport_seeds(M: Tensor, states):
    """Seed magnitudes from exact minimax LPs on the majorization matrix.

    Only used for row-diagonal tensors, where the contraction of ``u`` equals
    the majorization matrix applied to ``u^[r-1]``: the LP minimizer over a
    principal submatrix transports to a candidate violation point.  Seeds are
    re-validated like any other candidate, so this is a completeness aid for
    the violation search, never a membership shortcut.
    """
    seeds: dict[int, np.ndarray] = {}
    mt = majorization(M)
    power = 1.0 / (M.order - 1)
    for si, (J, _sig) in enumerate(states):
        res = minimax_on_simplex(mt[np.ix_(J, J)])
        if res.status != OPTIMAL:
            continue
        mag = np.power(np.maximum(res.x_star, 0.0), power)
        total = mag.sum()
        if total > 0:
            seeds[si] = mag / total
    return seeds


def _point(n, J, sigma, mag):
    pt = np.zeros(n)
    pt[J] = sigma * mag
    return pt


def _find_violation(M: Tensor, cfg: CheckConfig, strict: bool, pairwise: bool):
    """Search all supports (and sign patterns, if ``pairwise``) for a witness.

    Returns (witness, certificate) or None.  Deterministic given the config.
    """
    n = M.dim
    threshold = cfg.tol_neg if strict else -cfg.tol_neg

    def meets(val: float) -> bool:
        return val <= threshold if strict else val < threshold

    states = _states(n, signed=pairwise)
    seeds = {}
    if not pairwise and is_row_diagonal(M):
        seeds = _lp_transport_seeds(M, states)

    # Probe phase: centroid (and transported LP seeds) per state, in state
    # order.  Centroid-first keeps witnesses on symmetric instances tidy.
    probe_rows, probe_state = [], []
    for si, (J, sig) in enumerate(states):
        mags = [np.full(J.shape[0], 1.0 / J.shape[0])]
        if si in seeds:
            mags.append(seeds[si])
        for mag in mags:
            probe_rows.append(_point(n, J, sig, mag))
            probe_state.append(si)
    X = np.array(probe_rows)
    V = contract_batch(M, X)
    for k, si in enumerate(probe_state):
        J, sig = states[si]
        val = _objective_rows(X[k : k + 1], V[k : k + 1], J, sig, pairwise)[0]
        if meets(val):
            hit = _validate_witness(M, X[k], cfg, strict, pairwise)
            if hit:
                return hit

    # Grid phase: one batched contraction over every state's simplex grid.
    blocks = []
    offsets = []
    pos = 0
    rows = []
    for si, (J, sig) in enumerate(states):
        grid = _simplex_grid(J.shape[0], cfg.grid_resolution)
        pts = np.zeros((grid.shape[0], n))
        pts[:, J] = grid * sig
        rows.append(pts)
        blocks.append((pos, pos + grid.shape[0]))
        offsets.append(si)
        pos += grid.shape[0]
    X = np.vstack(rows)
    V = contract_batch(M, X)
    best_mag: list[np.ndarray | None] = [None] * len(states)
    best_val = np.full(len(states), np.inf)
    for si, (a, b) in zip(offsets, blocks):
        J, sig = states[si]
        vals = _objective_rows(X[a:b], V[a:b], J, sig, pairwise)
        k = int(np.argmin(vals))
        best_val[si] = vals[k]
        best_mag[si] = X[a + k][J] * sig  # magnitudes
    for si in range(len(states)):
        if meets(best_val[si]):
            J, sig = states[si]
            hit = _validate_witness(M, _point(n, J, sig, best_mag[si]), cfg, strict, pairwise)
            if hit:
                return hit

    # Refinement phase: deterministic pairwise-transfer descent on each
    # state's simplex with a shrinking step, all states advanced per sweep.
    steps = np.full(len(states), 0.25)
    active = [si for si in range(len(states)) if states[si][0].shape[0] >= 2]
    for _ in range(cfg.refine_iters):
        if not active:
            break
        cand_rows, cand_state = [], []
        for si in active:
            J, sig = states[si]
            mag = best_mag[si]
            step = steps[si]
            m = J.shape[0]
            for a in range(m):
                if mag[a] < step:
                    continue
                for b in range(m):
                    if b == a:
                        continue
                    new = mag.copy()
                    new[a] -= step
                    new[b] += step
                    cand_rows.append(_point(n, J, sig, new))
                    cand_state.append(si)
        improved = set()
        if cand_rows:
            X = np.array(cand_rows)
            V = contract_batch(M, X)
            for k, si in enumerate(cand_state):
                J, sig = states[si]
                val = _objective_rows(X[k : k + 1], V[k : k + 1], J, sig, pairwise)[0]
                if val < best_val[si] - 1e-300:
                    best_val[si] = val
                    best_mag[si] = X[k][J] * sig
                    improved.add(si)
        next_active = []
        for si in active:
            if si not in improved:
                steps[si] *= 0.5
                if steps[si] < 1e-12:
                    continue
            next_active.append(si)
        active = next_active
        for si in improved:
            if meets(best_val[si]):
                J, sig = states[si]
                hit = _validate_witness(M, _point(n, J, sig, best_mag[si]), cfg, strict, pairwise)
                if hit:
                    return hit

    # Last pass over the final bests, in state order.
    for si in range(len(states)):
        if best_mag[si] is not None and meets(best_val[si]):
            J, sig = states[si]
            hit = _validate_witness(M, _point(n, J, sig, best_mag[si]), cfg, strict, pairwise)
            if hit:
                return hit
    return None


def grid_violation_scan(
    M: Tensor, cfg: CheckConfig | None = None, strict: bool = False
) -> np.ndarray | None:
    """Scan grid points only (no refinement) for a semipositivity violation.

    Returns a validated witness or None.  Useful for resolution-matched
    comparisons where two tensors must be judged over the same finite set.
    """
    cfg = cfg or _DEFAULT_CFG
    narrowed = CheckConfig(
        grid_resolution=cfg.grid_resolution,
        refine_iters=0,
        tol_pos=cfg.tol_pos,
        tol_neg=cfg.tol_neg,
        seed=cfg.seed,
    )
    hit = _find_violation(M, narrowed, strict=strict, pairwise=False)
    return hit[0] if hit else None


# ---------------------------------------------------------------------------
# Tensor class checkers


def _dim1_verdict(M: Tensor, strict: bool) -> ClassVerdict:
    value = tv_contract(M, np.ones(1))[0]
    member = value > 0 if strict else value >= 0
    if member:
        return ClassVerdict(Status.MEMBER_EXACT)
    return ClassVerdict(
        Status.NON_MEMBER, witness=np.ones(1), certificate=np.array([value])
    )


def _check_orthant(M: Tensor, cfg: CheckConfig, strict: bool) -> ClassVerdict:
    if M.dim == 1:
        return _dim1_verdict(M, strict)
    hit = _find_violation(M, cfg, strict=strict, pairwise=False)
    if hit:
        return ClassVerdict(Status.NON_MEMBER, witness=hit[0], certificate=hit[1])
    return ClassVerdict(
        Status.MEMBER_UP_TO_RESOLUTION, resolution=1.0 / cfg.grid_resolution
    )


def check_semipositive(M: Tensor, cfg: CheckConfig | None = None) -> ClassVerdict:
    """Check: every nonzero ``u >= 0`` has a support index with contraction >= 0.

    Non-membership returns a witness ``u`` whose contraction is strictly
    negative (beyond ``tol_neg``) on every component of its support.
    """
    return _check_orthant(M, cfg or _DEFAULT_CFG, strict=False)


def check_strictly_semipositive(M: Tensor, cfg: CheckConfig | None = None) -> ClassVerdict:
    """Strict variant: some support index must have contraction > 0."""
    return _check_orthant(M, cfg or _DEFAULT_CFG, strict=True)


def check_p0(M: Tensor, cfg: CheckConfig | None = None) -> ClassVerdict:
    """P0 check over both orthants: some ``u_i != 0`` with ``u_i * v_i >= 0``."""
    cfg = cfg or _DEFAULT_CFG
    if M.dim == 1:
        # n = 1: u * v = m * u^r, so the sign test is exact.  Even order
        # needs m >= 0; odd order flips sign across orthants, so only m = 0
        # survives.
        value = tv_contract(M, np.ones(1))[0]
        if M.order % 2 == 0:
            member = value >= 0
            wit = np.ones(1)
        else:
            member = value == 0
            wit = np.ones(1) if value < 0 else -np.ones(1)
        if member:
            return ClassVerdict(Status.MEMBER_EXACT)
        cert = tv_contract(M, wit)
        return ClassVerdict(Status.NON_MEMBER, witness=wit, certificate=cert)
    hit = _find_violation(M, cfg, strict=False, pairwise=True)
    if hit:
        return ClassVerdict(Status.NON_MEMBER, witness=hit[0], certificate=hit[1])
    return ClassVerdict(Status.MEMBER_UP_TO_RESOLUTION, resolution=1.0 / cfg.grid_resolution)


def check_p(M: Tensor, cfg: CheckConfig | None = None) -> ClassVerdict:
    """P check: some ``u_i != 0`` with ``u_i * v_i > 0`` for every ``u != 0``."""
    cfg = cfg or _DEFAULT_CFG
    if M.dim == 1:
        value = tv_contract(M, np.ones(1))[0]
        if M.order % 2 == 0:
            member = value > 0
            wit = np.ones(1)
        else:
            member = False  # u and -u cannot both give a positive product
            wit = np.ones(1) if value <= 0 else -np.ones(1)
        if member:
            return ClassVerdict(Status.MEMBER_EXACT)
        cert = tv_contract(M, wit)
        return ClassVerdict(Status.NON_MEMBER, witness=wit, certificate=cert)
    hit = _find_violation(M, cfg, strict=True, pairwise=True)
    if hit:
        return ClassVerdict(Status.NON_MEMBER, witness=hit[0], certificate=hit[1])
    return ClassVerdict(Status.MEMBER_UP_TO_RESOLUTION, resolution=1.0 / cfg.grid_resolution)


# ---------------------------------------------------------------------------
# Matrix class checkers (exact)


def _check_matrix(a, strict: bool) -> ClassVerdict:
    mat = _as_matrix(a)
    n = mat.shape[0]
    for size in range(1, n + 1):
        for J in itertools.combinations(range(n), size):
            Ja = np.array(J, dtype=np.intp)
            if size == 1:
                t_exact = Fraction(float(mat[J[0], J[0]]))
                x_exact = (Fraction(1),)
            else:
                res: LpResult = minimax_on_simplex(mat[np.ix_(Ja, Ja)])
                t_exact, x_exact = res.t_exact, res.x_exact
            bad = t_exact <= 0 if strict else t_exact < 0
            if bad:
                witness = np.zeros(n)
                witness[Ja] = [float(v) for v in x_exact]
                witness = witness / witness.max()
                certificate = mat @ witness
                return ClassVerdict(
                    Status.NON_MEMBER, witness=witness, certificate=certificate
                )
    return ClassVerdict(Status.MEMBER_EXACT)


def check_semimonotone(a) -> ClassVerdict:
    """Exact semimonotonicity check via minimax LPs on principal submatrices.

    NonMember iff some principal submatrix admits a simplex point whose image
    is strictly negative in every coordinate; the optimizer is lifted to full
    dimension as the witness.
    """
    return _check_matrix(a, strict=False)


def check_strictly_semimonotone(a) -> ClassVerdict:
    """Exact strict variant: a nonpositive minimax value already violates."""
    return _check_matrix(a, strict=True)


# ---------------------------------------------------------------------------
# Constructive witnesses


def build_null_diagonal(M: Tensor, u) -> Tensor:
    """Diagonal tensor ``D`` with ``(M + D)`` annihilating the positive vector ``u``.

    The diagonal entries are ``-v_i / u_i^{r-1}`` with ``v`` the contraction
    at ``u``; by construction the contraction of ``M + D`` at ``u`` vanishes,
    and ``D`` has all-positive diagonal iff ``v`` is negative componentwise.
    """
    v = _as_vector(u, M.dim)
    if np.any(v <= 0):
        bad = int(np.argmax(v <= 0)) + 1
        raise ValueError(f"component {bad} of u is not positive")
    w = tv_contract(M, v)
    powers = v ** (M.order - 1)
    diag = -w / powers
    entries = {}
    for i in range(M.dim):
        if diag[i] != 0.0:
            entries[(i + 1,) * M.order] = diag[i]
    return make_tensor(M.order, M.dim, entries)


def build_g_matrix(M: Tensor, u) -> np.ndarray:
    """Diagonal matrix ``G`` in [0, I] whose blend with ``M`` annihilates ``u``.

    Requires ``u >= 0``, ``u != 0`` and the contraction ``v`` to satisfy
    ``v_i <= 0`` wherever ``u_i > 0``; other inputs are rejected.  The entries
    follow the case table:

        u_i > 0, v_i = 0  ->  0
        u_i > 0, v_i < 0  ->  -v_i / (u_i^{r-1} - v_i)
        u_i = 0, v_i = 0  ->  0
        u_i = 0, v_i != 0 ->  1

    The blend ``G . I + (I - G) . M`` (see :func:`g_combination`) then has
    ``u`` as a null vector.
    """
    uu = _as_vector(u, M.dim)
    if np.any(uu < 0):
        bad = int(np.argmax(uu < 0)) + 1
        raise ValueError(f"component {bad} of u is negative")
    if not np.any(uu > 0):
        raise ValueError("u must be nonzero")
    v = tv_contract(M, uu)
    g = np.zeros(M.dim)
    for i in range(M.dim):
        if uu[i] > 0:
            if v[i] > 0:
                raise ValueError(
                    f"precondition violated: u_{i + 1} > 0 but contraction {v[i]} > 0"
                )
            if v[i] < 0:
                g[i] = -v[i] / (uu[i] ** (M.order - 1) - v[i])
        else:
            if v[i] != 0:
                g[i] = 1.0
    return np.diag(g)


def g_combination(M: Tensor, G) -> Tensor:
    """The tensor ``G . I + (I - G) . M`` for a diagonal matrix ``G``."""
    gm = _as_matrix(G, M.dim)
    ident = identity_tensor(M.order, M.dim)
    eye = np.eye(M.dim)
    return add(shao_product(gm, ident), shao_product(eye - gm, M))


# ---------------------------------------------------------------------------
# Shift and solver-backed checks


@dataclass(frozen=True)
class DeltaShiftReport:
    """Outcome of checking strict semipositivity of diagonal shifts of ``M``.

    ``member_consistent`` is None when the base tensor is already NonMember;
    otherwise it records whether every shifted check agreed with the base
    membership.  For the smallest shift that produced a witness, the witness
    is evaluated against the unshifted tensor and the largest support
    component of that contraction is reported (not asserted).
    """

    base: ClassVerdict
    shifts: tuple[tuple[float, ClassVerdict], ...]
    member_consistent: bool | None
    smallest_delta: float | None
    carryover_margin: float | None


def check_delta_shift(
    M: Tensor, deltas, cfg: CheckConfig | None = None
) -> DeltaShiftReport:
    """Run strict checks on ``M + delta * I`` for each positive ``delta``."""
    cfg = cfg or _DEFAULT_CFG
    ds = [float(d) for d in deltas]
    if not ds:
        raise ValueError("need at least one delta")
    for d in ds:
        if d <= 0:
            raise ValueError(f"delta must be positive, got {d}")
    base = check_semipositive(M, cfg)
    ident = identity_tensor(M.order, M.dim)
    shifts = []
    for d in ds:
        shifted = add(M, scale(d, ident))
        shifts.append((d, check_strictly_semipositive(shifted, cfg)))
    member_consistent: bool | None = None
    if base.is_member:
        member_consistent = all(v.is_member for _, v in shifts)
    smallest = None
    margin = None
    non_member_shifts = [(d, v) for d, v in shifts if not v.is_member]
    if non_member_shifts:
        smallest, verdict = min(non_member_shifts, key=lambda t: t[0])
        v = tv_contract(M, verdict.witness)
        supp = verdict.witness > cfg.tol_pos
        margin = float(np.max(v[supp]))
    return DeltaShiftReport(
        base=base,
        shifts=tuple(shifts),
        member_consistent=member_consistent,
        smallest_delta=smallest,
        carryover_margin=margin,
    )


def _enumeration_guard(M: Tensor, solver_cfg) -> None:
    cfg = solver_cfg or _tcp.SolverConfig()
    budget = (2**M.dim) * cfg.newton_starts
    if budget > 1_000_000:
        raise ValueError(
            f"support enumeration budget 2^{M.dim} * {cfg.newton_starts} = {budget} exceeds 1e6"
        )


def _nonzero_solutions(sols, tol: float):
    return [s for s in sols if np.max(np.abs(s.u)) > tol]


def check_r0(M: Tensor, solver_cfg=None) -> ClassVerdict:
    """R0 check: the homogeneous complementarity problem admits only 0.

    Solver-backed and therefore resolution-bounded: membership means the
    support enumeration found no nonzero solution.
    """
    _enumeration_guard(M, solver_cfg)
    cfg = solver_cfg or _tcp.SolverConfig()
    sols = _tcp.solve_tcp(M, np.zeros(M.dim), cfg)
    nonzero = _nonzero_solutions(sols, cfg.dedupe_radius)
    if nonzero:
        w = nonzero[0].u
        w = w / w.max()  # homogeneous problem: scale to peak 1
        return ClassVerdict(Status.NON_MEMBER, witness=w, certificate=tv_contract(M, w))
    return ClassVerdict(Status.MEMBER_UP_TO_RESOLUTION)


def check_r(M: Tensor, solver_cfg=None) -> ClassVerdict:
    """R check: R0 plus uniqueness of 0 for the all-ones right-hand side."""
    r0 = check_r0(M, solver_cfg)
    if not r0.is_member:
        return r0
    cfg = solver_cfg or _tcp.SolverConfig()
    sols = _tcp.solve_tcp(M, np.ones(M.dim), cfg)
    nonzero = _nonzero_solutions(sols, cfg.dedupe_radius)
    if nonzero:
        w = nonzero[0].u
        return ClassVerdict(Status.NON_MEMBER, witness=w, certificate=tv_contract(M, w))
    return ClassVerdict(Status.MEMBER_UP_TO_RESOLUTION)


@dataclass(frozen=True)
class QFalsifierReport:
    """Sampled evidence against universal solvability; never a membership claim."""

    attempted: int
    unsolved: tuple[np.ndarray, ...]
    seed: int

    @property
    def failures(self) -> int:
        return len(self.unsolved)


def q_falsifier(M: Tensor, q_samples: int, solver_cfg=None) -> QFalsifierReport:
    """Try to falsify solvability-for-all-q by sampling right-hand sides.

    The samples include every sign pattern at a few magnitudes, then random
    vectors.  A sample counts as a failure when the support enumeration finds
    no solution; absence of failures is evidence, not proof.
    """
    _enumeration_guard(M, solver_cfg)
    cfg = solver_cfg or _tcp.SolverConfig()
    if q_samples < 1:
        raise ValueError(f"q_samples must be >= 1, got {q_samples}")
    n = M.dim
    rng = np.random.default_rng(cfg.seed)
    qs: list[np.ndarray] = []
    for scale_ in (1.0, 0.5, 2.0):
        for pattern in itertools.product((1.0, -1.0), repeat=n):
            qs.append(np.array(pattern) * scale_)
    qs = qs[:q_samples]
    while len(qs) < q_samples:
        qs.append(rng.uniform(-3.0, 3.0, size=n))
    unsolved = []
    for q in qs:
        if not _tcp.solve_tcp(M, q, cfg):
            unsolved.append(q)
    return QFalsifierReport(attempted=len(qs), unsolved=tuple(unsolved), seed=cfg.seed)
