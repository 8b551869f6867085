"""Small-instance complementarity solvers by support enumeration.

The tensor problem TCP(q, M) asks for ``u >= 0`` with
``w = M u^{r-1} + q >= 0`` and ``u . w = 0``; the linear problem LCP(q, A) is
the order-2 case.  Both solvers enumerate candidate supports: the set of
indices where ``u`` is strictly positive.  Fixing a support turns the
complementarity conditions into a square system, polynomial for tensors
(solved by damped multi-start Newton) and linear for matrices (solved in
exact rational arithmetic).

The tensor solver returns the set of solutions it *found*; for order > 2 the
per-support polynomial systems may have roots Newton misses, so the result is
a found set, not a proven-complete set.  Every returned solution passes
:func:`verify_solution` at the configured residual tolerance.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Tensor, principal_subtensor, tv_contract, _as_matrix, _as_vector

__all__ = [
    "SolverConfig",
    "TcpSolution",
    "TcpReport",
    "LcpReport",
    "natural_residual",
    "solve_tcp",
    "solve_tcp_report",
    "solve_lcp",
    "solve_lcp_report",
    "verify_solution",
]

_ENUM_BUDGET = 1_000_000
_LCP_MAX_DIM = 20
_CLAMP = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the per-support Newton solves."""

    newton_starts: int = 25
    newton_iters: int = 100
    damping: float = 1.0
    tol_residual: float = 1e-10
    dedupe_radius: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.newton_starts < 1 or self.newton_iters < 1:
            raise ValueError("newton_starts and newton_iters must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must be in (0, 1], got {self.damping}")
        if self.tol_residual <= 0 or self.dedupe_radius <= 0:
            raise ValueError("tolerances must be positive")


_DEFAULT = SolverConfig()


@dataclass(frozen=True)
class TcpSolution:
    """A verified complementarity solution.

    ``support`` lists the 1-based indices where ``u`` exceeds the solver
    tolerance; ``residual`` is the max of the complementarity products and
    the negative-part magnitudes of ``u`` and ``w``.
    """

    u: np.ndarray
    w: np.ndarray
    support: tuple[int, ...]
    residual: float


@dataclass(frozen=True)
class TcpReport:
    """Solutions plus enumeration diagnostics for one TCP instance."""

    solutions: tuple[TcpSolution, ...]
    singular_supports: tuple[tuple[int, ...], ...]
    failed_starts: int


@dataclass(frozen=True)
class LcpReport:
    solutions: tuple[TcpSolution, ...]
    skipped_supports: tuple[tuple[int, ...], ...]


def natural_residual(M: Tensor, q, u) -> float:
    """Max norm of ``min(u, M u^{r-1} + q)``; zero exactly at solutions."""
    qv = _as_vector(q, M.dim)
    uv = _as_vector(u, M.dim)
    w = tv_contract(M, uv) + qv
    return float(np.max(np.abs(np.minimum(uv, w)), initial=0.0))


def verify_solution(M: Tensor, q, u, tol: float) -> bool:
    """Check ``u >= -tol``, recomputed ``w >= -tol``, and ``|u . w| <= tol``."""
    qv = _as_vector(q, M.dim)
    uv = _as_vector(u, M.dim)
    w = tv_contract(M, uv) + qv
    dot = math.fsum(uv[i] * w[i] for i in range(M.dim))
    return bool(np.all(uv >= -tol) and np.all(w >= -tol) and abs(dot) <= tol)


def _solution_residual(u: np.ndarray, w: np.ndarray) -> float:
    comp = np.max(np.abs(u * w), initial=0.0)
    neg_u = max(0.0, float(-np.min(u, initial=0.0)))
    neg_w = max(0.0, float(-np.min(w, initial=0.0)))
    return float(max(comp, neg_u, neg_w))


def _make_solution(M: Tensor, q: np.ndarray, u: np.ndarray, cfg: SolverConfig) -> TcpSolution:
    w = tv_contract(M, u) + q
    support = tuple(int(i) + 1 for i in np.nonzero(u > cfg.dedupe_radius)[0])
    return TcpSolution(u=u, w=w, support=support, residual=_solution_residual(u, w))


# ---------------------------------------------------------------------------
# Per-support Newton machinery


def _support_programs(sub: Tensor):
    """Value and Jacobian evaluation programs for x -> sub-contraction(x)."""
    m = sub.dim
    items = sub._items()
    if not items:
        zero_v = lambda x: np.zeros(m)  # noqa: E731
        zero_j = lambda x: np.zeros((m, m))  # noqa: E731
        return zero_v, zero_j
    rows = np.array([key[0] for key, _ in items], dtype=np.intp)
    coeff = np.array([val for _, val in items], dtype=float)
    cols = np.array([key[1:] for key, _ in items], dtype=np.intp)

    jr, jc, jcoef, jothers = [], [], [], []
    for key, val in items:
        tail = key[1:]
        for p in range(len(tail)):
            jr.append(key[0])
            jc.append(tail[p])
            jcoef.append(val)
            jothers.append(tail[:p] + tail[p + 1 :])
    jrow = np.array(jr, dtype=np.intp)
    jcol = np.array(jc, dtype=np.intp)
    jcoeff = np.array(jcoef, dtype=float)
    joth = np.array(jothers, dtype=np.intp).reshape(len(jr), -1)

    def value(x: np.ndarray) -> np.ndarray:
        out = np.zeros(m)
        terms = coeff * x[cols].prod(axis=1)
        np.add.at(out, rows, terms)
        return out

    def jacobian(x: np.ndarray) -> np.ndarray:
        out = np.zeros((m, m))
        terms = jcoeff * x[joth].prod(axis=1)
        np.add.at(out, (jrow, jcol), terms)
        return out

    return value, jacobian


def _newton_starts(m: int, cfg: SolverConfig, scale: float, support_key: int) -> list[np.ndarray]:
    k = int(np.ceil(cfg.newton_starts ** (1.0 / m)))
    levels = [(i + 1) / k for i in range(k)]
    pts = list(itertools.product(levels, repeat=m))[: cfg.newton_starts]
    rng = np.random.default_rng([cfg.seed, support_key])
    starts = []
    for p in pts:
        base = np.array(p) * scale
        jitter = 1.0 + 0.05 * (rng.random(m) - 0.5)
        starts.append(np.maximum(base * jitter, _CLAMP))
    return starts


def _solve_support(
    value, jacobian, q_sub: np.ndarray, m: int, order: int, cfg: SolverConfig, support_key: int
):
    """Damped Newton from a deterministic grid of starts; returns roots found.

    Iterations run until the line search stalls or the budget is exhausted
    rather than stopping at the residual tolerance: iterates attracted to the
    boundary of the positive orthant (roots that belong to a smaller support)
    then decay to the positivity clamp, where the caller's support filter
    rejects them, while interior roots stall at machine precision within a
    few steps.  A stalled point counts as a root when its residual is inside
    the tolerance.
    """
    scale = max(1.0, float(np.max(np.abs(q_sub), initial=0.0))) ** (1.0 / max(1, order - 1))
    roots: list[np.ndarray] = []
    solved_any_system = False
    failed = 0
    for x0 in _newton_starts(m, cfg, scale, support_key):
        x = x0.copy()
        ok = False
        for _ in range(cfg.newton_iters):
            f = value(x) + q_sub
            fn = float(np.max(np.abs(f), initial=0.0))
            if fn == 0.0:
                ok = True
                break
            try:
                step = np.linalg.solve(jacobian(x), -f)
            except np.linalg.LinAlgError:
                ok = fn <= cfg.tol_residual
                break
            if not np.all(np.isfinite(step)):
                ok = fn <= cfg.tol_residual
                break
            solved_any_system = True
            lam = cfg.damping
            moved = False
            while lam >= 1e-10:
                xn = np.maximum(x + lam * step, _CLAMP)
                fnew = float(np.max(np.abs(value(xn) + q_sub), initial=0.0))
                if fnew < fn * (1.0 - 1e-4 * lam):
                    x = xn
                    moved = True
                    break
                lam *= 0.5
            if not moved:
                ok = fn <= cfg.tol_residual
                break
        else:
            f = value(x) + q_sub
            ok = float(np.max(np.abs(f), initial=0.0)) <= cfg.tol_residual
        if ok:
            roots.append(x)
        else:
            failed += 1
    all_singular = not solved_any_system and not roots
    return roots, all_singular, failed


def solve_tcp_report(
    M: Tensor, q, cfg: SolverConfig | None = None, threads: int = 1
) -> TcpReport:
    """Support enumeration with per-support Newton; full diagnostics."""
    cfg = cfg or _DEFAULT
    qv = _as_vector(q, M.dim)
    n = M.dim
    budget = (2**n) * cfg.newton_starts
    if budget > _ENUM_BUDGET:
        raise ValueError(
            f"support enumeration budget 2^{n} * {cfg.newton_starts} = {budget} exceeds {_ENUM_BUDGET}"
        )

    supports: list[tuple[int, ...]] = [()]
    for size in range(1, n + 1):
        supports.extend(itertools.combinations(range(n), size))

    def run_support(J: tuple[int, ...]):
        if not J:
            if np.all(qv >= -cfg.tol_residual):
                u = np.zeros(n)
                return [u], False, 0
            return [], False, 0
        sub = principal_subtensor(M, [j + 1 for j in J])
        value, jacobian = _support_programs(sub)
        key = sum(1 << j for j in J)
        roots, singular, failed = _solve_support(
            value, jacobian, qv[list(J)], len(J), M.order, cfg, key
        )
        out = []
        for x in roots:
            if np.any(x <= cfg.dedupe_radius):
                continue  # belongs to a smaller support
            u = np.zeros(n)
            u[list(J)] = x
            out.append(u)
        return out, singular, failed

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_support, supports))
    else:
        results = [run_support(J) for J in supports]

    singular_supports = []
    failed_starts = 0
    accepted: list[TcpSolution] = []
    seen: set[tuple[int, ...]] = set()
    for J, (candidates, singular, failed) in zip(supports, results):
        failed_starts += failed
        if singular:
            singular_supports.append(tuple(j + 1 for j in J))
        for u in candidates:
            w = tv_contract(M, u) + qv
            off = [l for l in range(n) if l not in J]
            if off and np.min(w[off]) < -cfg.tol_residual:
                continue
            if natural_residual(M, qv, u) > cfg.tol_residual:
                continue
            if not verify_solution(M, qv, u, cfg.tol_residual):
                continue
            key = tuple(int(round(x / cfg.dedupe_radius)) for x in u)
            if key in seen:
                continue
            seen.add(key)
            accepted.append(_make_solution(M, qv, u, cfg))
    accepted.sort(key=lambda s: (len(s.support), s.support, tuple(s.u)))
    return TcpReport(
        solutions=tuple(accepted),
        singular_supports=tuple(singular_supports),
        failed_starts=failed_starts,
    )


def solve_tcp(M: Tensor, q, cfg: SolverConfig | None = None, threads: int = 1) -> list[TcpSolution]:
    """All complementarity solutions found by support enumeration, sorted."""
    return list(solve_tcp_report(M, q, cfg, threads).solutions)


# ---------------------------------------------------------------------------
# Exact LCP solver


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(float(x))


def _solve_linear_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination over Fractions; None when singular."""
    m = len(rows)
    a = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), -1)
        if piv < 0:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def solve_lcp_report(a, q, cfg: SolverConfig | None = None) -> LcpReport:
    """Exact support enumeration for LCP(q, A).

    Submatrices are solved in rational arithmetic (floats lift exactly), so
    acceptance tests are exact; singular principal submatrices skip their
    support and are reported.
    """
    cfg = cfg or _DEFAULT
    mat = _as_matrix(a)
    qv = _as_vector(q, mat.shape[0])
    n = mat.shape[0]
    if n > _LCP_MAX_DIM:
        raise ValueError(f"LCP support enumeration limited to n <= {_LCP_MAX_DIM}, got {n}")
    af = [[_frac(mat[i, j]) for j in range(n)] for i in range(n)]
    qf = [_frac(qv[i]) for i in range(n)]

    skipped: list[tuple[int, ...]] = []
    accepted: list[TcpSolution] = []
    seen: set[tuple[int, ...]] = set()
    supports: list[tuple[int, ...]] = [()]
    for size in range(1, n + 1):
        supports.extend(itertools.combinations(range(n), size))
    for J in supports:
        if not J:
            if all(v >= 0 for v in qf):
                z = [Fraction(0)] * n
            else:
                continue
        else:
            rows = [[af[i][j] for j in J] for i in J]
            rhs = [-qf[i] for i in J]
            sol = _solve_linear_exact(rows, rhs)
            if sol is None:
                skipped.append(tuple(j + 1 for j in J))
                continue
            if any(v < 0 for v in sol):
                continue
            z = [Fraction(0)] * n
            for j, v in zip(J, sol):
                z[j] = v
        w = [sum(af[i][j] * z[j] for j in range(n)) + qf[i] for i in range(n)]
        if any(w[i] < 0 for i in range(n) if i not in J):
            continue
        u = np.array([float(v) for v in z])
        key = tuple(int(round(x / cfg.dedupe_radius)) for x in u)
        if key in seen:
            continue
        seen.add(key)
        wf = np.array([float(v) for v in w])
        wf[list(J)] = 0.0  # exact on the support by construction
        support = tuple(int(i) + 1 for i in np.nonzero(u > cfg.dedupe_radius)[0])
        accepted.append(
            TcpSolution(u=u, w=wf, support=support, residual=_solution_residual(u, wf))
        )
    accepted.sort(key=lambda s: (len(s.support), s.support, tuple(s.u)))
    return LcpReport(solutions=tuple(accepted), skipped_supports=tuple(skipped))


def solve_lcp(a, q, cfg: SolverConfig | None = None) -> list[TcpSolution]:
    """All LCP solutions from exact support enumeration, sorted."""
    return list(solve_lcp_report(a, q, cfg).solutions)
