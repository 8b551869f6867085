"""Randomized verification suites replaying the structural theorems.

Each suite turns one theorem into an executable per-trial property over
deterministically generated small tensors (even orders 2 and 4, dimensions 2
and 3, integer entries in [-3, 3]).  Failures dump a self-contained text file
in the serialization grammar, with a comment header that reproduces the trial
from the command line.

Assertion discipline: transport laws are asserted at the witness level (a
transported witness must re-validate by a fresh contraction), membership
directions are asserted as "no witness found at the configured resolution",
and limits that a finite test cannot reach (e.g. shrinking diagonal shifts)
are sampled and reported rather than asserted.

Because the tensor checkers are resolution-bounded, two searches over related
tensors can disagree even though the underlying theorem holds: one search can
find a thin violation region the other missed.  When verdicts disagree, the
dissenting witness is therefore transported to the other tensor and
re-validated by a fresh contraction; a trial fails only when that transport
fails, which is what an actual counterexample to the theorem would look like.
A witness that transports cleanly just proves the coarser verdict was a
resolution artifact, and the trial counts as consistent.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import demo
from .classes import (
    CheckConfig,
    check_delta_shift,
    check_semimonotone,
    check_semipositive,
    check_strictly_semimonotone,
    check_strictly_semipositive,
    build_g_matrix,
    build_null_diagonal,
    g_combination,
    grid_violation_scan,
    _validate_witness,
)
from .core import (
    Tensor,
    add,
    identity_tensor,
    is_row_diagonal,
    make_tensor,
    permute_conjugate,
    principal_subtensor,
    scale,
    shao_product,
    tv_contract,
    vec_power,
)
from .formats import write_matrix, write_tensor, write_vector

__all__ = [
    "GenConfig",
    "SuiteReport",
    "RowDiagonalSample",
    "SUITE_NAMES",
    "gen_tensor",
    "gen_nonneg_tensor",
    "gen_row_diagonal",
    "gen_pos_diag",
    "gen_nonneg_diag",
    "gen_permutation",
    "gen_positive_vector",
    "gen_nonneg_vector",
    "run_suite",
]

_TRIAL_COMBOS = ((2, 2), (2, 3), (4, 2), (4, 3))


@dataclass(frozen=True)
class GenConfig:
    """Generator knobs: order/dimension defaults, sparsity, entry range, seed."""

    r: int = 4
    n: int = 3
    density: float = 0.4
    value_min: int = -3
    value_max: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.r < 2 or self.n < 1:
            raise ValueError(f"bad shape: r={self.r}, n={self.n}")
        if not 0 < self.density <= 1:
            raise ValueError(f"density must be in (0, 1], got {self.density}")
        if self.value_min > self.value_max:
            raise ValueError("empty entry range")


@dataclass
class SuiteReport:
    """Per-suite trial record; ``failures`` equals the number of dumps."""

    suite: str
    trials: int
    failures: int
    counterexamples: list[str]
    seed: int
    wall_time: float


class RowDiagonalSample(NamedTuple):
    tensor: Tensor
    matrix: np.ndarray


def _rng_for(cfg: GenConfig, rng):
    return rng if rng is not None else np.random.default_rng(cfg.seed)


def _nonzero_values(rng, count: int, lo: int, hi: int) -> np.ndarray:
    pool = [v for v in range(lo, hi + 1) if v != 0]
    if not pool:
        pool = [1]
    return rng.choice(pool, size=count)


def gen_tensor(cfg: GenConfig, rng=None) -> Tensor:
    """Sparse random integer tensor; each slot kept with the configured density."""
    rng = _rng_for(cfg, rng)
    idx = [()]
    for _ in range(cfg.r):
        idx = [t + (i,) for t in idx for i in range(1, cfg.n + 1)]
    keep = rng.random(len(idx)) < cfg.density
    chosen = [t for t, k in zip(idx, keep) if k]
    values = _nonzero_values(rng, len(chosen), cfg.value_min, cfg.value_max)
    return make_tensor(cfg.r, cfg.n, list(zip(chosen, [float(v) for v in values])))


def gen_nonneg_tensor(cfg: GenConfig, rng=None) -> Tensor:
    """Like :func:`gen_tensor` but with values in {1..max}; entrywise >= 0."""
    rng = _rng_for(cfg, rng)
    base = gen_tensor(cfg, rng)
    entries = [(idx, float(abs(v))) for idx, v in base.entries()]
    return make_tensor(cfg.r, cfg.n, entries)


def gen_row_diagonal(cfg: GenConfig, rng=None) -> RowDiagonalSample:
    """Row-diagonal tensor built as (matrix) x (identity tensor); matrix kept."""
    rng = _rng_for(cfg, rng)
    a = rng.integers(cfg.value_min, cfg.value_max + 1, size=(cfg.n, cfg.n)).astype(float)
    return RowDiagonalSample(shao_product(a, identity_tensor(cfg.r, cfg.n)), a)


def gen_pos_diag(cfg: GenConfig, rng=None) -> np.ndarray:
    """Positive diagonal matrix with entries in (0, 3]."""
    rng = _rng_for(cfg, rng)
    return np.diag(3.0 * (1.0 - rng.random(cfg.n)))


def gen_nonneg_diag(cfg: GenConfig, rng=None) -> np.ndarray:
    """Nonnegative diagonal matrix; roughly a third of the entries are zero."""
    rng = _rng_for(cfg, rng)
    d = 3.0 * (1.0 - rng.random(cfg.n))
    d[rng.random(cfg.n) < 1.0 / 3.0] = 0.0
    return np.diag(d)


def gen_permutation(cfg: GenConfig, rng=None) -> np.ndarray:
    rng = _rng_for(cfg, rng)
    perm = rng.permutation(cfg.n)
    p = np.zeros((cfg.n, cfg.n))
    p[np.arange(cfg.n), perm] = 1.0
    return p


def gen_positive_vector(cfg: GenConfig, rng=None) -> np.ndarray:
    rng = _rng_for(cfg, rng)
    return rng.uniform(0.25, 2.0, size=cfg.n)


def gen_nonneg_vector(cfg: GenConfig, rng=None) -> np.ndarray:
    """Nonnegative, nonzero vector with a random strict support."""
    rng = _rng_for(cfg, rng)
    u = rng.uniform(0.25, 2.0, size=cfg.n)
    mask = rng.random(cfg.n) < 0.4
    if mask.all():
        mask[int(rng.integers(cfg.n))] = False
    u[mask] = 0.0
    return u


# ---------------------------------------------------------------------------
# Trial helpers


class _TrialFailure(AssertionError):
    pass


def _require(cond: bool, note: str):
    if not cond:
        raise _TrialFailure(note)


def _dump(suite: str, trial: int, base_seed: int, gc: GenConfig, note: str, inputs: dict) -> str:
    lines = [
        f"# suite: {suite}",
        f"# trial: {trial}",
        f"# note: {note}",
        f"# shape: r={gc.r} n={gc.n}",
        f"# reproduce: tensorcp verify --suite {suite} --trials {trial + 1} --seed {base_seed}",
    ]
    for name, obj in inputs.items():
        lines.append(f"# input: {name}")
        if isinstance(obj, Tensor):
            lines.append(write_tensor(obj).rstrip("\n"))
        elif isinstance(obj, np.ndarray) and obj.ndim == 2:
            lines.append(write_matrix(obj).rstrip("\n"))
        else:
            lines.append(write_vector(np.asarray(obj, dtype=float)).rstrip("\n"))
    return "\n".join(lines) + "\n"


def _witness_ok(M: Tensor, u: np.ndarray, cc: CheckConfig, strict: bool) -> bool:
    return _validate_witness(M, u, cc, strict=strict, pairwise=False) is not None


def _strictness_for(trial: int) -> bool:
    # Alternate the plain and strict variants across trials.
    return trial % 2 == 1


# ---------------------------------------------------------------------------
# Suites


def _t1_diag_scaling(rng, gc, cc, trial, inputs):
    strict = _strictness_for(trial)
    M = gen_tensor(gc, rng)
    D = gen_pos_diag(gc, rng)
    inputs["tensor"] = M
    inputs["diagonal"] = D
    DM = shao_product(D, M)
    check = check_strictly_semipositive if strict else check_semipositive
    # Sign-pattern law at a few random nonnegative points.  Entry-level
    # rounding can flip the sign of values whose exact sum is zero, so only a
    # contradiction between two definitely nonzero values counts.
    pts = rng.uniform(0.0, 2.0, size=(3, gc.n))
    for u in pts:
        vm = tv_contract(M, u)
        vdm = tv_contract(DM, u)
        floor = 1e-9 * (1.0 + np.max(np.abs(vm)))
        contradiction = (vm * vdm < 0) & (np.abs(vm) > floor) & (np.abs(vdm) > floor)
        _require(not contradiction.any(), "positive diagonal scaling changed a sign pattern")
    a = check(M, cc)
    b = check(DM, cc)
    if not a.is_member:
        _require(
            _witness_ok(DM, a.witness, cc, strict),
            "witness did not transfer verbatim to the scaled tensor",
        )
    elif not b.is_member:
        # Disagreement: the scaled witness must expose the base tensor too,
        # otherwise diagonal scaling manufactured a violation from nothing.
        _require(
            _witness_ok(M, b.witness, cc, strict),
            "scaled tensor produced a witness that fails on the base tensor",
        )


def _t2_nonneg_diag(rng, gc, cc, trial, inputs):
    M = gen_tensor(gc, rng)
    D = gen_nonneg_diag(gc, rng)
    inputs["tensor"] = M
    inputs["diagonal"] = D
    a = check_semipositive(M, cc)
    if a.is_member:
        b = check_semipositive(shao_product(D, M), cc)
        if not b.is_member:
            # Either the base verdict was a resolution artifact (the scaled
            # witness must then expose the base tensor) or the corollary has
            # a counterexample, which is a failure.
            _require(
                _witness_ok(M, b.witness, cc, strict=False),
                "nonnegative diagonal scaling destroyed membership",
            )


def _t2_fixed(rng, gc, cc, trial, inputs):
    M = demo.non_semipositive_4_2()
    d1, d2 = demo.rescale_demo_matrices()
    inputs["tensor"] = M
    inputs["d1"] = d1
    inputs["d2"] = d2
    b = shao_product(d1, M)
    c = shao_product(d2, M)
    _require(not check_semipositive(M, cc).is_member, "base fixture should be NonMember")
    _require(
        b == make_tensor(4, 2, {(2, 1, 2, 1): -9.0, (2, 2, 2, 2): 6.0}),
        "first rescaled fixture has wrong entries",
    )
    _require(check_semipositive(b, cc).is_member, "first rescaled fixture should be member")
    _require(check_semipositive(c, cc).is_member, "second rescaled fixture should be member")


def _t3_permutation(rng, gc, cc, trial, inputs):
    strict = _strictness_for(trial)
    M = gen_tensor(gc, rng)
    P = gen_permutation(gc, rng)
    inputs["tensor"] = M
    inputs["permutation"] = P
    B = permute_conjugate(P, M)
    check = check_strictly_semipositive if strict else check_semipositive
    a = check(M, cc)
    b = check(B, cc)
    if not a.is_member:
        _require(
            _witness_ok(B, P @ a.witness, cc, strict),
            "permuted witness failed to re-validate",
        )
    elif not b.is_member:
        _require(
            _witness_ok(M, P.T @ b.witness, cc, strict),
            "conjugated witness failed to transport back",
        )


def _t4_monotone_sum(rng, gc, cc, trial, inputs):
    strict = _strictness_for(trial)
    M = gen_tensor(gc, rng)
    N = gen_nonneg_tensor(gc, rng)
    inputs["tensor"] = M
    inputs["nonneg"] = N
    check = check_strictly_semipositive if strict else check_semipositive
    a = check(M, cc)
    if a.is_member:
        w = grid_violation_scan(add(M, N), cc, strict=strict)
        _require(
            w is None,
            "adding a nonnegative tensor produced a grid violation",
        )


def _t5_null_diagonal(rng, gc, cc, trial, inputs):
    M = gen_tensor(gc, rng)
    u = gen_positive_vector(gc, rng)
    inputs["tensor"] = M
    inputs["u"] = u
    v = tv_contract(M, u)
    D = build_null_diagonal(M, u)
    resid = np.max(np.abs(tv_contract(add(M, D), u)), initial=0.0)
    _require(resid <= 1e-10, f"null-diagonal residual {resid} exceeds 1e-10")
    diag = -v / u ** (gc.r - 1)
    _require(
        bool(np.all(diag > 0)) == bool(np.all(v < 0)),
        "positivity of the constructed diagonal disagrees with the contraction sign",
    )


def _t6_delta_shift(rng, gc, cc, trial, inputs):
    M = gen_tensor(gc, rng)
    inputs["tensor"] = M
    deltas = (1.0, 0.1, 0.01)
    # The shifted strict checks run with a wide support floor and a tight
    # violation threshold: every component of a shifted witness above the
    # floor then satisfies contraction <= tol_neg - delta * floor^(r-1),
    # which is decisively negative on the unshifted tensor, so any shifted
    # witness either transports back to the base tensor or is rejected.
    cc = replace(cc, tol_pos=1e-3, tol_neg=1e-12)
    report = check_delta_shift(M, deltas, cc)
    if report.base.is_member:
        if report.member_consistent is not True:
            bad = next(v for _, v in report.shifts if not v.is_member)
            _require(
                _witness_ok(M, bad.witness, cc, strict=False),
                "a diagonal shift produced a witness that fails on the base tensor",
            )
    else:
        w = report.base.witness
        v = report.base.certificate
        supp = w > cc.tol_pos
        delta_max = np.min(-v[supp] / w[supp] ** (gc.r - 1))
        ident = identity_tensor(gc.r, gc.n)
        for d in deltas:
            if d <= delta_max:
                shifted = add(M, scale(d, ident))
                _require(
                    _witness_ok(shifted, w, cc, strict=True),
                    f"witness did not survive the {d} shift below its margin",
                )


def _t7_g_matrix(rng, gc, cc, trial, inputs):
    M = gen_tensor(gc, rng)
    u = gen_nonneg_vector(gc, rng)
    inputs["tensor"] = M
    inputs["u"] = u
    v = tv_contract(M, u)
    # Repair rows violating the hypothesis (support components must have
    # nonpositive contraction): negating a row negates that contraction entry.
    bad = [i for i in range(gc.n) if u[i] > 0 and v[i] > 0]
    if bad:
        entries = []
        for idx, val in M.entries():
            entries.append((idx, -val if idx[0] - 1 in bad else val))
        M = make_tensor(gc.r, gc.n, entries)
        inputs["tensor"] = M
    G = build_g_matrix(M, u)
    g = np.diag(G)
    _require(bool(np.all(g >= 0) and np.all(g <= 1)), "blend coefficients left [0, 1]")
    resid = np.max(np.abs(tv_contract(g_combination(M, G), u)), initial=0.0)
    _require(resid <= 1e-10, f"blend residual {resid} exceeds 1e-10")


def _t8_majorization_bridge(rng, gc, cc, trial, inputs):
    strict = _strictness_for(trial)
    sample = gen_row_diagonal(gc, rng)
    M, A = sample.tensor, sample.matrix
    inputs["matrix"] = A
    inputs["tensor"] = M
    _require(is_row_diagonal(M), "generator produced a non-row-diagonal tensor")
    mcheck = check_strictly_semimonotone if strict else check_semimonotone
    tcheck = check_strictly_semipositive if strict else check_semipositive
    mv = mcheck(A)
    tvd = tcheck(M, cc)
    if mv.is_member:
        _require(
            tvd.is_member,
            "matrix member but a tensor witness was found at resolution",
        )
    else:
        z = mv.witness
        u = vec_power(z, 1.0 / (gc.r - 1))
        _require(
            _witness_ok(M, u, cc, strict),
            "matrix witness failed to transport through the componentwise root",
        )
        _require(not tvd.is_member, "matrix NonMember but tensor checker found no witness")


def _t9_inheritance(rng, gc, cc, trial, inputs):
    strict = _strictness_for(trial)
    M = gen_tensor(gc, rng)
    size = int(rng.integers(1, gc.n + 1))
    J = sorted(rng.choice(np.arange(1, gc.n + 1), size=size, replace=False).tolist())
    inputs["tensor"] = M
    inputs["subset"] = np.array(J, dtype=float)
    sub = principal_subtensor(M, J)
    check = check_strictly_semipositive if strict else check_semipositive
    sv = check(sub, cc)
    if not sv.is_member:
        lifted = np.zeros(gc.n)
        lifted[[j - 1 for j in J]] = sv.witness
        _require(
            _witness_ok(M, lifted, cc, strict),
            "subtensor witness failed to lift by zero padding",
        )


_Suite = Callable[[np.random.Generator, GenConfig, CheckConfig, int, dict], None]

SUITES: dict[str, tuple[str, _Suite]] = {
    "T1": ("positive diagonal scaling invariance", _t1_diag_scaling),
    "T2": ("nonnegative diagonal scaling, member direction", _t2_nonneg_diag),
    "T2-fixed": ("fixed rescaling counterexample pair", _t2_fixed),
    "T3": ("permutation conjugation invariance", _t3_permutation),
    "T4": ("adding a nonnegative tensor preserves membership", _t4_monotone_sum),
    "T5": ("null-diagonal construction annihilates a positive vector", _t5_null_diagonal),
    "T6": ("diagonal shifts of members are strictly semipositive", _t6_delta_shift),
    "T7": ("blend matrix construction annihilates a nonnegative vector", _t7_g_matrix),
    "T8": ("row-diagonal tensors mirror their majorization matrix", _t8_majorization_bridge),
    "T9": ("principal subtensor violations lift to the parent", _t9_inheritance),
}

SUITE_NAMES = tuple(SUITES)


def run_suite(
    name: str,
    trials: int,
    cfg: GenConfig | None = None,
    check_cfg: CheckConfig | None = None,
    threads: int = 1,
) -> SuiteReport:
    """Run one suite for the given number of trials.

    Trials cycle deterministically through the (order, dimension) combos and
    draw from per-trial seeded generators, so reports are reproducible for a
    fixed (name, trials, seed) regardless of thread count.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    cfg = cfg or GenConfig()
    check_cfg = check_cfg or CheckConfig()
    _, fn = SUITES[name]

    def one_trial(t: int) -> str | None:
        r, n = _TRIAL_COMBOS[t % len(_TRIAL_COMBOS)]
        gc = replace(cfg, r=r, n=n)
        rng = np.random.default_rng([cfg.seed, t])
        inputs: dict = {}
        try:
            fn(rng, gc, check_cfg, t, inputs)
        except _TrialFailure as exc:
            return _dump(name, t, cfg.seed, gc, str(exc), inputs)
        return None

    start = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one_trial, range(trials)))
    else:
        outcomes = [one_trial(t) for t in range(trials)]
    wall = time.perf_counter() - start
    dumps = [d for d in outcomes if d is not None]
    return SuiteReport(
        suite=name,
        trials=trials,
        failures=len(dumps),
        counterexamples=dumps,
        seed=cfg.seed,
        wall_time=wall,
    )
