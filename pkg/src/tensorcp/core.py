"""Sparse coordinate tensors and the multilinear algebra behind the checkers.

A tensor of order ``r`` and dimension ``n`` is stored as a map from index
tuples to nonzero float entries; absent tuples are zero.  Indices are 1-based
in every public interface (construction, serialization, witnesses) and
converted to 0-based exactly once at the boundary.  Vectors and matrices are
plain numpy arrays.

Tensors are immutable after construction and every operation here is a pure
function, so values can be shared freely across threads.

Reproducibility notes: the contraction ``tv_contract`` accumulates its terms
in lexicographic index order through :func:`math.fsum`, which returns the
correctly rounded sum.  The batched evaluator :func:`contract_batch` used by
the search code accumulates with plain numpy sums in the same fixed order.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Tensor",
    "make_tensor",
    "zero_tensor",
    "identity_tensor",
    "tensor_from_matrix",
    "tv_contract",
    "contract_batch",
    "scalar_form",
    "vec_power",
    "principal_subtensor",
    "row_subtensor",
    "is_row_diagonal",
    "majorization",
    "shao_product",
    "permute_conjugate",
    "add",
    "scale",
    "is_null_vector",
    "to_dense",
    "is_diagonal_matrix",
    "is_positive_diagonal",
    "is_nonnegative_diagonal",
    "is_permutation_matrix",
]

IndexTuple = tuple[int, ...]

_DENSE_LIMIT = 1_000_000


def _as_vector(u, dim: int | None = None) -> np.ndarray:
    v = np.asarray(u, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got array of shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite components")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: vector has {v.shape[0]} components, expected {dim}")
    return v


def _as_matrix(a, dim: int | None = None) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"dimension mismatch: matrix is {m.shape[0]}x{m.shape[0]}, expected {dim}")
    return m


def _index_set(J: Sequence[int], dim: int) -> tuple[int, ...]:
    """Validate a 1-based index subset and return it sorted (0-based)."""
    members = tuple(J)
    if not members:
        raise ValueError("index set must be nonempty")
    for j in members:
        if not isinstance(j, (int, np.integer)):
            raise ValueError(f"index set member {j!r} is not an integer")
        if not 1 <= j <= dim:
            raise ValueError(f"index set member {j} out of range for dimension {dim}")
    out = tuple(sorted(int(j) for j in members))
    if len(set(out)) != len(out):
        raise ValueError(f"index set {members} contains duplicates")
    return tuple(j - 1 for j in out)


class Tensor:
    """Order-``r`` dimension-``n`` tensor in sparse coordinate form.

    Use :func:`make_tensor` (or the other constructors in this module) rather
    than instantiating directly.  Equality is exact map equality: two tensors
    compare equal iff order, dimension, and the zero-completed entry maps
    coincide.
    """

    __slots__ = ("order", "dim", "_m", "_prog")

    def __init__(self, order: int, dim: int, mapping: dict):
        # mapping: 0-based tuples -> nonzero finite floats, already validated
        self.order = order
        self.dim = dim
        self._m = mapping
        self._prog = None

    @property
    def nnz(self) -> int:
        return len(self._m)

    def entries(self) -> list[tuple[IndexTuple, float]]:
        """Stored entries as (1-based index tuple, value), lexicographic."""
        return [
            (tuple(i + 1 for i in key), self._m[key]) for key in sorted(self._m)
        ]

    def _items(self) -> list[tuple[IndexTuple, float]]:
        """Stored entries with 0-based tuples, lexicographic."""
        return [(key, self._m[key]) for key in sorted(self._m)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and self._m == other._m
        )

    __hash__ = None  # mutable-looking value type; not hashable

    def __repr__(self) -> str:
        return f"Tensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"

    # Contraction program: entries grouped by first index, built lazily and
    # cached (construction-time immutability makes the cache safe).
    def _program(self):
        if self._prog is None:
            rows: list[list[tuple[IndexTuple, float]]] = [[] for _ in range(self.dim)]
            for key, val in self._items():
                rows[key[0]].append((key[1:], val))
            prog = []
            for i, terms in enumerate(rows):
                if not terms:
                    continue
                cols = np.array([t[0] for t in terms], dtype=np.intp)
                coeff = np.array([t[1] for t in terms], dtype=float)
                prog.append((i, cols, coeff))
            self._prog = prog
        return self._prog


def _from_map(order: int, dim: int, mapping: Mapping[IndexTuple, float]) -> Tensor:
    """Internal constructor: drops exact zeros, keys assumed valid 0-based."""
    clean = {key: float(val) for key, val in mapping.items() if val != 0.0}
    return Tensor(order, dim, clean)


def make_tensor(
    order: int,
    dim: int,
    entries: Iterable[tuple[Sequence[int], float]] | Mapping[Sequence[int], float],
) -> Tensor:
    """Build a tensor from 1-based ``(index tuple, value)`` pairs.

    Rejects out-of-range indices, wrong-arity tuples, duplicate tuples, and
    non-finite values, naming the offending tuple.  Zero values are dropped so
    that tensor equality is entry-map equality.
    """
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if isinstance(entries, Mapping):
        pairs = entries.items()
    else:
        pairs = entries
    mapping: dict[IndexTuple, float] = {}
    for raw_key, raw_val in pairs:
        key = tuple(raw_key)
        if len(key) != order:
            raise ValueError(f"entry {key}: expected {order} indices, got {len(key)}")
        for i in key:
            if not isinstance(i, (int, np.integer)):
                raise ValueError(f"entry {key}: index {i!r} is not an integer")
            if not 1 <= i <= dim:
                raise ValueError(f"entry {key}: index {i} out of range for dimension {dim}")
        key0 = tuple(int(i) - 1 for i in key)
        if key0 in mapping:
            raise ValueError(f"entry {key}: duplicate index tuple")
        val = float(raw_val)
        if not math.isfinite(val):
            raise ValueError(f"entry {key}: value {raw_val!r} is not finite")
        mapping[key0] = val
    return _from_map(order, dim, mapping)


def zero_tensor(order: int, dim: int) -> Tensor:
    """The all-zero tensor of the given shape."""
    return make_tensor(order, dim, [])


def identity_tensor(order: int, dim: int) -> Tensor:
    """Diagonal tensor with unit entries: 1 at every all-equal index tuple."""
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return _from_map(order, dim, {(i,) * order: 1.0 for i in range(dim)})


def tensor_from_matrix(a) -> Tensor:
    """View an n-by-n matrix as an order-2 tensor."""
    m = _as_matrix(a)
    n = m.shape[0]
    mapping = {
        (i, j): m[i, j] for i in range(n) for j in range(n) if m[i, j] != 0.0
    }
    return _from_map(2, n, mapping)


def _as_operand_tensor(x) -> Tensor:
    """Coerce matrices (order 2) and vectors (order 1) into tensors."""
    if isinstance(x, Tensor):
        return x
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2:
        return tensor_from_matrix(arr)
    if arr.ndim == 1:
        v = _as_vector(arr)
        mapping = {(i,): v[i] for i in range(v.shape[0]) if v[i] != 0.0}
        return _from_map(1, v.shape[0], mapping)
    raise ValueError(f"cannot interpret array of shape {arr.shape} as a tensor")


def tv_contract(M: Tensor, u) -> np.ndarray:
    """Contract ``M`` with ``r - 1`` copies of ``u``.

    Component ``i`` is the sum of ``m[i, i2, ..., ir] * u[i2] * ... * u[ir]``
    over all stored entries with first index ``i``.  Terms are accumulated in
    lexicographic index order with correctly rounded summation, so results are
    reproducible bit-for-bit.
    """
    if M.order < 2:
        raise ValueError("contraction requires a tensor of order >= 2")
    v = _as_vector(u, M.dim)
    out = np.zeros(M.dim)
    for i, cols, coeff in M._program():
        terms = []
        for t in range(coeff.shape[0]):
            p = coeff[t]
            for c in cols[t]:
                p = p * v[c]
            terms.append(p)
        out[i] = math.fsum(terms)
    return out


def contract_batch(M: Tensor, X) -> np.ndarray:
    """Evaluate ``tv_contract`` at many points at once.

    ``X`` has one point per row; returns the matching rows of contractions.
    Uses plain vectorized accumulation (deterministic, but not the compensated
    path of :func:`tv_contract`); intended for search and scan loops.
    """
    if M.order < 2:
        raise ValueError("contraction requires a tensor of order >= 2")
    pts = np.asarray(X, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != M.dim:
        raise ValueError(f"expected points of shape (N, {M.dim}), got {pts.shape}")
    out = np.zeros(pts.shape)
    for i, cols, coeff in M._program():
        out[:, i] = (pts[:, cols].prod(axis=2) * coeff).sum(axis=1)
    return out


def scalar_form(M: Tensor, u) -> float:
    """The scalar ``u . (M u^{r-1})``."""
    v = _as_vector(u, M.dim)
    w = tv_contract(M, v)
    return math.fsum(v[i] * w[i] for i in range(M.dim))


def vec_power(u, p: float) -> np.ndarray:
    """Componentwise power ``(u_1^p, ..., u_n^p)``.

    Fractional exponents require nonnegative components.  Nonnegative integer
    exponents use a left-to-right multiplication chain, matching the product
    order of :func:`tv_contract` term by term, so the identity-tensor
    contraction law holds bit-exactly.
    """
    v = _as_vector(u)
    pf = float(p)
    if pf != round(pf) and np.any(v < 0):
        bad = int(np.argmax(v < 0))
        raise ValueError(
            f"component {bad + 1} is negative; fractional power {p} undefined"
        )
    if pf == round(pf) and pf >= 0:
        out = np.ones_like(v)
        for _ in range(int(pf)):
            out = out * v
        return out
    return np.power(v, pf)


def principal_subtensor(M: Tensor, J: Sequence[int]) -> Tensor:
    """Restrict every index to the 1-based subset ``J`` and relabel by its order."""
    members = _index_set(J, M.dim)
    pos = {j: k for k, j in enumerate(members)}
    mapping = {}
    for key, val in M._m.items():
        if all(i in pos for i in key):
            mapping[tuple(pos[i] for i in key)] = val
    return _from_map(M.order, len(members), mapping)


def row_subtensor(M: Tensor, i: int) -> Tensor:
    """The order-(r-1) slice fixing the first index to ``i`` (1-based)."""
    if not 1 <= i <= M.dim:
        raise ValueError(f"row index {i} out of range for dimension {M.dim}")
    i0 = i - 1
    mapping = {key[1:]: val for key, val in M._m.items() if key[0] == i0}
    return _from_map(M.order - 1, M.dim, mapping)


def is_row_diagonal(M: Tensor) -> bool:
    """True iff every stored entry has all trailing indices equal."""
    return all(len(set(key[1:])) <= 1 for key in M._m)


def majorization(M: Tensor) -> np.ndarray:
    """The n-by-n matrix with entry ``(i, j)`` equal to ``m[i, j, ..., j]``."""
    n = M.dim
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = M._m.get((i,) + (j,) * (M.order - 1), 0.0)
    return out


def shao_product(A, B) -> Tensor:
    """General tensor product contracting A's trailing indices with B's rows.

    For ``A`` of order ``p`` and ``B`` of order ``s`` (same dimension), the
    result ``C`` has order ``(p-1)(s-1) + 1`` with

        C[j, b1, ..., b(p-1)] = sum over j2..jp of
            A[j, j2, ..., jp] * B[j2, b1] * ... * B[jp, b(p-1)]

    where each ``bk`` is a block of ``s - 1`` indices.  Matrices and vectors
    are admitted as order-2 / order-1 tensors; an order-1 right operand
    reduces the product to :func:`tv_contract`.
    """
    ta = _as_operand_tensor(A)
    tb = _as_operand_tensor(B)
    if ta.dim != tb.dim:
        raise ValueError(f"dimension mismatch: {ta.dim} vs {tb.dim}")
    if ta.order < 2:
        raise ValueError("left operand must have order >= 2")
    if tb.order < 1:
        raise ValueError("right operand must have order >= 1")
    p = ta.order
    block = tb.order - 1
    out_order = (p - 1) * block + 1

    rows: list[list[tuple[IndexTuple, float]]] = [[] for _ in range(tb.dim)]
    for key, val in tb._items():
        if tb.order == 1:
            rows[key[0]].append(((), val))
        else:
            rows[key[0]].append((key[1:], val))

    terms: dict[IndexTuple, list[float]] = {}
    for key, aval in ta._items():
        j, tail = key[0], key[1:]
        for combo in itertools.product(*(rows[jk] for jk in tail)):
            out_key = (j,)
            prod = aval
            for beta, bval in combo:
                out_key = out_key + beta
                prod = prod * bval
            terms.setdefault(out_key, []).append(prod)
    mapping = {key: math.fsum(vals) for key, vals in sorted(terms.items())}
    return _from_map(out_order, ta.dim, mapping)


def permute_conjugate(P, M: Tensor) -> Tensor:
    """Conjugate ``M`` by a permutation matrix: ``P`` times ``M`` times ``P^T``."""
    pm = _as_matrix(P, M.dim)
    if not is_permutation_matrix(pm):
        raise ValueError("P is not a permutation matrix")
    return shao_product(shao_product(pm, M), pm.T)


def add(M: Tensor, N: Tensor) -> Tensor:
    """Entrywise sum; exact-zero results are dropped from the map."""
    if M.order != N.order or M.dim != N.dim:
        raise ValueError(
            f"shape mismatch: order {M.order} dim {M.dim} vs order {N.order} dim {N.dim}"
        )
    mapping = dict(M._m)
    for key, val in N._m.items():
        mapping[key] = mapping.get(key, 0.0) + val
    return _from_map(M.order, M.dim, mapping)


def scale(alpha: float, M: Tensor) -> Tensor:
    """Multiply every entry by ``alpha``."""
    a = float(alpha)
    if not math.isfinite(a):
        raise ValueError(f"scale factor {alpha!r} is not finite")
    return _from_map(M.order, M.dim, {k: a * v for k, v in M._m.items()})


def is_null_vector(M: Tensor, u, tol: float) -> bool:
    """True iff the contraction at ``u`` vanishes in max norm up to ``tol``."""
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    v = tv_contract(M, u)
    return bool(np.max(np.abs(v), initial=0.0) <= tol)


def to_dense(M: Tensor) -> np.ndarray:
    """Materialize the full array; guarded to desk scale (n**r <= 1e6)."""
    size = M.dim**M.order
    if size > _DENSE_LIMIT:
        raise ValueError(
            f"dense materialization of {M.dim}**{M.order} = {size} entries exceeds limit"
        )
    out = np.zeros((M.dim,) * M.order)
    for key, val in M._m.items():
        out[key] = val
    return out


def is_diagonal_matrix(a) -> bool:
    m = _as_matrix(a)
    return bool(np.all(m == np.diag(np.diag(m))))


def is_positive_diagonal(a) -> bool:
    m = _as_matrix(a)
    return is_diagonal_matrix(m) and bool(np.all(np.diag(m) > 0))


def is_nonnegative_diagonal(a) -> bool:
    m = _as_matrix(a)
    return is_diagonal_matrix(m) and bool(np.all(np.diag(m) >= 0))


def is_permutation_matrix(a) -> bool:
    m = _as_matrix(a)
    if not np.all((m == 0.0) | (m == 1.0)):
        return False
    return bool(np.all(m.sum(axis=0) == 1.0) and np.all(m.sum(axis=1) == 1.0))
