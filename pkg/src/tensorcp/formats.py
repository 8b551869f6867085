"""Line-oriented plain-text serialization for tensors, vectors, and matrices.

Grammar (whitespace-separated tokens, ``#`` starts a comment, blank lines are
ignored):

    tensor R N        header, then one entry per line: R 1-based indices + value
    vec N             header, then N values (any line split)
    matrix N          header, then N rows of N values

Numbers are written with ``repr``-shortest formatting (up to 17 significant
digits), so ``parse(write(x))`` is bit-exact.  Parse errors carry the 1-based
line number of the offending token.
"""

from __future__ import annotations

import numpy as np

from .core import Tensor, make_tensor

__all__ = [
    "ParseError",
    "format_number",
    "parse_tensor",
    "parse_vector",
    "parse_matrix",
    "parse_objects",
    "write_tensor",
    "write_vector",
    "write_matrix",
]


class ParseError(ValueError):
    """Malformed text input; message includes the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_number(x: float) -> str:
    """Shortest decimal form that parses back to the same float."""
    v = float(x)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _tokenized_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((lineno, body.split()))
    return out


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"{what} {token!r} is not an integer") from None


def _parse_float(token: str, lineno: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(lineno, f"value {token!r} is not a number") from None
    if not np.isfinite(v):
        raise ParseError(lineno, f"value {token!r} is not finite")
    return v


def _parse_tensor_at(lines, start: int):
    lineno, header = lines[start]
    if len(header) != 3 or header[0] != "tensor":
        raise ParseError(lineno, f"expected 'tensor R N' header, got {' '.join(header)!r}")
    order = _parse_int(header[1], lineno, "order")
    dim = _parse_int(header[2], lineno, "dimension")
    if order < 2 or dim < 1:
        raise ParseError(lineno, f"bad tensor shape: order {order}, dim {dim}")
    entries = []
    seen: dict[tuple, int] = {}
    pos = start + 1
    while pos < len(lines):
        lineno, tokens = lines[pos]
        if tokens[0] in ("tensor", "vec", "matrix"):
            break
        if len(tokens) != order + 1:
            raise ParseError(
                lineno, f"expected {order} indices and a value, got {len(tokens)} tokens"
            )
        idx = tuple(_parse_int(t, lineno, "index") for t in tokens[:order])
        for i in idx:
            if not 1 <= i <= dim:
                raise ParseError(lineno, f"index {i} out of range (dim {dim})")
        if idx in seen:
            raise ParseError(lineno, f"duplicate index tuple {idx} (first on line {seen[idx]})")
        seen[idx] = lineno
        entries.append((idx, _parse_float(tokens[order], lineno)))
        pos += 1
    return make_tensor(order, dim, entries), pos


def _parse_values(lines, start: int, count: int, lineno0: int):
    values = []
    pos = start
    while len(values) < count and pos < len(lines):
        lineno, tokens = lines[pos]
        if tokens[0] in ("tensor", "vec", "matrix"):
            break
        for t in tokens:
            if len(values) == count:
                raise ParseError(lineno, f"expected exactly {count} values")
            values.append(_parse_float(t, lineno))
        pos += 1
    if len(values) < count:
        raise ParseError(lineno0, f"expected {count} values, got {len(values)}")
    return values, pos


def _parse_vector_at(lines, start: int):
    lineno, header = lines[start]
    if len(header) != 2 or header[0] != "vec":
        raise ParseError(lineno, f"expected 'vec N' header, got {' '.join(header)!r}")
    dim = _parse_int(header[1], lineno, "dimension")
    if dim < 1:
        raise ParseError(lineno, f"bad vector dimension {dim}")
    values, pos = _parse_values(lines, start + 1, dim, lineno)
    return np.array(values), pos


def _parse_matrix_at(lines, start: int):
    lineno, header = lines[start]
    if len(header) != 2 or header[0] != "matrix":
        raise ParseError(lineno, f"expected 'matrix N' header, got {' '.join(header)!r}")
    dim = _parse_int(header[1], lineno, "dimension")
    if dim < 1:
        raise ParseError(lineno, f"bad matrix dimension {dim}")
    values, pos = _parse_values(lines, start + 1, dim * dim, lineno)
    return np.array(values).reshape(dim, dim), pos


def parse_objects(text: str) -> list:
    """Parse a file holding any sequence of tensor / vec / matrix sections."""
    lines = _tokenized_lines(text)
    out = []
    pos = 0
    while pos < len(lines):
        lineno, tokens = lines[pos]
        kind = tokens[0]
        if kind == "tensor":
            obj, pos = _parse_tensor_at(lines, pos)
        elif kind == "vec":
            obj, pos = _parse_vector_at(lines, pos)
        elif kind == "matrix":
            obj, pos = _parse_matrix_at(lines, pos)
        else:
            raise ParseError(lineno, f"expected a tensor/vec/matrix header, got {kind!r}")
        out.append(obj)
    return out


def _parse_single(text: str, kind: str):
    objs = parse_objects(text)
    if len(objs) != 1:
        raise ParseError(1, f"expected exactly one {kind}, found {len(objs)} objects")
    return objs[0]


def parse_tensor(text: str) -> Tensor:
    obj = _parse_single(text, "tensor")
    if not isinstance(obj, Tensor):
        raise ParseError(1, "expected a tensor section")
    return obj


def parse_vector(text: str) -> np.ndarray:
    obj = _parse_single(text, "vector")
    if not isinstance(obj, np.ndarray) or obj.ndim != 1:
        raise ParseError(1, "expected a vec section")
    return obj


def parse_matrix(text: str) -> np.ndarray:
    obj = _parse_single(text, "matrix")
    if not isinstance(obj, np.ndarray) or obj.ndim != 2:
        raise ParseError(1, "expected a matrix section")
    return obj


def write_tensor(M: Tensor) -> str:
    lines = [f"tensor {M.order} {M.dim}"]
    for idx, val in M.entries():
        lines.append(" ".join(str(i) for i in idx) + " " + format_number(val))
    return "\n".join(lines) + "\n"


def write_vector(u) -> str:
    v = np.asarray(u, dtype=float)
    return f"vec {v.shape[0]}\n" + " ".join(format_number(x) for x in v) + "\n"


def write_matrix(a) -> str:
    m = np.asarray(a, dtype=float)
    lines = [f"matrix {m.shape[0]}"]
    for row in m:
        lines.append(" ".join(format_number(x) for x in row))
    return "\n".join(lines) + "\n"
