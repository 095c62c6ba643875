"""Plain-text formats for states, density matrices, channels.

State file::

    # comment
    modes: a b c
    0.5 0 |100>
    0.5 0 |010>

Density file: a ``modes:`` header, the dimension on its own line, then the
matrix row by row as ``re im`` pairs. Channel file: ``kraus: <count>``
followed by one ``shape: <rows> <cols>`` block per operator, entries laid out
like the density body. Floats are written with 17 significant digits so
everything round-trips exactly.
"""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .channels import KrausChannel
from .density import DensityMatrix
from .fock import FockVector, ModeOrder


class FormatError(ValueError):
    """Parse failure with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def fmt_float(x: float) -> str:
    # "+ 0.0" folds -0.0 into 0.0 so sign flips on zeros never change bytes
    return format(float(x) + 0.0, ".17g")


def _lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, raw


def _col(raw: str, token: str, start: int = 0) -> int:
    return raw.find(token, start) + 1


def _float(token: str, lineno: int, raw: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"expected a number, got {token!r}", lineno, _col(raw, token)) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite number {token!r}", lineno, _col(raw, token))
    return value


def _modes_header(lineno: int, raw: str, allow_empty: bool = False) -> ModeOrder | None:
    stripped = raw.strip()
    if not stripped.startswith("modes:"):
        raise FormatError("expected a 'modes:' header", lineno, _col(raw, stripped[:1]))
    labels = stripped[len("modes:") :].split()
    if not labels:
        if allow_empty:
            return None
        raise FormatError("the 'modes:' header lists no modes", lineno, len(raw.rstrip()) + 1)
    if len(set(labels)) != len(labels):
        raise FormatError(f"duplicate mode labels {labels!r}", lineno, _col(raw, "modes:") + 6)
    return ModeOrder(labels)


# states


def parse_state(text: str) -> FockVector:
    lines = _lines(text)
    try:
        lineno, raw = next(lines)
    except StopIteration:
        raise FormatError("empty state file", 1) from None
    order = _modes_header(lineno, raw)
    n = len(order)
    terms: dict[tuple[int, ...], complex] = {}
    for lineno, raw in lines:
        parts = raw.split()
        if len(parts) != 3:
            raise FormatError("expected '<re> <im> |<bits>>'", lineno, _col(raw, raw.strip()[:1]))
        re_tok, im_tok, ket = parts
        amp = complex(_float(re_tok, lineno, raw), _float(im_tok, lineno, raw))
        if not (ket.startswith("|") and ket.endswith(">")):
            raise FormatError(f"malformed ket {ket!r}", lineno, _col(raw, ket))
        bits_str = ket[1:-1]
        bad = next((i for i, ch in enumerate(bits_str) if ch not in "01"), None)
        if bad is not None:
            raise FormatError(f"occupations must be 0 or 1 in {ket!r}", lineno, _col(raw, ket) + 1 + bad)
        if len(bits_str) != n:
            raise FormatError(f"ket {ket!r} has {len(bits_str)} occupations for {n} modes", lineno, _col(raw, ket))
        bits = tuple(int(ch) for ch in bits_str)
        if bits in terms:
            raise FormatError(f"repeated basis state {ket!r}", lineno, _col(raw, ket))
        terms[bits] = amp
    if not terms:
        raise FormatError("state file has no amplitude lines", lineno + 1)
    return FockVector(order, terms)


def dump_state(state: FockVector) -> str:
    out = [f"modes: {state.order}"]
    for bits, amp in state.terms.items():
        out.append(f"{fmt_float(amp.real)} {fmt_float(amp.imag)} |{''.join(map(str, bits))}>")
    return "\n".join(out) + "\n"


# matrices


def _matrix_body(
    lines: Iterator[tuple[int, str]], rows: int, cols: int, last_line: int
) -> tuple[np.ndarray, int]:
    values: list[float] = []
    needed = 2 * rows * cols
    while len(values) < needed:
        try:
            last_line, raw = next(lines)
        except StopIteration:
            raise FormatError(
                f"expected {needed} numbers for a {rows}x{cols} matrix, found {len(values)}",
                last_line + 1,
            ) from None
        tokens = raw.split()
        if len(values) + len(tokens) > needed:
            raise FormatError("too many numbers for the declared shape", last_line, 1)
        values.extend(_float(tok, last_line, raw) for tok in tokens)
    arr = np.array(values).reshape(rows, cols, 2)
    return arr[..., 0] + 1j * arr[..., 1], last_line


def _dump_matrix(mat: np.ndarray) -> list[str]:
    return [
        "  ".join(f"{fmt_float(z.real)} {fmt_float(z.imag)}" for z in row) for row in np.asarray(mat)
    ]


def parse_density(text: str) -> DensityMatrix:
    lines = _lines(text)
    try:
        lineno, raw = next(lines)
    except StopIteration:
        raise FormatError("empty density file", 1) from None
    order = _modes_header(lineno, raw, allow_empty=True)
    try:
        lineno, raw = next(lines)
    except StopIteration:
        raise FormatError("missing dimension line", lineno + 1) from None
    tok = raw.strip()
    if not tok.isdigit():
        raise FormatError(f"expected an integer dimension, got {tok!r}", lineno, _col(raw, tok))
    dim = int(tok)
    expected = 1 if order is None else 2 ** len(order)
    if dim != expected:
        raise FormatError(f"dimension {dim} does not match {expected} for the listed modes", lineno, _col(raw, tok))
    mat, lineno = _matrix_body(lines, dim, dim, lineno)
    extra = next(lines, None)
    if extra is not None:
        raise FormatError("trailing content after the matrix", extra[0])
    try:
        return DensityMatrix(order, mat)
    except ValueError as exc:
        raise FormatError(f"not a density matrix: {exc}", lineno) from None


def dump_density(rho: DensityMatrix) -> str:
    header = "modes:" if rho.order is None else f"modes: {rho.order}"
    return "\n".join([header, str(rho.dim), *_dump_matrix(rho.matrix)]) + "\n"


def parse_channel(text: str) -> KrausChannel:
    lines = _lines(text)
    try:
        lineno, raw = next(lines)
    except StopIteration:
        raise FormatError("empty channel file", 1) from None
    head = raw.strip()
    if not head.startswith("kraus:") or not head[6:].strip().isdigit():
        raise FormatError("expected 'kraus: <count>'", lineno)
    count = int(head[6:])
    ops = []
    for _ in range(count):
        try:
            lineno, raw = next(lines)
        except StopIteration:
            raise FormatError(f"expected {count} Kraus operators, found {len(ops)}", lineno + 1) from None
        parts = raw.split()
        if len(parts) != 3 or parts[0] != "shape:" or not (parts[1].isdigit() and parts[2].isdigit()):
            raise FormatError("expected 'shape: <rows> <cols>'", lineno)
        mat, lineno = _matrix_body(lines, int(parts[1]), int(parts[2]), lineno)
        ops.append(mat)
    if next(lines, None) is not None:
        raise FormatError("trailing content after the last operator", lineno + 1)
    try:
        return KrausChannel(tuple(ops))
    except ValueError as exc:
        raise FormatError(f"not a valid channel: {exc}", lineno) from None


def dump_channel(channel: KrausChannel) -> str:
    out = [f"kraus: {len(channel)}"]
    for k in channel.kraus:
        out.append(f"shape: {k.shape[0]} {k.shape[1]}")
        out.extend(_dump_matrix(k))
    return "\n".join(out) + "\n"
