"""Pure fermionic Fock states over an explicitly ordered set of modes.

A basis ket ``|n_0 n_1 ... n_{k-1}>`` stands for the normal-ordered product
of creation operators ``(c_0^dag)^{n_0} (c_1^dag)^{n_1} ... |vac>`` where
``c_j`` is the mode sitting at position ``j`` of the state's :class:`ModeOrder`.
Every sign in this module follows from that convention.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

#: amplitudes with a smaller magnitude are dropped on construction
STORAGE_EPS = 1e-14

Bits = tuple[int, ...]


class FockError(ValueError):
    """Raised on malformed states or illegal mode manipulations."""


@dataclass(frozen=True)
class ModeOrder:
    """Ordered, duplicate-free sequence of mode labels."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(str(lab) for lab in labels)
        if not labels:
            raise FockError("a mode order needs at least one mode")
        if len(set(labels)) != len(labels):
            raise FockError(f"duplicate mode labels in {labels!r}")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __str__(self) -> str:
        return " ".join(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise FockError(f"unknown mode {label!r}; modes are {self.labels!r}") from None

    def canonical(self) -> "ModeOrder":
        """Lexicographic order over the labels."""
        return ModeOrder(sorted(self.labels))

    def is_permutation_of(self, other: "ModeOrder") -> bool:
        return len(self) == len(other) and set(self.labels) == set(other.labels)

    def without(self, labels: Iterable[str]) -> tuple[str, ...]:
        """Surviving labels, in their current relative order."""
        drop = set(labels)
        return tuple(lab for lab in self.labels if lab not in drop)


class Parity(enum.Enum):
    EVEN = "Even"
    ODD = "Odd"
    MIXED = "Mixed"


@dataclass(frozen=True)
class SSRVerdict:
    """Outcome of a superselection check; truthy when the state is allowed."""

    valid: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        return "Valid" if self.valid else f"Violation: {self.reason}"


def count_inversions(seq: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]`` (merge count)."""

    def sort(xs: list[int]) -> tuple[list[int], int]:
        if len(xs) <= 1:
            return xs, 0
        mid = len(xs) // 2
        left, n_left = sort(xs[:mid])
        right, n_right = sort(xs[mid:])
        merged: list[int] = []
        n = n_left + n_right
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                merged.append(right[j])
                n += len(left) - i
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, n

    return sort(list(seq))[1]


def _as_bits(key: str | Sequence[int], n: int) -> Bits:
    if isinstance(key, str):
        key = key.strip().strip("|>")
        if any(ch not in "01" for ch in key):
            raise FockError(f"occupation string {key!r} must contain only 0 and 1")
        bits = tuple(int(ch) for ch in key)
    else:
        bits = tuple(int(b) for b in key)
        if any(b not in (0, 1) for b in bits):
            raise FockError(f"occupations must be 0 or 1, got {bits!r}")
    if len(bits) != n:
        raise FockError(f"occupation pattern {bits!r} does not match {n} modes")
    return bits


def bits_to_index(bits: Bits) -> int:
    """Position of a basis state in lexicographic bit order (first mode is the MSB)."""
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    return idx


def index_to_bits(index: int, n: int) -> Bits:
    return tuple((index >> (n - 1 - j)) & 1 for j in range(n))


@dataclass(frozen=True)
class FockVector:
    """Superposition of occupation basis states with an explicit mode order.

    ``terms`` maps occupation tuples to complex amplitudes. Instances are
    immutable; all operations return new vectors.
    """

    order: ModeOrder
    terms: Mapping[Bits, complex] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.order, ModeOrder):
            object.__setattr__(self, "order", ModeOrder(self.order))
        n = len(self.order)
        clean: dict[Bits, complex] = {}
        for key, amp in self.terms.items():
            bits = _as_bits(key, n)
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise FockError(f"non-finite amplitude for {bits!r}")
            clean[bits] = clean.get(bits, 0j) + amp
        clean = {k: v for k, v in sorted(clean.items()) if abs(v) >= STORAGE_EPS}
        object.__setattr__(self, "terms", clean)

    # constructors

    @classmethod
    def vacuum(cls, order: ModeOrder | Iterable[str]) -> "FockVector":
        order = order if isinstance(order, ModeOrder) else ModeOrder(order)
        return cls(order, {(0,) * len(order): 1.0})

    @classmethod
    def basis(cls, order: ModeOrder | Iterable[str], bits: str | Sequence[int]) -> "FockVector":
        order = order if isinstance(order, ModeOrder) else ModeOrder(order)
        return cls(order, {_as_bits(bits, len(order)): 1.0})

    @classmethod
    def from_array(cls, order: ModeOrder | Iterable[str], vec: np.ndarray) -> "FockVector":
        order = order if isinstance(order, ModeOrder) else ModeOrder(order)
        n = len(order)
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != 2**n:
            raise FockError(f"expected {2**n} amplitudes for {n} modes, got {vec.size}")
        return cls(order, {index_to_bits(i, n): a for i, a in enumerate(vec) if a != 0})

    # basic views

    @property
    def n_modes(self) -> int:
        return len(self.order)

    def is_zero(self) -> bool:
        return not self.terms

    def to_array(self) -> np.ndarray:
        vec = np.zeros(2**self.n_modes, dtype=complex)
        for bits, amp in self.terms.items():
            vec[bits_to_index(bits)] = amp
        return vec

    def norm(self) -> float:
        return math.sqrt(inner_product(self, self).real)

    def normalized(self) -> "FockVector":
        nrm = self.norm()
        if nrm == 0:
            raise FockError("cannot normalize the zero vector")
        return self.scale(1 / nrm)

    def scale(self, factor: complex) -> "FockVector":
        return FockVector(self.order, {k: factor * v for k, v in self.terms.items()})

    def __add__(self, other: "FockVector") -> "FockVector":
        if other.order != self.order:
            raise FockError("cannot add states expressed in different mode orders")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return FockVector(self.order, out)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scale(-1)

    def allclose(self, other: "FockVector", atol: float = 1e-12) -> bool:
        """Compare as physical states, reordering ``other`` if needed."""
        if not other.order.is_permutation_of(self.order):
            return False
        other = reorder_modes(other, self.order)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    def canonical(self) -> "FockVector":
        return reorder_modes(self, self.order.canonical())

    def __str__(self) -> str:
        if not self.terms:
            return f"0 [{self.order}]"
        parts = [f"({amp:.6g})|{''.join(map(str, bits))}>" for bits, amp in self.terms.items()]
        return " + ".join(parts) + f" [{self.order}]"


# ladder operators


def _ladder(state: FockVector, mode: str, create: bool) -> FockVector:
    j = state.order.index(mode)
    src, dst = (0, 1) if create else (1, 0)
    out: dict[Bits, complex] = {}
    for bits, amp in state.terms.items():
        if bits[j] != src:
            continue
        sign = -1 if sum(bits[:j]) % 2 else 1
        new = bits[:j] + (dst,) + bits[j + 1 :]
        out[new] = sign * amp
    return FockVector(state.order, out)


def apply_creation(state: FockVector, mode: str) -> FockVector:
    """``a_mode^dag |state>``; the sign counts occupied modes before ``mode``."""
    return _ladder(state, mode, create=True)


def apply_annihilation(state: FockVector, mode: str) -> FockVector:
    """``a_mode |state>``; same preceding-occupation sign as creation."""
    return _ladder(state, mode, create=False)


# braiding


def reorder_sign(bits: Bits, perm: Sequence[int]) -> int:
    """Sign picked up by a basis ket when position ``perm[i]`` moves to slot ``i``.

    Only occupied modes braid nontrivially, so the sign is the parity of the
    permutation restricted to them.
    """
    occupied = [p for p in perm if bits[p]]
    return -1 if count_inversions(occupied) % 2 else 1


def _permutation(old: ModeOrder, new: ModeOrder) -> list[int]:
    if not new.is_permutation_of(old):
        raise FockError(f"{new.labels!r} is not a permutation of {old.labels!r}")
    return [old.index(lab) for lab in new.labels]


def reorder_modes(state: FockVector, new_order: ModeOrder | Iterable[str]) -> FockVector:
    """Express the same physical state relative to ``new_order``."""
    if not isinstance(new_order, ModeOrder):
        new_order = ModeOrder(new_order)
    perm = _permutation(state.order, new_order)
    out: dict[Bits, complex] = {}
    for bits, amp in state.terms.items():
        new_bits = tuple(bits[p] for p in perm)
        out[new_bits] = reorder_sign(bits, perm) * amp
    return FockVector(new_order, out)


# adjoint and inner product


def adjoint_sign(k: int) -> int:
    """Sign from reversing a product of ``k`` creation operators."""
    return -1 if (k * (k - 1) // 2) % 2 else 1


def braided_adjoint_signs(state: FockVector) -> list[tuple[Bits, complex]]:
    """Bra coefficients of ``state`` against the same-ordered annihilator monomials.

    The term ``c |n>`` is sent to ``conj(c) (-1)^{k(k-1)/2} <vac| a_1 ... a_k``
    with ``k`` the number of occupied modes.
    """
    return [(bits, adjoint_sign(sum(bits)) * amp.conjugate()) for bits, amp in state.terms.items()]


def inner_product(x: FockVector, y: FockVector) -> complex:
    """``<x|y>`` built from the braided bra of ``x``.

    Pairing ``<vac| a_1 ... a_k`` with ``a_1^dag ... a_k^dag |vac>`` gives
    ``(-1)^{k(k-1)/2}``, which cancels the adjoint sign term by term.
    """
    if x.order != y.order:
        raise FockError(
            f"inner product needs a common mode order; got {x.order.labels!r} and {y.order.labels!r}"
        )
    total = 0j
    for bits, bra in braided_adjoint_signs(x):
        ket = y.terms.get(bits)
        if ket is not None:
            total += bra * ket * adjoint_sign(sum(bits))
    return total


# parity and superselection


def parity_of(state: FockVector) -> Parity:
    if state.is_zero():
        raise FockError("the zero vector has no parity")
    seen = {sum(bits) % 2 for bits in state.terms}
    if seen == {0}:
        return Parity.EVEN
    if seen == {1}:
        return Parity.ODD
    return Parity.MIXED


def ssr_check_pure(state: FockVector) -> SSRVerdict:
    if state.is_zero():
        return SSRVerdict(True)
    if parity_of(state) is not Parity.MIXED:
        return SSRVerdict(True)
    even = next(b for b in state.terms if sum(b) % 2 == 0)
    odd = next(b for b in state.terms if sum(b) % 2 == 1)
    fmt = lambda b: "|" + "".join(map(str, b)) + ">"  # noqa: E731
    return SSRVerdict(False, f"mixes even and odd sectors ({fmt(even)} with {fmt(odd)})")


def all_basis_states(order: ModeOrder) -> list[FockVector]:
    return [FockVector(order, {bits: 1.0}) for bits in product((0, 1), repeat=len(order))]
