"""Density matrices over the occupation basis, with fermionic partial traces."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fock import (
    FockError,
    FockVector,
    ModeOrder,
    SSRVerdict,
    _permutation,
    index_to_bits,
    reorder_sign,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
SSR_TOL = 1e-12


class DensityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive Hermitian matrix indexed in lexicographic bit order.

    ``order`` is ``None`` only for the one-dimensional result of tracing out
    every mode.
    """

    order: ModeOrder | None
    matrix: np.ndarray

    def __post_init__(self):
        order = self.order
        if order is not None and not isinstance(order, ModeOrder):
            order = ModeOrder(order)
            object.__setattr__(self, "order", order)
        mat = np.array(self.matrix, dtype=complex)
        dim = 1 if order is None else 2 ** len(order)
        if mat.shape != (dim, dim):
            raise DensityError(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        dev = np.max(np.abs(mat - mat.conj().T))
        if dev > HERMITIAN_TOL:
            raise DensityError(f"matrix is not Hermitian (max deviation {dev:.3g})")
        tr = np.trace(mat).real
        if abs(tr - 1) > TRACE_TOL:
            raise DensityError(f"trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh(mat).min()
        if lowest < -POSITIVITY_TOL:
            raise DensityError(f"matrix has a negative eigenvalue {lowest:.3g}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n_modes(self) -> int:
        return 0 if self.order is None else len(self.order)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(order={self.order}, dim={self.dim})"


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues in descending order."""

    eigenvalues: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    @property
    def min(self) -> float:
        return self.eigenvalues[-1]


def _as_array(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def outer(state: FockVector) -> DensityMatrix:
    """Projector onto a normalized pure state, in the state's own mode order."""
    nrm = state.norm()
    if abs(nrm - 1) > 1e-10:
        raise DensityError(f"state is not normalized (norm {nrm!r})")
    vec = state.to_array() / nrm
    return DensityMatrix(state.order, np.outer(vec, vec.conj()))


def _signed_permutation(old: ModeOrder, new: ModeOrder) -> tuple[np.ndarray, np.ndarray]:
    """For every old basis index: its index in ``new`` and the braiding sign."""
    perm = _permutation(old, new)
    n = len(old)
    target = np.empty(2**n, dtype=np.intp)
    signs = np.empty(2**n)
    for i in range(2**n):
        bits = index_to_bits(i, n)
        j = 0
        for p in perm:
            j = (j << 1) | bits[p]
        target[i] = j
        signs[i] = reorder_sign(bits, perm)
    return target, signs


def reorder_density(rho: DensityMatrix, new_order: ModeOrder | Iterable[str]) -> DensityMatrix:
    """Conjugate ``rho`` by the signed permutation taking its modes to ``new_order``."""
    if not isinstance(new_order, ModeOrder):
        new_order = ModeOrder(new_order)
    if rho.order is None:
        raise DensityError("a zero-mode density matrix has nothing to reorder")
    try:
        target, signs = _signed_permutation(rho.order, new_order)
    except FockError as exc:
        raise DensityError(str(exc)) from None
    out = np.zeros_like(rho.matrix)
    out[np.ix_(target, target)] = rho.matrix * np.outer(signs, signs)
    return DensityMatrix(new_order, out)


def partial_trace(rho: DensityMatrix, traced: Iterable[str]) -> DensityMatrix:
    """Trace out ``traced`` modes, moving each to the end with braiding signs first.

    The surviving modes keep their relative order.
    """
    traced = list(dict.fromkeys(traced))
    if rho.order is None:
        if traced:
            raise DensityError("no modes left to trace")
        return rho
    for lab in traced:
        if lab not in rho.order:
            raise DensityError(f"unknown mode {lab!r}; modes are {rho.order.labels!r}")
    for lab in traced:
        rest = rho.order.without([lab])
        moved = reorder_density(rho, rest + (lab,))
        half = moved.dim // 2
        block = moved.matrix.reshape(half, 2, half, 2)
        reduced = np.trace(block, axis1=1, axis2=3)
        rho = DensityMatrix(ModeOrder(rest) if rest else None, reduced)
    return rho


def partial_transpose_array(
    mat: np.ndarray, dims: Sequence[int], systems: Iterable[int]
) -> np.ndarray:
    """Transpose the tensor factors listed in ``systems`` of a ``prod(dims)`` square matrix."""
    mat = np.asarray(mat)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if mat.shape != (total, total):
        raise DensityError(f"matrix shape {mat.shape} does not match dims {dims}")
    systems = sorted(set(systems))
    for s in systems:
        if not 0 <= s < len(dims):
            raise DensityError(f"subsystem index {s} out of range for dims {dims}")
    if not systems:
        warnings.warn("empty subsystem: partial transpose is the identity", stacklevel=2)
        return mat.copy()
    if len(systems) == len(dims):
        warnings.warn("full subsystem: partial transpose is the full transpose", stacklevel=2)
        return mat.T.copy()
    n = len(dims)
    tensor = mat.reshape(dims + dims)
    axes = list(range(2 * n))
    for s in systems:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return tensor.transpose(axes).reshape(total, total)


def partial_transpose(rho: DensityMatrix, subsystem: Iterable[str]) -> np.ndarray:
    """Partial transpose on the named modes; the result need not be positive."""
    if rho.order is None:
        raise DensityError("a zero-mode density matrix has no subsystems")
    systems = []
    for lab in subsystem:
        if lab not in rho.order:
            raise DensityError(f"unknown mode {lab!r}; modes are {rho.order.labels!r}")
        systems.append(rho.order.index(lab))
    return partial_transpose_array(rho.matrix, [2] * rho.n_modes, systems)


def spectrum(rho: DensityMatrix | np.ndarray) -> Spectrum:
    mat = _as_array(rho)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DensityError(f"spectrum needs a square matrix, got shape {mat.shape}")
    dev = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if dev > 1e-10:
        raise DensityError(f"matrix is not Hermitian (max deviation {dev:.3g})")
    vals = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
    return Spectrum(tuple(float(v) for v in vals[::-1]))


def parity_mask(n_modes: int) -> np.ndarray:
    """Boolean mask over basis indices that are odd in fermion number."""
    idx = np.arange(2**n_modes)
    counts = np.zeros_like(idx)
    for j in range(n_modes):
        counts += (idx >> j) & 1
    return counts % 2 == 1


def ssr_check_mixed(rho: DensityMatrix) -> SSRVerdict:
    """Valid iff ``rho`` has no coherence between even and odd fermion numbers."""
    odd = parity_mask(rho.n_modes)
    cross = np.abs(rho.matrix[np.ix_(~odd, odd)])
    if cross.size == 0 or cross.max() < SSR_TOL:
        return SSRVerdict(True)
    i, j = np.unravel_index(np.argmax(cross), cross.shape)
    n = rho.n_modes
    even_idx = np.flatnonzero(~odd)[i]
    odd_idx = np.flatnonzero(odd)[j]
    fmt = lambda k: "|" + "".join(map(str, index_to_bits(int(k), n))) + ">"  # noqa: E731
    return SSRVerdict(
        False,
        f"mixes even and odd sectors (coherence {cross[i, j]:.3g} between "
        f"{fmt(even_idx)} and {fmt(odd_idx)})",
    )


def ssr_separable_two_modes(rho: DensityMatrix) -> bool:
    """Two-mode separability under the parity rule: the matrix must be diagonal."""
    if rho.n_modes != 2:
        raise DensityError(f"expected a two-mode density matrix, got {rho.n_modes} modes")
    off = rho.matrix - np.diag(np.diag(rho.matrix))
    return bool(np.max(np.abs(off)) < SSR_TOL)
