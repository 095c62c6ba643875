"""Entanglement measures for two-mode fermionic states.

Entropies are in bits throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .density import (
    POSITIVITY_TOL,
    DensityError,
    DensityMatrix,
    parity_mask,
    partial_transpose,
    partial_transpose_array,
    spectrum,
    ssr_check_mixed,
)
from .roof import RANK_EPS, RoofConfig, RoofResult, entropy_bits, minimize_roof

__all__ = [
    "RoofConstraint",
    "RoofConfig",
    "RoofDecomposition",
    "EntanglementReport",
    "binary_entropy",
    "von_neumann_entropy",
    "negativity",
    "log_negativity",
    "concurrence_two_qubit",
    "eof_wootters",
    "eof_convex_roof",
]

SIGMA_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0])).astype(complex)


class RoofConstraint(enum.Enum):
    UNCONSTRAINED = "unconstrained"
    PARITY_SSR = "ssr"


@dataclass(frozen=True)
class EntanglementReport:
    measure: str
    value: float
    restarts: int = 0
    gap: float = 0.0
    residual: float = 0.0
    converged: bool = True

    def to_line(self) -> str:
        return (
            f"measure={self.measure} value={_fmt(self.value)} "
            f"restarts={self.restarts} residual={_fmt(self.residual)}"
        )

    @classmethod
    def from_line(cls, line: str) -> "EntanglementReport":
        fields = dict(tok.split("=", 1) for tok in line.split())
        return cls(
            measure=fields["measure"],
            value=float(fields["value"]),
            restarts=int(fields["restarts"]),
            residual=float(fields["residual"]),
        )


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


@dataclass(frozen=True)
class RoofDecomposition:
    """Weighted pure states (rows of ``states``) realising a roof value."""

    weights: np.ndarray
    states: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ia,ib->ab", self.weights, self.states, self.states.conj())

    def __len__(self) -> int:
        return len(self.weights)


def _matrix(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    eigs = np.asarray(spectrum(rho).eigenvalues)
    if eigs.min() < -POSITIVITY_TOL:
        raise DensityError(f"entropy needs a positive matrix; found eigenvalue {eigs.min():.3g}")
    return entropy_bits(np.clip(eigs, 0.0, None))


def _transposed(rho, subsystem, dims) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return partial_transpose(rho, subsystem)
    if dims is None:
        raise DensityError("a bare matrix needs explicit subsystem dims")
    return partial_transpose_array(np.asarray(rho, dtype=complex), dims, subsystem)


def negativity(
    rho: DensityMatrix | np.ndarray,
    subsystem: Iterable[str] | Iterable[int],
    dims: Sequence[int] | None = None,
) -> float:
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose.

    ``subsystem`` holds mode labels for a :class:`DensityMatrix`, or factor
    indices into ``dims`` for a bare matrix.
    """
    eigs = np.asarray(spectrum(_transposed(rho, subsystem, dims)).eigenvalues)
    return float(-eigs[eigs < 0].sum()) + 0.0


def log_negativity(
    rho: DensityMatrix | np.ndarray,
    subsystem: Iterable[str] | Iterable[int],
    dims: Sequence[int] | None = None,
) -> float:
    return math.log2(1 + 2 * negativity(rho, subsystem, dims))


def _check_two_qubit(mat: np.ndarray) -> None:
    if mat.shape != (4, 4):
        raise DensityError(f"two-qubit measure needs a 4x4 matrix, got shape {mat.shape}")


def concurrence_two_qubit(rho: DensityMatrix | np.ndarray) -> float:
    """Spin-flip concurrence.

    The decreasing ``lambda_i`` are the singular values of ``W^T (Y x Y) W``
    for ``rho = W W^dag``; that avoids square roots of tiny eigenvalues.
    """
    mat = _matrix(rho)
    _check_two_qubit(mat)
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    keep = w > RANK_EPS
    factor = v[:, keep] * np.sqrt(w[keep])
    tau = factor.T @ SIGMA_YY @ factor
    lam = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    lam = np.concatenate([lam, np.zeros(4 - lam.size)])
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def eof_wootters(rho: DensityMatrix | np.ndarray) -> float:
    c = concurrence_two_qubit(rho)
    return binary_entropy((1 + math.sqrt(max(0.0, 1 - c * c))) / 2)


def _report(name: str, res: RoofResult) -> EntanglementReport:
    return EntanglementReport(
        measure=name,
        value=res.value,
        restarts=res.restarts,
        gap=res.gap,
        residual=res.residual,
        converged=res.converged,
    )


def eof_convex_roof(
    rho: DensityMatrix | np.ndarray,
    constraint: RoofConstraint = RoofConstraint.UNCONSTRAINED,
    config: RoofConfig | None = None,
) -> tuple[EntanglementReport, RoofDecomposition]:
    """Entanglement of formation of a two-mode state by numerical convex roof.

    With :attr:`RoofConstraint.PARITY_SSR` only parity-definite pure states
    may appear; such states never straddle sectors, so the roof is evaluated
    separately on the even and odd blocks and recombined with their weights.
    """
    config = config or RoofConfig()
    if isinstance(rho, DensityMatrix):
        if rho.n_modes != 2:
            raise DensityError(f"convex roof needs two modes, got {rho.n_modes}")
        dm = rho
    else:
        dm = DensityMatrix(("a", "b"), rho)
    mat = dm.matrix
    if constraint is RoofConstraint.UNCONSTRAINED:
        res = minimize_roof(mat, (2, 2), config)
        return _report("eof-roof", res), RoofDecomposition(res.weights, res.states)

    verdict = ssr_check_mixed(dm)
    if not verdict:
        raise DensityError(f"parity-constrained roof on a forbidden state: {verdict.reason}")
    odd = parity_mask(2)
    value = 0.0
    weights, states = [], []
    restarts, residual, gap, converged = 0, 0.0, math.inf, True
    for sector in (~odd, odd):
        block = np.where(np.outer(sector, sector), mat, 0)
        w = float(np.trace(block).real)
        if w <= RANK_EPS:
            continue
        res = minimize_roof(block / w, (2, 2), config)
        value += w * res.value
        # drop roundoff leakage so every state is exactly parity-definite
        projected = np.where(sector, res.states, 0)
        projected /= np.linalg.norm(projected, axis=1, keepdims=True)
        weights.append(w * res.weights)
        states.append(projected)
        restarts += res.restarts
        residual = max(residual, res.residual)
        if res.restarts > 1:
            gap = min(gap, res.gap)
        converged = converged and res.converged
    report = EntanglementReport(
        measure="eof-roof-ssr",
        value=value,
        restarts=restarts,
        gap=0.0 if math.isinf(gap) else gap,
        residual=residual,
        converged=converged,
    )
    return report, RoofDecomposition(np.concatenate(weights), np.vstack(states))
