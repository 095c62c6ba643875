"""Kraus channels, the qubit erasure channel, and the accelerated two-mode state."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityMatrix, Spectrum, partial_transpose_array, spectrum

COMPLETENESS_TOL = 1e-12

#: Choi bipartition: reference qubit x three-level erasure output
CHOI_DIMS = (2, 3)


class ChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving map ``rho -> sum_i K_i rho K_i^dag``."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise ChannelError("Kraus operators must be matrices of a common shape")
        total = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(total - np.eye(shape[1])))
        if dev > COMPLETENESS_TOL:
            raise ChannelError(f"Kraus operators are not trace preserving (deviation {dev:.3g})")
        for k in ops:
            k.flags.writeable = False
        object.__setattr__(self, "kraus", ops)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)


def _check_prob(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"erasure probability must lie in [0, 1], got {p!r}")
    return p


def erasure_channel(p: float) -> KrausChannel:
    """Qubit erasure channel into ``span{|0>, |1>, |e>}``.

    The flag ``|e>`` is the third output level, orthogonal to both inputs.
    """
    p = _check_prob(p)
    keep = math.sqrt(1 - p) * np.array([[1, 0], [0, 1], [0, 0]])
    flag_one = math.sqrt(p) * np.array([[0, 0], [0, 0], [0, 1]])
    flag_zero = math.sqrt(p) * np.array([[0, 0], [0, 0], [1, 0]])
    return KrausChannel((keep, flag_one, flag_zero))


def apply_channel(channel: KrausChannel, rho: DensityMatrix | np.ndarray) -> np.ndarray:
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (channel.d_in, channel.d_in):
        raise ChannelError(f"channel takes {channel.d_in}x{channel.d_in} inputs, got {mat.shape}")
    return sum(k @ mat @ k.conj().T for k in channel.kraus)


def choi_state(channel: KrausChannel) -> np.ndarray:
    """``(id x N)`` applied to the maximally entangled state of two ``d_in`` systems."""
    d = channel.d_in
    omega = np.eye(d).reshape(d * d) / math.sqrt(d)
    phi = np.outer(omega, omega.conj())
    ops = [np.kron(np.eye(d), k) for k in channel.kraus]
    return sum(op @ phi @ op.conj().T for op in ops)


def erasure_choi(p: float) -> np.ndarray:
    """6x6 Choi matrix of the erasure channel, factor order ``CHOI_DIMS``."""
    return choi_state(erasure_channel(p))


def erasure_ppt_spectrum(p: float) -> Spectrum:
    """Spectrum of the Choi matrix transposed on the channel output."""
    return spectrum(partial_transpose_array(erasure_choi(p), CHOI_DIMS, [1]))


def erasure_quantum_capacity(p: float) -> float:
    """Quantum capacity ``max(0, 1 - 2p)`` of the qubit erasure channel.

    This is the standard closed form for erasure channels; it is positive
    exactly when ``p < 1/2``.
    """
    p = _check_prob(p)
    return max(0.0, 1.0 - 2.0 * p)


def grassmann_output_state(r: float) -> DensityMatrix:
    """Two-mode state shared with an observer at acceleration parameter ``r``.

    ``r = 0`` is inertial and ``r = pi/4`` the infinite-acceleration limit.
    Basis order is ``|00>, |01>, |10>, |11>`` over modes ``a b``.
    """
    r = float(r)
    if not 0.0 <= r <= math.pi / 4:
        raise ChannelError(f"acceleration parameter must lie in [0, pi/4], got {r!r}")
    c, s = math.cos(r), math.sin(r)
    mat = 0.5 * np.array(
        [
            [c * c, 0, 0, c],
            [0, s * s, 0, 0],
            [0, 0, 0, 0],
            [c, 0, 0, 1],
        ]
    )
    return DensityMatrix(("a", "b"), mat)

