"""Convex-roof minimisation of the entanglement entropy.

Every size-``k`` pure-state decomposition of ``rho = W W^dag`` (``W`` holds the
eigenvectors scaled by the square roots of their eigenvalues) is
``psi_i = sum_j U_ij W[:, j]`` for some ``k x r`` isometry ``U``. The isometry
is parametrised by an unconstrained complex matrix ``Z`` through its polar
factor ``U = Z (Z^dag Z)^{-1/2}``, and the average reduced entropy is
minimised with L-BFGS using the analytic gradient.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

LN2 = math.log(2.0)
#: eigenvalues of rho at or below this are treated as numerical zeros
RANK_EPS = 1e-14
_TINY = 1e-300


@dataclass(frozen=True)
class RoofConfig:
    """Optimizer settings. ``size=None`` means twice the rank of the input."""

    size: int | None = None
    restarts: int = 32
    seed: int = 0
    tol: float = 1e-9
    max_iter: int = 3000
    workers: int = 1
    residual_tol: float = 1e-4


@dataclass(frozen=True)
class RoofResult:
    value: float
    weights: np.ndarray
    states: np.ndarray
    restarts: int
    gap: float
    residual: float
    converged: bool


def entropy_bits(eigs: np.ndarray) -> float:
    eigs = eigs[eigs > 0]
    return float(-np.sum(eigs * np.log2(eigs)))


def pure_entropy(psi: np.ndarray, dims: tuple[int, int]) -> float:
    """Entanglement entropy (bits) of a normalised pure state on ``dims``."""
    m = np.asarray(psi).reshape(dims)
    sv = np.linalg.svd(m, compute_uv=False)
    return entropy_bits(sv**2)


def range_factor(rho: np.ndarray) -> np.ndarray:
    """``W`` with ``rho = W W^dag``, keeping only numerically nonzero eigenvalues."""
    w, v = np.linalg.eigh(rho)
    keep = w > RANK_EPS
    return v[:, keep] * np.sqrt(w[keep])


class _Objective:
    """Average reduced entropy as a function of the real-packed ``Z``."""

    def __init__(self, factor: np.ndarray, dims: tuple[int, int], size: int):
        self.wt = factor.T  # r x d
        self.dims = dims
        self.k = size
        self.r = factor.shape[1]

    def unpack(self, x: np.ndarray) -> np.ndarray:
        half = self.k * self.r
        return (x[:half] + 1j * x[half:]).reshape(self.k, self.r)

    @staticmethod
    def pack(z: np.ndarray) -> np.ndarray:
        return np.concatenate([z.real.ravel(), z.imag.ravel()])

    @staticmethod
    def polar(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        s, q = np.linalg.eigh(z.conj().T @ z)
        s = np.maximum(s, _TINY)
        t = (q * s**-0.5) @ q.conj().T
        return z @ t, t, s, q

    def vectors(self, u: np.ndarray) -> np.ndarray:
        return u @ self.wt  # k x d, unnormalised decomposition vectors

    def value_and_grad_u(self, u: np.ndarray) -> tuple[float, np.ndarray]:
        da, db = self.dims
        psi = self.vectors(u)
        m = psi.reshape(self.k, da, db)
        sigma = m @ m.conj().transpose(0, 2, 1)
        lam, vec = np.linalg.eigh(sigma)
        lam = np.maximum(lam, 0.0)
        p = lam.sum(axis=1)
        safe = np.maximum(lam, _TINY)
        value = float(np.sum(p * np.log(np.maximum(p, _TINY))) - np.sum(lam * np.log(safe))) / LN2
        g_eig = (np.log(np.maximum(p, _TINY))[:, None] - np.log(safe)) / LN2
        g_eig[p <= _TINY] = 0.0
        g_sigma = (vec * g_eig[:, None, :]) @ vec.conj().transpose(0, 2, 1)
        g_psi = (g_sigma @ m).reshape(self.k, da * db)
        g_u = g_psi @ self.wt.T.conj()
        return value, g_u

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        z = self.unpack(x)
        u, t, s, q = self.polar(z)
        value, g_u = self.value_and_grad_u(u)
        # chain rule through the inverse square root of S = Z^dag Z
        b_hat = q.conj().T @ (z.conj().T @ g_u) @ q
        rs = s**-0.5
        diff = s[:, None] - s[None, :]
        close = np.abs(diff) <= 1e-12 * np.maximum(s[:, None], s[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            div = np.where(close, -0.5 * s[:, None] ** -1.5, (rs[:, None] - rs[None, :]) / diff)
        c = q @ (div * b_hat) @ q.conj().T
        g_z = g_u @ t + z @ (c + c.conj().T)
        return value, 2 * self.pack(g_z)


def _one_restart(obj: _Objective, seed: np.random.SeedSequence, cfg: RoofConfig):
    rng = np.random.default_rng(seed)
    z0 = rng.standard_normal((obj.k, obj.r)) + 1j * rng.standard_normal((obj.k, obj.r))
    res = minimize(
        obj,
        obj.pack(z0),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": cfg.max_iter, "ftol": cfg.tol, "gtol": 1e-10, "maxcor": 30},
    )
    u = obj.polar(obj.unpack(res.x))[0]
    # residual: gradient norm at the isometry itself
    _, grad = obj(obj.pack(u))
    return float(res.fun), u, bool(res.success), float(np.linalg.norm(grad))


def minimize_roof(rho: np.ndarray, dims: tuple[int, int], cfg: RoofConfig) -> RoofResult:
    """Best decomposition over ``cfg.restarts`` independent seeded restarts."""
    factor = range_factor(rho)
    rank = factor.shape[1]
    if rank == 0:
        raise ValueError("cannot decompose the zero matrix")
    if rank == 1:
        psi = factor[:, 0] / np.linalg.norm(factor[:, 0])
        return RoofResult(
            value=pure_entropy(psi, dims),
            weights=np.array([float(np.trace(rho).real)]),
            states=psi[None, :],
            restarts=0,
            gap=0.0,
            residual=0.0,
            converged=True,
        )
    size = cfg.size if cfg.size is not None else 2 * rank
    if size < rank:
        raise ValueError(f"decomposition size {size} is below the rank {rank}")
    obj = _Objective(factor, dims, size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            runs = list(pool.map(lambda s: _one_restart(obj, s, cfg), seeds))
    else:
        runs = [_one_restart(obj, s, cfg) for s in seeds]
    # best by value, ties broken by restart index
    ranked = sorted(range(len(runs)), key=lambda i: (runs[i][0], i))
    best_val, u, success, residual = runs[ranked[0]]
    gap = runs[ranked[1]][0] - best_val if len(runs) > 1 else 0.0
    psi = obj.vectors(u)
    weights = np.sum(np.abs(psi) ** 2, axis=1)
    keep = weights > 1e-15
    states = psi[keep] / np.sqrt(weights[keep])[:, None]
    return RoofResult(
        value=best_val,
        weights=weights[keep],
        states=states,
        restarts=len(runs),
        gap=float(gap),
        residual=residual,
        converged=success and residual <= cfg.residual_tol,
    )
