"""Hessians of A_r, inertia counts and the r -> r+1 suspension check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flat_geometry import FlatTorus
from .hamiltonians import RadialProfile, shear_matrix

REL_ZERO = 1e-7
STABILITY_BAND = 0.2


class NotCritical(ValueError):
    pass


class UnstableInertia(ValueError):
    pass


@dataclass(frozen=True)
class InertiaReport:
    eigenvalues: np.ndarray
    n_neg: int
    n_zero: int
    n_pos: int
    zero_threshold: float
    stable: bool
    residual: float

    @property
    def signature(self) -> tuple[int, int, int]:
        return self.n_neg, self.n_zero, self.n_pos

    def to_dict(self) -> dict:
        return {
            "n_neg": self.n_neg,
            "n_zero": self.n_zero,
            "n_pos": self.n_pos,
            "zero_threshold": self.zero_threshold,
            "stable": self.stable,
            "eigenvalues": [float(f"{v:.12g}") for v in self.eigenvalues],
        }


def _counts(values: np.ndarray, threshold: float) -> tuple[int, int, int]:
    neg = int(np.sum(values < -threshold))
    pos = int(np.sum(values > threshold))
    return neg, values.size - neg - pos, pos


def inertia(matrix, zero_threshold: float | None = None, relative: float = REL_ZERO) -> InertiaReport:
    """Eigenvalue counts of a symmetric matrix; the threshold defaults to relative * max|lambda|."""
    a = np.asarray(matrix, dtype=float)
    a = 0.5 * (a + a.T)
    values, vectors = np.linalg.eigh(a)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    threshold = relative * scale if zero_threshold is None else float(zero_threshold)
    counts = _counts(values, threshold)
    stable = all(_counts(values, threshold * f) == counts for f in (1 - STABILITY_BAND, 1 + STABILITY_BAND))
    residual = float(np.max(np.linalg.norm(a @ vectors - vectors * values, axis=0), initial=0.0))
    return InertiaReport(values, *counts, threshold, stable, residual)


def negative_eigenspace(matrix, zero_threshold: float | None = None) -> tuple[InertiaReport, np.ndarray]:
    rep = inertia(matrix, zero_threshold)
    a = np.asarray(matrix, dtype=float)
    values, vectors = np.linalg.eigh(0.5 * (a + a.T))
    return rep, vectors[:, values < -rep.zero_threshold]


def _index(j: int, block: int, n: int, r: int) -> slice:
    start = (j % r) * 2 * n + block * n
    return slice(start, start + n)


def hessian_analytic(torus: FlatTorus, profile: RadialProfile, loop) -> np.ndarray:
    """Exact Hessian of the torus A_r (node-major [q_j, p_j] coordinates).

    Only the fiber-fiber diagonal blocks -t_j S(p_j) depend on the profile;
    the couplings q_j <-> p_{j-1} (+I) and q_j <-> p_j (-I) are constant.
    """
    r, n = loop.r, loop.n
    out = np.zeros((2 * n * r, 2 * n * r))
    eye = np.eye(n)
    shears = shear_matrix(profile, loop.p)
    for j in range(r):
        q_j, p_j, p_prev = _index(j, 0, n, r), _index(j, 1, n, r), _index(j - 1, 1, n, r)
        out[q_j, p_prev] += eye
        out[p_prev, q_j] += eye
        out[q_j, p_j] -= eye
        out[p_j, q_j] -= eye
        out[p_j, p_j] -= loop.durations[j] * shears[j]
    return out


def hessian_fd(torus: FlatTorus, profile: RadialProfile, loop, step: float = 1e-4) -> np.ndarray:
    """Symmetrized central differences of the analytic gradient."""
    from .discrete_action import grad_Ar

    v = loop.vector()
    cols = []
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        cols.append((grad_Ar(torus, profile, loop.with_vector(v + e)) - grad_Ar(torus, profile, loop.with_vector(v - e))) / (2 * step))
    h = np.stack(cols, axis=1)
    return 0.5 * (h + h.T)


def hessian(torus: FlatTorus, profile: RadialProfile, loop, method: str = "analytic", critical_tol: float = 1e-8) -> np.ndarray:
    from .discrete_action import grad_Ar

    residual = float(np.linalg.norm(grad_Ar(torus, profile, loop)))
    if residual >= critical_tol:
        raise NotCritical(f"|grad A_r| = {residual:.3e} is not below {critical_tol:g}")
    if method == "analytic":
        return hessian_analytic(torus, profile, loop)
    if method == "fd":
        return hessian_fd(torus, profile, loop)
    raise ValueError(f"unknown Hessian method {method!r}")


@dataclass
class SuspensionReport:
    r: int
    before: InertiaReport
    after: InertiaReport
    block: InertiaReport
    block_eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return (self.after.eigenvalues.size - self.before.eigenvalues.size) // 2

    @property
    def passed(self) -> bool:
        n = self.n
        block_ok = self.block.signature == (n, 0, n) and np.all(np.abs(np.abs(self.block_eigenvalues) - 1) <= 0.2)
        return (
            self.after.n_neg == self.before.n_neg + n
            and self.after.n_pos == self.before.n_pos + n
            and self.after.n_zero == self.before.n_zero
            and self.before.stable
            and self.after.stable
            and bool(block_ok)
        )

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "before": list(self.before.signature),
            "after": list(self.after.signature),
            "new_block": list(self.block.signature),
            "passed": self.passed,
        }


def suspension_check(torus: FlatTorus, profile: RadialProfile, loop) -> SuspensionReport:
    from .discrete_action import embed_next_r

    before = inertia(hessian(torus, profile, loop))
    bigger = embed_next_r(torus, profile, loop)
    h_after = hessian(torus, profile, bigger)
    after = inertia(h_after)
    n = loop.n
    new = slice(2 * n * loop.r, 2 * n * (loop.r + 1))
    block = h_after[new, new]
    block_rep = inertia(block)
    return SuspensionReport(loop.r, before, after, block_rep, block_rep.eigenvalues)
