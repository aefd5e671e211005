"""Exact metric kernels on flat rectangular tori.

A flat torus is R^n modulo the lattice prod_i l_i Z.  Geodesics are straight
lines, so exp, log and parallel transport are closed-form.  All functions
accept single points (shape ``(n,)``) or stacked batches (shape ``(..., n)``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TIE_TOL = 1e-12


class DistanceTooLarge(ValueError):
    """Raised when two points have no unique shortest connecting vector."""


@dataclass(frozen=True)
class FlatTorus:
    lattice_lengths: tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lattice_lengths)
        if not lengths:
            raise ValueError("torus needs at least one lattice length")
        if any(not np.isfinite(x) or x <= 0 for x in lengths):
            raise ValueError(f"lattice lengths must be positive, got {lengths}")
        object.__setattr__(self, "lattice_lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.lattice_lengths)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.lattice_lengths)

    @property
    def injectivity_radius(self) -> float:
        return min(self.lattice_lengths) / 2.0

    @property
    def epsilon0(self) -> float:
        # the chart radius used throughout the discrete action is half of inj
        return self.injectivity_radius / 2.0

    def to_dict(self) -> dict:
        return {"lattice_lengths": list(self.lattice_lengths)}

    @classmethod
    def from_dict(cls, data: dict) -> "FlatTorus":
        return cls(tuple(data["lattice_lengths"]))


@dataclass(frozen=True)
class TorusPoint:
    torus: FlatTorus
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (self.torus.dim,):
            raise ValueError(f"expected {self.torus.dim} coordinates, got shape {coords.shape}")
        object.__setattr__(self, "coords", reduce(self.torus, coords))


@dataclass(frozen=True)
class CotangentPoint:
    base: TorusPoint
    fiber: np.ndarray

    def __post_init__(self):
        fiber = np.asarray(self.fiber, dtype=float)
        if fiber.shape != (self.base.torus.dim,):
            raise ValueError("fiber dimension does not match the torus")
        object.__setattr__(self, "fiber", fiber)


def _coords(x) -> np.ndarray:
    if isinstance(x, TorusPoint):
        return x.coords
    return np.asarray(x, dtype=float)


def reduce(torus: FlatTorus, coords) -> np.ndarray:
    """Reduce coordinates into the fundamental domain [0, l_i)."""
    lengths = torus.lengths
    out = np.mod(np.asarray(coords, dtype=float), lengths)
    # np.mod can return exactly l_i for tiny negative inputs
    return np.where(out >= lengths, out - lengths, out)


def wrap(torus: FlatTorus, v) -> np.ndarray:
    """Shortest lattice representative of a displacement, in [-l_i/2, l_i/2]."""
    lengths = torus.lengths
    v = np.asarray(v, dtype=float)
    return v - lengths * np.round(v / lengths)


def log_map(torus: FlatTorus, start, end) -> np.ndarray:
    """Shortest vector v with start + v = end modulo the lattice."""
    v = wrap(torus, _coords(end) - _coords(start))
    half = torus.lengths / 2.0
    if np.any(np.abs(np.abs(v) - half) <= TIE_TOL * torus.lengths):
        raise DistanceTooLarge("antipodal tie: no unique shortest representative")
    return v


def exp_map(torus: FlatTorus, at, v) -> np.ndarray:
    return reduce(torus, _coords(at) + np.asarray(v, dtype=float))


def dist(torus: FlatTorus, a, b) -> np.ndarray:
    return np.linalg.norm(wrap(torus, _coords(b) - _coords(a)), axis=-1)


def transport(torus: FlatTorus, start, end, vector) -> np.ndarray:
    """Parallel transport along the shortest geodesic; the identity on a flat torus."""
    return np.asarray(vector, dtype=float).copy()


def lattice_vectors(torus: FlatTorus, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """All lattice points w with |w| <= radius.

    Returns ``(counts, vectors)``: integer winding vectors k and w = k * l.
    Ordered by norm, then lexicographically, so output is deterministic.
    """
    lengths = torus.lengths
    bounds = [int(np.floor(radius / ell + 1e-12)) for ell in lengths]
    axes = [np.arange(-b, b + 1) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, torus.dim)
    vectors = grid * lengths
    norms = np.linalg.norm(vectors, axis=1)
    keep = norms <= radius * (1 + 1e-12)
    grid, vectors, norms = grid[keep], vectors[keep], norms[keep]
    order = np.lexsort(tuple(grid[:, i] for i in reversed(range(torus.dim))) + (np.round(norms, 12),))
    return grid[order], vectors[order]
