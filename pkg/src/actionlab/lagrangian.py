"""Lagrangian subspaces of C^n, loops of them, the Maslov index and L-curves.

Conventions: C^n is identified with R^{2n} through z = x + i y, written as
real vectors (x, y).  The Liouville form is lambda_0 = sum y dx, so a
Lagrangian plane is stored as a unitary frame U with plane U . R^n, and its
real orthogonal projector is W W^T with W = [Re U; Im U].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

PHASE_STEP_BOUND = np.pi / 2
MAX_SAMPLES = 2**16


class SamplingTooCoarse(ValueError):
    pass


class MismatchedMaslov(AssertionError):
    pass


def _as_frame(frame) -> np.ndarray:
    u = np.asarray(frame, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"frame must be square, got shape {u.shape}")
    if u.size and np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-8:
        raise ValueError("frame must be unitary")
    return u


@dataclass(frozen=True, eq=False)
class LagrangianSubspace:
    frame: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frame", _as_frame(self.frame))

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @classmethod
    def real(cls, n: int) -> "LagrangianSubspace":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def imaginary(cls, n: int) -> "LagrangianSubspace":
        return cls(1j * np.eye(n))

    @classmethod
    def from_real_basis(cls, basis: np.ndarray) -> "LagrangianSubspace":
        """Plane spanned by the columns of a real 2n x n matrix [A; B]."""
        basis = np.asarray(basis, dtype=float)
        n = basis.shape[1]
        q, _ = np.linalg.qr(basis)
        return cls(q[:n] + 1j * q[n:])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "LagrangianSubspace":
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, r = np.linalg.qr(z)
        return cls(q * (np.diag(r) / np.abs(np.diag(r))))

    def real_basis(self) -> np.ndarray:
        return np.vstack([self.frame.real, self.frame.imag])

    def projector(self) -> np.ndarray:
        w = self.real_basis()
        return w @ w.T

    def project(self, u) -> np.ndarray:
        """Orthogonal projection of complex vectors onto the plane: U Re(U^H u)."""
        u = np.asarray(u, dtype=complex)
        return (self.frame @ np.real(self.frame.conj().T @ u[..., None]))[..., 0]

    def isotropy_defect(self) -> float:
        w = self.real_basis()
        n = self.n
        j0 = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
        return float(np.max(np.abs(w.T @ j0 @ w)))

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.frame.conj().T @ self.frame - np.eye(self.n))))

    def same_plane(self, other: "LagrangianSubspace", tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.projector() - other.projector())) < tol)

    def direct_sum(self, other: "LagrangianSubspace") -> "LagrangianSubspace":
        n1, n2 = self.n, other.n
        u = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        u[:n1, :n1] = self.frame
        u[n1:, n1:] = other.frame
        return LagrangianSubspace(u)

    def rotated(self, unitary: np.ndarray) -> "LagrangianSubspace":
        return LagrangianSubspace(np.asarray(unitary, dtype=complex) @ self.frame)

    def det_squared(self) -> complex:
        d = np.linalg.det(self.frame)
        return complex(d * d)


def projector_distance(a: LagrangianSubspace, b: LagrangianSubspace) -> float:
    return float(np.linalg.norm(a.projector() - b.projector(), 2))


def _orthonormal_columns(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return np.zeros((n, 0))
    v = v.reshape(n, -1)
    if np.max(np.abs(v.T @ v - np.eye(v.shape[1]))) > 1e-10:
        raise ValueError("subspace bases must have orthonormal columns")
    return v


@dataclass(frozen=True, eq=False)
class StandardFormLoop:
    """t -> L0 (+) (e^{i pi t} V+ (+) e^{-i pi t} V- (+) V0), t in [0, 1]."""

    v_plus: np.ndarray
    v_minus: np.ndarray
    v_zero: np.ndarray
    base: LagrangianSubspace | None = None

    def __post_init__(self):
        n2 = max(np.asarray(v).shape[0] if np.asarray(v).size else 0 for v in (self.v_plus, self.v_minus, self.v_zero))
        n2 = max(n2, self._declared_n2())
        for name in ("v_plus", "v_minus", "v_zero"):
            object.__setattr__(self, name, _orthonormal_columns(getattr(self, name), n2))
        total = self.v_plus.shape[1] + self.v_minus.shape[1] + self.v_zero.shape[1]
        if total != n2:
            raise ValueError("V+, V-, V0 dimensions must sum to n2")
        stacked = np.hstack([self.v_plus, self.v_minus, self.v_zero])
        if n2 and np.max(np.abs(stacked.T @ stacked - np.eye(n2))) > 1e-10:
            raise ValueError("V+, V-, V0 must be mutually orthogonal")

    def _declared_n2(self) -> int:
        dims = [np.asarray(v).shape[0] for v in (self.v_plus, self.v_minus, self.v_zero) if np.asarray(v).ndim == 2]
        return max(dims, default=0)

    @classmethod
    def from_dims(cls, d_plus: int, d_minus: int, d_zero: int, base: LagrangianSubspace | None = None,
                  rotation: np.ndarray | None = None) -> "StandardFormLoop":
        n2 = d_plus + d_minus + d_zero
        eye = np.eye(n2) if rotation is None else np.asarray(rotation, dtype=float)
        cols = np.split(eye, [d_plus, d_plus + d_minus], axis=1)
        return cls(cols[0], cols[1], cols[2], base)

    @property
    def n1(self) -> int:
        return 0 if self.base is None else self.base.n

    @property
    def n2(self) -> int:
        return self.v_plus.shape[0]

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.v_plus.shape[1], self.v_minus.shape[1], self.v_zero.shape[1]

    def expected_maslov(self) -> int:
        return self.dims[0] - self.dims[1]

    def loop_frame(self, t: float) -> np.ndarray:
        """Unitary frame of the rotating factor: e^{i pi t} P+ + e^{-i pi t} P- + P0."""
        pp = self.v_plus @ self.v_plus.T
        pm = self.v_minus @ self.v_minus.T
        p0 = self.v_zero @ self.v_zero.T
        return np.exp(1j * np.pi * t) * pp + np.exp(-1j * np.pi * t) * pm + p0

    def frame(self, t: float) -> np.ndarray:
        u2 = self.loop_frame(t)
        if self.base is None:
            return u2
        return LagrangianSubspace(self.base.frame).direct_sum(LagrangianSubspace(u2)).frame

    def at(self, t: float) -> LagrangianSubspace:
        return LagrangianSubspace(self.frame(t))

    def swapped(self) -> "StandardFormLoop":
        return StandardFormLoop(self.v_minus, self.v_plus, self.v_zero, self.base)

    def sample(self, m: int) -> "SampledLoop":
        ts = np.linspace(0.0, 1.0, m + 1)
        return SampledLoop(np.stack([self.frame(t) for t in ts]))

    def to_dict(self) -> dict:
        out = {
            "kind": "standard_form",
            "v_plus": self.v_plus.tolist(),
            "v_minus": self.v_minus.tolist(),
            "v_zero": self.v_zero.tolist(),
            "n2": self.n2,
        }
        if self.base is not None:
            out["base"] = {"re": self.base.frame.real.tolist(), "im": self.base.frame.imag.tolist()}
        return out


@dataclass(frozen=True, eq=False)
class SampledLoop:
    """Closed loop given by frames at m+1 equally spaced times (first = last plane)."""

    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=complex)
        if frames.ndim != 3 or frames.shape[1] != frames.shape[2] or frames.shape[0] < 2:
            raise ValueError("frames must have shape (m+1, n, n) with m >= 1")
        object.__setattr__(self, "frames", frames)
        first = LagrangianSubspace(frames[0])
        last = LagrangianSubspace(frames[-1])
        if np.max(np.abs(first.projector() - last.projector())) > 1e-9:
            raise ValueError("sampled loop is not closed")

    @property
    def n(self) -> int:
        return self.frames.shape[1]

    def concatenate(self, other: "SampledLoop") -> "SampledLoop":
        """Loop self followed by other; both must start at the same plane."""
        if not LagrangianSubspace(self.frames[-1]).same_plane(LagrangianSubspace(other.frames[0]), 1e-9):
            raise ValueError("loops do not share a base point")
        # re-gauge the second loop so the frames match at the junction
        gauge = np.real(other.frames[0].conj().T @ self.frames[-1])
        return SampledLoop(np.concatenate([self.frames, other.frames[1:] @ gauge]))

    def stabilize(self, extra: LagrangianSubspace | None = None) -> "SampledLoop":
        extra = LagrangianSubspace.real(1) if extra is None else extra
        m, n, _ = self.frames.shape
        k = extra.n
        out = np.zeros((m, n + k, n + k), dtype=complex)
        out[:, :n, :n] = self.frames
        out[:, n:, n:] = extra.frame
        return SampledLoop(out)

    def regauged(self, rng: np.random.Generator) -> "SampledLoop":
        """Same planes, frames multiplied on the right by random orthogonal matrices."""
        n = self.n
        out = np.empty_like(self.frames)
        for i, u in enumerate(self.frames):
            o, _ = np.linalg.qr(rng.normal(size=(n, n)))
            out[i] = u @ o
        return SampledLoop(out)

    def to_dict(self) -> dict:
        return {"kind": "sampled", "re": self.frames.real.tolist(), "im": self.frames.imag.tolist()}


LagrangianLoop = SampledLoop | StandardFormLoop


def loop_from_dict(data: dict) -> LagrangianLoop:
    if data.get("kind") == "standard_form":
        n2 = int(data.get("n2", 0))
        base = None
        if "base" in data:
            base = LagrangianSubspace(np.asarray(data["base"]["re"]) + 1j * np.asarray(data["base"]["im"]))
        if "dims" in data:
            return StandardFormLoop.from_dims(*data["dims"], base=base)

        def mat(key):
            v = np.asarray(data.get(key, []), dtype=float)
            return v.reshape(n2, -1) if n2 else v

        return StandardFormLoop(mat("v_plus"), mat("v_minus"), mat("v_zero"), base)
    if data.get("kind") == "sampled":
        return SampledLoop(np.asarray(data["re"]) + 1j * np.asarray(data["im"]))
    raise ValueError(f"unknown loop kind {data.get('kind')!r}")


def _winding(values: np.ndarray) -> tuple[int, float]:
    steps = np.angle(values[1:] / values[:-1])
    total = float(np.sum(steps))
    return int(round(total / (2 * np.pi))), float(np.max(np.abs(steps), initial=0.0))


def _det_squared(frames: np.ndarray) -> np.ndarray:
    d = np.linalg.det(frames)
    return d * d


def maslov_index(loop: LagrangianLoop | Callable[[float], np.ndarray], samples: int = 64) -> int:
    """Winding number of det(U(t))^2 around the origin.

    Loops given as a function of t (or in standard form) are refined by
    doubling until each phase step is below pi/2; sampled loops must already
    satisfy the bound.
    """
    if isinstance(loop, SampledLoop):
        index, worst = _winding(_det_squared(loop.frames))
        if worst >= PHASE_STEP_BOUND:
            raise SamplingTooCoarse(f"phase step {worst:.3f} exceeds pi/2; resample the loop")
        return index
    frame_at = loop.frame if isinstance(loop, StandardFormLoop) else loop
    m = samples
    while m <= MAX_SAMPLES:
        ts = np.linspace(0.0, 1.0, m + 1)
        index, worst = _winding(_det_squared(np.stack([frame_at(t) for t in ts])))
        if worst < PHASE_STEP_BOUND:
            return index
        m *= 2
    raise SamplingTooCoarse(f"no sampling up to {MAX_SAMPLES} resolves the phase")


@dataclass
class StandardFormCertificate:
    passed: bool
    sampled_index: int
    claimed_index: int
    dims: tuple[int, int, int]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sampled_index": self.sampled_index,
            "claimed_index": self.claimed_index,
            "dims": list(self.dims),
        }


def homotope_to_standard_form(loop: SampledLoop, claim: StandardFormLoop, strict: bool = False) -> StandardFormCertificate:
    """Check a claimed standard form against a sampled loop by comparing Maslov indices.

    This verifies the claim only; it does not construct the homotopy.
    """
    sampled = maslov_index(loop)
    claimed = claim.expected_maslov()
    cert = StandardFormCertificate(sampled == claimed, sampled, claimed, claim.dims)
    if not cert.passed:
        cert.notes.append(f"index mismatch {sampled - claimed}")
        if strict:
            raise MismatchedMaslov(f"sampled {sampled} != claimed {claimed}")
    return cert


def perturb_frames(loop: SampledLoop, noise: float, rng: np.random.Generator) -> SampledLoop:
    """Add complex noise to every frame and re-orthonormalize; endpoints stay equal."""
    m, n, _ = loop.frames.shape
    out = np.empty_like(loop.frames)
    for i in range(m - 1):
        z = loop.frames[i] + noise * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        q, r = np.linalg.qr(z)
        out[i] = q * (np.diag(r) / np.abs(np.diag(r)))
    out[-1] = out[0]
    return SampledLoop(out)


def random_loop(n: int, index_per_axis: np.ndarray, rng: np.random.Generator, m: int = 512,
                modes: int = 2, amplitude: float = 0.6) -> SampledLoop:
    """A wiggly loop W(t) diag(e^{i pi m_a t}) with W(0) = W(1) = I.

    W(t) = exp(i sum_k sin(2 pi k t) A_k) with A_k real symmetric, so W is
    unitary and has det^2 winding zero; the diagonal factor contributes
    sum(index_per_axis).
    """
    index_per_axis = np.asarray(index_per_axis, dtype=int)
    sym = []
    for _ in range(modes):
        a = rng.normal(size=(n, n)) * amplitude
        sym.append(0.5 * (a + a.T))
    ts = np.linspace(0.0, 1.0, m + 1)
    frames = np.empty((m + 1, n, n), dtype=complex)
    for i, t in enumerate(ts):
        gen = sum(np.sin(2 * np.pi * (k + 1) * t) * a for k, a in enumerate(sym))
        w, v = np.linalg.eigh(gen)
        unitary = (v * np.exp(1j * w)) @ v.T
        frames[i] = unitary @ np.diag(np.exp(1j * np.pi * index_per_axis * t))
    frames[-1] = frames[0]
    return SampledLoop(frames)


def wedge_map(L: LagrangianSubspace, z, u) -> tuple[np.ndarray, np.ndarray]:
    """Flat wedge map: returns (z + u, z + u_L) where u_L is the L-component of u."""
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    return z + u, z + L.project(u)


def _segment_integral(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integral of lambda_0 = sum y dx along the straight segment a -> b."""
    return 0.5 * np.sum((a.imag + b.imag) * (b.real - a.real), axis=-1)


def lcurve_corner(L: LagrangianSubspace, z, z_target) -> np.ndarray:
    """Corner of the L-curve between z_target and z: z + P_L(z_target - z)."""
    z = np.asarray(z, dtype=complex)
    return z + L.project(np.asarray(z_target, dtype=complex) - z)


def lcurve_area(L: LagrangianSubspace, z, z_target) -> float:
    """Integral of lambda_0 along the two-leg L-curve from z_target to z.

    The first leg runs in direction i L, the second along L and ends at z.
    """
    z = np.asarray(z, dtype=complex)
    z_target = np.asarray(z_target, dtype=complex)
    corner = lcurve_corner(L, z, z_target)
    return float(_segment_integral(z_target, corner) + _segment_integral(corner, z))


def triangle_area(L: LagrangianSubspace, z, z_target) -> float:
    """Signed lambda_0 area between the L-curve and the straight segment z_target -> z."""
    z = np.asarray(z, dtype=complex)
    z_target = np.asarray(z_target, dtype=complex)
    return lcurve_area(L, z, z_target) - float(_segment_integral(z_target, z))


def shoelace_lambda(points) -> float:
    """Integral of y dx around a closed polygon in C (minus its signed area)."""
    z = np.asarray(points, dtype=complex)
    nxt = np.roll(z, -1)
    return float(0.5 * np.sum((z.imag + nxt.imag) * (nxt.real - z.real)))
