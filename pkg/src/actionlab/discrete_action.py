"""Finite-dimensional reductions of the action functional.

Two models live here.

Torus model: r nodes (q_j, p_j) in T*T^n with the radial flow of h(|p|).
    A_r = sum_j t_j (|p_j| h'(|p_j|) - h(|p_j|)) + sum_j p_j^- . eps_q[j],
    where (q_j^-, p_j^-) is the time t_{j-1} flow of node j-1 and
    eps_q[j] = log(q_j^-, q_j).

Generalized flat model: nodes z_j in C^n (stored as real (x, y) pairs), a
flow model and a Lagrangian section.  Consecutive flow segments are closed
up by L-curves, so
    A_r = sum_j segment(z_j, t_j) + sum_j lcurve(phi(z_{j-1}) -> z_j; L_j).

Vectors of the torus model are node-major: [q_0, p_0, q_1, p_1, ...].
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .flat_geometry import FlatTorus, dist, reduce, wrap
from .hamiltonians import (
    RadialProfile,
    action_of_orbit,
    grad_bounds,
    shear_apply,
    velocity,
)
from .lagrangian import LagrangianSubspace, StandardFormLoop


class PreconditionViolated(ValueError):
    pass


class LoopOutOfChart(ValueError):
    pass


class WedgeNotResolvable(ValueError):
    pass


class NonUniqueCriticalFiberPoint(ValueError):
    pass


# ---------------------------------------------------------------- loops


@dataclass(frozen=True, eq=False)
class DiscreteLoop:
    q: np.ndarray
    p: np.ndarray
    durations: np.ndarray | None = None

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.q, dtype=float))
        p = np.atleast_2d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape:
            raise ValueError(f"q and p shapes differ: {q.shape} vs {p.shape}")
        r = q.shape[0]
        t = np.full(r, 1.0 / r) if self.durations is None else np.asarray(self.durations, dtype=float)
        if t.shape != (r,):
            raise ValueError("need one duration per node")
        if np.any(t < 0) or abs(t.sum() - 1.0) > 1e-12:
            raise ValueError("durations must be nonnegative and sum to 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "durations", t)

    @property
    def r(self) -> int:
        return self.q.shape[0]

    @property
    def n(self) -> int:
        return self.q.shape[1]

    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p], axis=1).reshape(-1)

    def with_vector(self, v: np.ndarray) -> "DiscreteLoop":
        v = np.asarray(v, dtype=float).reshape(self.r, 2 * self.n)
        return DiscreteLoop(v[:, : self.n], v[:, self.n :], self.durations)

    def reduced(self, torus: FlatTorus) -> "DiscreteLoop":
        return DiscreteLoop(reduce(torus, self.q), self.p, self.durations)

    def translated(self, torus: FlatTorus, shift) -> "DiscreteLoop":
        return DiscreteLoop(reduce(torus, self.q + np.asarray(shift, dtype=float)), self.p, self.durations)

    def scaled_fibers(self, factor: float) -> "DiscreteLoop":
        return DiscreteLoop(self.q, factor * self.p, self.durations)

    def to_dict(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist(), "durations": self.durations.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteLoop":
        return cls(np.asarray(data["q"]), np.asarray(data["p"]), data.get("durations"))

    @classmethod
    def from_json(cls, text: str) -> "DiscreteLoop":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class BrokenGeodesicData:
    q_minus: np.ndarray
    p_minus: np.ndarray
    eps_q: np.ndarray
    eps_p: np.ndarray
    segment_actions: np.ndarray

    @property
    def P(self) -> float:
        return float(np.max(np.linalg.norm(self.p_minus, axis=1)))


def check_ratio(torus: FlatTorus, profile: RadialProfile, loop_or_r) -> None:
    """C1 * max_j t_j < eps0 / 3, i.e. C1 / r < eps0 / 3 for equal durations."""
    if isinstance(loop_or_r, DiscreteLoop):
        longest = float(np.max(loop_or_r.durations))
    else:
        longest = 1.0 / int(loop_or_r)
    c1, _ = grad_bounds(profile)
    if c1 * longest >= torus.epsilon0 / 3:
        raise PreconditionViolated(
            f"C1 * max t_j = {c1 * longest:.4g} must be below eps0/3 = {torus.epsilon0 / 3:.4g}; increase r"
        )


def min_segments(torus: FlatTorus, profile: RadialProfile) -> int:
    c1, _ = grad_bounds(profile)
    return int(np.floor(3 * c1 / torus.epsilon0)) + 1


def is_admissible(torus: FlatTorus, loop: DiscreteLoop) -> bool:
    steps = dist(torus, loop.q, np.roll(loop.q, -1, axis=0))
    return bool(np.all(steps < torus.epsilon0))


def _flow_ends(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop):
    q_end = loop.q + loop.durations[:, None] * velocity(profile, loop.p)
    return q_end, loop.p


def broken_data(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop, check: bool = True) -> BrokenGeodesicData:
    q_end, p_end = _flow_ends(torus, profile, loop)
    q_minus = np.roll(q_end, 1, axis=0)
    p_minus = np.roll(p_end, 1, axis=0)
    eps_q = wrap(torus, loop.q - q_minus)
    if check:
        gaps = np.linalg.norm(eps_q, axis=1)
        if np.any(gaps >= 2 * torus.epsilon0):
            raise LoopOutOfChart(f"max |eps_q| = {gaps.max():.4g} reaches 2 eps0 = {2 * torus.epsilon0:.4g}")
    eps_p = loop.p - p_minus
    seg = loop.durations * action_of_orbit(profile, np.linalg.norm(loop.p, axis=1))
    return BrokenGeodesicData(reduce(torus, q_minus), p_minus, eps_q, eps_p, seg)


def action_Ar(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop, strict: bool = False) -> float:
    if strict:
        check_ratio(torus, profile, loop)
    data = broken_data(torus, profile, loop)
    return float(np.sum(data.segment_actions) + np.sum(data.p_minus * data.eps_q))


def _gradient_blocks(torus, profile, loop, data):
    # pairing term j+1 depends on the flowed node j through (q^-, p^-)
    pull_q = -np.roll(data.p_minus, -1, axis=0)
    pull_p = np.roll(data.eps_q, -1, axis=0)
    # Dphi^T = [[I, 0], [t S, I]] on (dq^-, dp^-)
    t = loop.durations[:, None]
    grad_p = pull_p + t * shear_apply(profile, loop.p, pull_q)
    x = np.linalg.norm(loop.p, axis=1)
    safe = np.where(x > 0, x, 1.0)
    grad_p += t * (x * profile.d2h(x) / safe)[:, None] * loop.p
    grad_q = data.p_minus + pull_q
    return grad_q, grad_p


def grad_Ar(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop, strict: bool = False) -> np.ndarray:
    if strict:
        check_ratio(torus, profile, loop)
    data = broken_data(torus, profile, loop)
    grad_q, grad_p = _gradient_blocks(torus, profile, loop, data)
    return np.concatenate([grad_q, grad_p], axis=1).reshape(-1)


def energy_E(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop) -> float:
    data = broken_data(torus, profile, loop)
    return float(np.sum(data.eps_q**2) + np.sum(data.eps_p**2))


def smoothstep(x, lo: float, hi: float):
    s = np.clip((np.asarray(x, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return s * s * (3 - 2 * s)


def q_weight(torus: FlatTorus, eps_q: np.ndarray) -> float:
    """Weight of the q-component in X: 1 below eps0/4, 0 above eps0/3."""
    largest = float(np.max(np.linalg.norm(eps_q, axis=1)))
    return float(1.0 - smoothstep(largest, torus.epsilon0 / 4, torus.epsilon0 / 3))


def pseudo_gradient_X(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop, strict: bool = False) -> np.ndarray:
    if strict:
        check_ratio(torus, profile, loop)
    data = broken_data(torus, profile, loop)
    grad_q, grad_p = _gradient_blocks(torus, profile, loop, data)
    sigma = q_weight(torus, data.eps_q)
    return np.concatenate([sigma * grad_q, grad_p], axis=1).reshape(-1)


def cutoff_values(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop) -> dict[str, np.ndarray | float]:
    return {
        "p_norms": np.linalg.norm(loop.p, axis=1),
        "steps": dist(torus, loop.q, np.roll(loop.q, -1, axis=0)),
        "energy": energy_E(torus, profile, loop),
    }


def cutoff_vector(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop) -> np.ndarray:
    vals = cutoff_values(torus, profile, loop)
    return np.concatenate([vals["p_norms"], vals["steps"], [vals["energy"]]])


def embed_next_r(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop) -> DiscreteLoop:
    """Insert a zero-duration node after the last one.

    The new base point is q_0 and its fiber solves grad_{q_new} A_{r+1} = 0,
    which on a flat torus reads p_new = p_{r-1}.
    """
    q_new = loop.q[0]
    # the affine system grad_q = p_{r-1} - p_new = 0 has the identity as matrix
    p_new = loop.p[-1].copy()
    durations = np.append(loop.durations, 0.0)
    return DiscreteLoop(np.vstack([loop.q, q_new]), np.vstack([loop.p, p_new]), durations)


def batch_evaluate(torus: FlatTorus, profile: RadialProfile, q: np.ndarray, p: np.ndarray,
                   durations: np.ndarray | None = None) -> dict[str, np.ndarray]:
    """A_r, its gradient, X and the cut-off values for stacked loops of shape (..., r, n).

    No chart checks; callers integrating flows use this on arrays directly.
    """
    r = q.shape[-2]
    t = np.full(r, 1.0 / r) if durations is None else np.asarray(durations, dtype=float)
    q_end = q + t[:, None] * velocity(profile, p)
    p_minus = np.roll(p, 1, axis=-2)
    eps_q = wrap(torus, q - np.roll(q_end, 1, axis=-2))
    radius = np.linalg.norm(p, axis=-1)
    action = np.sum(t * action_of_orbit(profile, radius), axis=-1) + np.sum(p_minus * eps_q, axis=(-1, -2))
    # on the flat torus the chain rule collapses to these two blocks
    grad_q = p_minus - p
    grad_p = np.roll(eps_q, -1, axis=-2)
    largest = np.max(np.linalg.norm(eps_q, axis=-1), axis=-1)
    sigma = 1.0 - smoothstep(largest, torus.epsilon0 / 4, torus.epsilon0 / 3)
    steps = np.linalg.norm(wrap(torus, np.roll(q, -1, axis=-2) - q), axis=-1)
    return {
        "action": action,
        "grad_q": grad_q,
        "grad_p": grad_p,
        "X_q": sigma[..., None, None] * grad_q,
        "X_p": grad_p,
        "sigma": sigma,
        "eps_q": eps_q,
        "p_norms": radius,
        "steps": steps,
        "energy": np.sum(eps_q**2, axis=(-1, -2)) + np.sum((p - p_minus) ** 2, axis=(-1, -2)),
    }


def diagnostics_csv(torus: FlatTorus, profile: RadialProfile, loop: DiscreteLoop) -> str:
    data = broken_data(torus, profile, loop)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    n = loop.n
    writer.writerow(["j"] + [f"eps_q{i}" for i in range(n)] + [f"eps_p{i}" for i in range(n)] + ["segment_action"])
    for j in range(loop.r):
        writer.writerow([j] + [f"{v:.12g}" for v in data.eps_q[j]] + [f"{v:.12g}" for v in data.eps_p[j]]
                        + [f"{data.segment_actions[j]:.12g}"])
    return buf.getvalue()


def random_admissible_loop(torus: FlatTorus, r: int, rng: np.random.Generator, p_scale: float = 1.0,
                           step_fraction: float = 0.5, allow_winding: bool = True) -> DiscreteLoop:
    """Random loop with every base step shorter than eps0.

    Steps are drawn in a box of half-width step_fraction * eps0 / sqrt(n),
    centred to close up, and a winding of one lattice cell is added per axis
    when it still fits.
    """
    n = torus.dim
    bound = step_fraction * torus.epsilon0 / np.sqrt(n)
    steps = rng.uniform(-bound, bound, size=(r, n))
    steps -= steps.mean(axis=0)
    steps *= bound / max(bound, float(np.max(np.abs(steps))))
    if allow_winding:
        room = torus.epsilon0 / np.sqrt(n) - bound
        fits = torus.lengths / r < 0.9 * room
        steps += (rng.integers(-1, 2, size=n) * fits) * torus.lengths / r
    start = rng.uniform(0, 1, size=n) * torus.lengths
    q = reduce(torus, start + np.vstack([np.zeros(n), np.cumsum(steps[:-1], axis=0)]))
    p = rng.normal(size=(r, n)) * p_scale
    return DiscreteLoop(q, p)


# ------------------------------------------------- generalized flat model


def to_complex(z: np.ndarray) -> np.ndarray:
    n = z.shape[-1] // 2
    return z[..., :n] + 1j * z[..., n:]


def to_real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=-1)


class RadialFlatFlow:
    """Flow of H = h(|y|) on C^n = T*R^n: x moves by t h'(|y|) y/|y|."""

    def __init__(self, profile: RadialProfile):
        self.profile = profile

    def apply(self, z, t):
        n = z.shape[-1] // 2
        x, y = z[..., :n], z[..., n:]
        t = np.asarray(t)[..., None]
        return np.concatenate([x + t * velocity(self.profile, y), y], axis=-1)

    def pullback(self, z, t, g):
        """Dphi(z)^T g."""
        n = z.shape[-1] // 2
        y = z[..., n:]
        t = np.asarray(t)[..., None]
        gx, gy = g[..., :n], g[..., n:]
        return np.concatenate([gx, gy + t * shear_apply(self.profile, y, gx)], axis=-1)

    def jacobian(self, z, t):
        z = np.asarray(z, dtype=float)
        eye = np.eye(z.shape[-1])
        cols = [self.pullback(z, t, np.broadcast_to(e, z.shape)) for e in eye]
        return np.swapaxes(np.stack(cols, axis=-1), -1, -2)

    def segment(self, z, t):
        n = z.shape[-1] // 2
        radius = np.linalg.norm(z[..., n:], axis=-1)
        return t * action_of_orbit(self.profile, radius)

    def segment_grad(self, z, t):
        n = z.shape[-1] // 2
        y = z[..., n:]
        radius = np.linalg.norm(y, axis=-1)
        safe = np.where(radius > 0, radius, 1.0)
        gy = (np.asarray(t) * radius * self.profile.d2h(radius) / safe)[..., None] * y
        return np.concatenate([np.zeros_like(y), gy], axis=-1)


class HarmonicFlow:
    """Flow of H = (s/2)|z|^2: z -> e^{-i s t} z."""

    def __init__(self, s: float):
        self.s = float(s)

    def apply(self, z, t):
        n = z.shape[-1] // 2
        th = self.s * np.asarray(t)[..., None]
        c, sn = np.cos(th), np.sin(th)
        x, y = z[..., :n], z[..., n:]
        return np.concatenate([c * x + sn * y, c * y - sn * x], axis=-1)

    def pullback(self, z, t, g):
        n = g.shape[-1] // 2
        th = self.s * np.asarray(t)[..., None]
        c, sn = np.cos(th), np.sin(th)
        gx, gy = g[..., :n], g[..., n:]
        return np.concatenate([c * gx - sn * gy, sn * gx + c * gy], axis=-1)

    def jacobian(self, z, t):
        z = np.asarray(z, dtype=float)
        eye = np.eye(z.shape[-1])
        cols = [self.pullback(z, t, np.broadcast_to(e, z.shape)) for e in eye]
        return np.swapaxes(np.stack(cols, axis=-1), -1, -2)

    def segment(self, z, t):
        # integral of y dx - H dt along the rotation, in closed form
        n = z.shape[-1] // 2
        th = self.s * np.asarray(t)
        x, y = z[..., :n], z[..., n:]
        quad = np.sum(y * y - x * x, axis=-1)
        mixed = np.sum(x * y, axis=-1)
        return quad * np.sin(2 * th) / 4 - mixed * np.sin(th) ** 2

    def segment_grad(self, z, t):
        n = z.shape[-1] // 2
        th = self.s * np.asarray(t)[..., None]
        x, y = z[..., :n], z[..., n:]
        half = np.sin(2 * th) / 2
        sq = np.sin(th) ** 2
        return np.concatenate([-x * half - y * sq, y * half - x * sq], axis=-1)


class ProductFlow:
    """Independent flows on the factors C^{n1} x C^{n2} (real layout per factor)."""

    def __init__(self, first, second, n1: int, n2: int):
        self.first, self.second = first, second
        self.n1, self.n2 = n1, n2

    def _split(self, z):
        n1, n2 = self.n1, self.n2
        a = np.concatenate([z[..., :n1], z[..., n1 + n2 : 2 * n1 + n2]], axis=-1)
        b = np.concatenate([z[..., n1 : n1 + n2], z[..., 2 * n1 + n2 :]], axis=-1)
        return a, b

    def _join(self, a, b):
        n1, n2 = self.n1, self.n2
        return np.concatenate([a[..., :n1], b[..., :n2], a[..., n1:], b[..., n2:]], axis=-1)

    def apply(self, z, t):
        a, b = self._split(z)
        return self._join(self.first.apply(a, t), self.second.apply(b, t))

    def pullback(self, z, t, g):
        a, b = self._split(z)
        ga, gb = self._split(g)
        return self._join(self.first.pullback(a, t, ga), self.second.pullback(b, t, gb))

    def segment(self, z, t):
        a, b = self._split(z)
        return self.first.segment(a, t) + self.second.segment(b, t)

    def segment_grad(self, z, t):
        a, b = self._split(z)
        return self._join(self.first.segment_grad(a, t), self.second.segment_grad(b, t))


class ConstantSection:
    def __init__(self, L: LagrangianSubspace):
        self.L = L

    @property
    def n(self) -> int:
        return self.L.n

    def subspaces(self, r: int) -> list[LagrangianSubspace]:
        return [self.L] * r


class StandardFormSection:
    """Node j carries the plane gamma(j / r) of a standard-form loop."""

    def __init__(self, loop: StandardFormLoop):
        self.loop = loop

    @property
    def n(self) -> int:
        return self.loop.n

    def subspaces(self, r: int) -> list[LagrangianSubspace]:
        return [self.loop.at(j / r) for j in range(r)]


def _segment_integral_real(a, b):
    n = a.shape[-1] // 2
    return 0.5 * np.sum((a[..., n:] + b[..., n:]) * (b[..., :n] - a[..., :n]), axis=-1)


def _segment_integral_grads(a, b):
    n = a.shape[-1] // 2
    ysum = 0.5 * (a[..., n:] + b[..., n:])
    dx = 0.5 * (b[..., :n] - a[..., :n])
    ga = np.concatenate([-ysum, dx], axis=-1)
    gb = np.concatenate([ysum, dx], axis=-1)
    return ga, gb


@dataclass
class GeneralizedModel:
    """A_r and E on the flat model C^n with a flow and a Lagrangian section."""

    flow: object
    section: object
    r: int
    durations: np.ndarray | None = None
    wedge_radius: float = np.inf
    projectors: np.ndarray = field(init=False)

    def __post_init__(self):
        self.durations = np.full(self.r, 1.0 / self.r) if self.durations is None else np.asarray(self.durations, float)
        self.projectors = np.stack([L.projector() for L in self.section.subspaces(self.r)])

    @property
    def n(self) -> int:
        return self.projectors.shape[-1] // 2

    def _prepare(self, z):
        z = np.asarray(z, dtype=float)
        flowed = self.flow.apply(z, self.durations)
        start = np.roll(flowed, 1, axis=-2)
        if np.isfinite(self.wedge_radius):
            gap = np.linalg.norm(z - start, axis=-1)
            if np.any(gap >= self.wedge_radius):
                raise WedgeNotResolvable(f"gap {gap.max():.4g} exceeds the wedge radius {self.wedge_radius:.4g}")
        corner = z + np.einsum("jab,...jb->...ja", self.projectors, start - z)
        return z, start, corner

    def lcurve_terms(self, z):
        z, start, corner = self._prepare(z)
        return _segment_integral_real(start, corner) + _segment_integral_real(corner, z)

    def action(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        seg = self.flow.segment(z, self.durations)
        return np.sum(seg, axis=-1) + np.sum(self.lcurve_terms(z), axis=-1)

    def gradient(self, z) -> np.ndarray:
        z, start, corner = self._prepare(z)
        ga1, gm1 = _segment_integral_grads(start, corner)
        gm2, gb2 = _segment_integral_grads(corner, z)
        g_corner = gm1 + gm2
        # corner = (I - P) z + P start with P symmetric
        proj = np.einsum("jab,...jb->...ja", self.projectors, g_corner)
        grad_end = gb2 + g_corner - proj
        grad_start = ga1 + proj
        pulled = self.flow.pullback(z, self.durations, np.roll(grad_start, -1, axis=-2))
        return grad_end + pulled + self.flow.segment_grad(z, self.durations)

    def residuals(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z - np.roll(self.flow.apply(z, self.durations), 1, axis=-2)

    def energy(self, z) -> np.ndarray:
        return np.sum(self.residuals(z) ** 2, axis=(-1, -2))

    def energy_gradient(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        e = self.residuals(z)
        return 2 * e - 2 * self.flow.pullback(z, self.durations, np.roll(e, -1, axis=-2))

    def leading_gradient(self, z) -> np.ndarray:
        """(-eps_y[j], eps_x[j+1]) per node, the flat leading term for the iR^n section."""
        e = self.residuals(z)
        n = self.n
        nxt = np.roll(e, -1, axis=-2)
        return np.concatenate([-e[..., n:], nxt[..., :n]], axis=-1)


def generalized_action(flow, section, z, durations=None):
    """Value and gradient of the generalized A_r at nodes z of shape (r, 2n)."""
    z = np.asarray(z, dtype=float)
    model = GeneralizedModel(flow, section, z.shape[-2], durations)
    return float(model.action(z)), model.gradient(z)


def torus_loop_to_flat(torus: FlatTorus, loop: DiscreteLoop) -> np.ndarray:
    """Lift a contractible torus loop to nodes (q, p) in C^n = T*R^n along shortest steps."""
    steps = wrap(torus, np.roll(loop.q, -1, axis=0) - loop.q)
    if np.max(np.abs(steps.sum(axis=0))) > 1e-9:
        raise ValueError("only contractible loops lift to the flat model")
    q = loop.q[0] + np.vstack([np.zeros(loop.n), np.cumsum(steps[:-1], axis=0)])
    return np.concatenate([q, loop.p], axis=1)


def fit_pjbound_constant(model: GeneralizedModel, z: np.ndarray) -> float:
    """Smallest k with |grad A_r . grad Q_j| <= sqrt(r) k |grad A_r|^2 on the samples z.

    Q_j = |z_j| is the radial distance of node j, whose level sets are the
    boundaries of round discs.  The constant is fitted and reported, not assumed.
    """
    z = np.asarray(z, dtype=float)
    grad = model.gradient(z)
    radial = z / np.maximum(np.linalg.norm(z, axis=-1, keepdims=True), 1e-300)
    pairing = np.max(np.abs(np.sum(grad * radial, axis=-1)), axis=-1)
    return float(np.max(pairing / (np.sqrt(model.r) * np.sum(grad**2, axis=(-1, -2)))))
