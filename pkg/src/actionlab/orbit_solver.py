"""Critical points of A_r: a closed-form orbit oracle and a Levenberg-Marquardt solver.

On a flat torus the 1-periodic orbits of H = h(|p|) are the closed geodesics
run at speed h'(|p|): for every lattice vector w with |w| in the range of h'
and every radius x with h'(x) = |w| there is an n-dimensional family of
orbits q(t) = q0 + t w, p = x w/|w|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrete_action import (
    DiscreteLoop,
    LoopOutOfChart,
    action_Ar,
    grad_Ar,
)
from .flat_geometry import FlatTorus, lattice_vectors, reduce, wrap
from .hamiltonians import RadialProfile, action_of_orbit, check_slopes, solve_monotone
from .spectral import hessian_analytic


class NoConvergence(RuntimeError):
    pass


class LeftChart(RuntimeError):
    pass


MATCH_TOL = 1e-6


@dataclass(frozen=True)
class OrbitFamily:
    winding: tuple[int, ...]
    vector: tuple[float, ...]
    radius: float
    action: float
    family_dim: int

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.vector))

    def to_dict(self) -> dict:
        return {
            "winding": list(self.winding),
            "radius": self.radius,
            "action": self.action,
            "family_dim": self.family_dim,
        }


@dataclass
class CriticalPointReport:
    loop: DiscreteLoop
    residual: float
    matched_family: OrbitFamily | None
    action_value: float
    iterations: int
    history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "action": self.action_value,
            "iterations": self.iterations,
            "family": None if self.matched_family is None else self.matched_family.to_dict(),
        }


def _radii_for_slope(profile: RadialProfile, length: float, top: float) -> list[float]:
    """All x in [0, top] with h'(x) = length, one per strictly monotone piece."""
    roots = []
    for k in range(profile.num_pieces):
        lo, hi = profile.piece_interval(k)
        hi = min(hi, top)
        if hi <= lo:
            continue
        d_lo, d_hi = float(profile.dh(lo)), float(profile.dh(hi))
        if abs(d_hi - d_lo) < 1e-14:
            continue
        if min(d_lo, d_hi) <= length <= max(d_lo, d_hi):
            x = solve_monotone(profile.dh, length, lo, hi)
            if not any(abs(x - y) < 1e-12 for y in roots):
                roots.append(x)
    return sorted(roots)


def enumerate_orbits(torus: FlatTorus, profile: RadialProfile, margin: float | None = None) -> list[OrbitFamily]:
    """Every orbit family, sorted by action then winding."""
    check_slopes(torus, profile, margin)
    top = profile.cap_radius if np.isfinite(profile.cap_radius) else 1e6
    grid = np.linspace(0.0, top, 20001)
    sup_slope = float(np.max(profile.dh(grid)))
    counts, vectors = lattice_vectors(torus, sup_slope)
    families = []
    for k, w in zip(counts, vectors):
        length = float(np.linalg.norm(w))
        radii = [0.0] if length == 0 else _radii_for_slope(profile, length, top)
        for x in radii:
            families.append(
                OrbitFamily(
                    winding=tuple(int(c) for c in k),
                    vector=tuple(float(c) for c in w),
                    radius=float(x),
                    action=float(action_of_orbit(profile, x)),
                    family_dim=torus.dim,
                )
            )
    families.sort(key=lambda f: (round(f.action, 12), f.winding, f.radius))
    return families


def dissect_orbit(torus: FlatTorus, profile: RadialProfile, family: OrbitFamily, q0, r: int) -> DiscreteLoop:
    w = np.asarray(family.vector)
    length = np.linalg.norm(w)
    direction = w / length if length > 0 else np.zeros_like(w)
    j = np.arange(r)[:, None] / r
    q = reduce(torus, np.asarray(q0, dtype=float) + j * w)
    p = np.tile(family.radius * direction, (r, 1))
    return DiscreteLoop(q, p)


def winding_of(torus: FlatTorus, loop: DiscreteLoop) -> tuple[int, ...]:
    steps = wrap(torus, np.roll(loop.q, -1, axis=0) - loop.q)
    return tuple(int(v) for v in np.round(steps.sum(axis=0) / torus.lengths))


def match_family(torus: FlatTorus, loop: DiscreteLoop, families: list[OrbitFamily], tol: float = MATCH_TOL) -> OrbitFamily | None:
    winding = winding_of(torus, loop)
    radii = np.linalg.norm(loop.p, axis=1)
    for fam in families:
        if fam.winding == winding and np.all(np.abs(radii - fam.radius) < tol):
            return fam
    return None


def _loop_ok(torus: FlatTorus, loop: DiscreteLoop, winding: tuple[int, ...]) -> bool:
    steps = np.linalg.norm(wrap(torus, np.roll(loop.q, -1, axis=0) - loop.q), axis=1)
    if np.any(steps >= torus.epsilon0):
        return False
    return winding_of(torus, loop) == winding


def solve_critical(
    torus: FlatTorus,
    profile: RadialProfile,
    seed: DiscreteLoop,
    tol: float = 1e-10,
    families: list[OrbitFamily] | None = None,
    max_iter: int = 200,
    rcond: float = 1e-8,
    min_step: float = 2.0**-20,
) -> CriticalPointReport:
    """Levenberg-Marquardt on the gradient with pseudo-inverse steps.

    Steps that would leave the chart, break the step bound dist(q_j, q_j+1)
    < eps0 or change the winding are halved; if no halving down to
    `min_step` works, LeftChart is raised.
    """
    loop = seed
    winding = winding_of(torus, seed)
    grad = grad_Ar(torus, profile, loop)
    residual = float(np.linalg.norm(grad))
    history = [residual]
    damping = 1e-6
    it = 0
    while residual >= tol:
        if it >= max_iter:
            raise NoConvergence(f"residual {residual:.3e} after {max_iter} iterations")
        it += 1
        hess = hessian_analytic(torus, profile, loop)
        u, s, vt = np.linalg.svd(hess)
        keep = s > rcond * s[0]
        shrink = np.where(keep, s / (s**2 + damping * s[0] ** 2), 0.0)
        step = -vt.T @ (shrink * (u.T @ grad))
        alpha = 1.0
        accepted = False
        while alpha >= min_step:
            trial = loop.with_vector(loop.vector() + alpha * step)
            if _loop_ok(torus, trial, winding):
                try:
                    trial_grad = grad_Ar(torus, profile, trial)
                except LoopOutOfChart:
                    trial_grad = None
                if trial_grad is not None:
                    trial_res = float(np.linalg.norm(trial_grad))
                    if trial_res < residual:
                        accepted = True
                        break
            alpha *= 0.5
        if not accepted:
            if damping < 1e2:
                damping *= 100.0
                continue
            raise LeftChart(f"no admissible step at residual {residual:.3e}")
        damping = max(damping * 0.1, 1e-12)
        loop, grad, residual = trial.reduced(torus), trial_grad, trial_res
        history.append(residual)
    fams = families if families is not None else enumerate_orbits(torus, profile)
    return CriticalPointReport(
        loop=loop,
        residual=residual,
        matched_family=match_family(torus, loop, fams),
        action_value=action_Ar(torus, profile, loop),
        iterations=it,
        history=history,
    )


def random_seed_loop(torus: FlatTorus, r: int, rng: np.random.Generator, p_bound: float = 0.8,
                     step_bound: float | None = None) -> DiscreteLoop:
    """Random walk seed: steps uniform in a box, closing step rejected until admissible."""
    n = torus.dim
    step_bound = 0.8 * torus.epsilon0 / np.sqrt(n) if step_bound is None else step_bound
    while True:
        steps = rng.uniform(-step_bound, step_bound, size=(r - 1, n))
        q = reduce(torus, rng.uniform(0, 1, size=n) * torus.lengths + np.vstack([np.zeros(n), np.cumsum(steps, axis=0)]))
        closing = np.linalg.norm(wrap(torus, q[0] - q[-1]))
        if closing < 0.9 * torus.epsilon0:
            break
    p = rng.uniform(-p_bound, p_bound, size=(r, n))
    return DiscreteLoop(q, p)
