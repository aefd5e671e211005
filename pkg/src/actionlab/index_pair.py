"""Candidate index pairs for A_r built from cut-off functions, with Monte-Carlo exit certificates.

A pair is described by a value window [a, b] and cut-offs g with thresholds
s < t.  The set A is
    {a <= A_r <= b} and g <= s + (t - s)(b - A_r)/(b - a) for every cut-off,
and B is its bottom face {A_r = a}.  The certificate flows boundary points of
A along -X (RK4) and records through which face each trajectory leaves.  This
is empirical evidence, not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrete_action import batch_evaluate
from .flat_geometry import FlatTorus, reduce, wrap
from .hamiltonians import RadialProfile, SlopeHitsLengthSpectrum, check_slopes, grad_bounds
from .orbit_solver import OrbitFamily, dissect_orbit, enumerate_orbits


class WindowHitsCriticalValue(ValueError):
    pass


class IntegrationBlowUp(RuntimeError):
    pass


class CriticalValueEscapesWindow(RuntimeError):
    pass


FACE_TOL = 1e-9
EVENT_TOL = 1e-10


@dataclass(frozen=True)
class Cutoff:
    kind: str  # "p_norm" or "step"
    s: float
    t: float

    def __post_init__(self):
        if not self.s < self.t:
            raise ValueError(f"cut-off needs s < t, got s={self.s}, t={self.t}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "s": self.s, "t": self.t}


@dataclass(frozen=True)
class IndexPairSpec:
    a: float
    b: float
    r: int
    cutoffs: tuple[Cutoff, ...]
    interior_families: tuple[OrbitFamily, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"degenerate window [{self.a}, {self.b}]")

    def cutoff(self, kind: str) -> Cutoff | None:
        return next((c for c in self.cutoffs if c.kind == kind), None)

    def to_dict(self) -> dict:
        return {
            "window": [self.a, self.b],
            "r": self.r,
            "cutoffs": [c.to_dict() for c in self.cutoffs],
            "interior_families": [f.to_dict() for f in self.interior_families],
            "notes": list(self.notes),
        }

    def with_cutoff(self, kind: str, s: float, t: float) -> "IndexPairSpec":
        cuts = tuple(Cutoff(kind, s, t) if c.kind == kind else c for c in self.cutoffs)
        return IndexPairSpec(self.a, self.b, self.r, cuts, self.interior_families, self.notes + (f"{kind} cut-off replaced",))


# ----------------------------------------------------------------- faces


def face_values(spec: IndexPairSpec, ev: dict) -> dict[str, np.ndarray]:
    """Face functions, each <= 0 inside A.  Shapes (...,) or (..., r)."""
    action = ev["action"]
    frac = (spec.b - action) / (spec.b - spec.a)
    faces = {"bottom": spec.a - action, "top": action - spec.b}
    for cut in spec.cutoffs:
        g = ev["p_norms"] if cut.kind == "p_norm" else ev["steps"]
        faces[cut.kind] = g - (cut.s + (cut.t - cut.s) * frac[..., None])
    return faces


def worst_face(faces: dict[str, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Largest face value per sample and the index of the face class attaining it."""
    names = list(faces)
    stacked = np.stack([f if f.ndim == 1 else np.max(f, axis=-1) for f in faces.values()], axis=-1)
    return np.max(stacked, axis=-1), np.argmax(stacked, axis=-1), names


def membership(torus: FlatTorus, profile: RadialProfile, spec: IndexPairSpec, q, p) -> np.ndarray:
    ev = batch_evaluate(torus, profile, np.asarray(q), np.asarray(p))
    value, _, _ = worst_face(face_values(spec, ev))
    return value <= FACE_TOL


# ---------------------------------------------------------------- building


def _lower_bound_X(torus: FlatTorus, profile: RadialProfile, r: int, p_floor: float, a: float, b: float,
                   rng: np.random.Generator, samples: int = 4000) -> float:
    """Smallest |X| seen on sampled loops with max |p_j| >= p_floor and a <= A_r <= b."""
    n = torus.dim
    best = np.inf
    seen = 0
    for _ in range(50):
        q0 = rng.uniform(0, 1, size=(samples, 1, n)) * torus.lengths
        w = rng.integers(-2, 3, size=(samples, 1, n)) * torus.lengths
        noise = rng.normal(scale=0.02, size=(samples, r, n))
        q = reduce(torus, q0 + np.arange(r)[None, :, None] / r * w + noise)
        direction = rng.normal(size=(samples, 1, n))
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        size = rng.uniform(p_floor, 3 * p_floor, size=(samples, 1, 1))
        p = direction * size + rng.normal(scale=0.05, size=(samples, r, n))
        ev = batch_evaluate(torus, profile, q, p)
        ok = (ev["action"] >= a) & (ev["action"] <= b) & (np.max(ev["p_norms"], axis=-1) >= p_floor)
        if np.any(ok):
            norms = np.sqrt(np.sum(ev["X_q"] ** 2, axis=(-1, -2)) + np.sum(ev["X_p"] ** 2, axis=(-1, -2)))
            best = min(best, float(np.min(norms[ok])))
            seen += int(np.sum(ok))
        if seen >= samples:
            break
    if not np.isfinite(best):
        # no loop with large fibres lies in the window; any positive bound works
        best = 1.0
    return best


def build_pair(
    torus: FlatTorus,
    profile: RadialProfile,
    r: int,
    window: tuple[float, float],
    margin: float = 1e-3,
    seed: int = 0,
    safety: float = 2.0,
) -> IndexPairSpec:
    """Cut-offs: |p_j| with s = 2.1 R, and dist(q_j, q_j+1) with thresholds in (2 eps0/3, eps0).

    The |p_j| slack t - s is (b - a)/C times `safety`, with C the smallest
    |X| found by sampling loops with large fibres in the window.
    """
    a, b = map(float, window)
    if not a < b:
        raise ValueError(f"degenerate window [{a}, {b}]")
    families = enumerate_orbits(torus, profile)
    for fam in families:
        if min(abs(fam.action - a), abs(fam.action - b)) < margin:
            raise WindowHitsCriticalValue(f"critical value {fam.action:.6g} of winding {fam.winding} is within {margin} of the window")
    notes = []
    cap = profile.cap_radius
    s_p = 2.1 * cap
    c_low = _lower_bound_X(torus, profile, r, 2 * cap, a, b, np.random.default_rng(seed))
    t_p = s_p + safety * (b - a) / c_low
    eps0 = torus.epsilon0
    c1, _ = grad_bounds(profile)
    guaranteed_floor = c1 / r + eps0 / 3
    s_f = max(2 * eps0 / 3, guaranteed_floor) * 1.02
    if s_f >= 0.995 * eps0:
        s_f = 0.94 * eps0
        notes.append("step faces not covered by the eps0/3 argument: C1/r + eps0/3 >= eps0")
    t_f = 0.996 * eps0
    spec = IndexPairSpec(a, b, r, (Cutoff("p_norm", s_p, t_p), Cutoff("step", s_f, t_f)), (), tuple(notes))
    inside = tuple(f for f in families if a < f.action < b and _dissection_inside(torus, profile, spec, f))
    return IndexPairSpec(a, b, r, spec.cutoffs, inside, spec.notes + (f"C_lower={c_low:.6g}",))


def _dissection_inside(torus, profile, spec, fam) -> bool:
    loop = dissect_orbit(torus, profile, fam, np.zeros(torus.dim), spec.r)
    return bool(membership(torus, profile, spec, loop.q[None], loop.p[None])[0])


# --------------------------------------------------------------- sampling


def _interior_points(torus, profile, spec, rng, count):
    """Loops inside A: noisy dissections of interior families and random small loops."""
    n, r = torus.dim, spec.r
    families = list(spec.interior_families)
    out_q, out_p = [], []
    have = 0
    for _ in range(200):
        batch = 4 * count
        q0 = rng.uniform(0, 1, size=(batch, 1, n)) * torus.lengths
        if families:
            pick = rng.integers(0, len(families), size=batch)
            w = np.array([families[i].vector for i in pick])[:, None, :]
            rad = np.array([families[i].radius for i in pick])[:, None, None]
            length = np.linalg.norm(w, axis=-1, keepdims=True)
            unit = np.divide(w, length, out=np.zeros_like(w), where=length > 0)
        else:
            w = np.zeros((batch, 1, n))
            rad = np.zeros((batch, 1, 1))
            unit = np.zeros((batch, 1, n))
        scale = rng.choice([0.005, 0.02, 0.05, 0.1], size=(batch, 1, 1))
        q = reduce(torus, q0 + np.arange(r)[None, :, None] / r * w + rng.normal(size=(batch, r, n)) * scale)
        p = rad * unit + rng.normal(size=(batch, r, n)) * scale * 3
        ok = membership(torus, profile, spec, q, p)
        ev = batch_evaluate(torus, profile, q, p)
        ok &= np.all(face_values(spec, ev)["step"] < 0, axis=-1)
        out_q.append(q[ok])
        out_p.append(p[ok])
        have += int(np.sum(ok))
        if have >= count:
            break
    q = np.concatenate(out_q)[:count]
    p = np.concatenate(out_p)[:count]
    return q, p


def _directions(kind: str, q, p, rng, spec):
    """Ray directions aimed at one face class."""
    batch, r, n = q.shape
    dq = np.zeros_like(q)
    dp = np.zeros_like(p)
    if kind == "p_norm":
        j = rng.integers(0, r, size=batch)
        rows = np.arange(batch)
        base = p[rows, j]
        norm = np.linalg.norm(base, axis=-1, keepdims=True)
        rand = rng.normal(size=(batch, n))
        dp[rows, j] = np.where(norm > 1e-9, base / np.maximum(norm, 1e-12), rand / np.linalg.norm(rand, axis=-1, keepdims=True))
        dp += 0.05 * rng.normal(size=p.shape)
    elif kind == "step":
        j = rng.integers(0, r, size=batch)
        rows = np.arange(batch)
        sign = rng.choice([-1.0, 1.0], size=(batch, n))
        dq[rows, (j + 1) % r] = sign
        dq[rows, j] = -sign
        dq += 0.05 * rng.normal(size=q.shape)
        # keep the fibre direction matched so the action stays in the window longer
        dp += 0.02 * rng.normal(size=p.shape)
    else:
        dq = rng.normal(size=q.shape)
        dp = rng.normal(size=p.shape)
    scale = np.sqrt(np.sum(dq**2 + dp**2, axis=(-1, -2), keepdims=True))
    return dq / scale, dp / scale


def _shoot(torus, profile, spec, q, p, dq, dp, reach=4.0, iters=60):
    """Bisection along rays from interior points to the boundary of A."""
    lo = np.zeros(q.shape[0])
    hi = np.full(q.shape[0], reach)
    inside_far = membership(torus, profile, spec, q + hi[:, None, None] * dq, p + hi[:, None, None] * dp)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = membership(torus, profile, spec, q + mid[:, None, None] * dq, p + mid[:, None, None] * dp)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    keep = ~inside_far
    return reduce(torus, q + lo[:, None, None] * dq)[keep], (p + lo[:, None, None] * dp)[keep]


def sample_boundary(torus: FlatTorus, profile: RadialProfile, spec: IndexPairSpec, n_samples: int,
                    rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Boundary points of A stratified over the face classes hit by aimed rays."""
    classes = ["bottom", "top"] + [c.kind for c in spec.cutoffs]
    quota = {c: n_samples // len(classes) for c in classes}
    for c in classes[: n_samples - sum(quota.values())]:
        quota[c] += 1
    got_q = {c: [] for c in classes}
    got_p = {c: [] for c in classes}
    count = {c: 0 for c in classes}
    aims = ["random", "p_norm", "step"]
    for round_ in range(40):
        missing = [c for c in classes if count[c] < quota[c]]
        if not missing:
            break
        if round_ >= 3:
            # faces still empty after several rounds are treated as unreachable; others absorb the quota
            empty = [c for c in classes if count[c] == 0]
            live = [c for c in classes if count[c] > 0]
            if empty and live:
                for c in empty:
                    quota[c] = 0
                spare = n_samples - sum(quota.values())
                for i, c in enumerate(live * spare):
                    if i >= spare:
                        break
                    quota[c] += 1
        for aim in aims:
            q0, p0 = _interior_points(torus, profile, spec, rng, 2 * n_samples)
            if q0.shape[0] == 0:
                continue
            dq, dp = _directions(aim, q0, p0, rng, spec)
            if aim == "random":
                # rays in the action direction reach the top and bottom faces quickly
                ev = batch_evaluate(torus, profile, q0, p0)
                sgn = rng.choice([-1.0, 1.0], size=(q0.shape[0], 1, 1))
                gq, gp = ev["grad_q"], ev["grad_p"]
                gn = np.sqrt(np.sum(gq**2 + gp**2, axis=(-1, -2), keepdims=True)) + 1e-12
                dq, dp = 0.5 * dq + sgn * gq / gn, 0.5 * dp + sgn * gp / gn
                sc = np.sqrt(np.sum(dq**2 + dp**2, axis=(-1, -2), keepdims=True))
                dq, dp = dq / sc, dp / sc
            qb, pb = _shoot(torus, profile, spec, q0, p0, dq, dp)
            ev = batch_evaluate(torus, profile, qb, pb)
            _, which, names = worst_face(face_values(spec, ev))
            for i, k in enumerate(which):
                name = names[k]
                if count[name] < quota[name]:
                    got_q[name].append(qb[i])
                    got_p[name].append(pb[i])
                    count[name] += 1
    q_all, p_all, labels = [], [], []
    for c in classes:
        q_all.extend(got_q[c])
        p_all.extend(got_p[c])
        labels.extend([c] * count[c])
    return np.array(q_all), np.array(p_all), labels


# ------------------------------------------------------------ integration


class RandomField:
    """A fixed smooth random vector field on the loop space with sup norm <= 1."""

    def __init__(self, torus: FlatTorus, r: int, rng: np.random.Generator, modes: int = 4):
        n = torus.dim
        self.lengths = torus.lengths
        self.freq_q = rng.integers(-2, 3, size=(modes, r, n)).astype(float)
        self.freq_p = rng.normal(size=(modes, r, n))
        self.phase = rng.uniform(0, 2 * np.pi, size=(modes, 2, r, n))
        amp = rng.normal(size=(modes, 2, r, n))
        self.amp = amp / np.sum(np.abs(amp), axis=0).max()

    def __call__(self, q, p):
        theta = 2 * np.pi * np.einsum("mrn,brn->bm", self.freq_q, q / self.lengths) + np.einsum("mrn,brn->bm", self.freq_p, p)
        waves = np.sin(theta[:, :, None, None, None] + self.phase[None])
        field = np.sum(self.amp[None] * waves, axis=1)
        return field[:, 0], field[:, 1]


def _velocity(torus, profile, q, p, perturb, eps):
    ev = batch_evaluate(torus, profile, q, p)
    vq, vp = -ev["X_q"], -ev["X_p"]
    if perturb is not None and eps > 0:
        fq, fp = perturb(q, p)
        vq, vp = vq - eps * fq, vp - eps * fp
    return vq, vp


def _rk4(torus, profile, q, p, dt, perturb, eps):
    d = dt[:, None, None]
    k1q, k1p = _velocity(torus, profile, q, p, perturb, eps)
    k2q, k2p = _velocity(torus, profile, q + 0.5 * d * k1q, p + 0.5 * d * k1p, perturb, eps)
    k3q, k3p = _velocity(torus, profile, q + 0.5 * d * k2q, p + 0.5 * d * k2p, perturb, eps)
    k4q, k4p = _velocity(torus, profile, q + d * k3q, p + d * k3p, perturb, eps)
    return q + d / 6 * (k1q + 2 * k2q + 2 * k3q + k4q), p + d / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)


@dataclass
class ExitCertificate:
    samples: int
    exits_through_B: int
    violations: int
    returns: int
    stalled: int
    unfinished: int
    face_counts: dict
    violation_faces: dict
    max_action_increase: float
    worst: list = field(default_factory=list)
    eps: float = 0.0
    seed: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.returns == 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "eps": self.eps,
            "samples": self.samples,
            "exits_through_B": self.exits_through_B,
            "violations": self.violations,
            "returns": self.returns,
            "stalled": self.stalled,
            "unfinished": self.unfinished,
            "boundary_faces": self.face_counts,
            "violation_faces": self.violation_faces,
            "max_action_increase": float(f"{self.max_action_increase:.6g}"),
            "worst": self.worst,
            "passed": self.passed,
        }


def _faces_worst(torus, profile, spec, q, p):
    ev = batch_evaluate(torus, profile, q, p)
    value, which, names = worst_face(face_values(spec, ev))
    return value, which, names, ev


def flow_samples(
    torus: FlatTorus,
    profile: RadialProfile,
    spec: IndexPairSpec,
    q: np.ndarray,
    p: np.ndarray,
    eps: float = 0.0,
    perturb=None,
    horizon: float = 40.0,
    max_dt: float = 1e-2,
    stall_speed: float = 1e-7,
    return_factor: float = 5.0,
):
    """Integrate -X from each sample until it leaves A, stalls or reaches the horizon.

    Returns per-sample exit face names ('' when it never left), exit times and
    whether it re-entered A within return_factor times its exit time.
    """
    m = q.shape[0]
    time = np.zeros(m)
    active = np.ones(m, dtype=bool)
    exit_face = np.array([""] * m, dtype=object)
    exit_time = np.full(m, np.nan)
    stalled = np.zeros(m, dtype=bool)
    max_increase = 0.0
    value, which, names, ev = _faces_worst(torus, profile, spec, q, p)
    # samples already on the bottom face leave at time 0
    at_bottom = face_values(spec, ev)["bottom"] >= -FACE_TOL
    exit_face[at_bottom] = "bottom"
    exit_time[at_bottom] = 0.0
    active &= ~at_bottom
    q, p = q.copy(), p.copy()
    action = ev["action"].copy()
    while np.any(active):
        idx = np.flatnonzero(active)
        qa, pa = q[idx], p[idx]
        vq, vp = _velocity(torus, profile, qa, pa, perturb, eps)
        speed = np.sqrt(np.sum(vq**2 + vp**2, axis=(-1, -2)))
        if not np.all(np.isfinite(speed)):
            raise IntegrationBlowUp("non-finite velocity")
        slow = speed < stall_speed
        stalled[idx[slow]] = True
        active[idx[slow]] = False
        idx, qa, pa, speed = idx[~slow], qa[~slow], pa[~slow], speed[~slow]
        if idx.size == 0:
            break
        dt = np.minimum(max_dt, 0.1 / speed)
        dt = np.minimum(dt, horizon - time[idx])
        qn, pn = _rk4(torus, profile, qa, pa, dt, perturb, eps)
        value, which, names, ev = _faces_worst(torus, profile, spec, qn, pn)
        max_increase = max(max_increase, float(np.max(ev["action"] - action[idx], initial=0.0)))
        crossed = value > FACE_TOL
        if np.any(crossed):
            rows = idx[crossed]
            frac = _locate_exit(torus, profile, spec, qa[crossed], pa[crossed], dt[crossed], perturb, eps)
            qe, pe = _rk4(torus, profile, qa[crossed], pa[crossed], frac * dt[crossed], perturb, eps)
            _, _, _, ev_e = _faces_worst(torus, profile, spec, qe, pe)
            faces_e = face_values(spec, ev_e)
            for local, row in enumerate(rows):
                vals = {k: float(np.max(np.atleast_1d(v[local]))) for k, v in faces_e.items()}
                exit_face[row] = "bottom" if vals["bottom"] >= -1e-7 else max(vals, key=vals.get)
            exit_time[rows] = time[rows] + frac * dt[crossed]
            active[rows] = False
        keep = ~crossed
        q[idx[keep]] = reduce(torus, qn[keep])
        p[idx[keep]] = pn[keep]
        action[idx[keep]] = ev["action"][keep]
        time[idx[keep]] += dt[keep]
        done = time >= horizon - 1e-12
        active &= ~done
    returned = _check_returns(torus, profile, spec, q, p, exit_face, exit_time, perturb, eps, return_factor, max_dt)
    return exit_face, exit_time, stalled, returned, max_increase


def _locate_exit(torus, profile, spec, q, p, dt, perturb, eps):
    lo = np.zeros(q.shape[0])
    hi = np.ones(q.shape[0])
    while np.max(hi - lo) > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        qm, pm = _rk4(torus, profile, q, p, mid * dt, perturb, eps)
        value, _, _, _ = _faces_worst(torus, profile, spec, qm, pm)
        out = value > FACE_TOL
        hi = np.where(out, mid, hi)
        lo = np.where(out, lo, mid)
    return hi


def _check_returns(torus, profile, spec, q_last, p_last, exit_face, exit_time, perturb, eps, factor, max_dt):
    """Follow exited trajectories for factor * exit time and flag re-entry into A."""
    m = q_last.shape[0]
    returned = np.zeros(m, dtype=bool)
    rows = np.flatnonzero((exit_face != "") & (exit_time > 0))
    if rows.size == 0:
        return returned
    q, p = q_last[rows].copy(), p_last[rows].copy()
    budget = np.minimum(factor * exit_time[rows], 50.0)
    elapsed = np.zeros(rows.size)
    left = np.zeros(rows.size, dtype=bool)
    active = np.ones(rows.size, dtype=bool)
    steps = 0
    while np.any(active) and steps < 20000:
        steps += 1
        i = np.flatnonzero(active)
        vq, vp = _velocity(torus, profile, q[i], p[i], perturb, eps)
        speed = np.sqrt(np.sum(vq**2 + vp**2, axis=(-1, -2)))
        dt = np.minimum(np.minimum(max_dt, 0.1 / np.maximum(speed, 1e-12)), budget[i] - elapsed[i])
        qn, pn = _rk4(torus, profile, q[i], p[i], dt, perturb, eps)
        inside = membership(torus, profile, spec, qn, pn)
        left[i] |= ~inside
        # a return is a trajectory that was outside A and comes back inside
        returned[rows[i]] |= inside & left[i]
        q[i], p[i] = reduce(torus, qn), pn
        elapsed[i] += dt
        active &= elapsed < budget - 1e-12
    return returned


def certify_exit(
    torus: FlatTorus,
    profile: RadialProfile,
    spec: IndexPairSpec,
    n_samples: int = 500,
    seed: int = 0,
    eps: float = 0.0,
    horizon: float = 40.0,
    max_dt: float = 1e-2,
) -> ExitCertificate:
    rng = np.random.default_rng(seed)
    q, p, labels = sample_boundary(torus, profile, spec, n_samples, rng)
    perturb = RandomField(torus, spec.r, rng) if eps > 0 else None
    exit_face, exit_time, stalled, returned, max_inc = flow_samples(
        torus, profile, spec, q, p, eps, perturb, horizon=horizon, max_dt=max_dt
    )
    exits_b = int(np.sum(exit_face == "bottom"))
    bad = (exit_face != "") & (exit_face != "bottom")
    violation_faces = {}
    for name in exit_face[bad]:
        violation_faces[name] = violation_faces.get(name, 0) + 1
    face_counts = {}
    for lab in labels:
        face_counts[lab] = face_counts.get(lab, 0) + 1
    worst = [
        {"start_face": labels[i], "exit_face": exit_face[i], "exit_time": float(f"{exit_time[i]:.6g}")}
        for i in np.flatnonzero(bad)[:5]
    ]
    unfinished = int(np.sum((exit_face == "") & ~stalled))
    return ExitCertificate(
        samples=len(labels),
        exits_through_B=exits_b,
        violations=int(np.sum(bad)),
        returns=int(np.sum(returned)),
        stalled=int(np.sum(stalled)),
        unfinished=unfinished,
        face_counts=face_counts,
        violation_faces=violation_faces,
        max_action_increase=max_inc,
        worst=worst,
        eps=eps,
        seed=seed,
    )


def largest_passing_eps(torus, profile, spec, ladder=(1e-4, 1e-3, 1e-2, 3e-2, 1e-1), n_samples: int = 200,
                        seed: int = 0) -> tuple[float, list[dict]]:
    """Largest perturbation size on the ladder whose certificate passes (0.0 if none)."""
    best = 0.0
    rows = []
    for eps in ladder:
        cert = certify_exit(torus, profile, spec, n_samples, seed, eps)
        rows.append({"eps": eps, "violations": cert.violations, "returns": cert.returns, "passed": cert.passed})
        if not cert.passed:
            break
        best = eps
    return best, rows


# ------------------------------------------------------------ continuation


@dataclass
class ContinuationReport:
    steps: list[dict]
    flagged: bool
    reasons: list[str]

    @property
    def passed(self) -> bool:
        return not self.flagged

    def to_dict(self) -> dict:
        return {"steps": self.steps, "flagged": self.flagged, "reasons": self.reasons, "passed": self.passed}


def _family_labels(families, a, b):
    return sorted((f.winding, round(f.radius, 6) > 0) for f in families if a < f.action < b)


def continuation_check(
    torus: FlatTorus,
    profile_0: RadialProfile,
    profile_1: RadialProfile,
    spec: IndexPairSpec,
    steps: int = 10,
    n_samples: int = 100,
    seed: int = 0,
    margin: float = 1e-3,
    strict: bool = False,
) -> ContinuationReport:
    """Follow H_t = (1 - t) H_0 + t H_1 and check the window's family set and exit certificate."""
    rows = []
    reasons = []
    reference = None
    all_reference = None
    for k, t in enumerate(np.linspace(0.0, 1.0, steps)):
        prof = profile_0.blend(profile_1, float(t)) if 0 < t < 1 else (profile_0 if t == 0 else profile_1)
        row = {"t": float(f"{t:.6g}"), "slope": float(f"{prof.slope:.6g}")}
        try:
            families = enumerate_orbits(torus, prof)
        except SlopeHitsLengthSpectrum as err:
            row["error"] = str(err)
            reasons.append(f"t={t:.3f}: slope on the length spectrum")
            rows.append(row)
            continue
        labels = _family_labels(families, spec.a, spec.b)
        everything = sorted(f.winding for f in families)
        near = [f.action for f in families if min(abs(f.action - spec.a), abs(f.action - spec.b)) < margin]
        row["families_in_window"] = [list(w) for w, _ in labels]
        row["critical_values"] = sorted({float(f"{f.action:.9g}") for f in families})
        if near:
            reasons.append(f"t={t:.3f}: critical value within {margin} of the window")
        if reference is None:
            reference, all_reference = labels, everything
        elif labels != reference or everything != all_reference:
            reasons.append(f"t={t:.3f}: family set changed")
        cert = certify_exit(torus, prof, spec, n_samples, seed + k)
        row["certificate"] = {"violations": cert.violations, "returns": cert.returns, "passed": cert.passed}
        if not cert.passed:
            reasons.append(f"t={t:.3f}: exit certificate failed")
        rows.append(row)
    flagged = bool(reasons)
    if flagged and strict:
        raise CriticalValueEscapesWindow("; ".join(reasons))
    return ContinuationReport(rows, flagged, reasons)
