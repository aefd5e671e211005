"""Radial Hamiltonians H(q, p) = h(|p|) on flat tori.

Profiles are stored as piecewise polynomials for h on [b_k, b_{k+1}), written
in the local variable tau = t - b_k.  Every builder specifies h'' piecewise and
integrates twice, so h is C^2 by construction; the last piece extends to
infinity.  The flow of a radial Hamiltonian moves q along p with speed h'(|p|)
and leaves p fixed, so it is evaluated in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .flat_geometry import CotangentPoint, FlatTorus, TorusPoint, lattice_vectors, reduce

SMALL_RADIUS = 1e-9


class SlopeHitsLengthSpectrum(ValueError):
    """A linear slope of the profile is (numerically) a closed geodesic length."""


@dataclass(frozen=True)
class RadialProfile:
    kind: str
    breakpoints: tuple[float, ...]
    coefficients: tuple[tuple[float, ...], ...]
    labels: tuple[str, ...]
    slope: float
    cap_radius: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.breakpoints) != len(self.coefficients) or len(self.labels) != len(self.breakpoints):
            raise ValueError("one coefficient row and one label per piece")
        if self.breakpoints[0] != 0.0 or np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must start at 0 and increase")
        polys = [Polynomial(c) for c in self.coefficients]
        object.__setattr__(self, "_pieces", (polys, [p.deriv(1) for p in polys], [p.deriv(2) for p in polys]))
        for name, table in (("_h", polys), ("_dh", [p.deriv(1) for p in polys]), ("_d2h", [p.deriv(2) for p in polys])):
            width = max(len(p.coef) for p in table)
            padded = np.zeros((len(table), width))
            for k, p in enumerate(table):
                padded[k, : len(p.coef)] = p.coef
            object.__setattr__(self, name, padded)

    # evaluation -----------------------------------------------------------

    def _eval(self, table, t):
        # vectorized Horner on the piece selected for each t
        t = np.asarray(t, dtype=float)
        breaks = np.asarray(self.breakpoints)
        idx = np.clip(np.searchsorted(breaks, t, side="right") - 1, 0, len(breaks) - 1)
        local = t - breaks[idx]
        coefs = table[idx]
        out = coefs[..., -1]
        for k in range(table.shape[1] - 2, -1, -1):
            out = out * local + coefs[..., k]
        return out if np.ndim(out) else float(out)

    def h(self, t):
        return self._eval(self._h, t)

    def dh(self, t):
        return self._eval(self._dh, t)

    def d2h(self, t):
        return self._eval(self._d2h, t)

    def dh_over_t(self, t):
        """h'(t)/t, continuously extended by h''(0) at t = 0."""
        t = np.asarray(t, dtype=float)
        small = t < SMALL_RADIUS
        safe = np.where(small, 1.0, t)
        out = np.where(small, self.d2h(np.zeros_like(t)), self.dh(safe) / safe)
        return out if out.ndim else float(out)

    @property
    def num_pieces(self) -> int:
        return len(self.breakpoints)

    def piece_interval(self, k: int) -> tuple[float, float]:
        upper = self.breakpoints[k + 1] if k + 1 < self.num_pieces else np.inf
        return self.breakpoints[k], upper

    # continuity -----------------------------------------------------------

    def continuity_defects(self) -> np.ndarray:
        """Jumps of (h, h', h'') at each interior breakpoint."""
        rows = []
        for k in range(1, self.num_pieces):
            width = self.breakpoints[k] - self.breakpoints[k - 1]
            left = [tab[k - 1](width) for tab in self._pieces]
            right = [tab[k](0.0) for tab in self._pieces]
            rows.append(np.abs(np.subtract(left, right)))
        return np.array(rows).reshape(-1, 3)

    # serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "breakpoints": list(self.breakpoints),
            "coefficients": [list(c) for c in self.coefficients],
            "labels": list(self.labels),
            "slope": self.slope,
            "cap_radius": self.cap_radius,
            "params": dict(self.params),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RadialProfile":
        return cls(
            kind=data["kind"],
            breakpoints=tuple(float(b) for b in data["breakpoints"]),
            coefficients=tuple(tuple(float(c) for c in row) for row in data["coefficients"]),
            labels=tuple(data["labels"]),
            slope=float(data["slope"]),
            cap_radius=float(data["cap_radius"]),
            params=dict(data.get("params", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "RadialProfile":
        return cls.from_dict(json.loads(text))

    def blend(self, other: "RadialProfile", weight: float) -> "RadialProfile":
        """The profile (1 - weight) * self + weight * other."""
        breaks = sorted(set(self.breakpoints) | set(other.breakpoints))
        coeffs, labels = [], []
        for b in breaks:
            poly = Polynomial([0.0])
            for prof, w in ((self, 1.0 - weight), (other, weight)):
                k = int(np.searchsorted(prof.breakpoints, b, side="right") - 1)
                shifted = prof._pieces[0][k](Polynomial([b - prof.breakpoints[k], 1.0]))
                poly = poly + w * shifted
            coeffs.append(tuple(np.pad(poly.coef, (0, max(0, 6 - len(poly.coef))))))
            labels.append("blend")
        slope = (1.0 - weight) * self.slope + weight * other.slope
        return RadialProfile(
            kind="blend",
            breakpoints=tuple(float(b) for b in breaks),
            coefficients=tuple(coeffs),
            labels=tuple(labels),
            slope=slope,
            cap_radius=max(self.cap_radius, other.cap_radius),
            params={"weight": weight, "start": self.to_dict(), "end": other.to_dict()},
        )


def _from_second_derivative(breaks, second, labels, **meta) -> RadialProfile:
    """Integrate piecewise h'' (local polynomials) into a C^2 profile with h(0)=h'(0)=0."""
    h_start, dh_start = 0.0, 0.0
    coeffs = []
    for k, d2 in enumerate(second):
        d1 = d2.integ(k=dh_start)
        d0 = d1.integ(k=h_start)
        coeffs.append(tuple(np.pad(d0.coef, (0, max(0, 6 - len(d0.coef))))))
        if k + 1 < len(breaks):
            width = breaks[k + 1] - breaks[k]
            h_start, dh_start = float(d0(width)), float(d1(width))
    return RadialProfile(
        breakpoints=tuple(float(b) for b in breaks),
        coefficients=tuple(coeffs),
        labels=tuple(labels),
        **meta,
    )


def _falling_step(height: float, width: float) -> Polynomial:
    # height * (1 - 3u^2 + 2u^3) with u = tau / width; C^1 step from height to 0
    u = Polynomial([0.0, 1.0 / width])
    return height * (1 - 3 * u**2 + 2 * u**3)


def _bump(area: float, width: float) -> Polynomial:
    # 6 u (1 - u) / width integrates to one over [0, width] and vanishes at both ends
    u = Polynomial([0.0, 1.0 / width])
    return area * 6.0 * u * (1 - u) / width


def quadratic_capped(mu: float, slope: float | None = None, eps: float | None = None) -> RadialProfile:
    """h = mu t^2 / 2 near zero, bending over to slope `slope` at infinity.

    h'' = mu on [0, (slope - eps)/mu], a smooth step down to 0 ending at
    (slope + eps)/mu, and h is linear afterwards.  With slope = mu this is the
    classical convex profile whose second derivative integrates to mu.
    """
    slope = float(mu if slope is None else slope)
    eps = float(0.1 * slope if eps is None else eps)
    if mu <= 0 or slope <= 0 or not 0 < eps < slope:
        raise ValueError("need mu > 0, slope > 0 and 0 < eps < slope")
    t1 = (slope - eps) / mu
    t2 = (slope + eps) / mu
    return _from_second_derivative(
        [0.0, t1, t2],
        [Polynomial([mu]), _falling_step(mu, t2 - t1), Polynomial([0.0])],
        ["quadratic", "bend", "linear"],
        kind="quadratic_capped",
        slope=slope,
        cap_radius=t2,
        params={"mu": float(mu), "slope": slope, "eps": eps},
    )


def zero_profile() -> RadialProfile:
    return RadialProfile(
        kind="zero",
        breakpoints=(0.0,),
        coefficients=((0.0,) * 6,),
        labels=("linear",),
        slope=0.0,
        cap_radius=0.0,
        params={},
    )


def quadratic_scaled(s: float) -> RadialProfile:
    """Uncapped h = s t^2 / 2; its flow is a linear shear."""
    return _from_second_derivative(
        [0.0],
        [Polynomial([float(s)])],
        ["quadratic"],
        kind="quadratic_scaled",
        slope=np.inf,
        cap_radius=np.inf,
        params={"s": float(s)},
    )


# near-Lagrangian profile ----------------------------------------------------


@dataclass(frozen=True)
class NearLagrangianProfile(RadialProfile):
    """Convex inner piece, concave leveling to a plateau c, convex outer piece."""

    @property
    def mu_L(self) -> float:
        return self.params["mu_L"]

    @property
    def mu_N(self) -> float:
        return self.params["mu_N"]

    @property
    def delta(self) -> float:
        return self.params["delta"]

    @property
    def plateau(self) -> tuple[float, float]:
        return tuple(self.params["plateau"])

    @property
    def plateau_value(self) -> float:
        return self.params["c"]

    def intercept(self, t):
        """y-intercept of the tangent line at t, i.e. minus the orbit action."""
        return self.h(t) - t * self.dh(t)


def _largest_below(values: np.ndarray, bound: float) -> float | None:
    below = values[values < bound]
    return float(below.max()) if below.size else None


def near_lagrangian(
    torus: FlatTorus,
    mu_L: float,
    delta: float,
    mu_N: float,
    width: float = 0.05,
    outer_width: float = 0.05,
    plateau_length: float = 0.1,
    safety: float = 1.5,
) -> NearLagrangianProfile:
    """Build the leveled profile for a torus.

    The start of the concave piece is pushed out until every tangent line at a
    geodesic-length slope below mu_L meets the y-axis above delta * mu_L, which
    makes those orbit actions smaller than -delta * mu_L.  `width` is the
    leveling width of the concave piece.
    """
    lengths = _nonzero_lengths(torus, max(mu_L, mu_N))
    below_L = _largest_below(lengths, mu_L)
    target = delta * mu_L

    def build(x1: float) -> NearLagrangianProfile:
        x2 = x1 + width
        x3 = x2 + plateau_length
        x4 = x3 + outer_width
        second = [
            Polynomial([2 * mu_L / delta, -2 * mu_L / delta**2]),
            Polynomial([0.0]),
            -_bump(mu_L, width),
            Polynomial([0.0]),
            _bump(mu_N, outer_width),
            Polynomial([0.0]),
        ]
        prof = _from_second_derivative(
            [0.0, delta, x1, x2, x3, x4],
            second,
            ["inner", "linear_L", "concave", "plateau", "outer", "linear_N"],
            kind="near_lagrangian",
            slope=float(mu_N),
            cap_radius=x4,
            params={},
        )
        c = float(prof.h(x2))
        params = {
            "mu_L": float(mu_L),
            "delta": float(delta),
            "mu_N": float(mu_N),
            "width": float(width),
            "outer_width": float(outer_width),
            "plateau_length": float(plateau_length),
            "plateau": [x2, x3],
            "c": c,
            "lattice_lengths": list(torus.lattice_lengths),
        }
        return NearLagrangianProfile(
            kind=prof.kind,
            breakpoints=prof.breakpoints,
            coefficients=prof.coefficients,
            labels=prof.labels,
            slope=prof.slope,
            cap_radius=prof.cap_radius,
            params=params,
        )

    below_N = _largest_below(lengths, mu_N)
    x1 = 2.0 * delta
    for _ in range(100):
        prof = build(x1)
        # each intercept is affine in x1 with gradient mu_L minus the slope involved
        step = 0.0
        for slope, piece in ((below_L, 2), (below_N, 4)):
            if slope is None:
                continue
            if slope >= mu_L:
                raise ValueError(
                    f"geodesic length {slope:.6g} lies in [mu_L, mu_N); its outer orbit"
                    " cannot be pushed below -delta*mu_L"
                )
            lo, hi = prof.breakpoints[piece], prof.breakpoints[piece + 1]
            t_star = solve_monotone(prof.dh, slope, lo, hi)
            gap = target - float(prof.intercept(t_star))
            if gap >= 0:
                step = max(step, safety * (gap + 1e-3 * target) / (mu_L - slope))
        if step == 0.0:
            return prof
        x1 += step
    raise ValueError("could not place the concave piece")


def _nonzero_lengths(torus: FlatTorus, upper: float) -> np.ndarray:
    _, vectors = lattice_vectors(torus, upper)
    norms = np.linalg.norm(vectors, axis=1)
    return np.unique(np.round(norms[norms > 0], 14))


def solve_monotone(func, target: float, lo: float, hi: float, iters: int = 200) -> float:
    """Bisection for func(t) = target on [lo, hi] with func monotone."""
    f_lo = func(lo) - target
    f_hi = func(hi) - target
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError("target not bracketed")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid) - target
        if f_mid == 0 or hi - lo < 1e-15 * max(1.0, abs(hi)):
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def profile_from_dict(data: dict) -> RadialProfile:
    if data.get("kind") == "near_lagrangian":
        base = RadialProfile.from_dict(data)
        return NearLagrangianProfile(**{k: getattr(base, k) for k in
                                        ("kind", "breakpoints", "coefficients", "labels",
                                         "slope", "cap_radius", "params")})
    return RadialProfile.from_dict(data)


# slopes and the length spectrum ---------------------------------------------


def default_margin(torus: FlatTorus) -> float:
    return 1e-3 * min(torus.lattice_lengths)


def check_slopes(torus: FlatTorus, profile: RadialProfile, margin: float | None = None) -> None:
    """Every nonzero linear slope must stay `margin` away from the length spectrum."""
    margin = default_margin(torus) if margin is None else margin
    slopes = set()
    for k in range(profile.num_pieces):
        if np.all(np.abs(profile._pieces[2][k].coef) < 1e-14):
            slope = float(profile._pieces[1][k](0.0))
            if slope > 0 and np.isfinite(slope):
                slopes.add(slope)
    if np.isfinite(profile.slope) and profile.slope > 0:
        slopes.add(float(profile.slope))
    if not slopes:
        return
    lengths = _nonzero_lengths(torus, max(slopes) + margin)
    for slope in sorted(slopes):
        near = lengths[np.abs(lengths - slope) < margin]
        if near.size:
            raise SlopeHitsLengthSpectrum(
                f"slope {slope:.6g} is within {margin:.3g} of geodesic length {near[0]:.6g}"
            )


# flow -----------------------------------------------------------------------


def velocity(profile: RadialProfile, p: np.ndarray) -> np.ndarray:
    """q-velocity h'(|p|) p/|p| of the radial flow; batched over leading axes."""
    x = np.linalg.norm(p, axis=-1)
    return np.asarray(profile.dh_over_t(x))[..., None] * p


def shear_apply(profile: RadialProfile, p: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Apply the symmetric matrix D(velocity)(p) to c (batched)."""
    x = np.linalg.norm(p, axis=-1)
    safe = np.where(x < SMALL_RADIUS, 1.0, x)
    unit = p / safe[..., None]
    radial = np.sum(unit * c, axis=-1)
    d2 = np.asarray(profile.d2h(x))
    ratio = np.asarray(profile.dh_over_t(x))
    out = ratio[..., None] * c + ((d2 - ratio) * radial)[..., None] * unit
    return np.where((x < SMALL_RADIUS)[..., None], d2[..., None] * c, out)


def shear_matrix(profile: RadialProfile, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    n = p.shape[-1]
    eye = np.eye(n)
    cols = [shear_apply(profile, p, eye[i]) for i in range(n)]
    return np.stack(cols, axis=-1)


def _split(z) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(z, CotangentPoint):
        return z.base.coords, z.fiber
    q, p = z
    return np.asarray(q, dtype=float), np.asarray(p, dtype=float)


def flow(torus: FlatTorus, profile: RadialProfile, z, t: float):
    """Exact time-t flow.  Accepts a CotangentPoint or a (q, p) pair of arrays."""
    q, p = _split(z)
    q_new = reduce(torus, q + t * velocity(profile, p))
    if isinstance(z, CotangentPoint):
        return CotangentPoint(TorusPoint(torus, q_new), p.copy())
    return q_new, p.copy()


def flow_differential(torus: FlatTorus, profile: RadialProfile, z, t: float) -> np.ndarray:
    """Jacobian of the time-t flow in the (dq, dp) splitting: [[I, t S], [0, I]]."""
    _, p = _split(z)
    n = p.shape[-1]
    out = np.eye(2 * n)
    out[:n, n:] = t * shear_matrix(profile, p)
    return out


def action_of_orbit(profile: RadialProfile, x) -> np.ndarray:
    """Action of the orbit at radius x: x h'(x) - h(x), minus the tangent intercept."""
    x = np.asarray(x, dtype=float)
    return x * profile.dh(x) - profile.h(x)


def grad_bounds(profile: RadialProfile, grid_size: int = 4001) -> tuple[float, float]:
    """(C1, C2): sup of h' and a padded sup of the fiber Hessian norm of H."""
    top = profile.cap_radius if np.isfinite(profile.cap_radius) else 10.0
    grid = np.linspace(0.0, 1.5 * max(top, 1e-3), grid_size)
    c1 = float(np.max(np.abs(profile.dh(grid))))
    if np.isfinite(profile.slope):
        c1 = max(c1, abs(profile.slope))
    hess = np.maximum(np.abs(profile.d2h(grid)), np.abs(profile.dh_over_t(grid)))
    c2 = 1.05 * float(np.max(hess))
    return c1, c2
