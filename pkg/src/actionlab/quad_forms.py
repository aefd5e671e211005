"""Quadratic forms of the stabilization argument and their inertia.

Every form here is the value of the generalized flat reduction (module
discrete_action) for a linear flow, so it is an exact quadratic form on
R^{2nr}.  Coordinates are node-major real vectors: node j contributes
(x_j, y_j) with z_j = x_j + i y_j in C^n.

Normalization: B(z) = sum_j y_j (x_{j+1} - x_j) for the constant section
iR^n, so the mode z_j = alpha rho^{m j} has value -(r/2) sin(2 pi m / r)|alpha|^2
and a counter-clockwise polygon gets minus its enclosed area.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrete_action import (
    ConstantSection,
    GeneralizedModel,
    HarmonicFlow,
    ProductFlow,
    RadialFlatFlow,
    StandardFormSection,
)
from .hamiltonians import zero_profile
from .lagrangian import LagrangianSubspace, StandardFormLoop
from .spectral import InertiaReport, UnstableInertia, inertia

NORMALIZATION = "B(z) = sum_j y_j (x_{j+1} - x_j) for section iR^n; E_m value -(r/2) sin(2 pi m/r) |alpha|^2"


@dataclass
class QuadForm:
    matrix: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("quadratic form needs a square matrix")
        if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(m), initial=0.0)):
            raise ValueError("matrix is not symmetric")
        self.matrix = 0.5 * (m + m.T)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def value(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.einsum("...i,ij,...j->...", v, self.matrix, v)

    def inertia(self, zero_threshold: float | None = None) -> InertiaReport:
        return inertia(self.matrix, zero_threshold)


def complex_to_vector(z) -> np.ndarray:
    """(…, r, n) complex nodes -> (…, 2nr) real node-major vector."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1).reshape(*z.shape[:-2], -1)


def vector_to_complex(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nodes = v.reshape(*v.shape[:-1], -1, 2 * n)
    return nodes[..., :n] + 1j * nodes[..., n:]


def polarize(value_fn, dim: int) -> np.ndarray:
    """Symmetric matrix M of a quadratic form q(v) = v^T M v from values alone."""
    eye = np.eye(dim)
    diag = value_fn(eye)
    plus = eye[:, None, :] + eye[None, :, :]
    minus = eye[:, None, :] - eye[None, :, :]
    off = 0.25 * (value_fn(plus.reshape(-1, dim)) - value_fn(minus.reshape(-1, dim))).reshape(dim, dim)
    np.fill_diagonal(off, diag)
    return 0.5 * (off + off.T)


def form_from_model(model: GeneralizedModel, meta: dict) -> QuadForm:
    n, r = model.n, model.r

    def value(v):
        return model.action(v.reshape(*v.shape[:-1], r, 2 * n))

    meta = dict(meta, normalization=NORMALIZATION)
    return QuadForm(polarize(value, 2 * n * r), meta)


def build_BrL(n: int, r: int, L: LagrangianSubspace | None = None) -> QuadForm:
    if r < 3:
        raise ValueError("need r >= 3")
    L = LagrangianSubspace.imaginary(n) if L is None else L
    model = GeneralizedModel(RadialFlatFlow(zero_profile()), ConstantSection(L), r)
    return form_from_model(model, {"form": "B_r^L", "n": n, "r": r})


def eval_BrL(z, L: LagrangianSubspace | None = None) -> float:
    """Value of B_r^L on complex nodes z of shape (r, n) without building the matrix."""
    z = np.asarray(z, dtype=complex)
    r, n = z.shape
    L = LagrangianSubspace.imaginary(n) if L is None else L
    model = GeneralizedModel(RadialFlatFlow(zero_profile()), ConstantSection(L), r)
    return float(model.action(np.concatenate([z.real, z.imag], axis=-1)))


def coordinate_triple(d_plus: int, d_minus: int, d_zero: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n2 = d_plus + d_minus + d_zero
    eye = np.eye(n2)
    return eye[:, :d_plus], eye[:, d_plus : d_plus + d_minus], eye[:, d_plus + d_minus :]


def _standard_loop(n1: int, L0, v_plus, v_minus, v_zero) -> StandardFormLoop:
    base = None
    if n1:
        base = LagrangianSubspace.imaginary(n1) if L0 is None else L0
    return StandardFormLoop(v_plus, v_minus, v_zero, base)


def build_Br_gamma(n1: int, r: int, L0=None, v_plus=None, v_minus=None, v_zero=None) -> QuadForm:
    """Form with node Lagrangians L0 (+) gamma(j/r) for the standard-form loop gamma."""
    if r < 5 or r % 2 == 0:
        raise ValueError("need odd r >= 5")
    loop = _standard_loop(n1, L0, v_plus, v_minus, v_zero)
    model = GeneralizedModel(RadialFlatFlow(zero_profile()), StandardFormSection(loop), r)
    d = loop.dims
    return form_from_model(model, {"form": "B_r^gamma", "n1": n1, "n2": loop.n2, "r": r, "dims": list(d)})


def stdcal_negative_index(n1: int, n2: int, r: int, d_plus: int, d_zero: int) -> int:
    """(n1 + n2)(r - 2) + n1 + dim V+ + dim V-^perp with dim V-^perp = dim V+ + dim V0."""
    return (n1 + n2) * (r - 2) + n1 + d_plus + (d_plus + d_zero)


def negative_index(form: QuadForm, zero_threshold: float | None = None) -> tuple[int, np.ndarray]:
    """n_neg and an orthonormal basis of the negative eigenspace."""
    rep = form.inertia(zero_threshold)
    if not rep.stable:
        raise UnstableInertia(f"inertia {rep.signature} changes under a 20% threshold perturbation")
    values, vectors = np.linalg.eigh(form.matrix)
    return rep.n_neg, vectors[:, values < -rep.zero_threshold]


def mode_vector(n: int, r: int, m: int, alpha) -> np.ndarray:
    """Real vector of the E_m mode z_j = alpha rho^{m j}, rho = e^{2 pi i / r}."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    phases = np.exp(2j * np.pi * m * np.arange(r) / r)
    return complex_to_vector(phases[:, None] * alpha[None, :n])


def mode_space(n: int, r: int, m: int) -> np.ndarray:
    """Real basis (2nr x 2n) of E_m: columns for alpha = e_k and alpha = i e_k."""
    cols = []
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        cols.append(mode_vector(n, r, m, e))
        cols.append(mode_vector(n, r, m, 1j * e))
    return np.stack(cols, axis=1)


def mode_value(r: int, m: int, alpha) -> float:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    return float(-(r / 2) * np.sin(2 * np.pi * m / r) * np.sum(np.abs(alpha) ** 2))


def disc_section(k: int, loop: StandardFormLoop | None = None):
    if loop is None:
        return ConstantSection(LagrangianSubspace.imaginary(k))
    if loop.n != k:
        raise ValueError("section loop dimension does not match the disc factor")
    return StandardFormSection(loop)


def build_As(k: int, r: int, s: float, section=None) -> QuadForm:
    """Reduction on the disc factor C^k with H_s = (s/2)|z|^2, exact rotations as flow."""
    if not 0 <= s < 2 * np.pi:
        raise ValueError("s must lie in [0, 2 pi)")
    section = disc_section(k) if section is None else section
    model = GeneralizedModel(HarmonicFlow(s), section, r)
    return form_from_model(model, {"form": "A^s", "k": k, "r": r, "s": float(s)})


def build_product_As(n1: int, k: int, r: int, s: float, L0=None) -> QuadForm:
    """A^s on C^{n1} x C^k: zero Hamiltonian on the first factor, H_s on the disc."""
    flow = ProductFlow(RadialFlatFlow(zero_profile()), HarmonicFlow(s), n1, k)
    base = LagrangianSubspace.imaginary(n1) if L0 is None else L0
    section = ConstantSection(base.direct_sum(LagrangianSubspace.imaginary(k)))
    model = GeneralizedModel(flow, section, r)
    return form_from_model(model, {"form": "A^s product", "n1": n1, "k": k, "r": r, "s": float(s)})


def constant_curves(k: int, r: int) -> np.ndarray:
    """Orthonormal basis (2kr x 2k) of constant curves z_j = c."""
    basis = np.zeros((2 * k * r, 2 * k))
    for a in range(2 * k):
        for j in range(r):
            basis[j * 2 * k + a, a] = 1.0 / np.sqrt(r)
    return basis


def subspace_match(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """Whether two column spans coincide."""
    if a.shape[1] != b.shape[1]:
        return False
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    return bool(np.linalg.norm(qa @ qa.T - qb @ qb.T, 2) < tol)


DEFAULT_S_GRID = (0.01, 0.05, 0.1, 0.5, 1.5, 3.0, 6.0)


@dataclass
class StabilizationReport:
    k: int
    r: int
    base_neg: int
    kernel_dim: int
    kernel_is_constant_curves: bool
    rows: list[dict]

    @property
    def jumps(self) -> list[int]:
        return [row["n_neg"] - self.base_neg for row in self.rows]

    @property
    def passed(self) -> bool:
        return (
            self.kernel_dim == 2 * self.k
            and self.kernel_is_constant_curves
            and all(j == 2 * self.k for j in self.jumps)
            and all(row["n_zero"] == 0 and row["stable"] for row in self.rows)
        )

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "n_neg_s0": self.base_neg,
            "kernel_dim_s0": self.kernel_dim,
            "kernel_is_constant_curves": self.kernel_is_constant_curves,
            "rows": self.rows,
            "passed": self.passed,
            "normalization": NORMALIZATION,
        }


def stabilization_report(k: int, r: int, section=None, s_grid=DEFAULT_S_GRID) -> StabilizationReport:
    base = build_As(k, r, 0.0, section)
    rep0 = base.inertia()
    values, vectors = np.linalg.eigh(base.matrix)
    kernel = vectors[:, np.abs(values) <= rep0.zero_threshold]
    rows = []
    for s in s_grid:
        rep = build_As(k, r, s, section).inertia()
        rows.append({"s": float(s), "n_neg": rep.n_neg, "n_zero": rep.n_zero, "n_pos": rep.n_pos, "stable": rep.stable})
    return StabilizationReport(k, r, rep0.n_neg, rep0.n_zero, subspace_match(kernel, constant_curves(k, r)), rows)
