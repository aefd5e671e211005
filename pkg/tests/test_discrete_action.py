import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionlab.discrete_action import (
    ConstantSection,
    DiscreteLoop,
    GeneralizedModel,
    HarmonicFlow,
    LoopOutOfChart,
    PreconditionViolated,
    ProductFlow,
    RadialFlatFlow,
    StandardFormSection,
    action_Ar,
    batch_evaluate,
    check_ratio,
    cutoff_values,
    embed_next_r,
    energy_E,
    fit_pjbound_constant,
    grad_Ar,
    pseudo_gradient_X,
    random_admissible_loop,
    torus_loop_to_flat,
)
from actionlab.flat_geometry import FlatTorus
from actionlab.hamiltonians import quadratic_capped, zero_profile
from actionlab.lagrangian import LagrangianSubspace, StandardFormLoop
from actionlab.quad_forms import eval_BrL


def winding_one(r):
    return DiscreteLoop(np.arange(r)[:, None] / r, np.full((r, 1), 1 / 3))


def central_difference(func, v, step=1e-6):
    out = np.zeros_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        out[i] = (func(v + e) - func(v - e)) / (2 * step)
    return out


def test_dissection_action_is_the_orbit_action(circle):
    h = quadratic_capped(3.0)
    loop = winding_one(12)
    assert action_Ar(circle, h, loop) == pytest.approx(1 / 6, abs=1e-12)
    assert np.max(np.abs(grad_Ar(circle, h, loop))) < 1e-9
    assert energy_E(circle, h, loop) < 1e-20


def test_zero_profile_zero_fibres_give_zero(circle, rng):
    q = rng.uniform(0, 1, size=(8, 1))
    q = np.cumsum(np.full((8, 1), 0.01), axis=0)
    assert action_Ar(circle, zero_profile(), DiscreteLoop(q, np.zeros((8, 1)))) == 0.0
    assert action_Ar(circle, zero_profile(), DiscreteLoop(np.full((8, 1), 0.4), np.zeros((8, 1)))) == 0.0


def test_loop_leaving_the_chart_is_rejected(rectangle, mu3):
    # each flow segment overshoots the next node by 0.525 >= 2 eps0 = 0.5
    p = np.tile([0.0, 0.7], (4, 1))
    with pytest.raises(LoopOutOfChart):
        action_Ar(rectangle, mu3, DiscreteLoop(np.zeros((4, 2)), p))


def test_ratio_precondition_is_strict_only(circle):
    h = quadratic_capped(3.0, 2.2, 0.1)
    loop = winding_one(4)
    with pytest.raises(PreconditionViolated):
        check_ratio(circle, h, loop)
    action_Ar(circle, h, loop)


def test_pseudo_gradient_regimes(circle, mu3, rng):
    calm = random_admissible_loop(circle, 16, rng, p_scale=0.01, step_fraction=0.05, allow_winding=False)
    assert np.array_equal(pseudo_gradient_X(circle, mu3, calm), grad_Ar(circle, mu3, calm))
    q = np.cumsum(np.r_[[[0.0]], np.full((7, 1), 0.2)], axis=0)
    wild = DiscreteLoop(q, rng.normal(size=(8, 1)) * 0.3)
    x = pseudo_gradient_X(circle, mu3, wild).reshape(8, 2)
    g = grad_Ar(circle, mu3, wild).reshape(8, 2)
    assert np.all(x[:, 0] == 0)
    assert np.allclose(x[:, 1], g[:, 1])


def test_cutoff_values_on_a_dissection(circle):
    r = 12
    values = cutoff_values(circle, quadratic_capped(3.0), winding_one(r))
    assert np.allclose(values["p_norms"], 1 / 3)
    assert np.allclose(values["steps"], 1 / r)
    assert values["energy"] < 1e-20


def test_embedding_keeps_critical_points_and_action(circle):
    h = quadratic_capped(3.0)
    loop = winding_one(9)
    bigger = embed_next_r(circle, h, loop)
    assert bigger.r == 10
    assert action_Ar(circle, h, bigger) == pytest.approx(action_Ar(circle, h, loop), abs=1e-12)
    assert np.max(np.abs(grad_Ar(circle, h, bigger))) < 1e-9


def test_embedding_preserves_action_off_critical_points(rectangle, mu3, rng):
    for _ in range(20):
        loop = random_admissible_loop(rectangle, 10, rng, p_scale=0.4)
        assert action_Ar(rectangle, mu3, embed_next_r(rectangle, mu3, loop)) == pytest.approx(
            action_Ar(rectangle, mu3, loop), abs=1e-10)


def test_batch_evaluate_matches_single_loops(rectangle, mu3, rng):
    loops = [random_admissible_loop(rectangle, 8, rng, p_scale=0.5) for _ in range(5)]
    q = np.stack([l.q for l in loops])
    p = np.stack([l.p for l in loops])
    ev = batch_evaluate(rectangle, mu3, q, p)
    for i, loop in enumerate(loops):
        assert ev["action"][i] == pytest.approx(action_Ar(rectangle, mu3, loop), abs=1e-12)
        x = pseudo_gradient_X(rectangle, mu3, loop).reshape(8, 4)
        assert np.allclose(ev["X_q"][i], x[:, :2]) and np.allclose(ev["X_p"][i], x[:, 2:])


def test_loop_json_round_trip(rectangle, rng):
    loop = random_admissible_loop(rectangle, 6, rng)
    again = DiscreteLoop.from_json(loop.to_json())
    assert np.array_equal(again.vector(), loop.vector())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 16]), st.sampled_from([1, 2]))
def test_gradient_matches_finite_differences(seed, r, dim):
    torus = FlatTorus((1.0,) if dim == 1 else (1.0, 1.3))
    h = quadratic_capped(3.0, 2.2, 0.1)
    loop = random_admissible_loop(torus, r, np.random.default_rng(seed), p_scale=0.5)
    exact = grad_Ar(torus, h, loop)
    numeric = central_difference(lambda v: action_Ar(torus, h, loop.with_vector(v)), loop.vector())
    assert np.linalg.norm(exact - numeric) <= 1e-6 * max(np.linalg.norm(numeric), 1e-3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pseudo_gradient_is_gradient_like(seed):
    torus = FlatTorus((1.0, 1.3))
    h = quadratic_capped(3.0, 2.2, 0.1)
    rng = np.random.default_rng(seed)
    loop = random_admissible_loop(torus, 8, rng, p_scale=0.6, step_fraction=float(rng.uniform(0.05, 0.95)))
    x = pseudo_gradient_X(torus, h, loop)
    g = grad_Ar(torus, h, loop)
    assert x @ g >= x @ x - 1e-12
    assert energy_E(torus, h, loop) >= 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 2.0))
def test_critical_iff_zero_energy(seed, shift):
    torus = FlatTorus((1.0,))
    h = quadratic_capped(3.0, 2.2, 0.1)
    rng = np.random.default_rng(seed)
    loop = winding_one(12).translated(torus, [shift])
    assert np.linalg.norm(grad_Ar(torus, h, loop)) < 1e-9 and energy_E(torus, h, loop) < 1e-18
    moved = loop.with_vector(loop.vector() + 1e-3 * rng.normal(size=24))
    assert np.linalg.norm(grad_Ar(torus, h, moved)) > 1e-7 and energy_E(torus, h, moved) > 1e-14


# generalized flat model ------------------------------------------------------


def test_flat_model_agrees_with_the_torus_on_contractible_loops(circle, mu3, rng):
    loop = random_admissible_loop(circle, 16, rng, p_scale=0.5, allow_winding=False)
    model = GeneralizedModel(RadialFlatFlow(mu3), ConstantSection(LagrangianSubspace.imaginary(1)), 16)
    z = torus_loop_to_flat(circle, loop)
    assert model.action(z) == pytest.approx(action_Ar(circle, mu3, loop), abs=1e-12)
    assert np.allclose(model.gradient(z).reshape(-1), grad_Ar(circle, mu3, loop), atol=1e-12)


def test_flat_model_with_zero_profile_is_BrL(rng):
    z = rng.normal(size=(7, 2))
    model = GeneralizedModel(RadialFlatFlow(zero_profile()), ConstantSection(LagrangianSubspace.imaginary(1)), 7)
    nodes = (z[:, 0] + 1j * z[:, 1])[:, None]
    direct = np.sum(z[:, 1] * (np.roll(z[:, 0], -1) - z[:, 0]))
    assert model.action(z) == pytest.approx(eval_BrL(nodes), abs=1e-12)
    assert model.action(z) == pytest.approx(direct, abs=1e-12)
    const = np.tile(rng.normal(size=(1, 2)), (7, 1))
    assert model.action(const) == 0.0
    assert np.allclose(model.gradient(const), 0)


@pytest.mark.parametrize("which", ["harmonic_standard", "radial_random", "product"])
def test_generalized_gradients_match_finite_differences(which, mu3, rng):
    if which == "harmonic_standard":
        flow, n = HarmonicFlow(1.3), 3
        section = StandardFormSection(StandardFormLoop.from_dims(1, 1, 0, base=LagrangianSubspace.random(1, rng)))
    elif which == "radial_random":
        flow, n = RadialFlatFlow(mu3), 2
        section = ConstantSection(LagrangianSubspace.random(2, rng))
    else:
        flow, n = ProductFlow(RadialFlatFlow(mu3), HarmonicFlow(0.7), 1, 2), 3
        section = StandardFormSection(StandardFormLoop.from_dims(1, 0, 1, base=LagrangianSubspace.random(1, rng)))
    model = GeneralizedModel(flow, section, 7)
    z = rng.normal(size=(7, 2 * n)) * 0.3
    grad_a = central_difference(lambda v: model.action(v.reshape(z.shape)), z.reshape(-1)).reshape(z.shape)
    grad_e = central_difference(lambda v: model.energy(v.reshape(z.shape)), z.reshape(-1)).reshape(z.shape)
    assert np.allclose(grad_a, model.gradient(z), atol=1e-7)
    assert np.allclose(grad_e, model.energy_gradient(z), atol=1e-7)


def test_harmonic_segment_matches_quadrature():
    from scipy.integrate import quad

    flow, z0, t = HarmonicFlow(2.1), np.array([0.3, -0.7]), 0.37

    def integrand(s):
        zs = flow.apply(z0, s)
        dz = (flow.apply(z0, s + 1e-6) - flow.apply(z0, s - 1e-6)) / 2e-6
        return zs[1] * dz[0] - 0.5 * 2.1 * (z0 @ z0)

    assert quad(integrand, 0, t)[0] == pytest.approx(flow.segment(z0, t), abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_harmonic_disc_factor_is_quadratic(seed, u):
    rng = np.random.default_rng(seed)
    flow = ProductFlow(RadialFlatFlow(zero_profile()), HarmonicFlow(0.8), 1, 1)
    model = GeneralizedModel(flow, ConstantSection(LagrangianSubspace.imaginary(2)), 7)
    z1 = rng.normal(size=(7, 1, 2))
    z2 = rng.normal(size=(7, 1, 2))

    def join(a, b):
        return np.concatenate([a[:, :, 0], b[:, :, 0], a[:, :, 1], b[:, :, 1]], axis=-1)

    base = model.action(join(z1, np.zeros_like(z2)))
    disc = model.action(join(z1, z2)) - base
    scaled = model.action(join(z1, u * z2)) - base
    assert scaled == pytest.approx(u**2 * disc, abs=1e-10)


def test_pjbound_constant_is_bounded_in_r(mu3, rng):
    ks = []
    for r in (8, 16, 32):
        model = GeneralizedModel(RadialFlatFlow(mu3), ConstantSection(LagrangianSubspace.imaginary(1)), r)
        z = rng.normal(size=(500, r, 2)) * 0.2 + np.array([0.0, 1.0])
        ks.append(fit_pjbound_constant(model, z))
    assert all(np.isfinite(ks)) and max(ks) <= 2 * ks[0]
