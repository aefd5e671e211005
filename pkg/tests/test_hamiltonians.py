import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionlab.flat_geometry import CotangentPoint, FlatTorus, TorusPoint
from actionlab.hamiltonians import (
    RadialProfile,
    SlopeHitsLengthSpectrum,
    action_of_orbit,
    check_slopes,
    flow,
    flow_differential,
    grad_bounds,
    near_lagrangian,
    profile_from_dict,
    quadratic_capped,
    quadratic_scaled,
    zero_profile,
)
from actionlab.orbit_solver import enumerate_orbits


def test_winding_one_orbit_returns_after_unit_time(circle):
    h = quadratic_capped(3.0, 2.2, 0.1)
    q, p = flow(circle, h, (np.array([0.0]), np.array([1 / 3])), 1.0)
    assert min(q[0], 1 - q[0]) < 1e-12
    assert p == pytest.approx([1 / 3])


def test_zero_fibre_and_zero_profile_are_fixed(circle):
    h = quadratic_capped(3.0)
    q, p = flow(circle, h, (np.array([0.3]), np.array([0.0])), 0.7)
    assert q == pytest.approx([0.3])
    q, p = flow(circle, zero_profile(), (np.array([0.3]), np.array([0.8])), 5.0)
    assert q == pytest.approx([0.3])


def test_flow_accepts_cotangent_points(circle, mu3):
    z = CotangentPoint(TorusPoint(circle, [0.2]), [0.1])
    out = flow(circle, mu3, z, 0.5)
    assert isinstance(out, CotangentPoint)
    assert out.base.coords == pytest.approx([0.35])


def test_flow_differential_at_time_zero_is_identity(rectangle, mu3):
    assert np.allclose(flow_differential(rectangle, mu3, (np.zeros(2), np.array([0.3, -0.2])), 0.0), np.eye(4))


def test_orbit_action_examples():
    h = quadratic_capped(3.0)
    assert action_of_orbit(h, 1 / 3) == pytest.approx(1 / 6, abs=1e-14)
    assert action_of_orbit(h, 0.0) == 0.0
    # on the linear piece the tangent is the line itself
    far = np.array([2.0, 3.0, 5.0])
    assert np.allclose(action_of_orbit(h, far), -(h.h(far) - h.slope * far))
    assert np.ptp(action_of_orbit(h, far)) < 1e-12


def test_profiles_are_c2():
    for h in (quadratic_capped(3.0), quadratic_capped(3.0, 2.2, 0.1), quadratic_capped(2.5, 2.5, 0.25)):
        assert np.max(h.continuity_defects()) < 1e-12
        assert h.dh(0.0) == 0.0
        assert h.dh(10.0) == pytest.approx(h.slope)


def test_grad_bounds():
    c1, _ = grad_bounds(quadratic_capped(3.0))
    assert c1 == pytest.approx(3.0)
    assert grad_bounds(zero_profile()) == (0.0, 0.0)


def test_slope_on_the_length_spectrum_is_rejected(circle):
    with pytest.raises(SlopeHitsLengthSpectrum):
        check_slopes(circle, quadratic_capped(3.0))
    check_slopes(circle, quadratic_capped(3.0, 2.2, 0.1))


def test_profile_round_trips_through_json(mu3):
    again = RadialProfile.from_json(mu3.to_json())
    t = np.linspace(0, 2, 50)
    assert np.array_equal(again.h(t), mu3.h(t))
    assert profile_from_dict(mu3.to_dict()).slope == mu3.slope


def test_blend_interpolates_values(mu3):
    other = quadratic_capped(3.2, 2.2, 0.1)
    mid = mu3.blend(other, 0.25)
    t = np.linspace(0, 2, 101)
    assert np.allclose(mid.h(t), 0.75 * mu3.h(t) + 0.25 * other.h(t), atol=1e-12)
    assert np.max(mid.continuity_defects()) < 1e-10


def test_near_lagrangian_value_window(circle):
    mu_l, delta = 2.5, 0.05
    h = near_lagrangian(circle, mu_L=mu_l, delta=delta, mu_N=2.9)
    c1, _ = grad_bounds(h)
    assert c1 == pytest.approx(max(h.mu_L, h.mu_N), rel=0.05)
    assert np.max(h.continuity_defects()) < 1e-9
    inner_end = h.breakpoints[1]
    for fam in enumerate_orbits(circle, h):
        if fam.radius <= inner_end:
            assert -delta * mu_l < fam.action < delta * mu_l
        else:
            assert fam.action < -delta * mu_l


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(0.0, 1.5), st.floats(0, 2), st.floats(0, 2))
def test_flow_is_a_group_action_preserving_fibres(q0, p0, s, t):
    torus, h = FlatTorus((1.0,)), quadratic_capped(3.0, 2.2, 0.1)
    z = (np.array([q0]), np.array([p0]))
    once = flow(torus, h, z, s + t)
    twice = flow(torus, h, flow(torus, h, z, s), t)
    gap = (once[0] - twice[0] + 0.5) % 1.0 - 0.5
    assert abs(gap[0]) < 1e-12
    assert np.array_equal(once[1], z[1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1.5, 1.5), min_size=2, max_size=2), st.floats(0, 3))
def test_flow_differential_is_symplectic(p, t):
    torus, h = FlatTorus((1.0, 1.3)), quadratic_capped(3.0, 2.2, 0.1)
    d = flow_differential(torus, h, (np.zeros(2), np.array(p)), t)
    j = np.block([[np.zeros((2, 2)), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
    assert np.allclose(d.T @ j @ d, j, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0.85, 3.0), st.floats(1.0, 4.0), st.floats(0, 2))
def test_base_flow_is_homogeneous_on_the_linear_region(q0, size, u, t):
    torus, h = FlatTorus((1.0,)), quadratic_capped(3.0, 2.2, 0.1)
    p = np.array([size])
    base, fibre = flow(torus, h, (np.array([q0]), p), t)
    base_u, fibre_u = flow(torus, h, (np.array([q0]), u * p), t)
    assert abs((base - base_u + 0.5) % 1.0 - 0.5)[0] < 1e-12
    assert fibre_u == pytest.approx(u * fibre)


def test_quadratic_scaled_is_uncapped():
    h = quadratic_scaled(0.5)
    assert h.dh(100.0) == pytest.approx(50.0)
