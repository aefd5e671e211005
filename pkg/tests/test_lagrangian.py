import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionlab.lagrangian import (
    LagrangianSubspace,
    MismatchedMaslov,
    SampledLoop,
    SamplingTooCoarse,
    StandardFormLoop,
    homotope_to_standard_form,
    lcurve_area,
    lcurve_corner,
    loop_from_dict,
    maslov_index,
    perturb_frames,
    random_loop,
    shoelace_lambda,
    wedge_map,
)


def test_constant_loop_has_index_zero():
    frames = np.stack([np.eye(2, dtype=complex)] * 9)
    assert maslov_index(SampledLoop(frames)) == 0


def test_half_turn_of_the_real_line_has_index_one():
    assert maslov_index(lambda t: np.array([[np.exp(1j * np.pi * t)]])) == 1


def test_standard_form_example():
    assert maslov_index(StandardFormLoop.from_dims(2, 1, 1)) == 1


def test_coarse_sampling_is_rejected():
    loop = StandardFormLoop.from_dims(3, 0, 0).sample(4)
    with pytest.raises(SamplingTooCoarse):
        maslov_index(loop)


@pytest.mark.parametrize("n2", [1, 2, 3, 4])
def test_standard_form_index_is_dim_difference(n2, rng):
    for dp in range(n2 + 1):
        for dm in range(n2 + 1 - dp):
            rot, _ = np.linalg.qr(rng.normal(size=(n2, n2)))
            loop = StandardFormLoop.from_dims(dp, dm, n2 - dp - dm, rotation=rot)
            assert maslov_index(loop) == dp - dm
            assert maslov_index(loop.sample(256)) == dp - dm


def test_subspace_checks(rng):
    L = LagrangianSubspace.random(3, rng)
    assert L.isotropy_defect() < 1e-10
    assert L.same_plane(LagrangianSubspace(L.frame @ np.linalg.qr(rng.normal(size=(3, 3)))[0]))
    assert not LagrangianSubspace.real(1).same_plane(LagrangianSubspace.imaginary(1))
    with pytest.raises(ValueError):
        LagrangianSubspace(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_standard_form_verifier(rng):
    claim = StandardFormLoop.from_dims(2, 1, 0)
    sampled = claim.sample(256)
    assert homotope_to_standard_form(sampled, claim).passed
    assert homotope_to_standard_form(perturb_frames(sampled, 1e-3, rng), claim).passed
    swapped = homotope_to_standard_form(sampled, claim.swapped())
    assert not swapped.passed and swapped.sampled_index - swapped.claimed_index == 2 * (2 - 1)
    with pytest.raises(MismatchedMaslov):
        homotope_to_standard_form(sampled, claim.swapped(), strict=True)


def test_loop_serialization_round_trip():
    claim = StandardFormLoop.from_dims(1, 2, 1)
    again = loop_from_dict(claim.to_dict())
    assert maslov_index(again) == -1
    sampled = claim.sample(128)
    assert maslov_index(loop_from_dict(sampled.to_dict())) == -1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_additivity_stabilization_and_gauge(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    a = random_loop(n, rng.integers(-2, 3, size=n), rng, m=256)
    b = random_loop(n, rng.integers(-2, 3, size=n), rng, m=256)
    ia, ib = maslov_index(a), maslov_index(b)
    assert maslov_index(a.concatenate(b)) == ia + ib
    assert maslov_index(a.stabilize()) == ia
    assert maslov_index(a.regauged(rng)) == ia


def test_wedge_map_examples(rng):
    L = LagrangianSubspace.real(2)
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    u = rng.normal(size=2).astype(complex)
    end, mid = wedge_map(L, z, u)
    assert np.allclose(end, z + u) and np.allclose(mid, z + u)
    end, mid = wedge_map(L, z, np.zeros(2))
    assert np.allclose(end, z) and np.allclose(mid, z)
    u = rng.normal(size=2) + 1j * rng.normal(size=2)
    end, mid = wedge_map(LagrangianSubspace.imaginary(2), z, u)
    assert np.allclose(mid, z + 1j * u.imag)


def test_lcurve_examples():
    L = LagrangianSubspace.imaginary(1)
    assert lcurve_area(L, np.array([0.3 + 0.2j]), np.array([0.3 + 0.2j])) == 0.0
    assert lcurve_area(L, np.array([1.0 + 0j]), np.array([0j])) == 0.0
    assert lcurve_corner(L, np.array([1.0 + 0j]), np.array([0j])) == pytest.approx([1.0])


def test_lcurves_around_a_pentagon_give_the_shoelace_value():
    L = LagrangianSubspace.imaginary(1)
    z = np.exp(2j * np.pi * np.arange(5) / 5)
    total = sum(lcurve_area(L, z[(j + 1) % 5 : (j + 1) % 5 + 1], z[j : j + 1]) for j in range(5))
    assert total == pytest.approx(-(5 / 2) * np.sin(2 * np.pi / 5), abs=1e-12)
    assert shoelace_lambda(z) == pytest.approx(total, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 12))
def test_lcurve_sum_over_a_polygon_is_sum_y_dx(seed, r):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=r) + 1j * rng.normal(size=r)
    L = LagrangianSubspace.imaginary(1)
    total = sum(lcurve_area(L, z[[(j + 1) % r]], z[[j]]) for j in range(r))
    assert total == pytest.approx(np.sum(z.imag * (np.roll(z.real, -1) - z.real)), abs=1e-12)
